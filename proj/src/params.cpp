//
// params.cpp
//
// Expressive-parameter extraction from labelled stroke frames. Velocity and
// acceleration are differentiated from smoothed wrist positions; path length
// uses the raw positions; swivel is aggregated with a circular mean.
//

#include "params.hpp"

#include <cmath>

#include "error.hpp"

namespace gm {

const char* hand_name(Hand hand) {
    switch (hand) {
    case Hand::left: return "left";
    case Hand::right: return "right";
    case Hand::both: return "both";
    }
    return "?";
}

Hand hand_from_name(std::string_view name) {
    if (name == "left") return Hand::left;
    if (name == "right") return Hand::right;
    if (name == "both") return Hand::both;
    fail(Errc::parse, "unknown hand '" + std::string(name) + "' (expected left, right, or both)");
}

ResolvedSide resolve_side(const Skeleton& skeleton, const SideJoints& side) {
    auto resolve = [&](const std::string& name) {
        int index = skeleton.find_joint(name);
        if (index == -1) fail(Errc::not_found, "joint '" + name + "' not found in skeleton");
        if (index == -2) fail(Errc::not_found, "joint name '" + name + "' is ambiguous");
        return index;
    };
    ResolvedSide resolved;
    resolved.shoulder = resolve(side.shoulder);
    resolved.elbow = resolve(side.elbow);
    resolved.wrist = resolve(side.wrist);
    for (const std::string& tip : side.fingertips) resolved.fingertips.push_back(resolve(tip));
    return resolved;
}

double swivel_angle(const Eigen::Vector3d& shoulder, const Eigen::Vector3d& elbow,
                    const Eigen::Vector3d& wrist) {
    constexpr double kEps = 1e-6;

    const Eigen::Vector3d axis = wrist - shoulder;
    if (axis.norm() < kEps) fail(Errc::degenerate, "shoulder and wrist coincide");
    const Eigen::Vector3d a = axis.normalized();

    const Eigen::Vector3d upper = elbow - shoulder;
    const Eigen::Vector3d perp = upper - upper.dot(a) * a;
    if (perp.norm() < kEps) fail(Errc::degenerate, "elbow lies on the shoulder-wrist axis");

    Eigen::Vector3d ref = Eigen::Vector3d(0.0, -1.0, 0.0);
    ref -= ref.dot(a) * a;
    if (ref.norm() < kEps) {
        ref = Eigen::Vector3d(0.0, 0.0, 1.0);
        ref -= ref.dot(a) * a;
    }

    const Eigen::Vector3d r = ref.normalized();
    const Eigen::Vector3d p = perp.normalized();
    double angle = std::atan2(r.cross(p).dot(a), r.dot(p));
    if (angle <= -M_PI) angle = M_PI;
    return angle;
}

std::vector<Eigen::Vector3d> smooth_positions(std::span<const Eigen::Vector3d> positions,
                                              int window) {
    const auto n = static_cast<long>(positions.size());
    std::vector<Eigen::Vector3d> out(positions.begin(), positions.end());
    if (window <= 1 || n < 3) return out;

    const long half = window / 2;
    for (long i = 0; i < n; ++i) {
        const long h = std::min({half, i, n - 1 - i});
        if (h == 0) continue;
        Eigen::Vector3d sum = Eigen::Vector3d::Zero();
        for (long k = i - h; k <= i + h; ++k) sum += positions[k];
        out[i] = sum / static_cast<double>(2 * h + 1);
    }
    return out;
}

namespace {

std::vector<Eigen::Vector3d> central_difference(std::span<const Eigen::Vector3d> values,
                                                double dt) {
    const std::size_t n = values.size();
    std::vector<Eigen::Vector3d> out(n);
    out[0] = (values[1] - values[0]) / dt;
    out[n - 1] = (values[n - 1] - values[n - 2]) / dt;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
    return out;
}

// First local maximum of the acceleration magnitude within the first 40% of
// the stroke; global maximum when none exists there.
double initial_accel_peak(std::span<const double> accel) {
    const auto n = static_cast<long>(accel.size());
    const long limit = static_cast<long>(std::floor(0.4 * static_cast<double>(n - 1)));
    for (long i = 1; i <= std::min(limit, n - 2); ++i) {
        if (accel[i] > accel[i - 1] && accel[i] >= accel[i + 1]) return accel[i];
    }
    double peak = 0.0;
    for (double a : accel) peak = std::max(peak, a);
    return peak;
}

struct SideMetrics {
    ExpressiveParams params;
    bool swivel_degenerate = false;
};

SideMetrics analyze_side(const Skeleton& skeleton, const MotionClip& stroke,
                         const ResolvedSide& side, int smoothing_window) {
    const std::size_t n = stroke.frame_count();

    std::vector<Eigen::Vector3d> wrist(n);
    std::vector<Eigen::Vector3d> shoulder(n);
    std::vector<Eigen::Vector3d> elbow(n);
    std::vector<std::vector<Eigen::Vector3d>> tips(side.fingertips.size(),
                                                   std::vector<Eigen::Vector3d>(n));
    for (std::size_t f = 0; f < n; ++f) {
        const Pose pose = forward_kinematics(skeleton, stroke.frame(f));
        wrist[f] = pose.positions[side.wrist];
        shoulder[f] = pose.positions[side.shoulder];
        elbow[f] = pose.positions[side.elbow];
        for (std::size_t t = 0; t < tips.size(); ++t)
            tips[t][f] = pose.positions[side.fingertips[t]];
    }

    SideMetrics metrics;
    ExpressiveParams& p = metrics.params;
    const double dt = stroke.frame_time;

    const std::vector<Eigen::Vector3d> smoothed = smooth_positions(wrist, smoothing_window);
    const std::vector<Eigen::Vector3d> vel = central_difference(smoothed, dt);
    const std::vector<Eigen::Vector3d> acc = central_difference(vel, dt);

    double speed_sum = 0.0;
    for (const auto& v : vel) speed_sum += v.norm();
    p.velocity = speed_sum / static_cast<double>(n);

    std::vector<double> accel_mag(n);
    for (std::size_t i = 0; i < n; ++i) accel_mag[i] = acc[i].norm();
    p.accel_peak = initial_accel_peak(accel_mag);

    for (std::size_t i = 0; i + 1 < n; ++i) p.path_length += (wrist[i + 1] - wrist[i]).norm();

    double sin_sum = 0.0;
    double cos_sum = 0.0;
    std::size_t valid = 0;
    for (std::size_t i = 0; i < n; ++i) {
        try {
            const double angle = swivel_angle(shoulder[i], elbow[i], wrist[i]);
            sin_sum += std::sin(angle);
            cos_sum += std::cos(angle);
            ++valid;
        } catch (const Error& e) {
            if (e.code() != Errc::degenerate) throw;
        }
    }
    if (valid * 2 < n || valid == 0) {
        p.swivel = 0.0;
        metrics.swivel_degenerate = true;
    } else {
        p.swivel = std::atan2(sin_sum, cos_sum);
        if (p.swivel <= -M_PI) p.swivel = M_PI;
    }

    if (!tips.empty()) {
        double distance_sum = 0.0;
        for (const auto& tip : tips)
            for (std::size_t i = 0; i < n; ++i) distance_sum += (tip[i] - wrist[i]).norm();
        p.hand_opening = distance_sum / static_cast<double>(tips.size() * n);
    }
    return metrics;
}

} // namespace

ExpressiveParams compute_expressive_params(const Skeleton& skeleton, const MotionClip& clip,
                                           const StrokeLabel& label, const JointMap& joint_map,
                                           int smoothing_window,
                                           std::vector<std::string>* warnings) {
    const MotionClip stroke = slice_clip(clip, label.start_s, label.end_s);
    if (stroke.frame_count() < 3)
        fail(Errc::invalid_argument, "stroke too short: " + std::to_string(stroke.frame_count()) +
                                         " frames, need at least 3 to differentiate");

    SideMetrics chosen;
    if (label.hand == Hand::both) {
        // Dominant-motion side carries all five parameters.
        const SideMetrics left =
            analyze_side(skeleton, stroke, resolve_side(skeleton, joint_map.left), smoothing_window);
        const SideMetrics right = analyze_side(skeleton, stroke, resolve_side(skeleton, joint_map.right),
                                               smoothing_window);
        chosen = right.params.path_length >= left.params.path_length ? right : left;
    } else {
        const SideJoints& side = label.hand == Hand::left ? joint_map.left : joint_map.right;
        chosen = analyze_side(skeleton, stroke, resolve_side(skeleton, side), smoothing_window);
    }

    if (chosen.swivel_degenerate && warnings)
        warnings->push_back("stroke in '" + label.clip_id +
                            "': swivel degenerate on most frames, set to 0");
    return chosen.params;
}

} // namespace gm
