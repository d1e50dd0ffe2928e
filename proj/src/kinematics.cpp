//
// kinematics.cpp
//
// Forward kinematics and channel <-> rotation conversion. Euler angles are
// intrinsic in the joint's declared channel order; extraction returns the
// canonical branch (middle angle in [-pi/2, pi/2]).
//

#include "mocap.hpp"

#include <cmath>

#include "error.hpp"

namespace gm {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;

int channel_axis(Channel c) {
    switch (c) {
    case Channel::Xposition:
    case Channel::Xrotation: return 0;
    case Channel::Yposition:
    case Channel::Yrotation: return 1;
    case Channel::Zposition:
    case Channel::Zrotation: return 2;
    }
    return 0;
}

Eigen::Vector3d axis_vector(int axis) {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    v[axis] = 1.0;
    return v;
}

// R = R(axis0, a) * R(axis1, b) * R(axis2, c) with all axes distinct.
// Returns (a, b, c) in radians.
Eigen::Vector3d euler_from_matrix(const Eigen::Matrix3d& m, int i, int j, int k) {
    // Parity of the axis permutation.
    const double eps = ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;

    double sb = eps * m(i, k);
    sb = std::clamp(sb, -1.0, 1.0);
    const double b = std::asin(sb);

    double a, c;
    if (std::abs(sb) < 1.0 - 1e-9) {
        a = std::atan2(-eps * m(j, k), m(k, k));
        c = std::atan2(-eps * m(i, j), m(i, i));
    } else {
        // Gimbal lock: fold everything into the first angle.
        c = 0.0;
        Eigen::Matrix3d rest =
            m * Eigen::AngleAxisd(-b, axis_vector(j)).toRotationMatrix();
        const int u = (i + 1) % 3;
        const int v = (i + 2) % 3;
        a = std::atan2(rest(v, u), rest(u, u));
    }
    return {a, b, c};
}

} // namespace

Eigen::Quaterniond joint_rotation(const Joint& joint, std::span<const double> joint_values) {
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    for (std::size_t c = 0; c < joint.channels.size(); ++c) {
        if (!is_rotation_channel(joint.channels[c])) continue;
        const double radians = joint_values[c] * kDegToRad;
        q = q * Eigen::Quaterniond(
                    Eigen::AngleAxisd(radians, axis_vector(channel_axis(joint.channels[c]))));
    }
    q.normalize();
    return q;
}

Eigen::Vector3d joint_translation(const Joint& joint, std::span<const double> joint_values) {
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    for (std::size_t c = 0; c < joint.channels.size(); ++c) {
        if (is_rotation_channel(joint.channels[c])) continue;
        t[channel_axis(joint.channels[c])] += joint_values[c];
    }
    return t;
}

void set_joint_rotation(const Joint& joint, const Eigen::Quaterniond& rotation,
                        std::span<double> joint_values) {
    int axes[3];
    int slots[3];
    int n = 0;
    for (std::size_t c = 0; c < joint.channels.size(); ++c) {
        if (!is_rotation_channel(joint.channels[c])) continue;
        if (n == 3) fail(Errc::invalid_argument, "joint has more than three rotation channels");
        axes[n] = channel_axis(joint.channels[c]);
        slots[n] = static_cast<int>(c);
        ++n;
    }
    if (n == 0) return;
    if (n != 3) fail(Errc::invalid_argument, "joint rotation requires three rotation channels");

    const Eigen::Vector3d angles =
        euler_from_matrix(rotation.normalized().toRotationMatrix(), axes[0], axes[1], axes[2]);
    for (int c = 0; c < 3; ++c) joint_values[slots[c]] = angles[c] * kRadToDeg;
}

Pose forward_kinematics(const Skeleton& skeleton, std::span<const double> frame) {
    if (frame.size() != skeleton.channel_count())
        fail(Errc::mismatch, "frame has " + std::to_string(frame.size()) + " values, skeleton has " +
                                 std::to_string(skeleton.channel_count()) + " channels");
    for (double v : frame)
        if (!std::isfinite(v)) fail(Errc::invalid_argument, "non-finite channel value");

    const std::size_t n = skeleton.joints.size();
    const std::vector<std::size_t> offsets = skeleton.channel_offsets();

    Pose pose;
    pose.positions.resize(n);
    pose.orientations.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Joint& joint = skeleton.joints[i];
        auto values = frame.subspan(offsets[i], joint.channels.size());
        const Eigen::Quaterniond local_rotation = joint_rotation(joint, values);
        const Eigen::Vector3d local_offset = joint.offset + joint_translation(joint, values);
        if (joint.parent < 0) {
            pose.positions[i] = local_offset;
            pose.orientations[i] = local_rotation;
        } else {
            pose.positions[i] =
                pose.positions[joint.parent] + pose.orientations[joint.parent] * local_offset;
            pose.orientations[i] = pose.orientations[joint.parent] * local_rotation;
            pose.orientations[i].normalize();
        }
    }
    return pose;
}

std::size_t nearest_frame(const MotionClip& clip, double t) {
    if (clip.frame_count() == 0) fail(Errc::empty, "clip has no frames");
    auto index = static_cast<long long>(std::llround(t / clip.frame_time));
    if (index < 0) index = 0;
    const auto last = static_cast<long long>(clip.frame_count()) - 1;
    if (index > last) index = last;
    return static_cast<std::size_t>(index);
}

MotionClip slice_clip(const MotionClip& clip, double t0, double t1) {
    const double duration = clip.duration();
    if (!(t0 >= 0.0) || !(t0 < t1) || t1 > duration + 0.5 * clip.frame_time)
        fail(Errc::invalid_argument,
             "slice [" + std::to_string(t0) + ", " + std::to_string(t1) + ") out of range for clip of " +
                 std::to_string(duration) + " s");

    const auto total = static_cast<long long>(clip.frame_count());
    long long first = std::llround(t0 / clip.frame_time);
    long long last = std::llround(t1 / clip.frame_time);
    if (first > total - 1) first = total - 1;
    if (first < 0) first = 0;
    if (last < first + 1) last = first + 1;
    if (last > total) last = total;

    MotionClip out;
    out.frame_time = clip.frame_time;
    out.channel_count = clip.channel_count;
    out.values.assign(clip.values.begin() + first * clip.channel_count,
                      clip.values.begin() + last * clip.channel_count);
    return out;
}

} // namespace gm
