#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "mocap.hpp"

namespace gm {

// The five per-stroke scalars used for matching: mean wrist speed, first
// acceleration peak, total wrist path length, arm swivel about the
// shoulder-wrist axis, and mean fingertip-to-wrist distance.
struct ExpressiveParams {
    double velocity = 0.0;     // scene units / s
    double accel_peak = 0.0;   // scene units / s^2
    double path_length = 0.0;  // scene units
    double swivel = 0.0;       // radians in (-pi, pi]
    double hand_opening = 0.0; // scene units

    std::array<double, 5> as_array() const {
        return {velocity, accel_peak, path_length, swivel, hand_opening};
    }
    static ExpressiveParams from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
};

inline constexpr std::array<const char*, 5> kParamNames = {
    "velocity", "accel_peak", "path_length", "swivel", "hand_opening"};

inline constexpr int kSwivelIndex = 3;

enum class Hand { left, right, both };

const char* hand_name(Hand hand);
Hand hand_from_name(std::string_view name);

struct StrokeLabel {
    std::string clip_id;
    double start_s = 0.0;
    double end_s = 0.0;
    Hand hand = Hand::right;
};

struct SideJoints {
    std::string shoulder;
    std::string elbow;
    std::string wrist;
    std::vector<std::string> fingertips;
};

// Binds the anatomical names used by the parameter analysis to skeleton
// joints. Fingertips may name end sites ("<joint>_end").
struct JointMap {
    SideJoints left;
    SideJoints right;
};

struct ResolvedSide {
    int shoulder = -1;
    int elbow = -1;
    int wrist = -1;
    std::vector<int> fingertips;
};

ResolvedSide resolve_side(const Skeleton& skeleton, const SideJoints& side);

// Rotation of the elbow about the shoulder-wrist axis, measured from the
// world-down reference projected off the axis. Range (-pi, pi]. Throws
// Errc::degenerate when shoulder ~= wrist or the elbow lies on the axis.
double swivel_angle(const Eigen::Vector3d& shoulder, const Eigen::Vector3d& elbow,
                    const Eigen::Vector3d& wrist);

// Centered moving average with the window shrunk symmetrically at the
// boundaries, which keeps linear trajectories exact.
std::vector<Eigen::Vector3d> smooth_positions(std::span<const Eigen::Vector3d> positions,
                                              int window);

ExpressiveParams compute_expressive_params(const Skeleton& skeleton, const MotionClip& clip,
                                           const StrokeLabel& label, const JointMap& joint_map,
                                           int smoothing_window = 5,
                                           std::vector<std::string>* warnings = nullptr);

} // namespace gm
