#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gm {

enum class Channel { Xposition, Yposition, Zposition, Xrotation, Yrotation, Zrotation };

const char* channel_name(Channel c);
bool is_rotation_channel(Channel c);

struct Joint {
    std::string name;
    int parent = -1; // -1 for the root
    Eigen::Vector3d offset = Eigen::Vector3d::Zero();
    std::vector<Channel> channels; // empty for end sites
    bool end_site = false;
};

// Joint hierarchy in topological order (parent index < joint index, exactly
// one root). End sites are kept as zero-channel joints so FK reaches them.
struct Skeleton {
    std::vector<Joint> joints;

    std::size_t channel_count() const;
    // First flat channel column of each joint, plus a trailing total.
    std::vector<std::size_t> channel_offsets() const;
    // Index of the uniquely named joint, -1 if absent, -2 if ambiguous.
    int find_joint(std::string_view name) const;

    void validate() const;
};

// Uniformly sampled channel values, frame-major. Translations are in scene
// units, rotations in degrees (BVH convention).
struct MotionClip {
    double frame_time = 0.0;
    std::size_t channel_count = 0;
    std::vector<double> values;

    std::size_t frame_count() const { return channel_count ? values.size() / channel_count : 0; }
    double duration() const { return static_cast<double>(frame_count()) * frame_time; }
    std::span<const double> frame(std::size_t i) const {
        return {values.data() + i * channel_count, channel_count};
    }
    std::span<double> frame(std::size_t i) { return {values.data() + i * channel_count, channel_count}; }
};

struct Pose {
    std::vector<Eigen::Vector3d> positions;
    std::vector<Eigen::Quaterniond> orientations;
};

struct BvhDocument {
    Skeleton skeleton;
    MotionClip clip;
    std::vector<std::string> warnings;
};

BvhDocument parse_bvh(std::string_view text);
std::string serialize_bvh(const Skeleton& skeleton, const MotionClip& clip);

Pose forward_kinematics(const Skeleton& skeleton, std::span<const double> frame);

// Frames whose nearest-sample timestamps lie in [t0, t1).
MotionClip slice_clip(const MotionClip& clip, double t0, double t1);

// Nearest-sample index for time t, clamped to the clip.
std::size_t nearest_frame(const MotionClip& clip, double t);

// Per-joint channel access shared by FK and the assembler. `joint_values`
// is the slice of a frame covering exactly this joint's channels.
Eigen::Quaterniond joint_rotation(const Joint& joint, std::span<const double> joint_values);
Eigen::Vector3d joint_translation(const Joint& joint, std::span<const double> joint_values);
void set_joint_rotation(const Joint& joint, const Eigen::Quaterniond& rotation,
                        std::span<double> joint_values);

} // namespace gm
