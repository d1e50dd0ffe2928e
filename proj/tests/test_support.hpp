#pragma once

// Shared fixtures for the test suites: a two-arm skeleton with finger end
// sites, clip builders driven by per-frame callbacks, and synthetic
// databases with prescribed parameter vectors and durations.

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "database.hpp"
#include "matcher.hpp"
#include "params.hpp"

namespace gmtest {

using namespace gm;

inline Joint make_joint(std::string name, int parent, Eigen::Vector3d offset,
                        std::vector<Channel> channels, bool end_site = false) {
    Joint j;
    j.name = std::move(name);
    j.parent = parent;
    j.offset = std::move(offset);
    j.channels = std::move(channels);
    j.end_site = end_site;
    return j;
}

inline const std::vector<Channel> kRootChannels = {Channel::Xposition, Channel::Yposition,
                                                   Channel::Zposition, Channel::Zrotation,
                                                   Channel::Xrotation, Channel::Yrotation};
inline const std::vector<Channel> kRotChannels = {Channel::Zrotation, Channel::Xrotation,
                                                  Channel::Yrotation};

// Hips -> shoulder -> elbow -> wrist -> two fingers (+ end sites) per side.
// With all rotations zero the right wrist sits at hips + (-2, -5, 0).
inline Skeleton make_arm_skeleton() {
    Skeleton s;
    s.joints.push_back(make_joint("Hips", -1, {0.0, 10.0, 0.0}, kRootChannels));
    auto add_side = [&](const std::string& prefix, double sign) {
        const int hips = 0;
        const int shoulder = static_cast<int>(s.joints.size());
        s.joints.push_back(
            make_joint(prefix + "Shoulder", hips, {sign * 2.0, 0.0, 0.0}, kRotChannels));
        const int elbow = static_cast<int>(s.joints.size());
        s.joints.push_back(make_joint(prefix + "Elbow", shoulder, {0.0, -3.0, 0.0}, kRotChannels));
        const int wrist = static_cast<int>(s.joints.size());
        s.joints.push_back(make_joint(prefix + "Wrist", elbow, {0.0, -2.0, 0.0}, kRotChannels));
        const int finger1 = static_cast<int>(s.joints.size());
        s.joints.push_back(make_joint(prefix + "Finger1", wrist, {0.0, -0.8, 0.0}, kRotChannels));
        s.joints.push_back(make_joint(prefix + "Finger1_end", finger1, {0.0, -0.4, 0.0}, {}, true));
        const int finger2 = static_cast<int>(s.joints.size());
        s.joints.push_back(
            make_joint(prefix + "Finger2", wrist, {sign * 0.3, -0.7, 0.0}, kRotChannels));
        s.joints.push_back(make_joint(prefix + "Finger2_end", finger2, {0.0, -0.3, 0.0}, {}, true));
    };
    add_side("R", -1.0);
    add_side("L", 1.0);
    s.validate();
    return s;
}

inline JointMap make_arm_joint_map() {
    JointMap map;
    map.right = {"RShoulder", "RElbow", "RWrist", {"RFinger1", "RFinger2"}};
    map.left = {"LShoulder", "LElbow", "LWrist", {"LFinger1", "LFinger2"}};
    return map;
}

inline MotionClip make_clip(const Skeleton& skeleton, std::size_t frames, double frame_time,
                            const std::function<void(std::size_t, std::span<double>)>& fill) {
    MotionClip clip;
    clip.frame_time = frame_time;
    clip.channel_count = skeleton.channel_count();
    clip.values.assign(frames * clip.channel_count, 0.0);
    for (std::size_t f = 0; f < frames; ++f) fill(f, clip.frame(f));
    return clip;
}

// Single root joint with three rotation channels; the smallest legal rig.
inline Skeleton make_minimal_skeleton() {
    Skeleton s;
    s.joints.push_back(make_joint("Root", -1, {0.0, 0.0, 0.0}, kRotChannels));
    return s;
}

// Database with prescribed parameter vectors and per-entry frame counts;
// embedded motion is zero-filled and only matters for its duration.
inline GestureDatabase make_param_db(const std::vector<ExpressiveParams>& params,
                                     const std::vector<std::size_t>& frame_counts,
                                     double frame_time = 1.0 / 60.0) {
    GestureDatabase db;
    db.skeleton = make_minimal_skeleton();
    db.frame_time = frame_time;
    for (std::size_t i = 0; i < params.size(); ++i) {
        GestureEntry e;
        e.id = static_cast<int>(i);
        e.clip_id = "synthetic";
        e.hand = Hand::right;
        e.params = params[i];
        const std::size_t frames = frame_counts.size() == 1 ? frame_counts[0] : frame_counts[i];
        e.motion.frame_time = frame_time;
        e.motion.channel_count = db.skeleton.channel_count();
        e.motion.values.assign(frames * e.motion.channel_count, 0.0);
        e.frame_first = 0;
        e.frame_last = frames;
        e.duration_s = static_cast<double>(frames) * frame_time;
        db.entries.push_back(std::move(e));
    }
    return db;
}

inline ExpressiveParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ExpressiveParams p;
    p.velocity = unit(rng) * 10.0;
    p.accel_peak = unit(rng) * 50.0;
    p.path_length = unit(rng) * 5.0;
    p.swivel = (unit(rng) * 2.0 - 1.0) * M_PI;
    p.hand_opening = unit(rng) * 2.0;
    return p;
}

inline GestureDatabase make_random_db(std::size_t n, std::mt19937_64& rng,
                                      std::size_t min_frames = 6, std::size_t max_frames = 90) {
    std::vector<ExpressiveParams> params;
    std::vector<std::size_t> frames;
    std::uniform_int_distribution<std::size_t> frame_dist(min_frames, max_frames);
    for (std::size_t i = 0; i < n; ++i) {
        params.push_back(random_params(rng));
        frames.push_back(frame_dist(rng));
    }
    return make_param_db(params, frames);
}

// Scratch directory under the system temp root, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("gesturematch_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream stream(path, std::ios::binary);
    stream << content;
}

} // namespace gmtest
