#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "database.hpp"
#include "matcher.hpp"

namespace gm {

struct PoseRef {
    enum class Kind { rest, stroke_start, stroke_end };
    Kind kind = Kind::rest;
    int stroke = -1; // selection index for the stroke_* kinds
};

struct Segment {
    enum class Type { stroke, transition, hold };
    Type type = Type::hold;
    double start_s = 0.0;
    double end_s = 0.0;
    int stroke = -1;   // stroke segments: selection index
    int entry_id = -1; // stroke segments: database entry
    PoseRef from;      // transitions; holds use `from` as the held pose
    PoseRef to;
};

// Segments tile [0, timeline] exactly; every stroke starts at its slot start.
struct AssemblyPlan {
    std::vector<Segment> segments;
    double timeline_s = 0.0;
};

struct AssemblyConfig {
    double prep_s = 0.5;           // preparation / retraction duration
    double hold_threshold_s = 1.5; // gaps longer than this go through rest
};

// Neutral stance the character returns to between distant gestures.
struct RestPose {
    std::vector<double> channels;
};

AssemblyPlan plan_assembly(const GestureDatabase& db, const SlotSequence& slots,
                           std::span<const MatchResult> selections, double timeline_s,
                           const AssemblyConfig& config = {});

void validate_plan(const AssemblyPlan& plan, const GestureDatabase& db);

// Blend between two channel frames: rotations take the shortest arc on the
// rotation manifold, root translation is linear, and time is warped by
// smoothstep so endpoint velocities are zero. The first frame equals `from`
// and the frame at t = duration equals `to`.
MotionClip synthesize_transition(const Skeleton& skeleton, std::span<const double> from,
                                 std::span<const double> to, double duration_s, double fps);

// One interpolated frame at eased parameter s in [0, 1].
void interpolate_frame(const Skeleton& skeleton, std::span<const double> from,
                       std::span<const double> to, double eased, std::span<double> out);

inline double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

struct RenderReport {
    double max_join_step_deg = 0.0;
    double max_stroke_step_deg = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> segment_frames; // [first, last) per segment
    std::vector<std::string> warnings;
};

MotionClip render_sequence(const Skeleton& skeleton, const GestureDatabase& db,
                           const AssemblyPlan& plan, const RestPose& rest, double fps,
                           RenderReport* report = nullptr);

} // namespace gm
