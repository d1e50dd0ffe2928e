//
// assembler.cpp
//
// Joins selected strokes into one continuous clip. Strokes play verbatim at
// their slot onset; preparation, retraction, and inter-gesture transitions
// are synthesized by smoothstep-eased pose interpolation.
//

#include "assembler.hpp"

#include <cmath>

#include "error.hpp"

namespace gm {

namespace {

void unwrap_rotation_channels(const Skeleton& skeleton, std::span<const double> previous,
                              std::span<double> frame) {
    std::size_t column = 0;
    for (const Joint& joint : skeleton.joints) {
        for (Channel c : joint.channels) {
            if (is_rotation_channel(c)) {
                const double delta = previous[column] - frame[column];
                frame[column] += 360.0 * std::round(delta / 360.0);
            }
            ++column;
        }
    }
}

} // namespace

AssemblyPlan plan_assembly(const GestureDatabase& db, const SlotSequence& slots,
                           std::span<const MatchResult> selections, double timeline_s,
                           const AssemblyConfig& config) {
    validate_slots(slots);
    if (selections.size() != slots.slots.size())
        fail(Errc::mismatch, std::to_string(selections.size()) + " selections for " +
                                 std::to_string(slots.slots.size()) + " slots");
    if (timeline_s < slots.timeline_s - 1e-9)
        fail(Errc::invalid_argument, "timeline shorter than the slot sequence");

    AssemblyPlan plan;
    plan.timeline_s = timeline_s;

    const std::size_t n = slots.slots.size();
    std::vector<double> stroke_start(n);
    std::vector<double> stroke_end(n);
    for (std::size_t i = 0; i < n; ++i) {
        const GestureEntry& entry = db.entry(selections[i].entry_id);
        stroke_start[i] = slots.slots[i].start_s;
        stroke_end[i] = stroke_start[i] + entry.duration_s;
        if (i + 1 < n && stroke_end[i] > slots.slots[i + 1].start_s + 1e-9)
            fail(Errc::invalid_argument, "stroke " + std::to_string(i) + " (entry " +
                                             std::to_string(selections[i].entry_id) +
                                             ") overlaps the next slot");
        if (stroke_end[i] > timeline_s + 1e-9)
            fail(Errc::invalid_argument, "stroke " + std::to_string(i) + " extends past the timeline");
    }

    auto add = [&](Segment segment) {
        if (segment.end_s > segment.start_s) plan.segments.push_back(segment);
    };
    const PoseRef rest_ref{PoseRef::Kind::rest, -1};
    auto start_ref = [](std::size_t i) { return PoseRef{PoseRef::Kind::stroke_start, static_cast<int>(i)}; };
    auto end_ref = [](std::size_t i) { return PoseRef{PoseRef::Kind::stroke_end, static_cast<int>(i)}; };

    if (n == 0) {
        add({Segment::Type::hold, 0.0, timeline_s, -1, -1, rest_ref, rest_ref});
        return plan;
    }

    // Lead-in: hold at rest, then a preparation into the first stroke.
    {
        const double gap = stroke_start[0];
        if (gap > 0.0) {
            const double prep = std::min(config.prep_s, gap);
            const double prep_begin = stroke_start[0] - prep;
            add({Segment::Type::hold, 0.0, prep_begin, -1, -1, rest_ref, rest_ref});
            add({Segment::Type::transition, prep_begin, stroke_start[0], -1, -1, rest_ref,
                 start_ref(0)});
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        add({Segment::Type::stroke, stroke_start[i], stroke_end[i], static_cast<int>(i),
             selections[i].entry_id, start_ref(i), end_ref(i)});

        const bool last = i + 1 == n;
        const double next = last ? timeline_s : stroke_start[i + 1];
        const double gap = next - stroke_end[i];
        if (gap <= 0.0) continue;

        if (last) {
            const double retract = std::min(config.prep_s, gap);
            const double rest_begin = stroke_end[i] + retract;
            add({Segment::Type::transition, stroke_end[i], rest_begin, -1, -1, end_ref(i), rest_ref});
            add({Segment::Type::hold, rest_begin, timeline_s, -1, -1, rest_ref, rest_ref});
        } else if (gap > config.hold_threshold_s) {
            const double retract = std::min(config.prep_s, gap / 2.0);
            const double prep = std::min(config.prep_s, gap / 2.0);
            const double rest_begin = stroke_end[i] + retract;
            const double prep_begin = next - prep;
            add({Segment::Type::transition, stroke_end[i], rest_begin, -1, -1, end_ref(i), rest_ref});
            add({Segment::Type::hold, rest_begin, prep_begin, -1, -1, rest_ref, rest_ref});
            add({Segment::Type::transition, prep_begin, next, -1, -1, rest_ref, start_ref(i + 1)});
        } else {
            add({Segment::Type::transition, stroke_end[i], next, -1, -1, end_ref(i),
                 start_ref(i + 1)});
        }
    }
    return plan;
}

void validate_plan(const AssemblyPlan& plan, const GestureDatabase& db) {
    if (plan.timeline_s < 0.0) fail(Errc::invalid_argument, "negative timeline");
    if (plan.segments.empty()) {
        if (plan.timeline_s > 0.0) fail(Errc::invalid_argument, "plan does not cover the timeline");
        return;
    }
    if (plan.segments.front().start_s != 0.0)
        fail(Errc::invalid_argument, "plan does not start at t = 0");
    if (plan.segments.back().end_s != plan.timeline_s)
        fail(Errc::invalid_argument, "plan does not end at the timeline");
    for (std::size_t i = 0; i < plan.segments.size(); ++i) {
        const Segment& s = plan.segments[i];
        if (!(s.end_s > s.start_s))
            fail(Errc::invalid_argument, "segment " + std::to_string(i) + " has no extent");
        if (i > 0 && plan.segments[i - 1].end_s != s.start_s)
            fail(Errc::invalid_argument, "gap or overlap before segment " + std::to_string(i));
        if (s.type == Segment::Type::stroke) db.entry(s.entry_id);
    }
}

void interpolate_frame(const Skeleton& skeleton, std::span<const double> from,
                       std::span<const double> to, double eased, std::span<double> out) {
    const std::vector<std::size_t> offsets = skeleton.channel_offsets();
    for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
        const Joint& joint = skeleton.joints[j];
        if (joint.channels.empty()) continue;
        const std::size_t begin = offsets[j];
        const std::size_t count = joint.channels.size();
        auto from_j = from.subspan(begin, count);
        auto to_j = to.subspan(begin, count);
        auto out_j = out.subspan(begin, count);

        for (std::size_t c = 0; c < count; ++c) {
            if (!is_rotation_channel(joint.channels[c]))
                out_j[c] = from_j[c] + eased * (to_j[c] - from_j[c]);
        }
        const Eigen::Quaterniond q0 = joint_rotation(joint, from_j);
        const Eigen::Quaterniond q1 = joint_rotation(joint, to_j);
        set_joint_rotation(joint, q0.slerp(eased, q1), out_j);
    }
}

MotionClip synthesize_transition(const Skeleton& skeleton, std::span<const double> from,
                                 std::span<const double> to, double duration_s, double fps) {
    const std::size_t channels = skeleton.channel_count();
    if (from.size() != channels || to.size() != channels)
        fail(Errc::mismatch, "transition endpoint frames do not match the skeleton");
    if (!(duration_s > 0.0) || !(fps > 0.0))
        fail(Errc::invalid_argument, "transition duration and fps must be positive");
    for (double v : from)
        if (!std::isfinite(v)) fail(Errc::invalid_argument, "non-finite endpoint frame");
    for (double v : to)
        if (!std::isfinite(v)) fail(Errc::invalid_argument, "non-finite endpoint frame");

    const auto steps = std::max<long long>(1, std::llround(duration_s * fps));

    MotionClip clip;
    clip.frame_time = 1.0 / fps;
    clip.channel_count = channels;
    clip.values.resize(static_cast<std::size_t>(steps + 1) * channels);
    for (long long k = 0; k <= steps; ++k) {
        auto frame = clip.frame(static_cast<std::size_t>(k));
        const double u = std::clamp(static_cast<double>(k) * clip.frame_time / duration_s, 0.0, 1.0);
        if (k == 0) {
            std::copy(from.begin(), from.end(), frame.begin());
        } else if (k == steps || u >= 1.0) {
            std::copy(to.begin(), to.end(), frame.begin());
        } else {
            interpolate_frame(skeleton, from, to, smoothstep(u), frame);
            unwrap_rotation_channels(skeleton, clip.frame(static_cast<std::size_t>(k - 1)), frame);
        }
    }
    return clip;
}

MotionClip render_sequence(const Skeleton& skeleton, const GestureDatabase& db,
                           const AssemblyPlan& plan, const RestPose& rest, double fps,
                           RenderReport* report) {
    validate_plan(plan, db);
    const std::size_t channels = skeleton.channel_count();
    if (rest.channels.size() != channels)
        fail(Errc::mismatch, "rest pose has " + std::to_string(rest.channels.size()) +
                                 " channels, skeleton has " + std::to_string(channels));
    if (!(fps > 0.0)) fail(Errc::invalid_argument, "fps must be positive");

    auto pose_frame = [&](const PoseRef& ref) -> std::span<const double> {
        switch (ref.kind) {
        case PoseRef::Kind::rest: return rest.channels;
        case PoseRef::Kind::stroke_start: {
            for (const Segment& s : plan.segments)
                if (s.type == Segment::Type::stroke && s.stroke == ref.stroke)
                    return db.entry(s.entry_id).motion.frame(0);
            break;
        }
        case PoseRef::Kind::stroke_end: {
            for (const Segment& s : plan.segments)
                if (s.type == Segment::Type::stroke && s.stroke == ref.stroke) {
                    const MotionClip& motion = db.entry(s.entry_id).motion;
                    return motion.frame(motion.frame_count() - 1);
                }
            break;
        }
        }
        fail(Errc::invalid_argument, "pose reference names an unknown stroke");
    };

    const auto total_frames = static_cast<std::size_t>(std::llround(plan.timeline_s * fps));
    MotionClip out;
    out.frame_time = 1.0 / fps;
    out.channel_count = channels;
    out.values.resize(total_frames * channels);

    RenderReport local;
    RenderReport& rep = report ? *report : local;
    rep.segment_frames.clear();

    for (const Segment& segment : plan.segments) {
        const auto k0 = static_cast<std::size_t>(std::llround(segment.start_s * fps));
        auto k1 = static_cast<std::size_t>(std::llround(segment.end_s * fps));
        if (k1 > total_frames) k1 = total_frames;
        rep.segment_frames.emplace_back(k0, k1);

        for (std::size_t k = k0; k < k1; ++k) {
            auto frame = out.frame(k);
            const double t = static_cast<double>(k) * out.frame_time;
            switch (segment.type) {
            case Segment::Type::hold: {
                auto held = pose_frame(segment.from);
                std::copy(held.begin(), held.end(), frame.begin());
                break;
            }
            case Segment::Type::stroke: {
                const MotionClip& motion = db.entry(segment.entry_id).motion;
                const std::size_t src = nearest_frame(motion, t - segment.start_s);
                auto source = motion.frame(src);
                std::copy(source.begin(), source.end(), frame.begin());
                break;
            }
            case Segment::Type::transition: {
                auto from = pose_frame(segment.from);
                auto to = pose_frame(segment.to);
                const double u =
                    std::clamp((t - segment.start_s) / (segment.end_s - segment.start_s), 0.0, 1.0);
                if (u <= 0.0) {
                    std::copy(from.begin(), from.end(), frame.begin());
                } else if (u >= 1.0) {
                    std::copy(to.begin(), to.end(), frame.begin());
                } else {
                    interpolate_frame(skeleton, from, to, smoothstep(u), frame);
                    if (k > k0) unwrap_rotation_channels(skeleton, out.frame(k - 1), frame);
                }
                break;
            }
            }
        }
    }

    // Soft C1 check: per-channel angular steps across segment joins should
    // stay comparable to the steps inside the strokes themselves.
    auto max_step = [&](std::size_t k) {
        double step = 0.0;
        auto a = out.frame(k - 1);
        auto b = out.frame(k);
        std::size_t column = 0;
        for (const Joint& joint : skeleton.joints) {
            for (Channel c : joint.channels) {
                if (is_rotation_channel(c)) {
                    double d = std::abs(b[column] - a[column]);
                    d = std::fmod(d, 360.0);
                    step = std::max(step, std::min(d, 360.0 - d));
                }
                ++column;
            }
        }
        return step;
    };
    for (std::size_t s = 0; s < plan.segments.size(); ++s) {
        auto [k0, k1] = rep.segment_frames[s];
        if (plan.segments[s].type == Segment::Type::stroke) {
            for (std::size_t k = k0 + 1; k < k1; ++k)
                rep.max_stroke_step_deg = std::max(rep.max_stroke_step_deg, max_step(k));
        }
        if (s > 0 && k0 > 0 && k0 < total_frames)
            rep.max_join_step_deg = std::max(rep.max_join_step_deg, max_step(k0));
    }
    if (rep.max_stroke_step_deg > 0.0 && rep.max_join_step_deg > 1.5 * rep.max_stroke_step_deg)
        rep.warnings.push_back("segment joins step up to " + std::to_string(rep.max_join_step_deg) +
                               " deg/frame, strokes peak at " +
                               std::to_string(rep.max_stroke_step_deg) + " deg/frame");
    return out;
}

} // namespace gm
