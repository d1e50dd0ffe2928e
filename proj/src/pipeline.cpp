#include "pipeline.hpp"

#include <cmath>

#include "error.hpp"

namespace gm {

GestureDatabase pipeline_build(const std::string& corpus_dir, const std::string& labels_path,
                               const std::string& joint_map_path, const PipelineConfig& config,
                               BuildReport* report) {
    const std::vector<CorpusClip> corpus = load_corpus_dir(corpus_dir);
    const std::vector<StrokeLabel> labels = parse_labels_json(read_file(labels_path));
    const JointMap joint_map = parse_joint_map_json(read_file(joint_map_path));
    return build_database(corpus, labels, joint_map, config.smoothing_window, report);
}

std::string pipeline_select(const GestureDatabase& db, std::string_view slots_json,
                            std::string_view mode, std::uint64_t seed,
                            const PipelineConfig& config) {
    const SlotsFile slots = parse_slots_json(slots_json, config.weights);

    SelectionsFile out;
    out.mode = mode;
    out.seed = seed;
    out.sequence = slots.sequence;

    std::vector<MatchResult> results;
    if (mode == "matched") {
        results = select_sequence(db, slots.sequence, slots.targets, slots.weights, config.duration);
    } else if (mode == "unmatched") {
        results =
            baseline_unmatched(db, slots.sequence, slots.targets, slots.weights, seed, config.duration);
    } else if (mode == "unmatched_untimed") {
        out.sequence = scramble_timings(slots.sequence, seed);
        results =
            baseline_unmatched(db, out.sequence, slots.targets, slots.weights, seed, config.duration);
    } else if (mode == "ground_truth") {
        if (slots.true_ids.size() != slots.sequence.slots.size())
            fail(Errc::invalid_argument, "ground_truth mode requires true_entry on every slot");
        for (std::size_t i = 0; i < slots.sequence.slots.size(); ++i) {
            const Slot& slot = slots.sequence.slots[i];
            std::optional<double> next;
            if (i + 1 < slots.sequence.slots.size()) next = slots.sequence.slots[i + 1].start_s;
            const std::vector<int> feasible =
                feasible_entries(db, slot.start_s, slot.end_s, next, config.duration);
            results.push_back(
                rank_entry(db, slots.targets[i], feasible, slots.true_ids[i], slots.weights[i]));
        }
    } else {
        fail(Errc::invalid_argument, "unknown selection mode '" + std::string(mode) +
                                         "' (matched, unmatched, unmatched_untimed, ground_truth)");
    }

    for (std::size_t i = 0; i < results.size(); ++i) {
        SelectionRecord record;
        record.slot = static_cast<int>(i);
        record.entry_id = results[i].entry_id;
        record.start_s = out.sequence.slots[i].start_s;
        record.ranks = results[i].ranks;
        record.total_rank = results[i].total_rank;
        record.feasible_count = results[i].feasible_count;
        out.selections.push_back(record);
    }
    return selections_to_json(out);
}

std::string pipeline_assemble(const GestureDatabase& db, std::string_view selections_json,
                              std::string_view rest_json, const PipelineConfig& config,
                              RenderReport* report) {
    const SelectionsFile file = parse_selections_json(selections_json);
    validate_slots(file.sequence);

    std::vector<MatchResult> selections;
    for (std::size_t i = 0; i < file.selections.size(); ++i) {
        const SelectionRecord& record = file.selections[i];
        if (record.slot != static_cast<int>(i))
            fail(Errc::mismatch, "selection " + std::to_string(i) + " is out of order");
        if (std::abs(record.start_s - file.sequence.slots[i].start_s) > 1e-9)
            fail(Errc::mismatch, "selection " + std::to_string(i) + " starts at " +
                                     std::to_string(record.start_s) + " but its slot starts at " +
                                     std::to_string(file.sequence.slots[i].start_s));
        MatchResult result;
        result.entry_id = record.entry_id;
        result.ranks = record.ranks;
        result.total_rank = record.total_rank;
        result.feasible_count = record.feasible_count;
        selections.push_back(result);
    }

    const AssemblyPlan plan = plan_assembly(db, file.sequence, selections,
                                            file.sequence.timeline_s, config.assembly);

    // Frame-exact onset check against the slots the selections claim.
    for (const Segment& segment : plan.segments) {
        if (segment.type != Segment::Type::stroke) continue;
        const double slot_start = file.sequence.slots[segment.stroke].start_s;
        if (std::llround(segment.start_s * config.fps) != std::llround(slot_start * config.fps))
            fail(Errc::mismatch, "stroke " + std::to_string(segment.stroke) +
                                     " onset drifted from its slot");
    }

    const RestPose rest = parse_rest_spec_json(rest_json, db);
    const MotionClip clip = render_sequence(db.skeleton, db, plan, rest, config.fps, report);
    return serialize_bvh(db.skeleton, clip);
}

EvalOutputs pipeline_evaluate(const GestureDatabase& db, std::string_view slots_json,
                              std::span<const Condition> conditions, std::uint64_t seed,
                              const PipelineConfig& config) {
    const SlotsFile slots = parse_slots_json(slots_json, config.weights);
    for (Condition c : conditions) {
        if (c == Condition::ground_truth && slots.true_ids.size() != slots.sequence.slots.size())
            fail(Errc::invalid_argument,
                 "ground_truth condition requires true_entry on every slot");
    }
    const std::vector<ConditionRun> runs =
        run_conditions(db, slots.sequence, slots.targets, slots.weights, seed, conditions,
                       slots.true_ids, config.duration);
    const EvalReport report = make_report(db, runs, slots.targets, slots.weights);
    return {report_csv(report), report_summary_json(report, seed)};
}

} // namespace gm
