//
// evaluation.cpp
//
// Objective comparison harness over the four conditions. Weighted parameter
// distance and weighted rank stand in for the perceptual ratings the study
// design calls for; output headers label them as proxies.
//

#include "evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "error.hpp"

namespace gm {

using nlohmann::json;

const char* condition_name(Condition c) {
    switch (c) {
    case Condition::ground_truth: return "ground_truth";
    case Condition::matched: return "matched";
    case Condition::unmatched: return "unmatched";
    case Condition::unmatched_untimed: return "unmatched_untimed";
    }
    return "?";
}

Condition condition_from_name(std::string_view name) {
    if (name == "ground_truth") return Condition::ground_truth;
    if (name == "matched") return Condition::matched;
    if (name == "unmatched") return Condition::unmatched;
    if (name == "unmatched_untimed") return Condition::unmatched_untimed;
    fail(Errc::parse, "unknown condition '" + std::string(name) + "'");
}

std::vector<ConditionRun> run_conditions(const GestureDatabase& db, const SlotSequence& slots,
                                         std::span<const ExpressiveParams> targets,
                                         std::span<const Weights> weights, std::uint64_t seed,
                                         std::span<const Condition> conditions,
                                         std::span<const int> true_ids,
                                         const DurationPolicy& policy) {
    validate_slots(slots);
    if (targets.size() != slots.slots.size())
        fail(Errc::mismatch, "targets do not align with slots");

    auto weights_at = [&](std::size_t i) { return weights.size() == 1 ? weights[0] : weights[i]; };

    std::vector<ConditionRun> runs;
    for (Condition condition : conditions) {
        ConditionRun run;
        run.condition = condition;
        run.slots = slots;
        switch (condition) {
        case Condition::matched:
            run.selections = select_sequence(db, slots, targets, weights, policy);
            break;
        case Condition::unmatched:
            run.selections = baseline_unmatched(db, slots, targets, weights, seed, policy);
            break;
        case Condition::unmatched_untimed:
            run.slots = scramble_timings(slots, seed);
            run.selections = baseline_unmatched(db, run.slots, targets, weights, seed, policy);
            break;
        case Condition::ground_truth: {
            if (true_ids.size() != slots.slots.size())
                fail(Errc::invalid_argument,
                     "ground_truth condition requires one true entry id per slot");
            for (std::size_t i = 0; i < slots.slots.size(); ++i) {
                const Slot& slot = slots.slots[i];
                std::optional<double> next;
                if (i + 1 < slots.slots.size()) next = slots.slots[i + 1].start_s;
                const std::vector<int> feasible =
                    feasible_entries(db, slot.start_s, slot.end_s, next, policy);
                run.selections.push_back(
                    rank_entry(db, targets[i], feasible, true_ids[i], weights_at(i)));
            }
            break;
        }
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

EvalReport make_report(const GestureDatabase& db, std::span<const ConditionRun> runs,
                       std::span<const ExpressiveParams> targets,
                       std::span<const Weights> weights) {
    EvalReport report;
    for (const ConditionRun& run : runs) {
        if (run.selections.size() != targets.size())
            fail(Errc::mismatch, "condition run does not cover every slot");
        ConditionSummary summary;
        summary.slots = run.selections.size();
        std::vector<double> distances;
        for (std::size_t i = 0; i < run.selections.size(); ++i) {
            const MatchResult& selection = run.selections[i];
            const Weights& w = weights.size() == 1 ? weights[0] : weights[i];
            EvalRow row;
            row.condition = run.condition;
            row.slot = static_cast<int>(i);
            row.entry_id = selection.entry_id;
            const auto target = targets[i].as_array();
            const auto actual = db.entry(selection.entry_id).params.as_array();
            for (int p = 0; p < 5; ++p) {
                row.distances[p] = param_distance(p, target[p], actual[p]);
                row.weighted_distance += w[p] * row.distances[p];
            }
            row.weighted_rank = selection.total_rank;
            summary.mean_weighted_distance += row.weighted_distance;
            summary.mean_total_rank += row.weighted_rank;
            distances.push_back(row.weighted_distance);
            report.rows.push_back(row);
        }
        if (summary.slots > 0) {
            const auto n = static_cast<double>(summary.slots);
            summary.mean_weighted_distance /= n;
            summary.mean_total_rank /= n;
            std::sort(distances.begin(), distances.end());
            const std::size_t mid = distances.size() / 2;
            summary.median_weighted_distance = distances.size() % 2
                                                   ? distances[mid]
                                                   : 0.5 * (distances[mid - 1] + distances[mid]);
        }
        report.summaries.emplace_back(run.condition, summary);
    }
    return report;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

std::string report_csv(const EvalReport& report) {
    std::string out =
        "# distances and ranks are objective proxies for perceptual match quality\n"
        "condition,slot,entry_id,dist_velocity,dist_accel_peak,dist_path_length,dist_swivel,"
        "dist_hand_opening,weighted_rank,weighted_distance\n";
    for (const EvalRow& row : report.rows) {
        out += condition_name(row.condition);
        out += ',' + std::to_string(row.slot) + ',' + std::to_string(row.entry_id);
        for (int p = 0; p < 5; ++p) out += ',' + format_double(row.distances[p]);
        out += ',' + format_double(row.weighted_rank);
        out += ',' + format_double(row.weighted_distance);
        out += '\n';
    }
    return out;
}

std::string report_summary_json(const EvalReport& report, std::uint64_t seed) {
    json conditions;
    for (const auto& [condition, summary] : report.summaries) {
        conditions[condition_name(condition)] = {
            {"slots", summary.slots},
            {"mean_weighted_distance", summary.mean_weighted_distance},
            {"median_weighted_distance", summary.median_weighted_distance},
            {"mean_total_rank", summary.mean_total_rank}};
    }
    json doc = {{"metric", "weighted parameter distance (objective proxy, not a perceptual rating)"},
                {"seed", seed},
                {"conditions", conditions}};
    return doc.dump(2);
}

} // namespace gm
