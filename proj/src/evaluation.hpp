#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "matcher.hpp"

namespace gm {

// The four comparison conditions. The perceptual study they stem from is
// replaced by objective parameter-distance proxies.
enum class Condition { ground_truth, matched, unmatched, unmatched_untimed };

const char* condition_name(Condition c);
Condition condition_from_name(std::string_view name);

struct ConditionRun {
    Condition condition;
    std::vector<MatchResult> selections;
    SlotSequence slots; // scrambled for unmatched_untimed
};

// true_ids may be empty unless ground_truth is requested.
std::vector<ConditionRun> run_conditions(const GestureDatabase& db, const SlotSequence& slots,
                                         std::span<const ExpressiveParams> targets,
                                         std::span<const Weights> weights, std::uint64_t seed,
                                         std::span<const Condition> conditions,
                                         std::span<const int> true_ids = {},
                                         const DurationPolicy& policy = {});

struct EvalRow {
    Condition condition;
    int slot = 0;
    int entry_id = -1;
    std::array<double, 5> distances{}; // per-parameter absolute distance to target
    double weighted_rank = 0.0;
    double weighted_distance = 0.0;
};

struct ConditionSummary {
    std::size_t slots = 0;
    double mean_weighted_distance = 0.0;
    double median_weighted_distance = 0.0;
    double mean_total_rank = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows; // one per (condition, slot)
    std::vector<std::pair<Condition, ConditionSummary>> summaries;
};

EvalReport make_report(const GestureDatabase& db, std::span<const ConditionRun> runs,
                       std::span<const ExpressiveParams> targets,
                       std::span<const Weights> weights);

std::string report_csv(const EvalReport& report);
std::string report_summary_json(const EvalReport& report, std::uint64_t seed);

} // namespace gm
