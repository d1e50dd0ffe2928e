#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "database.hpp"

namespace gm {

using Weights = std::array<double, 5>;
inline constexpr Weights kDefaultWeights = {1.0, 1.0, 1.0, 1.0, 1.0};

struct MatchQuery {
    double slot_start_s = 0.0;
    double slot_end_s = 0.0;
    ExpressiveParams target;
    Weights weights = kDefaultWeights;
};

struct MatchResult {
    int entry_id = -1;
    std::array<int, 5> ranks{}; // per-parameter rank in [1, feasible_count]
    double total_rank = 0.0;    // sum of weight * rank
    int feasible_count = 0;
};

struct Slot {
    double start_s = 0.0;
    double end_s = 0.0;
};

struct SlotSequence {
    std::vector<Slot> slots; // sorted, non-overlapping, within [0, timeline]
    double timeline_s = 0.0;
};

void validate_slots(const SlotSequence& sequence);

struct DurationPolicy {
    double tolerance = 0.3;    // duration within slot duration * [1 - tau, 1 + tau]
    int nearest_fallback = 10; // last-resort pool when no entry ever qualifies
};

// Absolute difference per parameter; circular distance for swivel.
double param_distance(int param, double target, double value);

// Entry ids passing the duration window and the next-slot overlap constraint,
// with the tolerance doubled until the set is non-empty. When the overlap
// constraint alone is unsatisfiable, falls back to the `nearest_fallback`
// nearest-duration entries so selection stays total.
std::vector<int> feasible_entries(const GestureDatabase& db, double slot_start, double slot_end,
                                  std::optional<double> next_slot_start,
                                  const DurationPolicy& policy);

// Per-parameter rank assignment over the feasible set: closest distance gets
// rank 1, farthest rank N; ties resolve by ascending entry id. Each
// parameter's ranks form a permutation of 1..N.
struct RankTable {
    std::vector<int> ids; // ascending
    std::array<std::vector<int>, 5> ranks;
};

RankTable rank_table(const GestureDatabase& db, const ExpressiveParams& target,
                     std::span<const int> feasible);

MatchResult select_best(const GestureDatabase& db, const MatchQuery& query,
                        const DurationPolicy& policy = {},
                        std::optional<double> next_slot_start = {});

// Rank one designated entry within a feasible set (the entry is added to the
// set when absent). Used to report ranks for externally chosen entries.
MatchResult rank_entry(const GestureDatabase& db, const ExpressiveParams& target,
                       std::span<const int> feasible, int entry_id, const Weights& weights);

std::vector<MatchResult> select_sequence(const GestureDatabase& db, const SlotSequence& slots,
                                         std::span<const ExpressiveParams> targets,
                                         std::span<const Weights> weights,
                                         const DurationPolicy& policy = {});

// Baseline 1: per slot, a seeded uniform choice over the same feasible set
// select_best would use; ranks are still reported against the true target.
std::vector<MatchResult> baseline_unmatched(const GestureDatabase& db, const SlotSequence& slots,
                                            std::span<const ExpressiveParams> targets,
                                            std::span<const Weights> weights, std::uint64_t seed,
                                            const DurationPolicy& policy = {});

// Baseline 2 support: permute the (preceding gap, stroke duration) pairs and
// rebuild slot times cumulatively from t = 0, preserving both multisets.
SlotSequence scramble_timings(const SlotSequence& slots, std::uint64_t seed);

} // namespace gm
