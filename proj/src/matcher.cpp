//
// matcher.cpp
//
// Duration-constrained minimum-rank gesture selection: each feasible entry
// gets one rank per parameter, the weighted rank sum is minimized, and ties
// break by ascending entry id.
//

#include "matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "rng.hpp"

namespace gm {

void validate_slots(const SlotSequence& sequence) {
    double previous_end = 0.0;
    for (std::size_t i = 0; i < sequence.slots.size(); ++i) {
        const Slot& slot = sequence.slots[i];
        if (!(slot.start_s < slot.end_s))
            fail(Errc::invalid_argument, "slot " + std::to_string(i) + " is empty or inverted");
        if (slot.start_s < previous_end - 1e-12)
            fail(Errc::invalid_argument, "slot " + std::to_string(i) + " overlaps its predecessor");
        previous_end = slot.end_s;
    }
    if (!sequence.slots.empty() &&
        (sequence.slots.front().start_s < 0.0 || previous_end > sequence.timeline_s + 1e-9))
        fail(Errc::invalid_argument, "slots extend outside [0, timeline]");
}

double param_distance(int param, double target, double value) {
    if (param == kSwivelIndex) {
        double d = std::abs(target - value);
        d = std::fmod(d, 2.0 * M_PI);
        return std::min(d, 2.0 * M_PI - d);
    }
    return std::abs(target - value);
}

std::vector<int> feasible_entries(const GestureDatabase& db, double slot_start, double slot_end,
                                  std::optional<double> next_slot_start,
                                  const DurationPolicy& policy) {
    if (db.entries.empty()) fail(Errc::empty, "empty database");
    if (policy.tolerance < 0.0) fail(Errc::invalid_argument, "duration tolerance must be >= 0");
    const double slot_duration = slot_end - slot_start;

    std::vector<int> overlap_ok;
    overlap_ok.reserve(db.entries.size());
    for (const GestureEntry& e : db.entries) {
        if (!next_slot_start || slot_start + e.duration_s <= *next_slot_start + 1e-9)
            overlap_ok.push_back(e.id);
    }

    if (!overlap_ok.empty()) {
        double tau = policy.tolerance;
        for (int round = 0; round < 64; ++round) {
            const double lo = slot_duration * (1.0 - tau);
            const double hi = slot_duration * (1.0 + tau);
            std::vector<int> feasible;
            for (int id : overlap_ok) {
                const double d = db.entries[id].duration_s;
                if (d >= lo && d <= hi) feasible.push_back(id);
            }
            if (!feasible.empty()) return feasible;
            tau = tau > 0.0 ? tau * 2.0 : 0.01;
        }
    }

    // The overlap constraint cannot be satisfied (or the window never caught
    // anything): fall back to the nearest-duration entries so a selection
    // always exists.
    std::vector<int> pool = overlap_ok.empty()
                                ? [&] {
                                      std::vector<int> all(db.entries.size());
                                      std::iota(all.begin(), all.end(), 0);
                                      return all;
                                  }()
                                : overlap_ok;
    std::sort(pool.begin(), pool.end(), [&](int a, int b) {
        const double da = std::abs(db.entries[a].duration_s - slot_duration);
        const double db_ = std::abs(db.entries[b].duration_s - slot_duration);
        if (da != db_) return da < db_;
        return a < b;
    });
    if (pool.size() > static_cast<std::size_t>(policy.nearest_fallback))
        pool.resize(policy.nearest_fallback);
    std::sort(pool.begin(), pool.end());
    return pool;
}

RankTable rank_table(const GestureDatabase& db, const ExpressiveParams& target,
                     std::span<const int> feasible) {
    if (feasible.empty()) fail(Errc::empty, "empty feasible set");

    RankTable table;
    table.ids.assign(feasible.begin(), feasible.end());
    std::sort(table.ids.begin(), table.ids.end());

    const std::size_t n = table.ids.size();
    const auto target_values = target.as_array();
    std::vector<double> distance(n);
    std::vector<std::size_t> order(n);
    for (int p = 0; p < 5; ++p) {
        for (std::size_t j = 0; j < n; ++j)
            distance[j] =
                param_distance(p, target_values[p], db.entry(table.ids[j]).params.as_array()[p]);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (distance[a] != distance[b]) return distance[a] < distance[b];
            return table.ids[a] < table.ids[b];
        });
        table.ranks[p].resize(n);
        for (std::size_t r = 0; r < n; ++r) table.ranks[p][order[r]] = static_cast<int>(r + 1);
    }
    return table;
}

namespace {

MatchResult result_for(const RankTable& table, std::size_t j, const Weights& weights) {
    MatchResult result;
    result.entry_id = table.ids[j];
    result.feasible_count = static_cast<int>(table.ids.size());
    for (int p = 0; p < 5; ++p) {
        result.ranks[p] = table.ranks[p][j];
        result.total_rank += weights[p] * static_cast<double>(table.ranks[p][j]);
    }
    return result;
}

void check_weights(const Weights& weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            fail(Errc::invalid_argument, "weights must be finite and non-negative");
        sum += w;
    }
    if (sum <= 0.0) fail(Errc::invalid_argument, "at least one weight must be positive");
}

const Weights& weights_for_slot(std::span<const Weights> weights, std::size_t i) {
    return weights.size() == 1 ? weights[0] : weights[i];
}

void check_sequence_inputs(const SlotSequence& slots, std::span<const ExpressiveParams> targets,
                           std::span<const Weights> weights) {
    validate_slots(slots);
    if (targets.size() != slots.slots.size())
        fail(Errc::mismatch, "got " + std::to_string(targets.size()) + " targets for " +
                                 std::to_string(slots.slots.size()) + " slots");
    if (weights.size() != slots.slots.size() && weights.size() != 1)
        fail(Errc::mismatch, "weights must align with slots or be a single default");
}

} // namespace

MatchResult select_best(const GestureDatabase& db, const MatchQuery& query,
                        const DurationPolicy& policy, std::optional<double> next_slot_start) {
    check_weights(query.weights);
    const std::vector<int> feasible =
        feasible_entries(db, query.slot_start_s, query.slot_end_s, next_slot_start, policy);
    const RankTable table = rank_table(db, query.target, feasible);

    std::size_t best = 0;
    double best_total = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < table.ids.size(); ++j) {
        double total = 0.0;
        for (int p = 0; p < 5; ++p)
            total += query.weights[p] * static_cast<double>(table.ranks[p][j]);
        if (total < best_total) { // ids ascending, so ties keep the smaller id
            best_total = total;
            best = j;
        }
    }
    return result_for(table, best, query.weights);
}

MatchResult rank_entry(const GestureDatabase& db, const ExpressiveParams& target,
                       std::span<const int> feasible, int entry_id, const Weights& weights) {
    db.entry(entry_id);
    std::vector<int> pool(feasible.begin(), feasible.end());
    if (std::find(pool.begin(), pool.end(), entry_id) == pool.end()) pool.push_back(entry_id);
    const RankTable table = rank_table(db, target, pool);
    const auto it = std::lower_bound(table.ids.begin(), table.ids.end(), entry_id);
    return result_for(table, static_cast<std::size_t>(it - table.ids.begin()), weights);
}

std::vector<MatchResult> select_sequence(const GestureDatabase& db, const SlotSequence& slots,
                                         std::span<const ExpressiveParams> targets,
                                         std::span<const Weights> weights,
                                         const DurationPolicy& policy) {
    check_sequence_inputs(slots, targets, weights);
    std::vector<MatchResult> results;
    results.reserve(slots.slots.size());
    for (std::size_t i = 0; i < slots.slots.size(); ++i) {
        MatchQuery query{slots.slots[i].start_s, slots.slots[i].end_s, targets[i],
                         weights_for_slot(weights, i)};
        std::optional<double> next;
        if (i + 1 < slots.slots.size()) next = slots.slots[i + 1].start_s;
        results.push_back(select_best(db, query, policy, next));
    }
    return results;
}

std::vector<MatchResult> baseline_unmatched(const GestureDatabase& db, const SlotSequence& slots,
                                            std::span<const ExpressiveParams> targets,
                                            std::span<const Weights> weights, std::uint64_t seed,
                                            const DurationPolicy& policy) {
    check_sequence_inputs(slots, targets, weights);
    Rng rng(seed);
    std::vector<MatchResult> results;
    results.reserve(slots.slots.size());
    for (std::size_t i = 0; i < slots.slots.size(); ++i) {
        const Slot& slot = slots.slots[i];
        std::optional<double> next;
        if (i + 1 < slots.slots.size()) next = slots.slots[i + 1].start_s;
        const std::vector<int> feasible =
            feasible_entries(db, slot.start_s, slot.end_s, next, policy);
        const RankTable table = rank_table(db, targets[i], feasible);
        const std::size_t pick = uniform_index(rng, table.ids.size());
        results.push_back(result_for(table, pick, weights_for_slot(weights, i)));
    }
    return results;
}

SlotSequence scramble_timings(const SlotSequence& slots, std::uint64_t seed) {
    if (slots.slots.empty()) fail(Errc::empty, "cannot scramble an empty slot sequence");
    validate_slots(slots);

    struct GapStroke {
        double gap;
        double duration;
    };
    std::vector<GapStroke> pairs;
    pairs.reserve(slots.slots.size());
    double previous_end = 0.0;
    for (const Slot& slot : slots.slots) {
        pairs.push_back({slot.start_s - previous_end, slot.end_s - slot.start_s});
        previous_end = slot.end_s;
    }

    Rng rng(seed);
    fisher_yates(pairs, rng);

    SlotSequence out;
    out.timeline_s = slots.timeline_s;
    double t = 0.0;
    for (const GapStroke& pair : pairs) {
        const double start = t + pair.gap;
        out.slots.push_back({start, start + pair.duration});
        t = start + pair.duration;
    }
    return out;
}

} // namespace gm
