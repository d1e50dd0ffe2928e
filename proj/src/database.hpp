#pragma once

#include <span>
#include <string>
#include <vector>

#include "mocap.hpp"
#include "params.hpp"

namespace gm {

// One stroke: embedded motion frames, duration, handedness, and expressive
// parameter vector. Ids are dense from 0 in (clip_id, start) order.
struct GestureEntry {
    int id = -1;
    std::string clip_id;
    std::size_t frame_first = 0; // [first, last) into the source clip
    std::size_t frame_last = 0;
    double duration_s = 0.0;
    Hand hand = Hand::right;
    ExpressiveParams params;
    MotionClip motion;
};

struct GestureDatabase {
    Skeleton skeleton;
    double frame_time = 0.0;
    std::vector<GestureEntry> entries; // entries[i].id == i

    std::size_t size() const { return entries.size(); }
    const GestureEntry& entry(int id) const;
};

struct CorpusClip {
    std::string clip_id;
    Skeleton skeleton;
    MotionClip clip;
};

struct BuildReport {
    std::size_t built = 0;
    std::vector<std::string> skipped; // one reason per failing label
    std::vector<std::string> warnings;
};

GestureDatabase build_database(std::span<const CorpusClip> corpus,
                               std::span<const StrokeLabel> labels, const JointMap& joint_map,
                               int smoothing_window = 5, BuildReport* report = nullptr);

// Single JSON document; the checksum guards the canonicalized entries block.
std::string save_database(const GestureDatabase& db);
GestureDatabase load_database(std::string_view text);

// Entry count, duration range, and per-parameter min/mean/max, as JSON.
std::string database_summary_json(const GestureDatabase& db);
std::string entry_json(const GestureDatabase& db, int id);

} // namespace gm
