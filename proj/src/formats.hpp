#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "assembler.hpp"
#include "database.hpp"
#include "matcher.hpp"

namespace gm {

// Cross-cutting knobs with the documented defaults; JSON config files and
// CLI flags override individual fields.
struct PipelineConfig {
    int smoothing_window = 5;
    DurationPolicy duration;
    Weights weights = kDefaultWeights;
    AssemblyConfig assembly;
    double fps = 60.0;
};

PipelineConfig parse_config_json(std::string_view text);
void apply_config_json(PipelineConfig& config, std::string_view text);

// Stroke labels file: JSON array of
// {"clip": text, "start_s": n, "end_s": n, "hand": "left"|"right"|"both"}.
std::vector<StrokeLabel> parse_labels_json(std::string_view text);

// Joint map file: {"left": {"shoulder": ..., "elbow": ..., "wrist": ...,
// "fingertips": [...]}, "right": {...}}.
JointMap parse_joint_map_json(std::string_view text);

// Slot/target file: {"slots": [{"start_s", "end_s", "target": {...},
// "weights": [5] optional, "true_entry": id optional}], "timeline_s": n}.
struct SlotsFile {
    SlotSequence sequence;
    std::vector<ExpressiveParams> targets;
    std::vector<Weights> weights;
    std::vector<int> true_ids; // empty unless every slot carries true_entry
};

SlotsFile parse_slots_json(std::string_view text, const Weights& default_weights);

struct SelectionRecord {
    int slot = 0;
    int entry_id = -1;
    double start_s = 0.0; // stroke placement; must equal the slot onset
    std::array<int, 5> ranks{};
    double total_rank = 0.0;
    int feasible_count = 0;
};

struct SelectionsFile {
    std::string mode;
    std::uint64_t seed = 0;
    SlotSequence sequence; // scrambled slots for unmatched_untimed
    std::vector<SelectionRecord> selections;
};

std::string selections_to_json(const SelectionsFile& file);
SelectionsFile parse_selections_json(std::string_view text);

// Rest pose sidecar: {"channels": [...]} explicit, or
// {"entry_id": n, "frame_index": n} referencing embedded stroke motion, or
// {"bvh_path": text, "frame_index": n}. Null/empty means the zero pose.
RestPose parse_rest_spec_json(std::string_view text, const GestureDatabase& db);

// Every *.bvh under `dir` (sorted by filename for determinism); clip ids are
// the file stems.
std::vector<CorpusClip> load_corpus_dir(const std::string& dir);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace gm
