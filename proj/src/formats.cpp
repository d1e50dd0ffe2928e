//
// formats.cpp
//
// JSON file schemas shared by the C API and the CLI, plus corpus loading.
//

#include "formats.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace gm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json parse_or_fail(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string(what) + ": " + e.what());
    }
}

ExpressiveParams params_from_json(const json& node) {
    ExpressiveParams p;
    p.velocity = node.at("velocity").get<double>();
    p.accel_peak = node.at("accel_peak").get<double>();
    p.path_length = node.at("path_length").get<double>();
    p.swivel = node.at("swivel").get<double>();
    p.hand_opening = node.at("hand_opening").get<double>();
    return p;
}

Weights weights_from_json(const json& node) {
    if (!node.is_array() || node.size() != 5)
        fail(Errc::parse, "weights must be an array of five numbers");
    Weights w;
    for (int i = 0; i < 5; ++i) w[i] = node.at(i).get<double>();
    return w;
}

} // namespace

PipelineConfig parse_config_json(std::string_view text) {
    PipelineConfig config;
    apply_config_json(config, text);
    return config;
}

void apply_config_json(PipelineConfig& config, std::string_view text) {
    if (text.empty()) return;
    const json doc = parse_or_fail(text, "config");
    try {
        if (doc.contains("smoothing_window")) config.smoothing_window = doc["smoothing_window"].get<int>();
        if (doc.contains("tau")) config.duration.tolerance = doc["tau"].get<double>();
        if (doc.contains("nearest_fallback"))
            config.duration.nearest_fallback = doc["nearest_fallback"].get<int>();
        if (doc.contains("weights")) config.weights = weights_from_json(doc["weights"]);
        if (doc.contains("prep_s")) config.assembly.prep_s = doc["prep_s"].get<double>();
        if (doc.contains("hold_threshold_s"))
            config.assembly.hold_threshold_s = doc["hold_threshold_s"].get<double>();
        if (doc.contains("fps")) config.fps = doc["fps"].get<double>();
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("malformed config: ") + e.what());
    }
    if (config.smoothing_window < 1) fail(Errc::invalid_argument, "smoothing_window must be >= 1");
    if (config.duration.tolerance < 0.0) fail(Errc::invalid_argument, "tau must be >= 0");
    if (config.duration.nearest_fallback < 1)
        fail(Errc::invalid_argument, "nearest_fallback must be >= 1");
    if (!(config.fps > 0.0)) fail(Errc::invalid_argument, "fps must be positive");
    if (!(config.assembly.prep_s >= 0.0) || !(config.assembly.hold_threshold_s >= 0.0))
        fail(Errc::invalid_argument, "prep_s and hold_threshold_s must be >= 0");
}

std::vector<StrokeLabel> parse_labels_json(std::string_view text) {
    const json doc = parse_or_fail(text, "labels file");
    if (!doc.is_array()) fail(Errc::parse, "labels file must be a JSON array");
    std::vector<StrokeLabel> labels;
    try {
        for (const json& node : doc) {
            StrokeLabel label;
            label.clip_id = node.at("clip").get<std::string>();
            label.start_s = node.at("start_s").get<double>();
            label.end_s = node.at("end_s").get<double>();
            label.hand = hand_from_name(node.at("hand").get<std::string>());
            labels.push_back(std::move(label));
        }
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("malformed label: ") + e.what());
    }
    return labels;
}

JointMap parse_joint_map_json(std::string_view text) {
    const json doc = parse_or_fail(text, "joint map");
    auto side = [&](const char* key) {
        SideJoints side;
        try {
            const json& node = doc.at(key);
            side.shoulder = node.at("shoulder").get<std::string>();
            side.elbow = node.at("elbow").get<std::string>();
            side.wrist = node.at("wrist").get<std::string>();
            for (const json& tip : node.at("fingertips"))
                side.fingertips.push_back(tip.get<std::string>());
        } catch (const json::exception& e) {
            fail(Errc::parse, std::string("malformed joint map side '") + key + "': " + e.what());
        }
        return side;
    };
    return {side("left"), side("right")};
}

SlotsFile parse_slots_json(std::string_view text, const Weights& default_weights) {
    const json doc = parse_or_fail(text, "slots file");
    SlotsFile file;
    try {
        file.sequence.timeline_s = doc.at("timeline_s").get<double>();
        std::size_t with_true = 0;
        for (const json& node : doc.at("slots")) {
            Slot slot{node.at("start_s").get<double>(), node.at("end_s").get<double>()};
            file.sequence.slots.push_back(slot);
            file.targets.push_back(params_from_json(node.at("target")));
            file.weights.push_back(node.contains("weights") ? weights_from_json(node["weights"])
                                                            : default_weights);
            if (node.contains("true_entry")) {
                file.true_ids.push_back(node["true_entry"].get<int>());
                ++with_true;
            }
        }
        if (with_true != 0 && with_true != file.sequence.slots.size())
            fail(Errc::parse, "true_entry must be present on every slot or none");
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("malformed slots file: ") + e.what());
    }
    validate_slots(file.sequence);
    return file;
}

std::string selections_to_json(const SelectionsFile& file) {
    json slots = json::array();
    for (const Slot& slot : file.sequence.slots)
        slots.push_back({{"start_s", slot.start_s}, {"end_s", slot.end_s}});
    json selections = json::array();
    for (const SelectionRecord& r : file.selections) {
        selections.push_back({{"slot", r.slot},
                              {"entry_id", r.entry_id},
                              {"start_s", r.start_s},
                              {"ranks", r.ranks},
                              {"total_rank", r.total_rank},
                              {"feasible_count", r.feasible_count}});
    }
    json doc = {{"mode", file.mode},
                {"seed", file.seed},
                {"timeline_s", file.sequence.timeline_s},
                {"slots", slots},
                {"selections", selections}};
    return doc.dump(2);
}

SelectionsFile parse_selections_json(std::string_view text) {
    const json doc = parse_or_fail(text, "selections file");
    SelectionsFile file;
    try {
        file.mode = doc.at("mode").get<std::string>();
        file.seed = doc.at("seed").get<std::uint64_t>();
        file.sequence.timeline_s = doc.at("timeline_s").get<double>();
        for (const json& node : doc.at("slots"))
            file.sequence.slots.push_back(
                {node.at("start_s").get<double>(), node.at("end_s").get<double>()});
        for (const json& node : doc.at("selections")) {
            SelectionRecord r;
            r.slot = node.at("slot").get<int>();
            r.entry_id = node.at("entry_id").get<int>();
            r.start_s = node.at("start_s").get<double>();
            const json& ranks = node.at("ranks");
            if (ranks.size() != 5) fail(Errc::parse, "selection ranks must have five values");
            for (int p = 0; p < 5; ++p) r.ranks[p] = ranks.at(p).get<int>();
            r.total_rank = node.at("total_rank").get<double>();
            r.feasible_count = node.at("feasible_count").get<int>();
            file.selections.push_back(r);
        }
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("malformed selections file: ") + e.what());
    }
    if (file.selections.size() != file.sequence.slots.size())
        fail(Errc::mismatch, "selections do not align with slots");
    return file;
}

RestPose parse_rest_spec_json(std::string_view text, const GestureDatabase& db) {
    RestPose rest;
    if (text.empty()) {
        rest.channels.assign(db.skeleton.channel_count(), 0.0);
        return rest;
    }
    const json doc = parse_or_fail(text, "rest pose spec");
    try {
        if (doc.contains("channels")) {
            for (const json& v : doc["channels"]) rest.channels.push_back(v.get<double>());
        } else if (doc.contains("entry_id")) {
            const GestureEntry& entry = db.entry(doc["entry_id"].get<int>());
            const auto index = doc.value("frame_index", std::size_t{0});
            if (index >= entry.motion.frame_count())
                fail(Errc::invalid_argument, "rest pose frame_index out of range");
            auto frame = entry.motion.frame(index);
            rest.channels.assign(frame.begin(), frame.end());
        } else if (doc.contains("bvh_path")) {
            const BvhDocument bvh = parse_bvh(read_file(doc["bvh_path"].get<std::string>()));
            const auto index = doc.value("frame_index", std::size_t{0});
            if (index >= bvh.clip.frame_count())
                fail(Errc::invalid_argument, "rest pose frame_index out of range");
            auto frame = bvh.clip.frame(index);
            rest.channels.assign(frame.begin(), frame.end());
        } else {
            fail(Errc::parse, "rest pose spec needs 'channels', 'entry_id', or 'bvh_path'");
        }
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("malformed rest pose spec: ") + e.what());
    }
    if (rest.channels.size() != db.skeleton.channel_count())
        fail(Errc::mismatch, "rest pose has " + std::to_string(rest.channels.size()) +
                                 " channels, skeleton has " +
                                 std::to_string(db.skeleton.channel_count()));
    return rest;
}

std::vector<CorpusClip> load_corpus_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) fail(Errc::io, "corpus directory '" + dir + "' does not exist");
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".bvh")
            paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) fail(Errc::io, "no .bvh files in corpus directory '" + dir + "'");

    std::vector<CorpusClip> corpus;
    for (const fs::path& path : paths) {
        try {
            BvhDocument doc = parse_bvh(read_file(path.string()));
            corpus.push_back(
                {path.stem().string(), std::move(doc.skeleton), std::move(doc.clip)});
        } catch (const Error& e) {
            fail(e.code(), path.string() + ": " + e.what());
        }
    }
    return corpus;
}

std::string read_file(const std::string& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) fail(Errc::io, "cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) fail(Errc::io, "cannot open '" + path + "' for writing");
    stream.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!stream) fail(Errc::io, "failed writing '" + path + "'");
}

} // namespace gm
