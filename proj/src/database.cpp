//
// database.cpp
//
// Gesture database construction and JSON persistence. The file layout is
// {"version": 1, "frame_time": ..., "skeleton": ..., "entries": [...],
//  "checksum": sha256 of the canonicalized entries block}.
//

#include "database.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "checksum.hpp"
#include "error.hpp"

namespace gm {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json skeleton_to_json(const Skeleton& skeleton) {
    json joints = json::array();
    for (const Joint& j : skeleton.joints) {
        json channels = json::array();
        for (Channel c : j.channels) channels.push_back(channel_name(c));
        joints.push_back({{"name", j.name},
                          {"parent", j.parent},
                          {"offset", {j.offset[0], j.offset[1], j.offset[2]}},
                          {"channels", channels},
                          {"end_site", j.end_site}});
    }
    return {{"joints", joints}};
}

Skeleton skeleton_from_json(const json& node) {
    Skeleton skeleton;
    for (const json& jj : node.at("joints")) {
        Joint joint;
        joint.name = jj.at("name").get<std::string>();
        joint.parent = jj.at("parent").get<int>();
        const auto& offset = jj.at("offset");
        joint.offset = {offset.at(0).get<double>(), offset.at(1).get<double>(),
                        offset.at(2).get<double>()};
        for (const json& ch : jj.at("channels")) {
            const std::string name = ch.get<std::string>();
            bool known = false;
            for (int c = 0; c < 6; ++c) {
                if (name == channel_name(static_cast<Channel>(c))) {
                    joint.channels.push_back(static_cast<Channel>(c));
                    known = true;
                    break;
                }
            }
            if (!known) fail(Errc::parse, "unknown channel name '" + name + "'");
        }
        joint.end_site = jj.at("end_site").get<bool>();
        skeleton.joints.push_back(std::move(joint));
    }
    skeleton.validate();
    return skeleton;
}

json params_to_json(const ExpressiveParams& p) {
    return {{"velocity", p.velocity},
            {"accel_peak", p.accel_peak},
            {"path_length", p.path_length},
            {"swivel", p.swivel},
            {"hand_opening", p.hand_opening}};
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

json entries_to_json(const GestureDatabase& db) {
    json entries = json::array();
    for (const GestureEntry& e : db.entries) {
        json motion = json::array();
        for (std::size_t f = 0; f < e.motion.frame_count(); ++f) {
            auto frame = e.motion.frame(f);
            motion.push_back(json(std::vector<double>(frame.begin(), frame.end())));
        }
        entries.push_back({{"id", e.id},
                           {"clip", e.clip_id},
                           {"frame_first", e.frame_first},
                           {"frame_last", e.frame_last},
                           {"duration_s", e.duration_s},
                           {"hand", hand_name(e.hand)},
                           {"params", params_to_json(e.params)},
                           {"motion", motion}});
    }
    return entries;
}

bool skeletons_equal(const Skeleton& a, const Skeleton& b) {
    if (a.joints.size() != b.joints.size()) return false;
    for (std::size_t i = 0; i < a.joints.size(); ++i) {
        const Joint& x = a.joints[i];
        const Joint& y = b.joints[i];
        if (x.name != y.name || x.parent != y.parent || x.channels != y.channels ||
            x.end_site != y.end_site)
            return false;
        if ((x.offset - y.offset).norm() > 1e-9) return false;
    }
    return true;
}

} // namespace

const GestureEntry& GestureDatabase::entry(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= entries.size())
        fail(Errc::not_found, "unknown entry id " + std::to_string(id));
    return entries[id];
}

GestureDatabase build_database(std::span<const CorpusClip> corpus,
                               std::span<const StrokeLabel> labels, const JointMap& joint_map,
                               int smoothing_window, BuildReport* report) {
    if (corpus.empty()) fail(Errc::empty, "corpus is empty");

    GestureDatabase db;
    db.skeleton = corpus.front().skeleton;
    db.frame_time = corpus.front().clip.frame_time;
    for (const CorpusClip& c : corpus) {
        if (!skeletons_equal(c.skeleton, db.skeleton))
            fail(Errc::mismatch, "clip '" + c.clip_id + "' uses a different skeleton");
        if (std::abs(c.clip.frame_time - db.frame_time) > 1e-9)
            fail(Errc::mismatch, "clip '" + c.clip_id + "' uses a different frame time");
    }

    auto find_clip = [&](const std::string& id) -> const CorpusClip& {
        for (const CorpusClip& c : corpus)
            if (c.clip_id == id) return c;
        fail(Errc::not_found, "label references unknown clip '" + id + "'");
    };
    for (const StrokeLabel& label : labels) find_clip(label.clip_id);

    std::vector<StrokeLabel> sorted(labels.begin(), labels.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const StrokeLabel& a, const StrokeLabel& b) {
        if (a.clip_id != b.clip_id) return a.clip_id < b.clip_id;
        return a.start_s < b.start_s;
    });

    BuildReport local;
    BuildReport& rep = report ? *report : local;
    const StrokeLabel* previous = nullptr;
    for (const StrokeLabel& label : sorted) {
        const std::string where =
            label.clip_id + " [" + std::to_string(label.start_s) + ", " + std::to_string(label.end_s) + ")";
        if (!(label.start_s < label.end_s)) {
            rep.skipped.push_back(where + ": empty or inverted label");
            continue;
        }
        if (previous && previous->clip_id == label.clip_id && label.start_s < previous->end_s) {
            rep.skipped.push_back(where + ": overlaps previous label");
            continue;
        }
        const CorpusClip& source = find_clip(label.clip_id);
        try {
            GestureEntry entry;
            entry.clip_id = label.clip_id;
            entry.hand = label.hand;
            entry.params = compute_expressive_params(source.skeleton, source.clip, label, joint_map,
                                                     smoothing_window, &rep.warnings);
            entry.motion = slice_clip(source.clip, label.start_s, label.end_s);
            entry.frame_first = nearest_frame(source.clip, label.start_s);
            entry.frame_last = entry.frame_first + entry.motion.frame_count();
            entry.duration_s = static_cast<double>(entry.motion.frame_count()) * db.frame_time;
            db.entries.push_back(std::move(entry));
            previous = &label;
        } catch (const Error& e) {
            rep.skipped.push_back(where + ": " + e.what());
        }
    }

    for (std::size_t i = 0; i < db.entries.size(); ++i) db.entries[i].id = static_cast<int>(i);
    rep.built = db.entries.size();
    return db;
}

std::string save_database(const GestureDatabase& db) {
    const json entries = entries_to_json(db);
    const std::string canonical = entries.dump();
    json doc = {{"version", kFormatVersion},
                {"frame_time", db.frame_time},
                {"skeleton", skeleton_to_json(db.skeleton)},
                {"entries", entries},
                {"checksum", sha256_hex(canonical)}};
    return doc.dump();
}

GestureDatabase load_database(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("database is not valid JSON (truncated?): ") + e.what());
    }

    try {
        const int version = doc.at("version").get<int>();
        if (version != kFormatVersion)
            fail(Errc::bad_version, "unsupported database version " + std::to_string(version) +
                                        ", expected " + std::to_string(kFormatVersion));

        const std::string canonical = doc.at("entries").dump();
        const std::string expected = doc.at("checksum").get<std::string>();
        const std::string actual = sha256_hex(canonical);
        if (actual != expected)
            fail(Errc::bad_checksum, "database checksum mismatch: entries block hashes to " + actual);

        GestureDatabase db;
        db.frame_time = doc.at("frame_time").get<double>();
        db.skeleton = skeleton_from_json(doc.at("skeleton"));
        const std::size_t channels = db.skeleton.channel_count();
        for (const json& je : doc.at("entries")) {
            GestureEntry e;
            e.id = je.at("id").get<int>();
            e.clip_id = je.at("clip").get<std::string>();
            e.frame_first = je.at("frame_first").get<std::size_t>();
            e.frame_last = je.at("frame_last").get<std::size_t>();
            e.duration_s = je.at("duration_s").get<double>();
            e.hand = hand_from_name(je.at("hand").get<std::string>());
            e.params = params_from_json(je.at("params"));
            e.motion.frame_time = db.frame_time;
            e.motion.channel_count = channels;
            for (const json& frame : je.at("motion")) {
                if (frame.size() != channels)
                    fail(Errc::mismatch, "entry " + std::to_string(e.id) + " motion frame has " +
                                             std::to_string(frame.size()) + " values, expected " +
                                             std::to_string(channels));
                for (const json& v : frame) e.motion.values.push_back(v.get<double>());
            }
            db.entries.push_back(std::move(e));
        }
        for (std::size_t i = 0; i < db.entries.size(); ++i) {
            if (db.entries[i].id != static_cast<int>(i))
                fail(Errc::parse, "entry ids are not dense from 0");
        }
        return db;
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("malformed database document: ") + e.what());
    }
}

std::string database_summary_json(const GestureDatabase& db) {
    json summary = {{"entries", db.entries.size()},
                    {"frame_time", db.frame_time},
                    {"joints", db.skeleton.joints.size()},
                    {"channels", db.skeleton.channel_count()}};
    if (!db.entries.empty()) {
        double dmin = std::numeric_limits<double>::infinity();
        double dmax = -dmin;
        for (const GestureEntry& e : db.entries) {
            dmin = std::min(dmin, e.duration_s);
            dmax = std::max(dmax, e.duration_s);
        }
        summary["duration_s"] = {{"min", dmin}, {"max", dmax}};
        json params;
        for (int p = 0; p < 5; ++p) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            double sum = 0.0;
            for (const GestureEntry& e : db.entries) {
                const double v = e.params.as_array()[p];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                sum += v;
            }
            params[kParamNames[p]] = {
                {"min", lo}, {"max", hi}, {"mean", sum / static_cast<double>(db.entries.size())}};
        }
        summary["params"] = params;
    }
    return summary.dump(2);
}

std::string entry_json(const GestureDatabase& db, int id) {
    const GestureEntry& e = db.entry(id);
    json out = {{"id", e.id},
                {"clip", e.clip_id},
                {"frame_first", e.frame_first},
                {"frame_last", e.frame_last},
                {"duration_s", e.duration_s},
                {"hand", hand_name(e.hand)},
                {"frames", e.motion.frame_count()},
                {"params", params_to_json(e.params)}};
    return out.dump(2);
}

} // namespace gm
