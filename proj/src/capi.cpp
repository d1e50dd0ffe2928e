//
// capi.cpp
//
// extern "C" shell over the C++ core: opaque handles, status codes, and a
// thread-local last-error message. No exception escapes this boundary.
//

#include "gesturematch.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "database.hpp"
#include "error.hpp"
#include "formats.hpp"
#include "pipeline.hpp"

using nlohmann::json;

struct gm_database {
    gm::GestureDatabase db;
};

namespace {

thread_local std::string g_last_error;

gm_status status_from(gm::Errc code) {
    switch (code) {
    case gm::Errc::io: return GM_ERR_IO;
    case gm::Errc::parse: return GM_ERR_PARSE;
    case gm::Errc::invalid_argument: return GM_ERR_INVALID_ARGUMENT;
    case gm::Errc::not_found: return GM_ERR_NOT_FOUND;
    case gm::Errc::mismatch: return GM_ERR_MISMATCH;
    case gm::Errc::bad_version: return GM_ERR_VERSION;
    case gm::Errc::bad_checksum: return GM_ERR_CHECKSUM;
    case gm::Errc::degenerate: return GM_ERR_DEGENERATE;
    case gm::Errc::empty: return GM_ERR_EMPTY;
    case gm::Errc::internal: return GM_ERR_INTERNAL;
    }
    return GM_ERR_INTERNAL;
}

template <typename Fn>
gm_status guarded(Fn&& fn) {
    try {
        fn();
        return GM_OK;
    } catch (const gm::Error& e) {
        g_last_error = e.what();
        return status_from(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return GM_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return GM_ERR_INTERNAL;
    }
}

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

gm_status require(bool condition, const char* what) {
    if (condition) return GM_OK;
    g_last_error = what;
    return GM_ERR_INVALID_ARGUMENT;
}

gm::PipelineConfig config_from(const char* config_json) {
    gm::PipelineConfig config;
    if (config_json && *config_json) gm::apply_config_json(config, config_json);
    return config;
}

std::string build_report_json(const gm::BuildReport& report) {
    json doc = {{"built", report.built}, {"skipped", report.skipped}, {"warnings", report.warnings}};
    return doc.dump(2);
}

} // namespace

extern "C" {

const char* gm_version(void) { return "0.1.0"; }

const char* gm_status_name(gm_status status) {
    switch (status) {
    case GM_OK: return "ok";
    case GM_ERR_IO: return "io";
    case GM_ERR_PARSE: return "parse";
    case GM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GM_ERR_NOT_FOUND: return "not found";
    case GM_ERR_MISMATCH: return "mismatch";
    case GM_ERR_VERSION: return "unsupported version";
    case GM_ERR_CHECKSUM: return "checksum failure";
    case GM_ERR_DEGENERATE: return "degenerate geometry";
    case GM_ERR_EMPTY: return "empty input";
    case GM_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* gm_last_error(void) { return g_last_error.c_str(); }

gm_status gm_database_build(const char* corpus_dir, const char* labels_path,
                            const char* joint_map_path, const char* config_json,
                            char** report_json, gm_database** out_db) {
    if (auto bad = require(corpus_dir && labels_path && joint_map_path && out_db,
                           "corpus_dir, labels_path, joint_map_path, and out_db are required"))
        return bad;
    *out_db = nullptr;
    return guarded([&] {
        gm::BuildReport report;
        auto handle = std::make_unique<gm_database>();
        handle->db = gm::pipeline_build(corpus_dir, labels_path, joint_map_path,
                                        config_from(config_json), &report);
        if (report_json) *report_json = copy_string(build_report_json(report));
        *out_db = handle.release();
    });
}

gm_status gm_database_load(const char* path, gm_database** out_db) {
    if (auto bad = require(path && out_db, "path and out_db are required")) return bad;
    *out_db = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<gm_database>();
        handle->db = gm::load_database(gm::read_file(path));
        *out_db = handle.release();
    });
}

gm_status gm_database_save(const gm_database* db, const char* path) {
    if (auto bad = require(db && path, "db and path are required")) return bad;
    return guarded([&] { gm::write_file(path, gm::save_database(db->db)); });
}

void gm_database_free(gm_database* db) { delete db; }

int64_t gm_database_size(const gm_database* db) {
    return db ? static_cast<int64_t>(db->db.size()) : -1;
}

gm_status gm_database_summary(const gm_database* db, char** out_json) {
    if (auto bad = require(db && out_json, "db and out_json are required")) return bad;
    return guarded([&] { *out_json = copy_string(gm::database_summary_json(db->db)); });
}

gm_status gm_database_entry(const gm_database* db, int64_t id, char** out_json) {
    if (auto bad = require(db && out_json, "db and out_json are required")) return bad;
    return guarded([&] { *out_json = copy_string(gm::entry_json(db->db, static_cast<int>(id))); });
}

gm_status gm_select(const gm_database* db, const char* slots_json, const char* mode,
                    uint64_t seed, const char* config_json, char** out_selections_json) {
    if (auto bad = require(db && slots_json && mode && out_selections_json,
                           "db, slots_json, mode, and out_selections_json are required"))
        return bad;
    return guarded([&] {
        *out_selections_json =
            copy_string(gm::pipeline_select(db->db, slots_json, mode, seed, config_from(config_json)));
    });
}

gm_status gm_assemble(const gm_database* db, const char* selections_json, const char* rest_json,
                      const char* config_json, char** out_bvh) {
    if (auto bad = require(db && selections_json && out_bvh,
                           "db, selections_json, and out_bvh are required"))
        return bad;
    return guarded([&] {
        *out_bvh = copy_string(gm::pipeline_assemble(db->db, selections_json,
                                                     rest_json ? rest_json : "",
                                                     config_from(config_json)));
    });
}

gm_status gm_evaluate(const gm_database* db, const char* slots_json, const char* conditions,
                      uint64_t seed, const char* config_json, char** out_csv,
                      char** out_summary_json) {
    if (auto bad = require(db && slots_json && conditions && out_csv && out_summary_json,
                           "db, slots_json, conditions, out_csv, and out_summary_json are required"))
        return bad;
    return guarded([&] {
        std::vector<gm::Condition> list;
        std::string_view rest = conditions;
        while (!rest.empty()) {
            const std::size_t comma = rest.find(',');
            const std::string_view name = rest.substr(0, comma);
            if (!name.empty()) list.push_back(gm::condition_from_name(name));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        if (list.empty()) gm::fail(gm::Errc::invalid_argument, "no conditions requested");
        const gm::EvalOutputs outputs =
            gm::pipeline_evaluate(db->db, slots_json, list, seed, config_from(config_json));
        *out_csv = copy_string(outputs.csv);
        *out_summary_json = copy_string(outputs.summary_json);
    });
}

void gm_string_free(char* text) { delete[] text; }

} // extern "C"
