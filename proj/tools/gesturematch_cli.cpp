//
// gesturematch_cli.cpp
//
// Command-line pipeline driver. Talks to the core exclusively through the
// shared-library C API; file handling and flag/config merging live here.
//
// Configuration precedence: command-line flag > config file > built-in
// default. Baseline selection modes require an explicit --seed.
//

#include <gesturematch.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using nlohmann::json;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> weights_csv;
    std::optional<double> tau;
    std::optional<double> fps;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--seed", opts.seed, "RNG seed (mandatory for baseline modes)");
    cmd->add_option("--weights", opts.weights_csv,
                    "parameter weights v,a,p,s,h (velocity, accel peak, path, swivel, hand)");
    cmd->add_option("--tau", opts.tau, "duration tolerance");
    cmd->add_option("--fps", opts.fps, "output frame rate");
}

std::string read_file_or_die(const std::string& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) {
        std::cerr << "error: cannot open '" << path << "'\n";
        std::exit(1);
    }
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

void write_file_or_die(const std::string& path, const std::string& content) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream || !(stream << content)) {
        std::cerr << "error: cannot write '" << path << "'\n";
        std::exit(1);
    }
}

// Flag > config file > default; the merged document goes to the C API.
std::string merged_config(const CommonOpts& opts) {
    json doc = json::object();
    if (!opts.config_path.empty()) {
        try {
            doc = json::parse(read_file_or_die(opts.config_path));
        } catch (const json::exception& e) {
            std::cerr << "error: config file '" << opts.config_path << "': " << e.what() << "\n";
            std::exit(1);
        }
    }
    if (opts.weights_csv) {
        std::vector<double> weights;
        std::stringstream stream(*opts.weights_csv);
        std::string item;
        while (std::getline(stream, item, ',')) {
            try {
                weights.push_back(std::stod(item));
            } catch (const std::exception&) {
                std::cerr << "error: bad --weights component '" << item << "'\n";
                std::exit(1);
            }
        }
        if (weights.size() != 5) {
            std::cerr << "error: --weights needs five comma-separated values\n";
            std::exit(1);
        }
        doc["weights"] = weights;
    }
    if (opts.tau) doc["tau"] = *opts.tau;
    if (opts.fps) doc["fps"] = *opts.fps;
    return doc.dump();
}

[[noreturn]] void die(gm_status status, const std::string& context) {
    std::cerr << "error: " << context << ": " << gm_status_name(status) << ": " << gm_last_error()
              << "\n";
    std::exit(1);
}

struct OwnedString {
    char* text = nullptr;
    ~OwnedString() { gm_string_free(text); }
    std::string str() const { return text ? std::string(text) : std::string(); }
};

struct OwnedDatabase {
    gm_database* db = nullptr;
    ~OwnedDatabase() { gm_database_free(db); }
};

OwnedDatabase load_db_or_die(const std::string& path) {
    OwnedDatabase db;
    if (gm_status status = gm_database_load(path.c_str(), &db.db))
        die(status, "loading database '" + path + "'");
    return db;
}

bool needs_seed(const std::string& mode) {
    return mode == "unmatched" || mode == "unmatched_untimed";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gesture database build, matching, assembly, and evaluation"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "build a gesture database from a BVH corpus");
    std::string corpus_dir, labels_path, joint_map_path, build_out;
    CommonOpts build_opts;
    build->add_option("corpus_dir", corpus_dir, "directory of .bvh clips")->required();
    build->add_option("labels", labels_path, "stroke labels JSON")->required();
    build->add_option("--joint-map", joint_map_path, "joint map JSON")->required();
    build->add_option("-o,--output", build_out, "database file to write")->required();
    add_common(build, build_opts);

    // inspect
    auto* inspect = app.add_subcommand("inspect", "print a database summary or one entry");
    std::string inspect_db;
    std::optional<std::int64_t> inspect_id;
    inspect->add_option("database", inspect_db, "database file")->required();
    inspect->add_option("--id", inspect_id, "entry id to print");

    // select
    auto* select = app.add_subcommand("select", "select a gesture for every slot");
    std::string select_db, slots_path, select_out, mode = "matched";
    CommonOpts select_opts;
    select->add_option("database", select_db, "database file")->required();
    select->add_option("slots", slots_path, "slot/target JSON")->required();
    select->add_option("--mode", mode, "matched|unmatched|unmatched_untimed|ground_truth");
    select->add_option("-o,--output", select_out, "selections file to write")->required();
    add_common(select, select_opts);

    // assemble
    auto* assemble = app.add_subcommand("assemble", "render selections to a BVH animation");
    std::string assemble_db, selections_path, assemble_out, rest_path;
    CommonOpts assemble_opts;
    assemble->add_option("database", assemble_db, "database file")->required();
    assemble->add_option("selections", selections_path, "selections JSON")->required();
    assemble->add_option("--rest", rest_path, "rest pose spec JSON");
    assemble->add_option("-o,--output", assemble_out, "BVH file to write")->required();
    add_common(assemble, assemble_opts);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "objective comparison across conditions");
    std::string eval_db, eval_slots, eval_out, conditions = "matched,unmatched,unmatched_untimed";
    CommonOpts eval_opts;
    evaluate->add_option("database", eval_db, "database file")->required();
    evaluate->add_option("slots", eval_slots, "slot/target JSON")->required();
    evaluate->add_option("--conditions", conditions, "comma-separated condition list");
    evaluate->add_option("-o,--output", eval_out, "report path prefix (.csv and .json)")
        ->required();
    add_common(evaluate, eval_opts);

    CLI11_PARSE(app, argc, argv);

    if (build->parsed()) {
        const std::string config = merged_config(build_opts);
        OwnedString report;
        OwnedDatabase db;
        if (gm_status status =
                gm_database_build(corpus_dir.c_str(), labels_path.c_str(), joint_map_path.c_str(),
                                  config.c_str(), &report.text, &db.db))
            die(status, "building database");
        if (gm_status status = gm_database_save(db.db, build_out.c_str()))
            die(status, "saving database '" + build_out + "'");
        const json report_doc = json::parse(report.str());
        std::cout << "built " << gm_database_size(db.db) << " entries, skipped "
                  << report_doc["skipped"].size() << " labels -> " << build_out << "\n";
        for (const auto& reason : report_doc["skipped"])
            std::cerr << "skipped: " << reason.get<std::string>() << "\n";
        for (const auto& warning : report_doc["warnings"])
            std::cerr << "warning: " << warning.get<std::string>() << "\n";
        OwnedString summary;
        if (gm_status status = gm_database_summary(db.db, &summary.text))
            die(status, "summarizing database");
        std::cout << summary.str() << "\n";
        return 0;
    }

    if (inspect->parsed()) {
        OwnedDatabase db = load_db_or_die(inspect_db);
        OwnedString out;
        if (inspect_id) {
            if (gm_status status = gm_database_entry(db.db, *inspect_id, &out.text))
                die(status, "entry " + std::to_string(*inspect_id));
        } else {
            if (gm_status status = gm_database_summary(db.db, &out.text))
                die(status, "summarizing database");
        }
        std::cout << out.str() << "\n";
        return 0;
    }

    if (select->parsed()) {
        if (needs_seed(mode) && !select_opts.seed) {
            std::cerr << "error: --seed is mandatory for mode '" << mode << "'\n";
            return 1;
        }
        OwnedDatabase db = load_db_or_die(select_db);
        const std::string slots = read_file_or_die(slots_path);
        const std::string config = merged_config(select_opts);
        OwnedString out;
        if (gm_status status = gm_select(db.db, slots.c_str(), mode.c_str(),
                                         select_opts.seed.value_or(0), config.c_str(), &out.text))
            die(status, "selecting (mode " + mode + ")");
        write_file_or_die(select_out, out.str());
        std::cout << "wrote " << select_out << "\n";
        return 0;
    }

    if (assemble->parsed()) {
        OwnedDatabase db = load_db_or_die(assemble_db);
        const std::string selections = read_file_or_die(selections_path);
        const std::string rest = rest_path.empty() ? std::string() : read_file_or_die(rest_path);
        const std::string config = merged_config(assemble_opts);
        OwnedString bvh;
        if (gm_status status = gm_assemble(db.db, selections.c_str(),
                                           rest_path.empty() ? nullptr : rest.c_str(),
                                           config.c_str(), &bvh.text))
            die(status, "assembling");
        write_file_or_die(assemble_out, bvh.str());
        std::cout << "wrote " << assemble_out << "\n";
        return 0;
    }

    if (evaluate->parsed()) {
        bool baseline = conditions.find("unmatched") != std::string::npos;
        if (baseline && !eval_opts.seed) {
            std::cerr << "error: --seed is mandatory when evaluating baseline conditions\n";
            return 1;
        }
        OwnedDatabase db = load_db_or_die(eval_db);
        const std::string slots = read_file_or_die(eval_slots);
        const std::string config = merged_config(eval_opts);
        OwnedString csv, summary;
        if (gm_status status = gm_evaluate(db.db, slots.c_str(), conditions.c_str(),
                                           eval_opts.seed.value_or(0), config.c_str(), &csv.text,
                                           &summary.text))
            die(status, "evaluating");
        write_file_or_die(eval_out + ".csv", csv.str());
        write_file_or_die(eval_out + ".json", summary.str());
        std::cout << summary.str() << "\n";
        std::cout << "wrote " << eval_out << ".csv and " << eval_out << ".json\n";
        return 0;
    }

    return 0;
}
