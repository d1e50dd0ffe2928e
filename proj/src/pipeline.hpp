#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "evaluation.hpp"
#include "formats.hpp"

namespace gm {

// Document-level entry points behind the C API: each takes and returns the
// external file formats so the CLI stays a thin shell.

GestureDatabase pipeline_build(const std::string& corpus_dir, const std::string& labels_path,
                               const std::string& joint_map_path, const PipelineConfig& config,
                               BuildReport* report = nullptr);

std::string pipeline_select(const GestureDatabase& db, std::string_view slots_json,
                            std::string_view mode, std::uint64_t seed,
                            const PipelineConfig& config);

// Cross-checks every selection's stroke onset against its slot before
// rendering and fails hard on mismatch.
std::string pipeline_assemble(const GestureDatabase& db, std::string_view selections_json,
                              std::string_view rest_json, const PipelineConfig& config,
                              RenderReport* report = nullptr);

struct EvalOutputs {
    std::string csv;
    std::string summary_json;
};

EvalOutputs pipeline_evaluate(const GestureDatabase& db, std::string_view slots_json,
                              std::span<const Condition> conditions, std::uint64_t seed,
                              const PipelineConfig& config);

} // namespace gm
