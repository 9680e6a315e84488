#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gsdkit/enhancer.hpp"
#include "gsdkit/manifest.hpp"

namespace gsdkit {

// Low-resolution study: degrade a source dataset to `degrade_to` pixels (same
// output geometry), then run every listed enhancer over the degraded set.
// Masks never change in this scenario, so every output references a mask
// bit-identical to its source.
struct ScenarioSpec {
    std::filesystem::path source_manifest;
    int degrade_to = 0;
    std::vector<EnhancerSpec> enhancers;
    std::map<std::string, std::string> output_names;  // enhancer name -> dataset name
};

ScenarioSpec load_scenario_spec(const std::filesystem::path& path);
void validate_scenario_spec(const ScenarioSpec& spec);

// Emits <source>lr plus one dataset per enhancer under out_root/<name>/, each
// with a saved manifest.json, and returns the manifests in that order.
std::vector<DatasetManifest> run_scenario(const ScenarioSpec& spec,
                                          const std::filesystem::path& out_root,
                                          const EnhanceOptions& options);

}  // namespace gsdkit
