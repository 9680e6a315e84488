#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gsdkit/enhancer.hpp"
#include "gsdkit/eval.hpp"
#include "gsdkit/manifest.hpp"
#include "gsdkit/pairgen.hpp"
#include "gsdkit/scenario.hpp"

namespace gsdkit::pipeline {

// Composed operations behind the CLI subcommands. Every operation validates
// its inputs before writing anything and honors dry_run by returning planned
// counts only.

struct IngestParams {
    std::filesystem::path image_dir;
    std::filesystem::path mask_dir;
    Rational gsd_cm{0, 1};
    std::string name;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    bool dry_run = false;
};

struct IngestResult {
    DatasetManifest manifest;
    std::filesystem::path manifest_path;
    std::size_t planned_entries = 0;
};

IngestResult ingest(const IngestParams& params);

struct HarmonizeParams {
    std::filesystem::path manifest_path;
    std::string method;  // "lanczos" or "enhancer"
    std::optional<EnhancerSpec> enhancer;
    Rational target_gsd{0, 1};
    int patch = 256;
    int rows = 3;
    int cols = 3;
    std::string output_name;  // empty: derived default
    std::filesystem::path out_dir;
    int workers = 4;
    bool keep_going = false;
    double timeout_override = 0.0;
    bool keep_work = false;
    bool dry_run = false;
};

struct HarmonizeResult {
    DatasetManifest manifest;
    std::filesystem::path manifest_path;
    std::size_t planned_entries = 0;
    bool tiled = false;
    std::vector<std::string> failed_ids;
};

HarmonizeResult harmonize(const HarmonizeParams& params);

// Tiles a dataset already at its target dimensions into rows x cols patches.
DatasetManifest tile_dataset(const DatasetManifest& src, int patch, int rows, int cols,
                             const std::filesystem::path& out_dir, int workers,
                             const std::string& name);

struct PairsParams {
    std::filesystem::path manifest_path;
    std::vector<int> resolutions;
    std::filesystem::path out_dir;
    int workers = 4;
    bool dry_run = false;
};

struct PairsResult {
    DatasetManifest manifest;
    std::filesystem::path manifest_path;
    std::filesystem::path records_path;
    std::size_t planned_pairs = 0;
};

PairsResult pairs(const PairsParams& params);

struct EnhanceParams {
    std::filesystem::path manifest_path;
    EnhancerSpec spec;
    int target_w = 0;  // 0: keep source dimensions
    int target_h = 0;
    std::string output_name;
    std::filesystem::path out_dir;
    EnhanceOptions options;
    bool dry_run = false;
};

struct EnhanceCmdResult {
    DatasetManifest manifest;
    std::filesystem::path manifest_path;
    std::size_t planned_entries = 0;
    std::vector<std::string> failed_ids;
};

EnhanceCmdResult enhance(const EnhanceParams& params);

struct EvalParams {
    std::filesystem::path pred_dir;
    std::filesystem::path target_manifest;
    std::string source_name;
    Split split = Split::Test;           // which slice of the target to score
    bool all_splits = false;
    std::filesystem::path out_dir;
    int workers = 4;
    bool dry_run = false;
};

struct EvalResult {
    IoUReport report;
    std::vector<IoUReport> matrix;  // everything recorded so far, in order
    std::filesystem::path csv_path;
    std::filesystem::path md_path;
    std::size_t planned_images = 0;
};

EvalResult evaluate(const EvalParams& params);

struct ScenarioParams {
    std::filesystem::path spec_path;
    std::filesystem::path out_root;
    EnhanceOptions options;
    bool dry_run = false;
};

struct ScenarioResult {
    std::vector<DatasetManifest> manifests;
    std::size_t planned_manifests = 0;
    std::size_t planned_entries_each = 0;
};

ScenarioResult scenario(const ScenarioParams& params);

}  // namespace gsdkit::pipeline
