#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsdkit/image.hpp"
#include "gsdkit/manifest.hpp"

namespace gsdkit {

enum class EnhancerMode { WholeImage, Tiled };

// Description of one external enhancement model reached through the
// process-and-files protocol. `name` doubles as the dataset suffix
// (P50 + "G" -> P50G). The command template must contain {job_file} exactly
// once; it is replaced by the path of a JSON job file.
struct EnhancerSpec {
    std::string name;
    std::string command_template;
    EnhancerMode mode = EnhancerMode::WholeImage;
    Rational scale{1};
    int tile = 0;  // tiled mode only
    std::optional<std::string> prompt;
    double timeout_seconds = 600.0;
};

EnhancerSpec parse_enhancer_spec(const nlohmann::json& doc);
EnhancerSpec load_enhancer_spec(const std::filesystem::path& path);
void validate_enhancer_spec(const EnhancerSpec& spec);

struct EnhanceOptions {
    int workers = 4;
    bool keep_going = false;
    double timeout_override = 0.0;  // > 0 replaces the spec timeout
    bool keep_work = false;         // retain job files and raw outputs
};

struct EnhanceResult {
    DatasetManifest manifest;
    std::vector<std::string> failed_ids;  // populated only with keep_going
};

// Runs the enhancer over every manifest entry: writes job files, invokes the
// command, validates one output per input (same stem, dims = input * scale),
// repairs dimensions to (target_w, target_h) with Lanczos3 when they differ,
// resamples masks to the target and assembles the derived manifest
// (name = input.name + spec.name) under out_dir. Without keep_going the first
// failure aborts before any manifest is written.
EnhanceResult run_enhancer(const DatasetManifest& input, const EnhancerSpec& spec, int target_w,
                           int target_h, const std::filesystem::path& out_dir,
                           const EnhanceOptions& options);

// The §-style tiled workaround for fixed-outscale models: splits the image on
// a non-overlapping grid of `spec.tile` squares, enhances every tile in one
// job, and reassembles the upscaled tiles into an image of size
// (width*scale, height*scale). Any tile failure aborts the image.
RasterImage tiled_enhance(const RasterImage& img, const EnhancerSpec& spec,
                          const std::filesystem::path& work_dir);

// Exposed for tests: the exact job-file document for a set of inputs.
nlohmann::ordered_json make_job_document(const EnhancerSpec& spec,
                                         const std::vector<std::filesystem::path>& inputs,
                                         const std::filesystem::path& output_dir);

}  // namespace gsdkit
