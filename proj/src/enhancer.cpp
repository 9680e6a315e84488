#include "gsdkit/enhancer.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <unordered_set>

#include "gsdkit/error.hpp"
#include "gsdkit/parallel.hpp"
#include "gsdkit/png_io.hpp"
#include "gsdkit/resample.hpp"
#include "gsdkit/subprocess.hpp"
#include "gsdkit/tiler.hpp"

namespace gsdkit {
namespace {

namespace fs = std::filesystem;

constexpr const char* kJobPlaceholder = "{job_file}";

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (const char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

std::string render_command(const EnhancerSpec& spec, const fs::path& job_file) {
    std::string cmd = spec.command_template;
    const std::size_t pos = cmd.find(kJobPlaceholder);
    cmd.replace(pos, std::string(kJobPlaceholder).size(), shell_quote(job_file.string()));
    return cmd;
}

nlohmann::json scale_to_json(const Rational& scale) {
    if (scale.is_integral()) return scale.num;
    return scale.to_string();
}

Rational scale_from_json(const nlohmann::json& value) {
    if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
    if (value.is_string()) return Rational::parse(value.get<std::string>());
    if (value.is_number_float()) return Rational::parse(nlohmann::json(value).dump());
    fail("InvalidSpec", "scale must be a number or rational string");
}

int scaled_extent(int extent, const Rational& scale, const char* what) {
    const Rational scaled = Rational(extent) * scale;
    if (!scaled.is_integral())
        fail("GeometryError", std::string(what) + " " + std::to_string(extent) + " * scale " +
                                  scale.to_string() + " is not an integer");
    if (scaled.num < 1) fail("GeometryError", std::string(what) + " scales below one pixel");
    return static_cast<int>(scaled.num);
}

void write_job_file(const fs::path& path, const nlohmann::ordered_json& doc) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("IoError", "cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

// Runs one job process and maps failures onto spec'd error codes.
void run_job(const EnhancerSpec& spec, const fs::path& job_file, double timeout) {
    const ProcessResult result = run_process(render_command(spec, job_file), timeout);
    if (result.timed_out)
        fail("EnhancerTimeout", "enhancer '" + spec.name + "' exceeded " +
                                    std::to_string(timeout) + "s for " + job_file.string());
    if (result.exit_code != 0)
        fail("EnhancerFailed", "enhancer '" + spec.name + "' exited with " +
                                   std::to_string(result.exit_code) +
                                   (result.stderr_excerpt.empty()
                                        ? std::string()
                                        : "; stderr: " + result.stderr_excerpt));
}

}  // namespace

EnhancerSpec parse_enhancer_spec(const nlohmann::json& doc) {
    EnhancerSpec spec;
    try {
        spec.name = doc.at("name").get<std::string>();
        spec.command_template = doc.at("command_template").get<std::string>();
        if (doc.contains("mode")) {
            const std::string mode = doc.at("mode").get<std::string>();
            if (mode == "whole_image")
                spec.mode = EnhancerMode::WholeImage;
            else if (mode == "tiled")
                spec.mode = EnhancerMode::Tiled;
            else
                fail("InvalidSpec", "unknown enhancer mode '" + mode + "'");
        }
        if (doc.contains("scale")) spec.scale = scale_from_json(doc.at("scale"));
        if (doc.contains("tile")) spec.tile = doc.at("tile").get<int>();
        if (doc.contains("prompt")) spec.prompt = doc.at("prompt").get<std::string>();
        if (doc.contains("timeout")) spec.timeout_seconds = doc.at("timeout").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail("InvalidSpec", std::string("enhancer spec: ") + e.what());
    }
    validate_enhancer_spec(spec);
    return spec;
}

EnhancerSpec load_enhancer_spec(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot read " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail("InvalidSpec", path.string() + ": " + e.what());
    }
    return parse_enhancer_spec(doc);
}

void validate_enhancer_spec(const EnhancerSpec& spec) {
    if (spec.name.empty()) fail("InvalidSpec", "enhancer name is empty");
    if (count_occurrences(spec.command_template, kJobPlaceholder) != 1)
        fail("InvalidSpec", "command_template must contain {job_file} exactly once");
    if (!spec.scale.positive()) fail("InvalidSpec", "scale must be positive");
    if (spec.mode == EnhancerMode::Tiled) {
        if (spec.tile < 1) fail("InvalidSpec", "tiled mode requires a tile size");
        if (spec.scale < Rational(1)) fail("InvalidSpec", "tiled mode requires scale >= 1");
    }
    if (spec.timeout_seconds <= 0) fail("InvalidSpec", "timeout must be positive");
}

nlohmann::ordered_json make_job_document(const EnhancerSpec& spec,
                                         const std::vector<fs::path>& inputs,
                                         const fs::path& output_dir) {
    nlohmann::ordered_json doc;
    doc["enhancer"] = spec.name;
    doc["scale"] = scale_to_json(spec.scale);
    if (spec.prompt) doc["prompt"] = *spec.prompt;
    doc["inputs"] = nlohmann::ordered_json::array();
    for (const auto& p : inputs) doc["inputs"].push_back(fs::absolute(p).string());
    doc["output_dir"] = fs::absolute(output_dir).string();
    return doc;
}

RasterImage tiled_enhance(const RasterImage& img, const EnhancerSpec& spec,
                          const fs::path& work_dir) {
    validate_enhancer_spec(spec);
    if (spec.mode != EnhancerMode::Tiled) fail("InvalidSpec", "tiled_enhance requires tiled mode");
    img.validate();
    if (img.width % spec.tile != 0 || img.height % spec.tile != 0)
        fail("GeometryError", "tile " + std::to_string(spec.tile) + " does not divide " +
                                  std::to_string(img.width) + "x" + std::to_string(img.height));

    const int cols = img.width / spec.tile;
    const int rows = img.height / spec.tile;
    const int out_tile = scaled_extent(spec.tile, spec.scale, "tile");
    const int out_w = scaled_extent(img.width, spec.scale, "width");
    const int out_h = scaled_extent(img.height, spec.scale, "height");

    const TileGrid grid = plan_grid(img.width, img.height, spec.tile, rows, cols);
    const std::vector<RasterImage> tiles = extract_tiles(img, grid);

    const fs::path tile_dir = work_dir / "tiles";
    const fs::path raw_dir = work_dir / "raw";
    fs::create_directories(tile_dir);
    fs::create_directories(raw_dir);

    std::vector<fs::path> inputs;
    inputs.reserve(tiles.size());
    for (std::size_t k = 0; k < tiles.size(); ++k) {
        const fs::path p = tile_dir / ("t" + std::to_string(k) + ".png");
        png::write_image(p, tiles[k]);
        inputs.push_back(p);
    }

    const fs::path job_file = work_dir / "job.json";
    write_job_file(job_file, make_job_document(spec, inputs, raw_dir));
    run_job(spec, job_file, spec.timeout_seconds);

    std::vector<std::pair<int, RasterImage>> enhanced;
    enhanced.reserve(tiles.size());
    for (std::size_t k = 0; k < tiles.size(); ++k) {
        const fs::path p = raw_dir / ("t" + std::to_string(k) + ".png");
        if (!fs::exists(p)) fail("OutputMissing", "tile t" + std::to_string(k));
        RasterImage tile = png::read_image(p, img.gsd_cm);
        if (tile.width != out_tile || tile.height != out_tile)
            fail("GeometryError", "tile t" + std::to_string(k) + " came back " +
                                      std::to_string(tile.width) + "x" +
                                      std::to_string(tile.height) + ", expected " +
                                      std::to_string(out_tile));
        enhanced.emplace_back(static_cast<int>(k), std::move(tile));
    }

    const TileGrid out_grid = plan_grid(out_w, out_h, out_tile, rows, cols);
    RasterImage out = reassemble(enhanced, out_grid);
    out.gsd_cm = img.gsd_cm * Rational(img.width, out_w);
    return out;
}

EnhanceResult run_enhancer(const DatasetManifest& input, const EnhancerSpec& spec, int target_w,
                           int target_h, const fs::path& out_dir, const EnhanceOptions& options) {
    validate_enhancer_spec(spec);
    input.validate();
    if (input.entries.empty()) fail("EmptyDataset", "input manifest has no entries");
    if (target_w < 1 || target_h < 1) fail("GeometryError", "target dimensions must be >= 1");

    const double timeout =
        options.timeout_override > 0 ? options.timeout_override : spec.timeout_seconds;
    const std::size_t n = input.entries.size();

    const auto [in_w, in_h] = png::read_dimensions(input.image_file(input.entries.front()));
    const int raw_w = scaled_extent(in_w, spec.scale, "width");
    const int raw_h = scaled_extent(in_h, spec.scale, "height");

    {
        std::unordered_set<std::string> stems;
        for (const auto& e : input.entries)
            if (!stems.insert(fs::path(e.image_path).stem().string()).second)
                fail("InvalidManifest", "duplicate image stem for entry '" + e.id + "'");
    }

    const fs::path work_dir = out_dir / "work";
    const fs::path images_dir = out_dir / "images";
    const fs::path masks_dir = out_dir / "masks";
    fs::create_directories(work_dir);
    fs::create_directories(images_dir);
    fs::create_directories(masks_dir);

    std::vector<std::optional<Error>> entry_error(n);
    auto set_entry_error = [&](std::size_t i, const Error& e) { entry_error[i] = e; };

    // Phase 1: run the external processes.
    std::vector<fs::path> raw_image(n);  // where each enhanced image lands
    if (spec.mode == EnhancerMode::WholeImage) {
        const int num_jobs = static_cast<int>(std::min<std::size_t>(std::max(1, options.workers), n));
        struct JobSlot {
            std::vector<std::size_t> entry_indices;
            fs::path job_file;
            fs::path raw_dir;
        };
        std::vector<JobSlot> jobs(num_jobs);
        for (std::size_t i = 0; i < n; ++i)
            jobs[i % num_jobs].entry_indices.push_back(i);
        for (int j = 0; j < num_jobs; ++j) {
            jobs[j].job_file = work_dir / ("job_" + std::to_string(j) + ".json");
            jobs[j].raw_dir = work_dir / ("raw_" + std::to_string(j));
        }

        std::vector<std::optional<Error>> job_error(num_jobs);
        parallel_for(jobs.size(), options.workers, [&](std::size_t j) {
            JobSlot& job = jobs[j];
            try {
                std::vector<fs::path> inputs;
                inputs.reserve(job.entry_indices.size());
                for (const std::size_t i : job.entry_indices)
                    inputs.push_back(input.image_file(input.entries[i]));
                fs::create_directories(job.raw_dir);
                write_job_file(job.job_file, make_job_document(spec, inputs, job.raw_dir));
                run_job(spec, job.job_file, timeout);
            } catch (const Error& e) {
                job_error[j] = e;
            }
        });

        for (int j = 0; j < num_jobs; ++j) {
            for (const std::size_t i : jobs[j].entry_indices) {
                if (job_error[j]) {
                    set_entry_error(i, *job_error[j]);
                } else {
                    const std::string stem =
                        fs::path(input.entries[i].image_path).stem().string();
                    raw_image[i] = jobs[j].raw_dir / (stem + ".png");
                }
            }
        }
    }

    // Phase 2: validate outputs, repair dimensions, emit final images/masks.
    parallel_for(n, options.workers, [&](std::size_t i) {
        if (entry_error[i]) return;
        const ManifestEntry& entry = input.entries[i];
        try {
            const auto [w, h] = png::read_dimensions(input.image_file(entry));
            if (w != in_w || h != in_h)
                fail("GeometryError", "image dimensions differ across dataset at '" + entry.id + "'");

            RasterImage enhanced;
            if (spec.mode == EnhancerMode::Tiled) {
                const RasterImage src = png::read_image(input.image_file(entry), input.gsd_cm);
                enhanced = tiled_enhance(src, spec, work_dir / ("tiled_" + entry.id));
            } else {
                if (!fs::exists(raw_image[i])) fail("OutputMissing", entry.id);
                enhanced = png::read_image(raw_image[i], input.gsd_cm * Rational(in_w, raw_w));
                if (enhanced.width != raw_w || enhanced.height != raw_h)
                    fail("GeometryError", "enhancer returned " + std::to_string(enhanced.width) +
                                              "x" + std::to_string(enhanced.height) + " for '" +
                                              entry.id + "', expected " + std::to_string(raw_w) +
                                              "x" + std::to_string(raw_h));
            }
            if (enhanced.width != target_w || enhanced.height != target_h)
                enhanced = resize_image(enhanced, target_w, target_h, FilterKind::Lanczos3);
            enhanced.gsd_cm = input.gsd_cm * Rational(in_w, target_w);
            png::write_image(images_dir / (entry.id + ".png"), enhanced);

            const fs::path mask_src = input.mask_file(entry);
            const fs::path mask_dst = masks_dir / (entry.id + ".png");
            if (target_w == in_w && target_h == in_h) {
                fs::copy_file(mask_src, mask_dst, fs::copy_options::overwrite_existing);
            } else {
                const LabelMask mask = png::read_mask(mask_src);
                png::write_mask(mask_dst, resize_mask(mask, target_w, target_h));
            }
        } catch (const Error& e) {
            set_entry_error(i, e);
        } catch (const std::exception& e) {
            set_entry_error(i, Error("IoError", e.what()));
        }
    });

    // Phase 3: surface failures, then assemble the derived manifest.
    EnhanceResult result;
    std::vector<ManifestEntry> derived;
    derived.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ManifestEntry& entry = input.entries[i];
        if (entry_error[i]) {
            if (!options.keep_going) throw *entry_error[i];
            result.failed_ids.push_back(entry.id);
            continue;
        }
        ManifestEntry e;
        e.id = entry.id;
        e.image_path = "images/" + entry.id + ".png";
        e.mask_path = "masks/" + entry.id + ".png";
        e.parent_id = entry.id;
        e.patch_index = 0;
        derived.push_back(std::move(e));
    }
    if (derived.empty()) fail("EmptyDataset", "every entry failed enhancement");

    std::vector<std::string> transforms;
    transforms.push_back("enhance(" + spec.name + ",scale=" + spec.scale.to_string() +
                         (spec.mode == EnhancerMode::Tiled
                              ? ",tiled=" + std::to_string(spec.tile)
                              : std::string()) +
                         ")");
    if (raw_w != target_w || raw_h != target_h)
        transforms.push_back("resize(lanczos3," + std::to_string(target_w) + "x" +
                             std::to_string(target_h) + ")");

    result.manifest =
        derive_manifest(input, input.name + spec.name, transforms, std::move(derived),
                        input.gsd_cm * Rational(in_w, target_w));
    result.manifest.root = out_dir;

    if (!options.keep_work) {
        std::error_code ec;
        fs::remove_all(work_dir, ec);
    }
    return result;
}

}  // namespace gsdkit
