#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsdkit/error.hpp"
#include "gsdkit/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;  // --keep-going with failed entries

struct Defaults {
    std::uint64_t seed = 0;
    int workers = 4;
    int patch = 256;
    int rows = 3;
    int cols = 3;
    std::string target_gsd;
    std::vector<int> resolutions;
    std::string enhancer;
    bool quiet = false;
};

bool g_quiet = false;

void log_stage(ordered_json fields) {
    if (g_quiet) return;
    std::cerr << fields.dump() << "\n";
}

void print_result(const ordered_json& doc) { std::cout << doc.dump() << "\n"; }

long elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

// Relative output paths resolve against $GSDKIT_ROOT when it is set.
fs::path resolve_out(const fs::path& p) {
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("GSDKIT_ROOT")) return fs::path(root) / p;
    return p;
}

Defaults load_defaults(int argc, char** argv) {
    Defaults d;
    if (const char* env = std::getenv("GSDKIT_WORKERS")) d.workers = std::atoi(env);

    fs::path config_path;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    if (config_path.empty()) return d;

    std::ifstream in(config_path, std::ios::binary);
    if (!in) gsdkit::fail("IoError", "cannot read config " + config_path.string());
    nlohmann::json doc;
    try {
        in >> doc;
        if (doc.contains("seed")) d.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("workers")) d.workers = doc.at("workers").get<int>();
        if (doc.contains("patch")) d.patch = doc.at("patch").get<int>();
        if (doc.contains("rows")) d.rows = doc.at("rows").get<int>();
        if (doc.contains("cols")) d.cols = doc.at("cols").get<int>();
        if (doc.contains("target_gsd_cm"))
            d.target_gsd = doc.at("target_gsd_cm").is_string()
                               ? doc.at("target_gsd_cm").get<std::string>()
                               : doc.at("target_gsd_cm").dump();
        if (doc.contains("resolutions"))
            d.resolutions = doc.at("resolutions").get<std::vector<int>>();
        if (doc.contains("enhancer")) d.enhancer = doc.at("enhancer").get<std::string>();
        if (doc.contains("quiet")) d.quiet = doc.at("quiet").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        gsdkit::fail("InvalidSpec", config_path.string() + ": " + e.what());
    }
    return d;
}

ordered_json splits_json(const gsdkit::DatasetManifest& m) {
    const auto c = m.split_counts();
    return ordered_json{{"train", c.train}, {"val", c.val}, {"test", c.test}};
}

}  // namespace

int main(int argc, char** argv) {
    Defaults defaults;
    try {
        defaults = load_defaults(argc, argv);
    } catch (const gsdkit::Error& e) {
        std::cerr << ordered_json{{"error", e.code()}, {"detail", e.detail()}}.dump() << "\n";
        return kExitError;
    }

    CLI::App app{"GSD harmonization toolkit for aerial-image datasets"};
    app.require_subcommand(1);

    std::string config_file;  // consumed by load_defaults; declared so CLI11 accepts it
    app.add_option("--config", config_file, "JSON config file with default options");
    app.add_flag("--quiet", g_quiet, "suppress stage logs on stderr");
    g_quiet = defaults.quiet;

    // Common option state
    std::string image_dir, mask_dir, manifest_path, gsd_text, target_gsd_text, name, output_name;
    std::string method = "lanczos", enhancer_path = defaults.enhancer, pred_dir, source_name;
    std::string split_name = "test", spec_path, out_path;
    std::vector<int> resolutions = defaults.resolutions;
    std::uint64_t seed = defaults.seed;
    int workers = defaults.workers;
    int patch = defaults.patch, rows = defaults.rows, cols = defaults.cols;
    int target_size = 0;
    double timeout = 0.0;
    bool dry_run = false, keep_going = false, keep_work = false;

    auto add_common = [&](CLI::App* cmd, bool with_seed = true) {
        cmd->add_flag("--dry-run", dry_run, "print planned counts without writing files");
        if (with_seed) cmd->add_option("--seed", seed, "seed for deterministic shuffling");
        cmd->add_option("--workers", workers, "parallel worker count");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "build a manifest and assign 60/10/30 splits");
    ingest->add_option("--images", image_dir, "directory of RGB PNG images")->required();
    ingest->add_option("--masks", mask_dir, "directory of same-named mask PNGs")->required();
    ingest->add_option("--gsd", gsd_text, "ground sample distance in cm (e.g. 20 or 5/2)")
        ->required();
    ingest->add_option("--name", name, "dataset name (default: image directory name)");
    ingest->add_option("--out", out_path, "output dataset directory")->required();
    add_common(ingest);

    CLI::App* harmonize =
        app.add_subcommand("harmonize", "resample or enhance to a target GSD, then tile");
    harmonize->add_option("--manifest", manifest_path, "input manifest.json")->required();
    harmonize->add_option("--method", method, "lanczos | enhancer");
    harmonize->add_option("--enhancer", enhancer_path, "enhancer spec JSON (enhancer method)");
    harmonize->add_option("--target-gsd", target_gsd_text, "target GSD in cm")->required();
    harmonize->add_option("--patch", patch, "patch size for tiling");
    harmonize->add_option("--rows", rows, "tile grid rows");
    harmonize->add_option("--cols", cols, "tile grid columns");
    harmonize->add_option("--output-name", output_name, "name of the derived dataset");
    harmonize->add_option("--out", out_path, "output dataset directory")->required();
    harmonize->add_option("--timeout", timeout, "per-job enhancer timeout in seconds");
    harmonize->add_flag("--keep-going", keep_going, "skip failed entries instead of aborting");
    harmonize->add_flag("--keep-work", keep_work, "keep job files and staging outputs");
    add_common(harmonize);

    CLI::App* pairs = app.add_subcommand("pairs", "synthesize clean|degraded training composites");
    pairs->add_option("--manifest", manifest_path, "input manifest.json")->required();
    pairs->add_option("--resolutions", resolutions, "degradation targets, ascending")
        ->expected(-1);
    pairs->add_option("--out", out_path, "output directory")->required();
    add_common(pairs);

    CLI::App* enhance = app.add_subcommand("enhance", "run an external enhancer over a manifest");
    enhance->add_option("--manifest", manifest_path, "input manifest.json")->required();
    enhance->add_option("--enhancer", enhancer_path, "enhancer spec JSON")->required();
    enhance->add_option("--target-size", target_size,
                        "square output size in pixels (default: source size)");
    enhance->add_option("--output-name", output_name, "name of the derived dataset");
    enhance->add_option("--out", out_path, "output dataset directory")->required();
    enhance->add_option("--timeout", timeout, "per-job timeout in seconds");
    enhance->add_flag("--keep-going", keep_going, "skip failed entries instead of aborting");
    enhance->add_flag("--keep-work", keep_work, "keep job files and raw outputs");
    add_common(enhance);

    CLI::App* eval = app.add_subcommand("eval", "pixel-IoU evaluation of predictions");
    eval->add_option("--pred-dir", pred_dir, "directory of prediction masks named <id>.png")
        ->required();
    eval->add_option("--target", manifest_path, "target dataset manifest.json")->required();
    eval->add_option("--source-name", source_name, "dataset the model was trained on")->required();
    eval->add_option("--split", split_name, "train | val | test | all (default test)");
    eval->add_option("--out", out_path, "report directory")->required();
    add_common(eval);

    CLI::App* scenario = app.add_subcommand("scenario", "run a low-resolution study spec");
    scenario->add_option("--spec", spec_path, "scenario spec JSON")->required();
    scenario->add_option("--out", out_path, "output root directory")->required();
    scenario->add_option("--timeout", timeout, "per-job enhancer timeout in seconds");
    scenario->add_flag("--keep-going", keep_going, "skip failed entries instead of aborting");
    scenario->add_flag("--keep-work", keep_work, "keep job files and raw outputs");
    add_common(scenario);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        if (*ingest) {
            gsdkit::pipeline::IngestParams p;
            p.image_dir = image_dir;
            p.mask_dir = mask_dir;
            p.gsd_cm = gsdkit::Rational::parse(gsd_text);
            p.name = name;
            p.seed = seed;
            p.out_dir = resolve_out(out_path);
            p.dry_run = dry_run;
            const auto r = gsdkit::pipeline::ingest(p);
            if (dry_run) {
                print_result({{"command", "ingest"},
                              {"dry_run", true},
                              {"planned_entries", r.planned_entries}});
                return kExitOk;
            }
            log_stage({{"stage", "ingest"},
                       {"entries", r.manifest.entries.size()},
                       {"ms", elapsed_ms(start)}});
            print_result({{"command", "ingest"},
                          {"manifest", r.manifest_path.string()},
                          {"entries", r.manifest.entries.size()},
                          {"splits", splits_json(r.manifest)}});
            return kExitOk;
        }

        if (*harmonize) {
            gsdkit::pipeline::HarmonizeParams p;
            p.manifest_path = manifest_path;
            p.method = method;
            if (!enhancer_path.empty()) p.enhancer = gsdkit::load_enhancer_spec(enhancer_path);
            p.target_gsd = gsdkit::Rational::parse(target_gsd_text);
            p.patch = patch;
            p.rows = rows;
            p.cols = cols;
            p.output_name = output_name;
            p.out_dir = resolve_out(out_path);
            p.workers = workers;
            p.keep_going = keep_going;
            p.timeout_override = timeout;
            p.keep_work = keep_work;
            p.dry_run = dry_run;
            const auto r = gsdkit::pipeline::harmonize(p);
            if (dry_run) {
                print_result({{"command", "harmonize"},
                              {"dry_run", true},
                              {"planned_entries", r.planned_entries},
                              {"tiled", r.tiled}});
                return kExitOk;
            }
            log_stage({{"stage", "harmonize"},
                       {"method", method},
                       {"entries", r.manifest.entries.size()},
                       {"tiled", r.tiled},
                       {"ms", elapsed_ms(start)}});
            ordered_json doc{{"command", "harmonize"},
                             {"manifest", r.manifest_path.string()},
                             {"entries", r.manifest.entries.size()},
                             {"splits", splits_json(r.manifest)}};
            if (!r.failed_ids.empty()) doc["failed_ids"] = r.failed_ids;
            print_result(doc);
            return r.failed_ids.empty() ? kExitOk : kExitPartial;
        }

        if (*pairs) {
            gsdkit::pipeline::PairsParams p;
            p.manifest_path = manifest_path;
            p.resolutions = resolutions;
            p.out_dir = resolve_out(out_path);
            p.workers = workers;
            p.dry_run = dry_run;
            const auto r = gsdkit::pipeline::pairs(p);
            if (dry_run) {
                print_result({{"command", "pairs"},
                              {"dry_run", true},
                              {"planned_pairs", r.planned_pairs}});
                return kExitOk;
            }
            log_stage({{"stage", "pairs"},
                       {"pairs", r.manifest.entries.size()},
                       {"ms", elapsed_ms(start)}});
            print_result({{"command", "pairs"},
                          {"manifest", r.manifest_path.string()},
                          {"pairs", r.manifest.entries.size()}});
            return kExitOk;
        }

        if (*enhance) {
            gsdkit::pipeline::EnhanceParams p;
            p.manifest_path = manifest_path;
            p.spec = gsdkit::load_enhancer_spec(enhancer_path);
            p.target_w = target_size;
            p.target_h = target_size;
            p.output_name = output_name;
            p.out_dir = resolve_out(out_path);
            p.options.workers = workers;
            p.options.keep_going = keep_going;
            p.options.timeout_override = timeout;
            p.options.keep_work = keep_work;
            p.dry_run = dry_run;
            const auto r = gsdkit::pipeline::enhance(p);
            if (dry_run) {
                print_result({{"command", "enhance"},
                              {"dry_run", true},
                              {"planned_entries", r.planned_entries}});
                return kExitOk;
            }
            log_stage({{"stage", "enhance"},
                       {"entries", r.manifest.entries.size()},
                       {"failed", r.failed_ids.size()},
                       {"ms", elapsed_ms(start)}});
            ordered_json doc{{"command", "enhance"},
                             {"manifest", r.manifest_path.string()},
                             {"entries", r.manifest.entries.size()}};
            if (!r.failed_ids.empty()) doc["failed_ids"] = r.failed_ids;
            print_result(doc);
            return r.failed_ids.empty() ? kExitOk : kExitPartial;
        }

        if (*eval) {
            gsdkit::pipeline::EvalParams p;
            p.pred_dir = pred_dir;
            p.target_manifest = manifest_path;
            p.source_name = source_name;
            if (split_name == "all")
                p.all_splits = true;
            else
                p.split = gsdkit::split_from_name(split_name);
            p.out_dir = resolve_out(out_path);
            p.workers = workers;
            p.dry_run = dry_run;
            const auto r = gsdkit::pipeline::evaluate(p);
            if (dry_run) {
                print_result({{"command", "eval"},
                              {"dry_run", true},
                              {"planned_images", r.planned_images}});
                return kExitOk;
            }
            log_stage({{"stage", "eval"},
                       {"images", r.planned_images},
                       {"ms", elapsed_ms(start)}});
            ordered_json classes;
            for (int c = 0; c < gsdkit::kNumClasses; ++c) {
                const auto& ci = r.report.per_class[c];
                classes[gsdkit::kClassNames[c]] =
                    ci.defined ? gsdkit::format_percent(ci.intersection, ci.union_count)
                               : "undefined";
            }
            print_result({{"command", "eval"},
                          {"source", r.report.pair.source},
                          {"target", r.report.pair.target},
                          {"iou", classes},
                          {"average", gsdkit::format_percent(r.report.macro_percent)},
                          {"csv", r.csv_path.string()},
                          {"md", r.md_path.string()}});
            return kExitOk;
        }

        if (*scenario) {
            gsdkit::pipeline::ScenarioParams p;
            p.spec_path = spec_path;
            p.out_root = resolve_out(out_path);
            p.options.workers = workers;
            p.options.keep_going = keep_going;
            p.options.timeout_override = timeout;
            p.options.keep_work = keep_work;
            p.dry_run = dry_run;
            const auto r = gsdkit::pipeline::scenario(p);
            if (dry_run) {
                print_result({{"command", "scenario"},
                              {"dry_run", true},
                              {"planned_manifests", r.planned_manifests},
                              {"planned_entries_each", r.planned_entries_each}});
                return kExitOk;
            }
            ordered_json names = ordered_json::array();
            for (const auto& m : r.manifests) {
                log_stage({{"stage", "scenario"},
                           {"dataset", m.name},
                           {"entries", m.entries.size()}});
                names.push_back(m.name);
            }
            log_stage({{"stage", "scenario"}, {"ms", elapsed_ms(start)}});
            print_result(
                {{"command", "scenario"}, {"datasets", names}, {"out", p.out_root.string()}});
            return kExitOk;
        }
    } catch (const gsdkit::Error& e) {
        std::cerr << ordered_json{{"error", e.code()}, {"detail", e.detail()}}.dump() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << ordered_json{{"error", "Internal"}, {"detail", e.what()}}.dump() << "\n";
        return kExitError;
    }
    return kExitError;
}
