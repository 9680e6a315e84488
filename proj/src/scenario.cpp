#include "gsdkit/scenario.hpp"

#include <fstream>
#include <set>

#include "gsdkit/error.hpp"
#include "gsdkit/parallel.hpp"
#include "gsdkit/png_io.hpp"
#include "gsdkit/resample.hpp"

namespace gsdkit {

namespace fs = std::filesystem;

ScenarioSpec load_scenario_spec(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot read " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail("InvalidSpec", path.string() + ": " + e.what());
    }

    ScenarioSpec spec;
    try {
        spec.source_manifest = doc.at("source_manifest").get<std::string>();
        spec.degrade_to = doc.at("degrade_to").get<int>();
        for (const auto& je : doc.at("enhancers")) {
            if (je.is_string()) {
                // Path reference, resolved against the spec file location.
                fs::path ep = je.get<std::string>();
                if (ep.is_relative()) ep = path.parent_path() / ep;
                spec.enhancers.push_back(load_enhancer_spec(ep));
            } else {
                spec.enhancers.push_back(parse_enhancer_spec(je));
            }
        }
        if (doc.contains("output_names"))
            spec.output_names =
                doc.at("output_names").get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        fail("InvalidSpec", path.string() + ": " + e.what());
    }
    if (spec.source_manifest.is_relative())
        spec.source_manifest = path.parent_path() / spec.source_manifest;
    validate_scenario_spec(spec);
    return spec;
}

void validate_scenario_spec(const ScenarioSpec& spec) {
    if (spec.degrade_to < 1) fail("InvalidSpec", "degrade_to must be >= 1");
    std::set<std::string> names;
    std::set<std::string> outputs;
    for (const auto& e : spec.enhancers) {
        validate_enhancer_spec(e);
        if (!names.insert(e.name).second)
            fail("InvalidSpec", "duplicate enhancer name '" + e.name + "'");
        const auto it = spec.output_names.find(e.name);
        if (it == spec.output_names.end())
            fail("InvalidSpec", "no output name for enhancer '" + e.name + "'");
        if (!outputs.insert(it->second).second)
            fail("InvalidSpec", "duplicate output name '" + it->second + "'");
    }
}

std::vector<DatasetManifest> run_scenario(const ScenarioSpec& spec, const fs::path& out_root,
                                          const EnhanceOptions& options) {
    validate_scenario_spec(spec);
    const DatasetManifest source = load_manifest(spec.source_manifest);
    if (source.entries.empty()) fail("EmptyDataset", "source manifest has no entries");
    if (!source.splits_assigned())
        fail("InvalidManifest", "scenario requires a manifest with assigned splits");

    const auto [src_w, src_h] = png::read_dimensions(source.image_file(source.entries.front()));
    if (spec.degrade_to >= src_w || spec.degrade_to >= src_h)
        fail("InvalidDegradeTarget", "degrade_to " + std::to_string(spec.degrade_to) +
                                         " does not reduce " + std::to_string(src_w) + "x" +
                                         std::to_string(src_h));

    // Stage 1: the degraded dataset, geometry and masks untouched.
    const std::string lr_name = source.name + "lr";
    const fs::path lr_dir = out_root / lr_name;
    fs::create_directories(lr_dir / "images");
    fs::create_directories(lr_dir / "masks");

    std::vector<ManifestEntry> lr_entries(source.entries.size());
    parallel_for(source.entries.size(), options.workers, [&](std::size_t i) {
        const ManifestEntry& entry = source.entries[i];
        const RasterImage img = png::read_image(source.image_file(entry), source.gsd_cm);
        if (img.width != src_w || img.height != src_h)
            fail("GeometryError", "image dimensions differ across dataset at '" + entry.id + "'");
        png::write_image(lr_dir / "images" / (entry.id + ".png"),
                         degrade(img, spec.degrade_to, spec.degrade_to));
        fs::copy_file(source.mask_file(entry), lr_dir / "masks" / (entry.id + ".png"),
                      fs::copy_options::overwrite_existing);

        ManifestEntry e;
        e.id = entry.id;
        e.image_path = "images/" + entry.id + ".png";
        e.mask_path = "masks/" + entry.id + ".png";
        e.parent_id = entry.id;
        e.patch_index = 0;
        lr_entries[i] = std::move(e);
    });

    DatasetManifest lr = derive_manifest(
        source, lr_name,
        {"degrade(" + std::to_string(spec.degrade_to) + "x" + std::to_string(spec.degrade_to) + ")"},
        std::move(lr_entries), source.gsd_cm);
    lr.root = lr_dir;
    save_manifest(lr, lr_dir / "manifest.json");

    std::vector<DatasetManifest> outputs;
    outputs.push_back(lr);

    // Stage 2: each enhancer consumes the degraded set; outputs keep the
    // source geometry so the source masks remain valid.
    for (const auto& enhancer : spec.enhancers) {
        const std::string out_name = spec.output_names.at(enhancer.name);
        const fs::path out_dir = out_root / out_name;
        EnhanceResult result = run_enhancer(lr, enhancer, src_w, src_h, out_dir, options);
        result.manifest.name = out_name;
        save_manifest(result.manifest, out_dir / "manifest.json");
        outputs.push_back(std::move(result.manifest));
    }
    return outputs;
}

}  // namespace gsdkit
