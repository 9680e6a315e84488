#include "gsdkit/pairgen.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "gsdkit/error.hpp"
#include "gsdkit/parallel.hpp"
#include "gsdkit/png_io.hpp"
#include "gsdkit/resample.hpp"

namespace gsdkit {

namespace fs = std::filesystem;

void validate_pair_spec(const PairSpec& spec, int source_w, int source_h) {
    if (spec.resolutions.empty()) fail("InvalidPairSpec", "resolution list is empty");
    int prev = 0;
    for (const int r : spec.resolutions) {
        if (r <= prev)
            fail("InvalidPairSpec", "resolutions must be strictly increasing (got " +
                                        std::to_string(r) + " after " + std::to_string(prev) + ")");
        prev = r;
    }
    const int limit = std::min(source_w, source_h);
    if (spec.resolutions.back() >= limit)
        fail("InvalidPairSpec", "resolution " + std::to_string(spec.resolutions.back()) +
                                    " is not smaller than the source size " + std::to_string(limit));
}

PairImage make_pair(const RasterImage& img, int low) {
    img.validate();
    if (low < 1 || low >= img.width || low >= img.height)
        fail("InvalidDegradeTarget",
             std::to_string(low) + " does not reduce " + std::to_string(img.width) + "x" +
                 std::to_string(img.height));

    const RasterImage degraded = degrade(img, low, low);

    PairImage pair;
    pair.low = low;
    pair.composite = RasterImage::create(img.width * 2, img.height, img.gsd_cm);
    const std::size_t half_bytes = static_cast<std::size_t>(img.width) * RasterImage::kChannels;
    for (int y = 0; y < img.height; ++y) {
        std::memcpy(pair.composite.row(y), img.row(y), half_bytes);
        std::memcpy(pair.composite.row(y) + half_bytes, degraded.row(y), half_bytes);
    }
    return pair;
}

std::pair<RasterImage, RasterImage> split_pair(const RasterImage& composite) {
    if (composite.width % 2 != 0) fail("GeometryError", "composite width is odd");
    const int w = composite.width / 2;
    RasterImage left = RasterImage::create(w, composite.height, composite.gsd_cm);
    RasterImage right = RasterImage::create(w, composite.height, composite.gsd_cm);
    const std::size_t half_bytes = static_cast<std::size_t>(w) * RasterImage::kChannels;
    for (int y = 0; y < composite.height; ++y) {
        std::memcpy(left.row(y), composite.row(y), half_bytes);
        std::memcpy(right.row(y), composite.row(y) + half_bytes, half_bytes);
    }
    return {std::move(left), std::move(right)};
}

PairgenResult generate_pairs(const DatasetManifest& manifest, const PairSpec& spec,
                             const fs::path& out_dir, int workers) {
    if (manifest.entries.empty()) fail("EmptyDataset", "manifest has no entries");
    if (!manifest.splits_assigned())
        fail("InvalidManifest", "pair generation requires assigned splits");

    const auto [src_w, src_h] = png::read_dimensions(manifest.image_file(manifest.entries.front()));
    validate_pair_spec(spec, src_w, src_h);

    fs::create_directories(out_dir / "pairs");

    const std::size_t levels = spec.resolutions.size();
    std::vector<ManifestEntry> derived(manifest.entries.size() * levels);
    std::vector<PairRecord> records(manifest.entries.size() * levels);

    parallel_for(manifest.entries.size(), workers, [&](std::size_t i) {
        const ManifestEntry& entry = manifest.entries[i];
        const RasterImage img = png::read_image(manifest.image_file(entry), manifest.gsd_cm);
        if (img.width != src_w || img.height != src_h)
            fail("GeometryError", "image dimensions differ across dataset at '" + entry.id + "'");
        const fs::path mask_abs = fs::weakly_canonical(manifest.mask_file(entry));
        const std::string mask_rel =
            fs::relative(mask_abs, fs::weakly_canonical(out_dir)).generic_string();

        for (std::size_t r = 0; r < levels; ++r) {
            const int low = spec.resolutions[r];
            PairImage pair = make_pair(img, low);
            pair.source_id = entry.id;

            const std::string id = entry.id + "_r" + std::to_string(low);
            const std::string rel = "pairs/" + id + ".png";
            png::write_image(out_dir / rel, pair.composite);

            ManifestEntry e;
            e.id = id;
            e.image_path = rel;
            e.mask_path = mask_rel;
            e.parent_id = entry.id;
            e.patch_index = static_cast<int>(r);
            derived[i * levels + r] = std::move(e);
            records[i * levels + r] = PairRecord{entry.id, low, rel};
        }
    });

    std::string descriptor = "pairs(";
    for (std::size_t r = 0; r < levels; ++r)
        descriptor += (r ? "," : "") + std::to_string(spec.resolutions[r]);
    descriptor += ")";

    PairgenResult result;
    result.manifest = derive_manifest(manifest, manifest.name + "-pairs", {descriptor},
                                      std::move(derived), manifest.gsd_cm);
    result.manifest.root = out_dir;
    result.records = std::move(records);
    return result;
}

std::string pair_records_to_json(const std::vector<PairRecord>& records) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json jr;
        jr["source"] = r.source;
        jr["low"] = r.low;
        jr["path"] = r.path;
        doc.push_back(std::move(jr));
    }
    return doc.dump(2) + "\n";
}

}  // namespace gsdkit
