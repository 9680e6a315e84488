#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gsdkit/image.hpp"
#include "gsdkit/manifest.hpp"

namespace gsdkit {

// Degradation targets for paired translation training. The layout is fixed:
// clean view left, degraded view right.
struct PairSpec {
    std::vector<int> resolutions;
};

// Throws InvalidPairSpec unless the list is non-empty, strictly increasing and
// every resolution is smaller than the source dimensions.
void validate_pair_spec(const PairSpec& spec, int source_w, int source_h);

// A/B composite: width doubled, left half bit-equal to the source, right half
// bit-equal to degrade(source, low, low).
struct PairImage {
    RasterImage composite;
    std::string source_id;
    int low = 0;
};

PairImage make_pair(const RasterImage& img, int low);

std::pair<RasterImage, RasterImage> split_pair(const RasterImage& composite);

// One record per pair file, mirrored into pairs.json next to the manifest.
struct PairRecord {
    std::string source;
    int low = 0;
    std::string path;
};

struct PairgenResult {
    DatasetManifest manifest;
    std::vector<PairRecord> records;
};

// Writes |entries| x |resolutions| composites under out_dir/pairs/ named
// <id>_r<low>.png and returns the derived manifest (root = out_dir). Pairs
// inherit their source's split.
PairgenResult generate_pairs(const DatasetManifest& manifest, const PairSpec& spec,
                             const std::filesystem::path& out_dir, int workers);

std::string pair_records_to_json(const std::vector<PairRecord>& records);

}  // namespace gsdkit
