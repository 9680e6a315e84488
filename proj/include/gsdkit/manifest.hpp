#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gsdkit/rational.hpp"

namespace gsdkit {

enum class Split { Unassigned, Train, Val, Test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct ManifestEntry {
    std::string id;
    std::string image_path;  // relative to the manifest root
    std::string mask_path;
    Split split = Split::Unassigned;
    std::optional<std::string> parent_id;
    std::optional<int> patch_index;  // present iff parent_id present, 0..8
};

struct SplitCounts {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
    std::size_t unassigned = 0;

    bool operator==(const SplitCounts&) const = default;
};

// Ordered record of image/mask pairs with split assignment, GSD and lineage.
// Immutable by convention once built; every transform produces a new manifest.
struct DatasetManifest {
    std::string name;
    Rational gsd_cm{0, 1};
    std::vector<std::string> lineage;
    std::vector<ManifestEntry> entries;

    // Directory the relative paths resolve against. Runtime-only, set by
    // load/save; not serialized.
    std::filesystem::path root;

    SplitCounts split_counts() const;
    bool splits_assigned() const;
    const ManifestEntry* find(const std::string& id) const;
    std::filesystem::path image_file(const ManifestEntry& e) const { return root / e.image_path; }
    std::filesystem::path mask_file(const ManifestEntry& e) const { return root / e.mask_path; }

    void validate() const;
};

// Scans image_dir for *.png, pairs each with the same-named mask in mask_dir
// and emits an unassigned manifest sorted by id. Paths are stored relative to
// `root` (where the manifest will live).
DatasetManifest build_manifest(const std::filesystem::path& image_dir,
                               const std::filesystem::path& mask_dir, Rational gsd_cm,
                               const std::string& name, const std::filesystem::path& root);

// Deterministic 60/10/30 assignment: entries are shuffled by a seeded
// generator, then train = round(0.6N) and test = round(0.3N) are carved off
// and validation takes the remainder. A pure function of (entry ids, seed).
DatasetManifest assign_splits(const DatasetManifest& manifest, std::uint64_t seed);

// Builds a child manifest: every entry must name a parent in `parent`, splits
// are inherited from the parent and `transforms` extend the lineage.
DatasetManifest derive_manifest(const DatasetManifest& parent, const std::string& name,
                                const std::vector<std::string>& transforms,
                                std::vector<ManifestEntry> entries, Rational gsd_cm);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

// Serialized form, used by save_manifest and the --dry-run plumbing.
std::string manifest_to_json(const DatasetManifest& manifest);

}  // namespace gsdkit
