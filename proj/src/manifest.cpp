#include "gsdkit/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "gsdkit/error.hpp"
#include "gsdkit/png_io.hpp"

namespace gsdkit {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

ordered_json gsd_to_json(const Rational& gsd) {
    if (gsd.is_integral()) return gsd.num;
    return gsd.to_string();
}

Rational gsd_from_json(const nlohmann::json& value) {
    if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
    if (value.is_string()) return Rational::parse(value.get<std::string>());
    if (value.is_number_float()) {
        // JSON decimals are parsed through the string path to stay exact.
        return Rational::parse(nlohmann::json(value).dump());
    }
    fail("InvalidManifest", "gsd_cm must be a number or rational string");
}

}  // namespace

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        case Split::Unassigned: return "unassigned";
    }
    return "unassigned";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    if (name == "unassigned") return Split::Unassigned;
    fail("InvalidManifest", "unknown split '" + name + "'");
}

SplitCounts DatasetManifest::split_counts() const {
    SplitCounts c;
    for (const auto& e : entries) {
        switch (e.split) {
            case Split::Train: ++c.train; break;
            case Split::Val: ++c.val; break;
            case Split::Test: ++c.test; break;
            case Split::Unassigned: ++c.unassigned; break;
        }
    }
    return c;
}

bool DatasetManifest::splits_assigned() const {
    return !entries.empty() && split_counts().unassigned == 0;
}

const ManifestEntry* DatasetManifest::find(const std::string& id) const {
    for (const auto& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

void DatasetManifest::validate() const {
    if (name.empty()) fail("InvalidManifest", "manifest name is empty");
    if (!gsd_cm.positive()) fail("InvalidManifest", "gsd_cm must be positive");
    std::unordered_set<std::string> ids;
    for (const auto& e : entries) {
        if (!ids.insert(e.id).second)
            fail("InvalidManifest", "duplicate entry id '" + e.id + "'");
        if (e.parent_id.has_value() != e.patch_index.has_value())
            fail("InvalidManifest",
                 "entry '" + e.id + "': patch_index must be present iff parent_id is");
        if (e.patch_index && (*e.patch_index < 0 || *e.patch_index > 8))
            fail("InvalidManifest", "entry '" + e.id + "': patch_index outside 0..8");
    }
}

DatasetManifest build_manifest(const fs::path& image_dir, const fs::path& mask_dir,
                               Rational gsd_cm, const std::string& name, const fs::path& root) {
    if (!fs::is_directory(image_dir)) fail("IoError", "not a directory: " + image_dir.string());
    if (!fs::is_directory(mask_dir)) fail("IoError", "not a directory: " + mask_dir.string());
    if (!gsd_cm.positive()) fail("InvalidManifest", "gsd_cm must be positive");

    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(image_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            images.push_back(entry.path());
    }
    if (images.empty()) fail("EmptyDataset", "no .png images in " + image_dir.string());
    std::sort(images.begin(), images.end());

    DatasetManifest manifest;
    manifest.name = name;
    manifest.gsd_cm = gsd_cm;
    manifest.lineage = {"source"};
    manifest.root = root;

    int ref_w = -1;
    int ref_h = -1;
    for (const auto& image_path : images) {
        const std::string id = image_path.stem().string();
        const fs::path mask_path = mask_dir / (id + ".png");
        if (!fs::exists(mask_path)) fail("MissingMask", id);

        const auto [iw, ih] = png::read_dimensions(image_path);
        const auto [mw, mh] = png::read_dimensions(mask_path);
        if (iw != mw || ih != mh)
            fail("GeometryError", "mask dimensions differ from image for '" + id + "'");
        if (ref_w < 0) {
            ref_w = iw;
            ref_h = ih;
        } else if (iw != ref_w || ih != ref_h) {
            fail("GeometryError", "image dimensions differ across dataset at '" + id + "'");
        }

        ManifestEntry e;
        e.id = id;
        e.image_path = fs::relative(image_path, root).generic_string();
        e.mask_path = fs::relative(mask_path, root).generic_string();
        manifest.entries.push_back(std::move(e));
    }
    manifest.validate();
    return manifest;
}

DatasetManifest assign_splits(const DatasetManifest& manifest, std::uint64_t seed) {
    const std::size_t n = manifest.entries.size();
    if (n < 3) fail("TooFewEntries", "need at least 3 entries, got " + std::to_string(n));
    for (const auto& e : manifest.entries)
        if (e.split != Split::Unassigned)
            fail("InvalidManifest", "splits already assigned for '" + e.id + "'");

    // round-half-up in exact integer arithmetic; validation takes the rest.
    const std::size_t train_n = (6 * n + 5) / 10;
    const std::size_t test_n = (3 * n + 5) / 10;

    // Shuffle a copy sorted by id so the result depends only on (ids, seed),
    // not on incoming entry order. mt19937_64 is fully specified by the
    // standard; the index draw below avoids the implementation-defined
    // std::shuffle/uniform_int_distribution.
    std::vector<std::size_t> order(n);
    std::vector<const ManifestEntry*> sorted;
    sorted.reserve(n);
    for (const auto& e : manifest.entries) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(),
              [](const ManifestEntry* a, const ManifestEntry* b) { return a->id < b->id; });
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }

    DatasetManifest out = manifest;
    std::vector<ManifestEntry> assigned;
    assigned.reserve(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        ManifestEntry e = *sorted[order[pos]];
        e.split = pos < train_n                ? Split::Train
                  : pos < train_n + test_n     ? Split::Test
                                               : Split::Val;
        assigned.push_back(std::move(e));
    }
    std::sort(assigned.begin(), assigned.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
    out.entries = std::move(assigned);
    out.validate();
    return out;
}

DatasetManifest derive_manifest(const DatasetManifest& parent, const std::string& name,
                                const std::vector<std::string>& transforms,
                                std::vector<ManifestEntry> entries, Rational gsd_cm) {
    if (entries.empty()) fail("EmptyDataset", "derived manifest has no entries");
    if (transforms.empty()) fail("InvalidManifest", "derivation must record a transform");

    DatasetManifest out;
    out.name = name;
    out.gsd_cm = gsd_cm;
    out.lineage = parent.lineage;
    out.lineage.insert(out.lineage.end(), transforms.begin(), transforms.end());
    out.root = parent.root;

    for (auto& e : entries) {
        if (!e.parent_id) fail("UnknownParent", "derived entry '" + e.id + "' has no parent_id");
        const ManifestEntry* p = parent.find(*e.parent_id);
        if (!p) fail("UnknownParent", *e.parent_id);
        e.split = p->split;  // inheritance is enforced, not trusted
        if (!e.patch_index) e.patch_index = 0;
        out.entries.push_back(std::move(e));
    }
    out.validate();
    return out;
}

std::string manifest_to_json(const DatasetManifest& manifest) {
    ordered_json doc;
    doc["name"] = manifest.name;
    doc["gsd_cm"] = gsd_to_json(manifest.gsd_cm);
    doc["lineage"] = manifest.lineage;
    doc["entries"] = ordered_json::array();
    for (const auto& e : manifest.entries) {
        ordered_json je;
        je["id"] = e.id;
        je["image_path"] = e.image_path;
        je["mask_path"] = e.mask_path;
        je["split"] = split_name(e.split);
        if (e.parent_id) je["parent_id"] = *e.parent_id;
        if (e.patch_index) je["patch_index"] = *e.patch_index;
        doc["entries"].push_back(std::move(je));
    }
    return doc.dump(2) + "\n";
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
    manifest.validate();
    if (!path.parent_path().empty()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("IoError", "cannot write " + path.string());
    out << manifest_to_json(manifest);
    if (!out) fail("IoError", "write failed for " + path.string());
}

DatasetManifest load_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot read " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail("InvalidManifest", path.string() + ": " + e.what());
    }

    DatasetManifest manifest;
    try {
        manifest.name = doc.at("name").get<std::string>();
        manifest.gsd_cm = gsd_from_json(doc.at("gsd_cm"));
        manifest.lineage = doc.at("lineage").get<std::vector<std::string>>();
        for (const auto& je : doc.at("entries")) {
            ManifestEntry e;
            e.id = je.at("id").get<std::string>();
            e.image_path = je.at("image_path").get<std::string>();
            e.mask_path = je.at("mask_path").get<std::string>();
            e.split = split_from_name(je.at("split").get<std::string>());
            if (je.contains("parent_id")) e.parent_id = je.at("parent_id").get<std::string>();
            if (je.contains("patch_index")) e.patch_index = je.at("patch_index").get<int>();
            manifest.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        fail("InvalidManifest", path.string() + ": " + e.what());
    }
    manifest.root = path.has_parent_path() ? path.parent_path() : fs::path(".");
    manifest.validate();
    return manifest;
}

}  // namespace gsdkit
