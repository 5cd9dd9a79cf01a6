#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vqad {

struct SampleRecord {
    std::string id; // unique within a dataset, e.g. "bottle/crack/000"
    std::filesystem::path image_path;
    std::string category;
    bool is_anomalous = false;
    std::optional<std::filesystem::path> mask_path;
};

enum class DatasetKind { mvtec, manifest, synthetic };

DatasetKind dataset_kind_from_string(const std::string& name);
std::string to_string(DatasetKind k);

struct DatasetSpec {
    std::filesystem::path root; // directory (mvtec/synthetic) or manifest CSV
    DatasetKind kind = DatasetKind::mvtec;
    std::vector<std::string> categories; // optional filter
};

using CategorySamples = std::map<std::string, std::vector<SampleRecord>>;

// {category}/test/{defect}/{nnn}.png with masks at
// {category}/ground_truth/{defect}/{nnn}_mask.png; "good" means normal.
// Deterministic lexicographic ordering.
CategorySamples load_mvtec(const DatasetSpec& spec);

// CSV columns: category,image_path,label,mask_path. Relative paths resolve
// against the manifest's directory.
std::vector<SampleRecord> load_manifest(const std::filesystem::path& csv);

CategorySamples load_dataset(const DatasetSpec& spec);

struct SynthConfig {
    std::uint64_t seed = 7;
    int image_count = 20;
    int image_size = 256;
    std::pair<int, int> defect_count_range{0, 2};
    std::pair<int, int> defect_radius_range{6, 20};
    enum class Background { flat, noise };
    Background background = Background::noise;
};

// Seeded generator: normal images are background only, anomalous images add
// elliptical defects at +-40 intensity, GT masks match the defects exactly.
// Returns the manifest path. Identical config -> bit-identical outputs.
std::filesystem::path generate_synthetic(const SynthConfig& cfg, const std::filesystem::path& out_dir);

} // namespace vqad
