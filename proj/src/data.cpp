#include "vqad/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "vqad/error.hpp"

namespace vqad {

namespace fs = std::filesystem;

DatasetKind dataset_kind_from_string(const std::string& name) {
    if (name == "mvtec") return DatasetKind::mvtec;
    if (name == "manifest") return DatasetKind::manifest;
    if (name == "synthetic") return DatasetKind::synthetic;
    raise(errc::invalid_input, "unknown dataset kind: " + name);
}

std::string to_string(DatasetKind k) {
    switch (k) {
    case DatasetKind::mvtec: return "mvtec";
    case DatasetKind::manifest: return "manifest";
    case DatasetKind::synthetic: return "synthetic";
    }
    return "?";
}

namespace {

std::vector<fs::path> sorted_entries(const fs::path& dir, bool dirs_only) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (dirs_only ? e.is_directory() : e.is_regular_file())
            out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

CategorySamples load_mvtec(const DatasetSpec& spec) {
    if (!fs::is_directory(spec.root))
        raise(errc::dataset, "dataset root is not a directory: " + spec.root.string());

    std::vector<std::string> categories;
    if (!spec.categories.empty()) {
        categories = spec.categories;
        std::sort(categories.begin(), categories.end());
        for (const auto& c : categories)
            if (!fs::is_directory(spec.root / c))
                raise(errc::dataset, "category not found under root: " + c);
    } else {
        for (const auto& p : sorted_entries(spec.root, true))
            if (fs::is_directory(p / "test"))
                categories.push_back(p.filename().string());
    }
    if (categories.empty())
        raise(errc::dataset, "no categories found under " + spec.root.string());

    CategorySamples out;
    for (const auto& category : categories) {
        const fs::path test_dir = spec.root / category / "test";
        if (!fs::is_directory(test_dir))
            raise(errc::dataset, "missing test directory: " + test_dir.string());
        auto& samples = out[category];
        for (const auto& defect_dir : sorted_entries(test_dir, true)) {
            const std::string defect = defect_dir.filename().string();
            const bool anomalous = defect != "good";
            for (const auto& img : sorted_entries(defect_dir, false)) {
                if (img.extension() != ".png")
                    continue;
                SampleRecord rec;
                rec.image_path = img;
                rec.category = category;
                rec.is_anomalous = anomalous;
                rec.id = category + "/" + defect + "/" + img.stem().string();
                if (anomalous) {
                    const fs::path mask = spec.root / category / "ground_truth" / defect /
                                          (img.stem().string() + "_mask.png");
                    if (!fs::is_regular_file(mask))
                        raise(errc::dataset, "anomalous image " + img.string() +
                                                 " has no ground-truth mask at " + mask.string());
                    rec.mask_path = mask;
                }
                samples.push_back(std::move(rec));
            }
        }
        if (samples.empty())
            raise(errc::dataset, "category has no test images: " + category);
    }
    return out;
}

namespace {

// One CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted)
        raise(errc::dataset, "manifest line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

} // namespace

std::vector<SampleRecord> load_manifest(const fs::path& csv) {
    std::ifstream in(csv, std::ios::binary);
    if (!in)
        raise(errc::dataset, "cannot open manifest: " + csv.string());
    const fs::path base = csv.has_parent_path() ? csv.parent_path() : fs::path(".");

    std::string line;
    if (!std::getline(in, line))
        raise(errc::dataset, "manifest is empty: " + csv.string());
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (split_csv_line(line, 1) != std::vector<std::string>{"category", "image_path", "label", "mask_path"})
        raise(errc::dataset, "manifest header must be category,image_path,label,mask_path");

    std::vector<SampleRecord> records;
    std::map<std::string, int> seen_paths; // image_path -> first line
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split_csv_line(line, line_no);
        if (fields.size() != 4)
            raise(errc::dataset, "manifest line " + std::to_string(line_no) + ": expected 4 fields, got " +
                                     std::to_string(fields.size()));
        const auto& [category, image_path, label, mask_path] =
            std::tie(fields[0], fields[1], fields[2], fields[3]);

        SampleRecord rec;
        rec.category = category;
        if (label == "anomaly")
            rec.is_anomalous = true;
        else if (label == "normal")
            rec.is_anomalous = false;
        else
            raise(errc::dataset, "manifest line " + std::to_string(line_no) + ": unknown label '" + label + "'");

        rec.image_path = fs::path(image_path).is_absolute() ? fs::path(image_path) : base / image_path;
        if (!fs::is_regular_file(rec.image_path))
            raise(errc::dataset, "manifest line " + std::to_string(line_no) + ": missing image file " +
                                     rec.image_path.string());
        const auto [it, inserted] = seen_paths.emplace(image_path, line_no);
        if (!inserted)
            raise(errc::dataset, "manifest lines " + std::to_string(it->second) + " and " +
                                     std::to_string(line_no) + ": duplicate image_path " + image_path);

        if (rec.is_anomalous) {
            if (mask_path.empty())
                raise(errc::dataset, "manifest line " + std::to_string(line_no) +
                                         ": anomaly row requires a mask_path");
            rec.mask_path = fs::path(mask_path).is_absolute() ? fs::path(mask_path) : base / mask_path;
            if (!fs::is_regular_file(*rec.mask_path))
                raise(errc::dataset, "manifest line " + std::to_string(line_no) + ": missing mask file " +
                                         rec.mask_path->string());
        } else if (!mask_path.empty()) {
            rec.mask_path = fs::path(mask_path).is_absolute() ? fs::path(mask_path) : base / mask_path;
        }
        rec.id = rec.category + "/" + rec.image_path.stem().string();
        records.push_back(std::move(rec));
    }
    if (records.empty())
        raise(errc::dataset, "manifest has no data rows: " + csv.string());
    return records;
}

CategorySamples load_dataset(const DatasetSpec& spec) {
    if (spec.kind == DatasetKind::mvtec)
        return load_mvtec(spec);

    const fs::path manifest =
        fs::is_directory(spec.root) ? spec.root / "manifest.csv" : spec.root;
    auto records = load_manifest(manifest);
    CategorySamples out;
    for (auto& rec : records) {
        if (!spec.categories.empty() &&
            std::find(spec.categories.begin(), spec.categories.end(), rec.category) == spec.categories.end())
            continue;
        out[rec.category].push_back(std::move(rec));
    }
    if (out.empty())
        raise(errc::dataset, "no samples after category filtering");
    for (auto& [cat, recs] : out)
        std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

} // namespace vqad
