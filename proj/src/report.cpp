#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "vqad/error.hpp"
#include "vqad/metrics.hpp"

namespace vqad {

namespace {

const char* kColumns[7] = {"image_auroc", "image_ap",    "image_f1max", "pixel_auroc",
                           "pixel_ap",    "pixel_f1max", "aupro"};

std::array<double, 7> row_values(const CategoryRow& r) {
    return {r.image_auroc, r.image_ap, r.image_f1max, r.pixel_auroc, r.pixel_ap, r.pixel_f1max, r.aupro};
}

// Fractions render as one-decimal percentages in both formats.
double percent1(double fraction) {
    return std::round(fraction * 1000.0) / 10.0;
}

std::string format1(double percent) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", percent);
    return buf;
}

} // namespace

std::string report_csv_string(const EvalReport& report) {
    std::string out = "category";
    for (const char* c : kColumns) {
        out += ',';
        out += c;
    }
    out += '\n';
    auto emit = [&](const CategoryRow& r) {
        out += r.category;
        for (double v : row_values(r)) {
            out += ',';
            out += format1(percent1(v));
        }
        out += '\n';
    };
    for (const auto& r : report.rows)
        emit(r);
    emit(report.average);
    return out;
}

std::string report_json_string(const EvalReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    auto emit = [&](const CategoryRow& r) {
        nlohmann::json row;
        row["category"] = r.category;
        const auto vals = row_values(r);
        for (int i = 0; i < 7; ++i)
            row[kColumns[i]] = percent1(vals[i]);
        rows.push_back(row);
    };
    for (const auto& r : report.rows)
        emit(r);
    emit(report.average);
    nlohmann::json doc;
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
}

namespace {
void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(errc::io, "cannot write " + file.string());
    out << text;
}
} // namespace

void write_report_csv(const EvalReport& report, const std::filesystem::path& file) {
    write_text(file, report_csv_string(report));
}

void write_report_json(const EvalReport& report, const std::filesystem::path& file) {
    write_text(file, report_json_string(report));
}

} // namespace vqad
