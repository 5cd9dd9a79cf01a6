#include "vqad/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vqad/error.hpp"
#include "vqad/png_io.hpp"
#include "vqad/protocol.hpp"

namespace vqad {

namespace fs = std::filesystem;
using nlohmann::json;

BackendKind backend_kind_from_string(const std::string& name) {
    if (name == "live") return BackendKind::live;
    if (name == "replay") return BackendKind::replay;
    if (name == "oracle") return BackendKind::oracle;
    if (name == "constant") return BackendKind::constant;
    raise(errc::invalid_input, "unknown backend: " + name);
}

std::string to_string(BackendKind k) {
    switch (k) {
    case BackendKind::live: return "live";
    case BackendKind::replay: return "replay";
    case BackendKind::oracle: return "oracle";
    case BackendKind::constant: return "constant";
    }
    return "?";
}

void RunConfig::validate() const {
    division.validate();
    if (out_dir.empty())
        raise(errc::config, "run config: output directory is required");
    if (workers < 1)
        raise(errc::config, "run config: workers must be at least 1");
    if (working_resolution < 16)
        raise(errc::config, "run config: working resolution too small");
    if (backend == BackendKind::replay && cache_path.empty())
        raise(errc::config, "replay backend requires a cache path");
    if (backend == BackendKind::live) {
        const char* key = std::getenv(live.api_key_env.c_str());
        if (!key || !*key)
            raise(errc::config, "live backend requires credentials in " + live.api_key_env);
    }
    if (division.method == DivisionMethod::imported && masks_root.empty())
        raise(errc::config, "imported division requires a masks root directory");
}

namespace {

std::string sanitize_id(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (c == '/' || c == '\\')
            c = '_';
    return out;
}

std::vector<SampleRecord> flatten(const CategorySamples& by_category) {
    std::vector<SampleRecord> out;
    for (const auto& [cat, recs] : by_category)
        out.insert(out.end(), recs.begin(), recs.end());
    return out;
}

Mask load_gt_mask(const SampleRecord& rec, int resolution) {
    if (!rec.mask_path)
        return Mask(resolution, resolution); // all-negative
    return resize_mask_nearest(png::read_mask(*rec.mask_path), resolution);
}

RegionMap divide_sample(const RunConfig& cfg, const SampleRecord& rec, const ImageBuffer& working) {
    RegionMap rm;
    switch (cfg.division.method) {
    case DivisionMethod::grid:
        rm = grid_divide(working.width, working.height, cfg.division.grid_rows, cfg.division.grid_cols);
        break;
    case DivisionMethod::superpixel:
        rm = slic_divide(working, cfg.division);
        break;
    case DivisionMethod::imported: {
        const fs::path dir = cfg.masks_root / rec.id;
        if (!fs::is_directory(dir))
            raise(errc::dataset, "no imported masks for sample " + rec.id + " under " + dir.string());
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && e.path().extension() == ".png")
                files.push_back(e.path());
        std::sort(files.begin(), files.end());
        std::vector<Mask> masks;
        masks.reserve(files.size());
        for (const auto& f : files) {
            Mask m = png::read_mask(f);
            if (m.width != working.width || m.height != working.height)
                m = resize_mask_nearest(m, working.width);
            masks.push_back(std::move(m));
        }
        rm = import_regions(masks);
        break;
    }
    }
    return filter_regions(rm, cfg.division.min_area, cfg.division.max_area);
}

std::unique_ptr<Backend> make_backend(const RunConfig& cfg, std::shared_ptr<ResponseCache> replay_cache) {
    switch (cfg.backend) {
    case BackendKind::live: return std::make_unique<LiveBackend>(cfg.live);
    case BackendKind::replay: return std::make_unique<ReplayBackend>(std::move(replay_cache));
    case BackendKind::oracle: return std::make_unique<OracleBackend>();
    case BackendKind::constant: return std::make_unique<ConstantBackend>(cfg.constant_score);
    }
    raise(errc::config, "unreachable backend kind");
}

void write_text_file(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(errc::io, "cannot write " + file.string());
    out << text;
}

std::string scores_json(const RegionScores& rs) {
    json obj = json::object();
    for (const auto& [id, score] : rs.entries)
        obj[std::to_string(id)] = score;
    return obj.dump(2) + "\n";
}

RegionScores scores_from_json(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        raise(errc::io, "cannot read " + file.string());
    json obj = json::parse(in, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
        raise(errc::io, "malformed score file " + file.string());
    RegionScores rs;
    for (const auto& [key, value] : obj.items())
        rs.entries[static_cast<std::uint16_t>(std::stoul(key))] = value.get<double>();
    return rs;
}

void save_anomaly_map(const fs::path& file, const AnomalyMap& map) {
    std::vector<std::uint16_t> q(map.scores.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = static_cast<std::uint16_t>(std::lround(std::clamp(map.scores[i], 0.0f, 1.0f) * 65535.0f));
    png::write_gray16(file, q, map.width, map.height);
}

AnomalyMap load_anomaly_map(const fs::path& file) {
    AnomalyMap map;
    const auto q = png::read_gray16(file, map.width, map.height);
    map.scores.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        map.scores[i] = static_cast<float>(q[i]) / 65535.0f;
    return map;
}

json dataset_spec_json(const DatasetSpec& spec) {
    json j;
    j["root"] = fs::absolute(spec.root).string();
    j["kind"] = to_string(spec.kind);
    j["categories"] = spec.categories;
    return j;
}

DatasetSpec dataset_spec_from_json(const json& j) {
    DatasetSpec spec;
    spec.root = j.at("root").get<std::string>();
    spec.kind = dataset_kind_from_string(j.at("kind").get<std::string>());
    spec.categories = j.at("categories").get<std::vector<std::string>>();
    return spec;
}

void write_run_config(const RunConfig& cfg, const fs::path& run_dir) {
    json j;
    j["dataset"] = dataset_spec_json(cfg.dataset);
    j["backend"] = to_string(cfg.backend);
    j["model_id"] = cfg.model_id;
    j["working_resolution"] = cfg.working_resolution;
    j["division"] = {{"method", to_string(cfg.division.method)},
                     {"grid_rows", cfg.division.grid_rows},
                     {"grid_cols", cfg.division.grid_cols},
                     {"slic_segments", cfg.division.slic_segments},
                     {"slic_compactness", cfg.division.slic_compactness},
                     {"slic_iterations", cfg.division.slic_iterations},
                     {"min_area", cfg.division.min_area},
                     {"max_area", cfg.division.max_area}};
    write_text_file(run_dir / "run_config.json", j.dump(2) + "\n");
}

struct RunPaths {
    fs::path responses, scores, maps, overlays, regions, panels;
};

RunPaths prepare_run_dir(const fs::path& run_dir, bool with_panels = false) {
    RunPaths p{run_dir / "responses", run_dir / "scores",   run_dir / "maps",
               run_dir / "overlays",  run_dir / "regions",  run_dir / "panels"};
    fs::create_directories(p.responses);
    fs::create_directories(p.scores);
    fs::create_directories(p.maps);
    fs::create_directories(p.overlays);
    fs::create_directories(p.regions);
    if (with_panels)
        fs::create_directories(p.panels);
    return p;
}

struct LedgerEntry {
    std::string sample_id;
    json record;
};

// Worker pool over samples. The callable gets (index); exceptions propagate
// out of run_parallel after all workers join.
template <typename Fn>
void run_parallel(std::size_t count, int workers, Fn&& fn) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::exception_ptr first_error;
    const int n_threads = std::min<std::size_t>(workers, count) > 0
                              ? static_cast<int>(std::min<std::size_t>(workers, count))
                              : 1;
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(err_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace

void cmd_divide(const RunConfig& cfg) {
    cfg.validate();
    const auto samples = flatten(load_dataset(cfg.dataset));
    fs::create_directories(cfg.out_dir / "overlays");
    fs::create_directories(cfg.out_dir / "regions");

    run_parallel(samples.size(), cfg.workers, [&](std::size_t i) {
        const auto& rec = samples[i];
        const ImageBuffer working = resize_to_working(png::read_rgb8(rec.image_path), cfg.working_resolution);
        const RegionMap rm = divide_sample(cfg, rec, working);
        const ImageBuffer overlay = render_overlay(working, rm, cfg.division);
        const std::string name = sanitize_id(rec.id);
        png::write_rgb8(cfg.out_dir / "overlays" / (name + ".png"), overlay);
        png::write_gray16(cfg.out_dir / "regions" / (name + ".png"), rm.labels, rm.width, rm.height);
    });
}

RunSummary cmd_run(const RunConfig& cfg) {
    cfg.validate();
    const auto samples = flatten(load_dataset(cfg.dataset));
    fs::create_directories(cfg.out_dir);
    const RunPaths paths = prepare_run_dir(cfg.out_dir);
    write_run_config(cfg, cfg.out_dir);

    auto record_cache = std::make_shared<ResponseCache>(cfg.out_dir / "cache.jsonl", true);
    std::shared_ptr<ResponseCache> replay_cache;
    if (cfg.backend == BackendKind::replay)
        replay_cache = std::make_shared<ResponseCache>(cfg.cache_path, false);
    auto backend = make_backend(cfg, replay_cache);

    std::vector<LedgerEntry> ledger(samples.size());
    std::atomic<int> failed{0};

    run_parallel(samples.size(), cfg.workers, [&](std::size_t i) {
        const auto& rec = samples[i];
        const std::string name = sanitize_id(rec.id);
        json entry;
        entry["sample_id"] = rec.id;
        entry["category"] = rec.category;
        entry["backend"] = backend->name();
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const ImageBuffer working =
                resize_to_working(png::read_rgb8(rec.image_path), cfg.working_resolution);
            const RegionMap rm = divide_sample(cfg, rec, working);
            const PromptBundle bundle =
                build_prompt_bundle(rec.category, render_overlay(working, rm, cfg.division));
            const ImageBuffer& overlay = bundle.fused_image;
            const auto t1 = std::chrono::steady_clock::now();

            QueryRequest req;
            req.model_id = cfg.model_id;
            req.prompt_text = bundle.prompt_text;
            req.image_png = png::encode_rgb8(overlay);
            const std::string digest = request_digest(req);

            const Mask gt = load_gt_mask(rec, cfg.working_resolution);
            QueryContext ctx;
            ctx.regions = &rm;
            ctx.gt_mask = &gt;
            const QueryResponse resp = backend->query(req, ctx);
            const auto t2 = std::chrono::steady_clock::now();

            record_cache->put(digest, req.model_id, sha256_hex(req.prompt_text), resp.raw_text);

            const ParseResult parsed = parse_region_scores(resp.raw_text, rm);
            const AnomalyMap map = scores_to_anomaly_map(rm, parsed.scores);
            const auto t3 = std::chrono::steady_clock::now();

            png::write_rgb8(paths.overlays / (name + ".png"), overlay);
            png::write_gray16(paths.regions / (name + ".png"), rm.labels, rm.width, rm.height);
            write_text_file(paths.responses / (name + ".txt"), resp.raw_text);
            write_text_file(paths.scores / (name + ".json"), scores_json(parsed.scores));
            save_anomaly_map(paths.maps / (name + ".png"), map);

            entry["status"] = "ok";
            entry["digest"] = digest;
            entry["prompt_sha"] = sha256_hex(req.prompt_text);
            entry["model_id"] = req.model_id;
            entry["from_cache"] = resp.from_cache;
            entry["latency_ms"] = resp.latency_ms;
            entry["warnings"] = parsed.warnings;
            entry["image_score"] = image_score(parsed.scores);
            entry["region_count"] = rm.region_count();
            auto ms = [](auto a, auto b) {
                return std::chrono::duration<double, std::milli>(b - a).count();
            };
            entry["timings_ms"] = {{"divide", ms(t0, t1)}, {"query", ms(t1, t2)}, {"parse_map", ms(t2, t3)}};
        } catch (const std::exception& e) {
            entry["status"] = "failed";
            entry["error"] = e.what();
            failed.fetch_add(1);
        }
        ledger[i] = {rec.id, std::move(entry)};
    });

    std::sort(ledger.begin(), ledger.end(),
              [](const LedgerEntry& a, const LedgerEntry& b) { return a.sample_id < b.sample_id; });
    std::ostringstream ledger_text;
    for (const auto& e : ledger)
        ledger_text << e.record.dump() << '\n';
    write_text_file(cfg.out_dir / "ledger.jsonl", ledger_text.str());

    RunSummary summary;
    summary.total = static_cast<int>(samples.size());
    summary.failed = failed.load();
    summary.run_dir = cfg.out_dir;
    if (summary.failed * 10 > summary.total)
        raise(errc::transport, "run aborted: " + std::to_string(summary.failed) + " of " +
                                   std::to_string(summary.total) +
                                   " samples failed (over the 10% budget); see ledger.jsonl");
    return summary;
}

namespace {

struct LoadedRun {
    DatasetSpec dataset;
    fs::path run_dir;
    int working_resolution = kWorkingResolution;
};

LoadedRun load_run(const fs::path& run_dir) {
    std::ifstream in(run_dir / "run_config.json", std::ios::binary);
    if (!in)
        raise(errc::io, "not a run directory (missing run_config.json): " + run_dir.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        raise(errc::io, "malformed run_config.json in " + run_dir.string());
    LoadedRun run;
    run.dataset = dataset_spec_from_json(j.at("dataset"));
    run.run_dir = run_dir;
    run.working_resolution = j.value("working_resolution", kWorkingResolution);
    return run;
}

} // namespace

EvalReport cmd_eval(const fs::path& run_dir) {
    const LoadedRun run = load_run(run_dir);
    const auto by_category = load_dataset(run.dataset);

    std::vector<CategoryRow> rows;
    for (const auto& [category, samples] : by_category) {
        ScoredSet image_set;
        std::vector<AnomalyMap> maps;
        std::vector<Mask> gts;
        std::vector<std::string> missing;
        maps.reserve(samples.size());
        gts.reserve(samples.size());
        for (const auto& rec : samples) {
            const std::string name = sanitize_id(rec.id);
            const fs::path map_file = run_dir / "maps" / (name + ".png");
            const fs::path score_file = run_dir / "scores" / (name + ".json");
            if (!fs::is_regular_file(map_file) || !fs::is_regular_file(score_file)) {
                missing.push_back(rec.id);
                continue;
            }
            maps.push_back(load_anomaly_map(map_file));
            gts.push_back(load_gt_mask(rec, run.working_resolution));
            image_set.scores.push_back(image_score(scores_from_json(score_file)));
            image_set.labels.push_back(rec.is_anomalous ? 1 : 0);
        }
        if (!missing.empty()) {
            std::string list;
            for (const auto& id : missing)
                list += (list.empty() ? "" : ", ") + id;
            raise(errc::dataset, "run is missing anomaly maps for: " + list);
        }

        CategoryRow row;
        row.category = category;
        row.image_auroc = auroc(image_set);
        row.image_ap = average_precision(image_set);
        row.image_f1max = f1_max(image_set);
        const PixelMetrics pm = pixel_metrics(maps, gts);
        row.pixel_auroc = pm.auroc;
        row.pixel_ap = pm.ap;
        row.pixel_f1max = pm.f1max;
        row.aupro = aupro(maps, gts);
        rows.push_back(row);
    }

    EvalReport report = aggregate(std::move(rows));
    write_report_csv(report, run_dir / "report.csv");
    write_report_json(report, run_dir / "report.json");
    return report;
}

void cmd_visualize(const fs::path& run_dir) {
    const LoadedRun run = load_run(run_dir);
    const auto samples = flatten(load_dataset(run.dataset));
    fs::create_directories(run_dir / "panels");

    for (const auto& rec : samples) {
        const std::string name = sanitize_id(rec.id);
        const fs::path map_file = run_dir / "maps" / (name + ".png");
        const fs::path overlay_file = run_dir / "overlays" / (name + ".png");
        if (!fs::is_regular_file(map_file) || !fs::is_regular_file(overlay_file))
            continue;

        const ImageBuffer input =
            resize_to_working(png::read_rgb8(rec.image_path), run.working_resolution);
        const ImageBuffer overlay = png::read_rgb8(overlay_file);
        const AnomalyMap map = load_anomaly_map(map_file);
        const Mask gt = load_gt_mask(rec, run.working_resolution);

        const int w = input.width, h = input.height;
        ImageBuffer panel(4 * w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                panel.set(x, y, {input.at(x, y)[0], input.at(x, y)[1], input.at(x, y)[2]});
                panel.set(w + x, y, {overlay.at(x, y)[0], overlay.at(x, y)[1], overlay.at(x, y)[2]});
                // Deeper red for higher scores, black elsewhere.
                const auto red = static_cast<std::uint8_t>(
                    std::lround(std::clamp(map.at(x, y), 0.0f, 1.0f) * 255.0f));
                panel.set(2 * w + x, y, {red, 0, 0});
                const std::uint8_t g = gt.at(x, y) ? 255 : 0;
                panel.set(3 * w + x, y, {g, g, g});
            }
        }
        png::write_rgb8(run_dir / "panels" / (name + ".png"), panel);
    }
}

TrialsReport cmd_trials(const RunConfig& cfg, int n) {
    cfg.validate();
    if (n < 2)
        raise(errc::config, "trials: need at least 2 repetitions");
    if (cfg.backend != BackendKind::live && cfg.backend != BackendKind::constant)
        raise(errc::config, "trials: only live or constant backends are meaningful (deterministic "
                            "backends repeat exactly)");

    const auto samples = flatten(load_dataset(cfg.dataset));
    fs::create_directories(cfg.out_dir);

    // score[t][i] and mentioned-id set per trial per sample.
    std::vector<std::vector<double>> trial_scores(n);
    std::vector<std::vector<std::vector<std::uint16_t>>> trial_ids(n);

    for (int t = 0; t < n; ++t) {
        RunConfig trial_cfg = cfg;
        trial_cfg.out_dir = cfg.out_dir / ("trial_" + std::to_string(t));
        cmd_run(trial_cfg);
        trial_scores[t].resize(samples.size());
        trial_ids[t].resize(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const std::string name = sanitize_id(samples[i].id);
            const RegionScores rs = scores_from_json(trial_cfg.out_dir / "scores" / (name + ".json"));
            trial_scores[t][i] = image_score(rs);
            for (const auto& [id, score] : rs.entries)
                trial_ids[t][i].push_back(id);
        }
    }

    std::ostringstream csv;
    csv << "sample_id,image_score_mean,image_score_std,mean_pairwise_jaccard\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double mean = 0;
        for (int t = 0; t < n; ++t)
            mean += trial_scores[t][i];
        mean /= n;
        double var = 0;
        for (int t = 0; t < n; ++t)
            var += (trial_scores[t][i] - mean) * (trial_scores[t][i] - mean);
        const double stddev = std::sqrt(var / n);

        double jaccard_sum = 0;
        int pairs = 0;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const auto& sa = trial_ids[a][i];
                const auto& sb = trial_ids[b][i];
                std::vector<std::uint16_t> inter, uni;
                std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(inter));
                std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(uni));
                jaccard_sum += uni.empty() ? 1.0 : static_cast<double>(inter.size()) / uni.size();
                ++pairs;
            }
        }
        char line[160];
        std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f\n", samples[i].id.c_str(), mean, stddev,
                      jaccard_sum / pairs);
        csv << line;
    }

    TrialsReport report;
    report.trials = n;
    report.stability_csv = cfg.out_dir / "stability.csv";
    write_text_file(report.stability_csv, csv.str());
    return report;
}

} // namespace vqad
