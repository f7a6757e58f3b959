#include "caedge/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "caedge/detector.hpp"
#include "caedge/parallel.hpp"
#include "caedge/png_io.hpp"
#include "caedge/rng.hpp"

namespace fs = std::filesystem;

namespace caedge {

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::kfold: return "kfold";
        case ExperimentKind::general: return "general";
        case ExperimentKind::specialized_tf: return "specialized_tf";
        case ExperimentKind::individual: return "individual";
        case ExperimentKind::evaluate_only: return "evaluate_only";
    }
    throw std::invalid_argument("to_string: unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "kfold") return ExperimentKind::kfold;
    if (name == "general") return ExperimentKind::general;
    if (name == "specialized_tf") return ExperimentKind::specialized_tf;
    if (name == "individual") return ExperimentKind::individual;
    if (name == "evaluate_only") return ExperimentKind::evaluate_only;
    throw std::runtime_error("unknown experiment kind: " + name);
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open experiment spec");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }

    ExperimentSpec spec;
    try {
        spec.kind = experiment_kind_from_string(doc.at("kind").get<std::string>());
        spec.radius = doc.value("radius", spec.radius);
        spec.prob_threshold = doc.value("prob_threshold", spec.prob_threshold);
        spec.seed = doc.value("seed", spec.seed);
        if (doc.contains("pso")) {
            const auto& p = doc.at("pso");
            spec.pso.particles = p.value("particles", spec.pso.particles);
            spec.pso.iterations = p.value("iterations", spec.pso.iterations);
            spec.pso.scalar_draws = p.value("scalar_draws", spec.pso.scalar_draws);
            spec.pso.keep_snapshot_fitness =
                p.value("keep_snapshot_fitness", spec.pso.keep_snapshot_fitness);
            if (p.contains("hyper")) {
                const auto& h = p.at("hyper");
                spec.pso.hyper.w = h.value("w", spec.pso.hyper.w);
                spec.pso.hyper.c1 = h.value("c1", spec.pso.hyper.c1);
                spec.pso.hyper.c2 = h.value("c2", spec.pso.hyper.c2);
            }
        }
        spec.k = doc.value("k", spec.k);
        spec.manifest_path = doc.value("manifest", spec.manifest_path);
        spec.train_selector = doc.value("train_selector", spec.train_selector);
        spec.warm_start_path = doc.value("warm_start", spec.warm_start_path);
        spec.output_dir = doc.value("output_dir", spec.output_dir);
        spec.emit_maps = doc.value("emit_maps", spec.emit_maps);
        spec.threads = doc.value("threads", spec.threads);
        spec.max_side = doc.value("max_side", spec.max_side);
        spec.square = doc.value("square", spec.square);
        if (doc.contains("canny")) {
            const auto& c = doc.at("canny");
            spec.canny.sigma = c.value("sigma", spec.canny.sigma);
            spec.canny.low = c.value("low", spec.canny.low);
            spec.canny.high = c.value("high", spec.canny.high);
        }
        spec.rule_table_path = doc.value("rule_table", spec.rule_table_path);
        if (doc.contains("eval_params")) {
            const auto& e = doc.at("eval_params");
            DetectorParams params;
            params.delta = e.at("delta").get<int>();
            params.tau = e.at("tau").get<double>();
            const auto rule = e.at("rule").get<std::uint64_t>();
            params.mask = spec.rule_table_path.empty()
                              ? decode_rule(rule, spec.radius)
                              : decode_rule(rule, spec.radius,
                                            load_numbering(spec.rule_table_path));
            spec.eval_params = params;
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return spec;
}

void save_experiment_spec(const std::string& path, const ExperimentSpec& spec) {
    nlohmann::json doc;
    doc["kind"] = to_string(spec.kind);
    doc["radius"] = spec.radius;
    doc["prob_threshold"] = spec.prob_threshold;
    doc["seed"] = spec.seed;
    doc["pso"] = {{"particles", spec.pso.particles},
                  {"iterations", spec.pso.iterations},
                  {"hyper",
                   {{"w", spec.pso.hyper.w},
                    {"c1", spec.pso.hyper.c1},
                    {"c2", spec.pso.hyper.c2}}},
                  {"scalar_draws", spec.pso.scalar_draws},
                  {"keep_snapshot_fitness", spec.pso.keep_snapshot_fitness}};
    doc["k"] = spec.k;
    doc["manifest"] = spec.manifest_path;
    doc["train_selector"] = spec.train_selector;
    doc["warm_start"] = spec.warm_start_path;
    doc["output_dir"] = spec.output_dir;
    doc["emit_maps"] = spec.emit_maps;
    doc["threads"] = spec.threads;
    doc["max_side"] = spec.max_side;
    doc["square"] = spec.square;
    doc["canny"] = {{"sigma", spec.canny.sigma},
                    {"low", spec.canny.low},
                    {"high", spec.canny.high}};
    if (!spec.rule_table_path.empty()) doc["rule_table"] = spec.rule_table_path;
    if (spec.eval_params) {
        doc["eval_params"] = {{"delta", spec.eval_params->delta},
                              {"tau", spec.eval_params->tau},
                              {"rule", spec.eval_params->mask.rule_number}};
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << doc.dump(2) << '\n';
}

Dataset load_dataset(const DatasetManifest& manifest, double p, int max_side, bool square,
                     int threads) {
    Dataset dataset(manifest.entries.size());
    parallel_for(manifest.entries.size(), threads, [&](std::size_t i) {
        const ManifestEntry& entry = manifest.entries[i];
        DatasetImage& item = dataset[i];
        item.id = entry.id;
        item.category = entry.category;
        item.image = prepare_image(to_grayscale(load_image(entry.image_path)), max_side, square);

        std::vector<EdgeMap> annotations;
        annotations.reserve(entry.annotation_paths.size());
        for (const auto& ap : entry.annotation_paths)
            annotations.push_back(prepare_annotation(load_edge_map(ap), max_side, square));
        item.truth = threshold_probability(average_annotations(annotations), p);
    });
    return dataset;
}

TrainingSet to_training_set(const Dataset& dataset, const std::vector<int>& indices) {
    TrainingSet train;
    train.reserve(indices.size());
    for (const int i : indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= dataset.size())
            throw std::invalid_argument("to_training_set: index out of range");
        train.push_back({dataset[i].id, dataset[i].image, dataset[i].truth});
    }
    return train;
}

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate agg;
    double sum = 0.0;
    for (const double v : values) {
        if (std::isfinite(v)) {
            sum += v;
            ++agg.n;
        } else {
            ++agg.excluded;
        }
    }
    if (agg.n == 0) return agg;
    agg.mean = sum / agg.n;
    if (agg.n > 1) {
        double sq = 0.0;
        for (const double v : values)
            if (std::isfinite(v)) sq += (v - agg.mean) * (v - agg.mean);
        agg.stddev = std::sqrt(sq / (agg.n - 1));
    }
    return agg;
}

std::vector<FoldSplit> kfold_split(std::size_t size, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_split: k must be at least 2");
    if (static_cast<std::size_t>(k) > size)
        throw std::invalid_argument("kfold_split: k exceeds dataset size");

    std::vector<int> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = size - 1; i > 0; --i)
        std::swap(order[i], order[uniform_below(rng, i + 1)]);

    std::vector<FoldSplit> folds(k);
    for (int f = 0; f < k; ++f) {
        const std::size_t lo = size * f / k;
        const std::size_t hi = size * (f + 1) / k;
        FoldSplit& fold = folds[f];
        fold.test.assign(order.begin() + lo, order.begin() + hi);
        fold.train.reserve(size - (hi - lo));
        fold.train.insert(fold.train.end(), order.begin(), order.begin() + lo);
        fold.train.insert(fold.train.end(), order.begin() + hi, order.end());
    }
    return folds;
}

namespace {

std::vector<int> all_indices(const Dataset& dataset) {
    std::vector<int> idx(dataset.size());
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

std::vector<int> category_indices(const Dataset& dataset, Category cat) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        if (dataset[i].category == cat) idx.push_back(static_cast<int>(i));
    return idx;
}

// categories with at least one image, in enum order
std::vector<Category> present_categories(const Dataset& dataset) {
    std::vector<Category> cats;
    for (int c = 0; c < kCategoryCount; ++c) {
        const Category cat = category_from_index(c);
        if (!category_indices(dataset, cat).empty()) cats.push_back(cat);
    }
    return cats;
}

const NumberingTable* spec_numbering(const ExperimentSpec& spec, NumberingTable& storage) {
    if (spec.rule_table_path.empty()) return nullptr;
    storage = load_numbering(spec.rule_table_path);
    return &storage;
}

PsoConfig run_config(const ExperimentSpec& spec, std::uint64_t run_index) {
    PsoConfig config = spec.pso;
    config.seed = derive_seed(spec.seed, run_index);
    config.threads = spec.threads;
    return config;
}

using DetectFn = std::function<EdgeMap(const GrayImage&)>;

/// Scores one model over one evaluation set: appends per-image rows, one
/// summary row, and (when asked) the detected maps.
void evaluate_set(ExperimentOutput& out, const Dataset& dataset, const std::vector<int>& indices,
                  const DetectFn& detect, const std::string& model, int radius,
                  const std::string& train_set, const std::string& eval_set,
                  std::optional<double> opt_dsc, const std::optional<DetectorParams>& params,
                  const ExperimentSpec& spec) {
    std::vector<EdgeMap> detected(indices.size());
    parallel_for(indices.size(), spec.threads, [&](std::size_t i) {
        detected[i] = detect(dataset[indices[i]].image);
    });

    std::vector<double> psnr_values, ssim_values;
    psnr_values.reserve(indices.size());
    ssim_values.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const DatasetImage& item = dataset[indices[i]];
        ImageRow row;
        row.model = model;
        row.train_set = train_set;
        row.eval_set = eval_set;
        row.image = item.id;
        row.metrics = evaluate_pair(detected[i], item.truth);
        psnr_values.push_back(row.metrics.psnr);
        ssim_values.push_back(row.metrics.ssim);
        out.rows.push_back(std::move(row));
        if (spec.emit_maps) {
            const std::string dir = train_set == "-" ? model : train_set;
            out.maps.emplace_back(dir + "/" + item.id, std::move(detected[i]));
        }
    }

    ResultRow summary;
    summary.model = model;
    summary.radius = radius;
    summary.train_set = train_set;
    summary.eval_set = eval_set;
    summary.psnr = aggregate(psnr_values);
    summary.ssim = aggregate(ssim_values);
    summary.opt_dsc = opt_dsc;
    summary.params = params;
    out.summary.push_back(std::move(summary));
}

DetectFn ca_detector(const DetectorParams& params) {
    return [params](const GrayImage& img) { return detect_edges(img, params); };
}

struct LoadedData {
    Dataset dataset;
    NumberingTable table_storage;
    const NumberingTable* numbering = nullptr;
};

LoadedData load_for_spec(const ExperimentSpec& spec) {
    if (spec.manifest_path.empty())
        throw std::invalid_argument("experiment spec has no manifest path");
    LoadedData data;
    data.dataset = load_dataset(load_manifest(spec.manifest_path), spec.prob_threshold,
                                spec.max_side, spec.square, spec.threads);
    data.numbering = spec_numbering(spec, data.table_storage);
    return data;
}

}  // namespace

ExperimentOutput run_kfold(const ExperimentSpec& spec) {
    if (spec.kind != ExperimentKind::kfold)
        throw std::invalid_argument("run_kfold: spec kind mismatch");
    const LoadedData data = load_for_spec(spec);
    const auto folds = kfold_split(data.dataset.size(), spec.k, spec.seed);

    ExperimentOutput out;
    std::vector<double> fold_fitness;
    std::vector<double> pooled_psnr, pooled_ssim;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const TrainingSet train = to_training_set(data.dataset, folds[f].train);
        OptimizationResult result =
            optimize(train, spec.radius, run_config(spec, f), data.numbering);
        const std::string name = "fold" + std::to_string(f);

        evaluate_set(out, data.dataset, folds[f].test, ca_detector(result.best_params), "ca",
                     spec.radius, name, "test" + std::to_string(f), result.best_fitness,
                     result.best_params, spec);
        fold_fitness.push_back(result.best_fitness);
        out.optimizations.emplace_back(name, std::move(result));
    }

    for (const ImageRow& row : out.rows) {
        pooled_psnr.push_back(row.metrics.psnr);
        pooled_ssim.push_back(row.metrics.ssim);
    }
    ResultRow pooled;
    pooled.model = "ca";
    pooled.radius = spec.radius;
    pooled.train_set = "kfold";
    pooled.eval_set = "all_tests";
    pooled.psnr = aggregate(pooled_psnr);
    pooled.ssim = aggregate(pooled_ssim);
    pooled.opt_dsc = aggregate(fold_fitness).mean;
    out.summary.push_back(std::move(pooled));
    return out;
}

ExperimentOutput run_general(const ExperimentSpec& spec) {
    if (spec.kind != ExperimentKind::general)
        throw std::invalid_argument("run_general: spec kind mismatch");
    const LoadedData data = load_for_spec(spec);
    const std::vector<int> all = all_indices(data.dataset);

    OptimizationResult result = optimize(to_training_set(data.dataset, all), spec.radius,
                                         run_config(spec, 0), data.numbering);

    ExperimentOutput out;
    const DetectFn detect = ca_detector(result.best_params);
    evaluate_set(out, data.dataset, all, detect, "ca", spec.radius, "general", "general",
                 result.best_fitness, result.best_params, spec);
    for (const Category cat : present_categories(data.dataset))
        evaluate_set(out, data.dataset, category_indices(data.dataset, cat), detect, "ca",
                     spec.radius, "general", to_string(cat), result.best_fitness,
                     result.best_params, spec);
    out.optimizations.emplace_back("general", std::move(result));
    return out;
}

ExperimentOutput run_specialized(const ExperimentSpec& spec) {
    const bool warm = spec.kind == ExperimentKind::specialized_tf;
    if (!warm && spec.kind != ExperimentKind::individual)
        throw std::invalid_argument("run_specialized: spec kind mismatch");
    if (warm && spec.warm_start_path.empty())
        throw std::invalid_argument("specialized_tf requires a warm-start population snapshot");

    const LoadedData data = load_for_spec(spec);
    const std::vector<int> all = all_indices(data.dataset);
    const auto categories = present_categories(data.dataset);

    Swarm snapshot;
    if (warm) snapshot = load_population(spec.warm_start_path);

    ExperimentOutput out;
    for (const Category cat : categories) {
        const TrainingSet train =
            to_training_set(data.dataset, category_indices(data.dataset, cat));
        const PsoConfig config = run_config(spec, static_cast<std::uint64_t>(cat));
        OptimizationResult result =
            warm ? warm_start_optimize(snapshot, train, spec.radius, config, data.numbering)
                 : optimize(train, spec.radius, config, data.numbering);
        const std::string name = (warm ? std::string("tf_") : std::string()) + to_string(cat);

        const DetectFn detect = ca_detector(result.best_params);
        for (const Category eval_cat : categories)
            evaluate_set(out, data.dataset, category_indices(data.dataset, eval_cat), detect,
                         "ca", spec.radius, name, to_string(eval_cat), result.best_fitness,
                         result.best_params, spec);
        evaluate_set(out, data.dataset, all, detect, "ca", spec.radius, name, "general",
                     result.best_fitness, result.best_params, spec);
        out.optimizations.emplace_back(name, std::move(result));
    }
    return out;
}

ExperimentOutput run_compare(const ExperimentSpec& spec) {
    if (spec.kind != ExperimentKind::evaluate_only)
        throw std::invalid_argument("run_compare: spec kind mismatch");
    const LoadedData data = load_for_spec(spec);

    std::vector<int> indices;
    std::string eval_name;
    if (spec.train_selector == "all" || spec.train_selector.empty()) {
        indices = all_indices(data.dataset);
        eval_name = "general";
    } else {
        const Category cat = category_from_string(spec.train_selector);
        indices = category_indices(data.dataset, cat);
        eval_name = to_string(cat);
        if (indices.empty())
            throw std::runtime_error("no images in category " + spec.train_selector);
    }

    ExperimentOutput out;
    if (spec.eval_params)
        evaluate_set(out, data.dataset, indices, ca_detector(*spec.eval_params), "ca",
                     spec.radius, "-", eval_name, std::nullopt, spec.eval_params, spec);
    const CannyConfig canny_config = spec.canny;
    evaluate_set(out, data.dataset, indices,
                 [canny_config](const GrayImage& img) { return canny(img, canny_config); },
                 "canny", 0, "-", eval_name, std::nullopt, std::nullopt, spec);
    return out;
}

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
    switch (spec.kind) {
        case ExperimentKind::kfold: return run_kfold(spec);
        case ExperimentKind::general: return run_general(spec);
        case ExperimentKind::specialized_tf:
        case ExperimentKind::individual: return run_specialized(spec);
        case ExperimentKind::evaluate_only: return run_compare(spec);
    }
    throw std::invalid_argument("run_experiment: unknown kind");
}

namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

nlohmann::json population_json(const Swarm& swarm) {
    nlohmann::json doc;
    doc["seed"] = swarm.rng_seed;
    doc["hyper"] = {{"w", swarm.hyper.w}, {"c1", swarm.hyper.c1}, {"c2", swarm.hyper.c2}};
    auto& list = doc["particles"] = nlohmann::json::array();
    for (const Particle& p : swarm.particles) {
        nlohmann::json item;
        item["position"] = p.position;
        item["velocity"] = p.velocity;
        item["best_position"] = p.best_position;
        if (std::isfinite(p.best_fitness)) item["best_fitness"] = p.best_fitness;
        list.push_back(std::move(item));
    }
    return doc;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << doc.dump(2) << '\n';
}

}  // namespace

void write_output(const ExperimentSpec& spec, const ExperimentOutput& out) {
    if (spec.output_dir.empty())
        throw std::invalid_argument("write_output: spec has no output directory");
    const fs::path dir(spec.output_dir);
    fs::create_directories(dir);

    {
        std::ofstream rows(dir / "rows.csv");
        if (!rows) throw std::runtime_error((dir / "rows.csv").string() + ": cannot open");
        rows << "model,train_set,eval_set,image,dsc,mse,psnr,ssim\n";
        for (const ImageRow& row : out.rows)
            rows << row.model << ',' << row.train_set << ',' << row.eval_set << ',' << row.image
                 << ',' << fmt(row.metrics.dsc) << ',' << fmt(row.metrics.mse) << ','
                 << fmt(row.metrics.psnr) << ',' << fmt(row.metrics.ssim) << '\n';
    }
    {
        std::ofstream summary(dir / "summary.csv");
        if (!summary) throw std::runtime_error((dir / "summary.csv").string() + ": cannot open");
        summary << "model,radius,train_set,eval_set,psnr_mean,psnr_std,psnr_n,psnr_excluded,"
                   "ssim_mean,ssim_std,ssim_n,opt_dsc,delta,tau,rule\n";
        for (const ResultRow& row : out.summary) {
            summary << row.model << ',' << row.radius << ',' << row.train_set << ','
                    << row.eval_set << ',';
            if (row.psnr.empty())
                summary << ",,0," << row.psnr.excluded << ',';
            else
                summary << fmt(row.psnr.mean) << ',' << fmt(row.psnr.stddev) << ',' << row.psnr.n
                        << ',' << row.psnr.excluded << ',';
            if (row.ssim.empty())
                summary << ",,0,";
            else
                summary << fmt(row.ssim.mean) << ',' << fmt(row.ssim.stddev) << ',' << row.ssim.n
                        << ',';
            if (row.opt_dsc) summary << fmt(*row.opt_dsc);
            summary << ',';
            if (row.params)
                summary << row.params->delta << ',' << fmt(row.params->tau) << ','
                        << row.params->mask.rule_number;
            else
                summary << ",,";
            summary << '\n';
        }
    }

    if (!out.optimizations.empty()) {
        nlohmann::json history;
        for (const auto& [name, result] : out.optimizations) history[name] = result.history;
        write_json(dir / "history.json", history);

        if (out.optimizations.size() == 1) {
            write_json(dir / "population.json",
                       population_json(out.optimizations.front().second.final_population));
        } else {
            for (const auto& [name, result] : out.optimizations)
                write_json(dir / ("population_" + name + ".json"),
                           population_json(result.final_population));
        }
    }

    for (const auto& [stem, map] : out.maps) {
        const fs::path path = dir / "maps" / (stem + ".png");
        fs::create_directories(path.parent_path());
        save_edge_map(path.string(), map);
    }
}

}  // namespace caedge
