#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caedge/canny.hpp"
#include "caedge/manifest.hpp"
#include "caedge/metrics.hpp"
#include "caedge/pso.hpp"

namespace caedge {

enum class ExperimentKind { kfold, general, specialized_tf, individual, evaluate_only };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::general;
    int radius = 1;
    double prob_threshold = 0.02;
    std::uint64_t seed = 42;
    PsoConfig pso;
    int k = 10;                      // kfold only
    std::string manifest_path;
    std::string train_selector = "all";  // "all", "fold", or a category name
    std::string warm_start_path;     // population snapshot, required for specialized_tf
    std::string output_dir;
    bool emit_maps = false;
    int threads = 1;
    int max_side = 128;
    bool square = false;
    CannyConfig canny;
    std::optional<DetectorParams> eval_params;  // evaluate_only: the model to score
    std::string rule_table_path;     // optional custom numbering table
};

/// JSON round trip for the spec (the CLI's --config format).
ExperimentSpec load_experiment_spec(const std::string& path);
void save_experiment_spec(const std::string& path, const ExperimentSpec& spec);

/// One preprocessed dataset entry: grayscale image plus the ground truth
/// extracted from its annotators at the spec's probability threshold.
struct DatasetImage {
    std::string id;
    Category category = Category::animals;
    GrayImage image;
    EdgeMap truth;
};
using Dataset = std::vector<DatasetImage>;

/// Loads and preprocesses every manifest entry: image to grayscale,
/// orientation, resize; each annotator map through the same geometry; then
/// average and threshold at p.
Dataset load_dataset(const DatasetManifest& manifest, double p, int max_side, bool square,
                     int threads = 1);

TrainingSet to_training_set(const Dataset& dataset, const std::vector<int>& indices);

/// Mean and sample (n-1) standard deviation. Infinite inputs are excluded and
/// counted; n is the number of values actually used.
struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
    int n = 0;
    int excluded = 0;

    bool empty() const { return n == 0; }
};
Aggregate aggregate(const std::vector<double>& values);

/// Seeded shuffle followed by k near-equal contiguous folds. Fold i pairs the
/// i-th block as the test set with everything else as training. Throws if
/// k < 2 or k exceeds the dataset size.
struct FoldSplit {
    std::vector<int> train;
    std::vector<int> test;
};
std::vector<FoldSplit> kfold_split(std::size_t size, int k, std::uint64_t seed);

/// Per-image metric row as written to rows.csv.
struct ImageRow {
    std::string model;      // "ca" or "canny"
    std::string train_set;  // "general", a category, "tf_<category>", "fold<i>", or "-"
    std::string eval_set;
    std::string image;
    MetricReport metrics;
};

/// Aggregated row as written to summary.csv.
struct ResultRow {
    std::string model;
    int radius = 0;  // 0 for canny
    std::string train_set;
    std::string eval_set;
    Aggregate psnr;
    Aggregate ssim;
    std::optional<double> opt_dsc;             // optimization-time mean DSC
    std::optional<DetectorParams> params;
};

struct ExperimentOutput {
    std::vector<ImageRow> rows;
    std::vector<ResultRow> summary;
    // (train-set id, result) per optimization run, in execution order
    std::vector<std::pair<std::string, OptimizationResult>> optimizations;
    // (map path stem, detected map) pairs for --emit-maps
    std::vector<std::pair<std::string, EdgeMap>> maps;
};

ExperimentOutput run_kfold(const ExperimentSpec& spec);
ExperimentOutput run_general(const ExperimentSpec& spec);
/// Covers both the warm-started (specialized_tf) and cold (individual) variants.
ExperimentOutput run_specialized(const ExperimentSpec& spec);
/// evaluate_only: scores spec.eval_params and the Canny baseline on the set.
ExperimentOutput run_compare(const ExperimentSpec& spec);

ExperimentOutput run_experiment(const ExperimentSpec& spec);

/// Writes rows.csv, summary.csv, population.json, history.json, and (with
/// emit_maps) maps/<train>/<image>.png under spec.output_dir.
void write_output(const ExperimentSpec& spec, const ExperimentOutput& out);

}  // namespace caedge
