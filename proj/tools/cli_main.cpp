#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "caedge/canny.hpp"
#include "caedge/detector.hpp"
#include "caedge/harness.hpp"
#include "caedge/image.hpp"
#include "caedge/metrics.hpp"
#include "caedge/png_io.hpp"
#include "caedge/pso.hpp"
#include "caedge/rules.hpp"

namespace fs = std::filesystem;
using namespace caedge;

namespace {

// not every subcommand defines every probed flag, hence the no-throw lookup
bool given(const CLI::App& sub, const std::string& flag) {
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
}

// flags win over --config values, so only copy when the flag was given
template <typename T>
void take(const CLI::App& sub, const std::string& flag, T& dst, const T& src) {
    if (given(sub, flag)) dst = src;
}

void echo_line(const std::string& line) { std::cerr << line << '\n'; }

void persist_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
}

std::string kv(const std::string& key, const std::string& value) { return key + "=" + value; }

/// Flag storage shared by the experiment subcommands. Values start at the
/// ExperimentSpec defaults so --help shows the real defaults.
struct ExperimentFlags {
    ExperimentSpec defaults;
    std::string config_path;
    std::string manifest;
    std::string out_dir;
    int k = 10;
    int radius = 1;
    double prob_threshold = 0.02;
    std::uint64_t seed = 42;
    int particles = 30;
    int iterations = 100;
    double w = 0.9, c1 = 0.5, c2 = 0.3;
    bool scalar_draws = false;
    bool keep_snapshot_fitness = false;
    std::string warm_start;
    bool emit_maps = false;
    int threads = 1;
    int max_side = 128;
    bool square = false;
    std::string rule_table;
    double sigma = 1.0, low = 25.5, high = 51.0;
    int delta = -1;
    double tau = -1.0;
    std::uint64_t rule = 0;
    std::string select = "all";

    ExperimentFlags() {
        k = defaults.k;
        radius = defaults.radius;
        prob_threshold = defaults.prob_threshold;
        seed = defaults.seed;
        particles = defaults.pso.particles;
        iterations = defaults.pso.iterations;
        w = defaults.pso.hyper.w;
        c1 = defaults.pso.hyper.c1;
        c2 = defaults.pso.hyper.c2;
        threads = defaults.threads;
        max_side = defaults.max_side;
        square = defaults.square;
        sigma = defaults.canny.sigma;
        low = defaults.canny.low;
        high = defaults.canny.high;
    }
};

void add_common_experiment_flags(CLI::App* sub, ExperimentFlags& f) {
    sub->add_option("--config", f.config_path,
                    "Experiment spec JSON; explicit flags override its values");
    sub->add_option("--manifest", f.manifest, "Dataset manifest CSV");
    sub->add_option("--out", f.out_dir, "Output directory for rows.csv, summary.csv, ...");
    sub->add_option("--radius", f.radius, "Neighborhood radius (1 or 2)")
        ->capture_default_str();
    sub->add_option("--prob-threshold", f.prob_threshold,
                    "Annotator agreement threshold p for the ground truth")
        ->capture_default_str();
    sub->add_option("--seed", f.seed, "Master seed for splits and optimizer runs")
        ->capture_default_str();
    sub->add_option("--particles", f.particles, "Swarm size")->capture_default_str();
    sub->add_option("--iterations", f.iterations, "Optimizer iterations")->capture_default_str();
    sub->add_option("--w", f.w, "Inertia weight")->capture_default_str();
    sub->add_option("--c1", f.c1, "Personal attraction coefficient")->capture_default_str();
    sub->add_option("--c2", f.c2, "Global attraction coefficient")->capture_default_str();
    sub->add_flag("--scalar-draws", f.scalar_draws,
                  "Draw one r1/r2 pair per particle instead of per coordinate");
    sub->add_flag("--emit-maps", f.emit_maps, "Write detected edge maps under maps/");
    sub->add_option("--threads", f.threads, "Worker thread cap")->capture_default_str();
    sub->add_option("--max-side", f.max_side, "Resize so the longer side equals this")
        ->capture_default_str();
    sub->add_flag("--square", f.square, "Letterbox onto a square canvas after resizing");
    sub->add_option("--rule-table", f.rule_table, "Custom cell-numbering table JSON");
}

ExperimentSpec resolve_spec(const CLI::App& sub, const ExperimentFlags& f, ExperimentKind kind) {
    ExperimentSpec spec;
    if (!f.config_path.empty()) spec = load_experiment_spec(f.config_path);
    spec.kind = kind;

    take(sub, "--manifest", spec.manifest_path, f.manifest);
    take(sub, "--out", spec.output_dir, f.out_dir);
    take(sub, "--radius", spec.radius, f.radius);
    take(sub, "--prob-threshold", spec.prob_threshold, f.prob_threshold);
    take(sub, "--seed", spec.seed, f.seed);
    take(sub, "--particles", spec.pso.particles, f.particles);
    take(sub, "--iterations", spec.pso.iterations, f.iterations);
    take(sub, "--w", spec.pso.hyper.w, f.w);
    take(sub, "--c1", spec.pso.hyper.c1, f.c1);
    take(sub, "--c2", spec.pso.hyper.c2, f.c2);
    take(sub, "--scalar-draws", spec.pso.scalar_draws, f.scalar_draws);
    take(sub, "--keep-snapshot-fitness", spec.pso.keep_snapshot_fitness,
         f.keep_snapshot_fitness);
    take(sub, "--warm-start", spec.warm_start_path, f.warm_start);
    take(sub, "--emit-maps", spec.emit_maps, f.emit_maps);
    take(sub, "--threads", spec.threads, f.threads);
    take(sub, "--max-side", spec.max_side, f.max_side);
    take(sub, "--square", spec.square, f.square);
    take(sub, "--rule-table", spec.rule_table_path, f.rule_table);
    take(sub, "--k", spec.k, f.k);
    take(sub, "--sigma", spec.canny.sigma, f.sigma);
    take(sub, "--low", spec.canny.low, f.low);
    take(sub, "--high", spec.canny.high, f.high);
    take(sub, "--select", spec.train_selector, f.select);

    if (given(sub, "--delta") || given(sub, "--tau") || given(sub, "--rule")) {
        if (!(given(sub, "--delta") && given(sub, "--tau") && given(sub, "--rule")))
            throw std::invalid_argument("--delta, --tau, and --rule must be given together");
        DetectorParams params;
        params.delta = f.delta;
        params.tau = f.tau;
        params.mask = spec.rule_table_path.empty()
                          ? decode_rule(f.rule, spec.radius)
                          : decode_rule(f.rule, spec.radius, load_numbering(spec.rule_table_path));
        spec.eval_params = params;
    }

    if (spec.manifest_path.empty()) throw std::invalid_argument("--manifest is required");
    if (spec.output_dir.empty()) throw std::invalid_argument("--out is required");
    return spec;
}

int run_experiment_command(const CLI::App& sub, const ExperimentFlags& f, ExperimentKind kind) {
    const ExperimentSpec spec = resolve_spec(sub, f, kind);
    fs::create_directories(spec.output_dir);
    const std::string spec_path = (fs::path(spec.output_dir) / "spec.json").string();
    save_experiment_spec(spec_path, spec);
    {
        std::ifstream echo(spec_path);
        std::cerr << echo.rdbuf();
    }

    const ExperimentOutput out = run_experiment(spec);
    write_output(spec, out);

    std::ifstream summary(fs::path(spec.output_dir) / "summary.csv");
    std::cout << summary.rdbuf();
    return 0;
}

int run_preprocess(const std::string& image_path, const std::string& out,
                   const std::vector<std::string>& annotations, const std::string& truth_out,
                   int max_side, bool square, double p) {
    echo_line(kv("image", image_path) + " " + kv("out", out) + " " +
              kv("max_side", std::to_string(max_side)) + " " +
              kv("square", square ? "true" : "false") + " " + kv("p", std::to_string(p)));
    const GrayImage processed =
        prepare_image(to_grayscale(load_image(image_path)), max_side, square);
    save_image(out, processed);
    persist_text(out + ".config.json",
                 std::string("{\"max_side\": ") + std::to_string(max_side) +
                     ", \"square\": " + (square ? "true" : "false") + "}\n");

    if (!annotations.empty()) {
        if (truth_out.empty())
            throw std::invalid_argument("--truth-out is required when annotations are given");
        std::vector<EdgeMap> maps;
        maps.reserve(annotations.size());
        for (const auto& path : annotations)
            maps.push_back(prepare_annotation(load_edge_map(path), max_side, square));
        save_edge_map(truth_out, threshold_probability(average_annotations(maps), p));
    } else if (!truth_out.empty()) {
        throw std::invalid_argument("--truth-out needs at least one --annotation");
    }
    return 0;
}

int run_detect(const std::string& image_path, std::string out, int delta, double tau,
               std::uint64_t rule, int radius, const std::string& rule_table, int max_side,
               bool square) {
    if (out.empty()) {
        const fs::path p(image_path);
        out = (p.parent_path() / (p.stem().string() + ".edges.png")).string();
    }
    echo_line(kv("image", image_path) + " " + kv("out", out) + " " +
              kv("delta", std::to_string(delta)) + " " + kv("tau", std::to_string(tau)) + " " +
              kv("rule", std::to_string(rule)) + " " + kv("radius", std::to_string(radius)));

    DetectorParams params;
    params.delta = delta;
    params.tau = tau;
    params.mask = rule_table.empty() ? decode_rule(rule, radius)
                                     : decode_rule(rule, radius, load_numbering(rule_table));

    GrayImage img = to_grayscale(load_image(image_path));
    if (max_side > 0) img = prepare_image(img, max_side, square);
    save_edge_map(out, detect_edges(img, params));
    persist_text(out + ".config.json",
                 std::string("{\"delta\": ") + std::to_string(delta) +
                     ", \"tau\": " + std::to_string(tau) + ", \"rule\": " + std::to_string(rule) +
                     ", \"radius\": " + std::to_string(radius) + "}\n");
    return 0;
}

int run_evaluate(const std::string& detected_path, const std::vector<std::string>& annotated,
                 double p) {
    echo_line(kv("detected", detected_path) + " " + kv("annotators", std::to_string(annotated.size())) +
              " " + kv("p", std::to_string(p)));
    const EdgeMap detected = load_edge_map(detected_path);
    EdgeMap truth;
    if (annotated.size() == 1) {
        truth = load_edge_map(annotated.front());
    } else {
        std::vector<EdgeMap> maps;
        maps.reserve(annotated.size());
        for (const auto& path : annotated) maps.push_back(load_edge_map(path));
        truth = threshold_probability(average_annotations(maps), p);
    }
    const MetricReport report = evaluate_pair(detected, truth);
    std::cout << std::setprecision(10);  // match the file outputs' %.10g
    std::cout << "dsc,mse,psnr,ssim\n";
    std::cout << report.dsc << ',' << report.mse << ',';
    if (std::isinf(report.psnr))
        std::cout << "inf";
    else
        std::cout << report.psnr;
    std::cout << ',' << report.ssim << '\n';
    return 0;
}

int run_optimize(const CLI::App& sub, const ExperimentFlags& f) {
    ExperimentSpec spec = resolve_spec(sub, f, ExperimentKind::general);

    const DatasetManifest manifest = load_manifest(spec.manifest_path);
    const Dataset dataset = load_dataset(manifest, spec.prob_threshold, spec.max_side,
                                         spec.square, spec.threads);
    std::vector<int> indices;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (spec.train_selector == "all" ||
            std::string(to_string(dataset[i].category)) == spec.train_selector)
            indices.push_back(static_cast<int>(i));
    }
    if (indices.empty())
        throw std::runtime_error("training selector matched no images: " + spec.train_selector);

    NumberingTable table;
    const NumberingTable* numbering = nullptr;
    if (!spec.rule_table_path.empty()) {
        table = load_numbering(spec.rule_table_path);
        numbering = &table;
    }

    PsoConfig config = spec.pso;
    config.seed = spec.seed;
    config.threads = spec.threads;

    OptimizationResult result;
    if (spec.warm_start_path.empty()) {
        result = optimize(to_training_set(dataset, indices), spec.radius, config, numbering);
    } else {
        const Swarm snapshot = load_population(spec.warm_start_path);
        result = warm_start_optimize(snapshot, to_training_set(dataset, indices), spec.radius,
                                     config, numbering);
    }

    fs::create_directories(spec.output_dir);
    save_experiment_spec((fs::path(spec.output_dir) / "spec.json").string(), spec);
    save_result((fs::path(spec.output_dir) / "result.json").string(), result);
    save_population((fs::path(spec.output_dir) / "population.json").string(),
                    result.final_population);
    std::cout << std::setprecision(10);  // match the file outputs' %.10g
    std::cout << "delta,tau,rule,radius,fitness\n"
              << result.best_params.delta << ',' << result.best_params.tau << ','
              << result.best_params.mask.rule_number << ',' << result.best_params.mask.radius
              << ',' << result.best_fitness << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cellular-automaton edge detection with swarm-optimized parameters"};
    app.require_subcommand(1);

    // preprocess
    std::string pp_image, pp_out, pp_truth_out;
    std::vector<std::string> pp_annotations;
    int pp_max_side = 128;
    bool pp_square = false;
    double pp_p = 0.02;
    auto* pre = app.add_subcommand(
        "preprocess", "Grayscale, orientation, and resize pipeline for one image");
    pre->add_option("--image", pp_image, "Input PNG")->required();
    pre->add_option("--out", pp_out, "Output PNG")->required();
    pre->add_option("--annotation", pp_annotations,
                    "Annotator edge map PNG (repeatable); combined into a ground truth");
    pre->add_option("--truth-out", pp_truth_out, "Output PNG for the combined ground truth");
    pre->add_option("--max-side", pp_max_side, "Resize so the longer side equals this")
        ->capture_default_str();
    pre->add_flag("--square", pp_square, "Letterbox onto a square canvas");
    pre->add_option("--prob-threshold", pp_p,
                    "Annotator agreement threshold p (pixels with mean > p become edges)")
        ->capture_default_str();

    // detect
    std::string d_image, d_out, d_rule_table;
    int d_delta = 0, d_radius = 1, d_max_side = 0;
    double d_tau = 0.0;
    std::uint64_t d_rule = 0;
    bool d_square = false;
    auto* det = app.add_subcommand("detect", "Run the edge detector on one image");
    det->add_option("--image", d_image, "Input PNG")->required();
    det->add_option("--out", d_out, "Output PNG (default: <image stem>.edges.png)");
    det->add_option("--delta", d_delta, "Damping term, 0..255")->required();
    det->add_option("--tau", d_tau, "Edge threshold in [0,1]")->required();
    det->add_option("--rule", d_rule, "Linear rule number selecting the neighbor cells")
        ->required();
    det->add_option("--radius", d_radius, "Neighborhood radius (1 or 2)")->capture_default_str();
    det->add_option("--rule-table", d_rule_table, "Custom cell-numbering table JSON");
    det->add_option("--max-side", d_max_side,
                    "Preprocess to this size first; 0 detects at native resolution")
        ->capture_default_str();
    det->add_flag("--square", d_square, "Letterbox onto a square canvas when preprocessing");

    // evaluate
    std::string e_detected;
    std::vector<std::string> e_annotated;
    double e_p = 0.02;
    auto* eva = app.add_subcommand("evaluate",
                                   "Score a detected map against annotations (DSC/MSE/PSNR/SSIM)");
    eva->add_option("--detected", e_detected, "Detected edge map PNG")->required();
    eva->add_option("--annotated", e_annotated, "Annotation PNG (repeatable)")->required();
    eva->add_option("--prob-threshold", e_p,
                    "Agreement threshold p when several annotations are given")
        ->capture_default_str();

    // optimize
    ExperimentFlags of;
    auto* opt = app.add_subcommand("optimize",
                                   "Particle-swarm search for (delta, tau, rule) on a manifest");
    add_common_experiment_flags(opt, of);
    opt->add_option("--select", of.select,
                    "Training subset: 'all' or a category name")
        ->capture_default_str();
    opt->add_option("--warm-start", of.warm_start, "Start from a saved population snapshot");
    opt->add_flag("--keep-snapshot-fitness", of.keep_snapshot_fitness,
                  "Trust the snapshot's stored fitness instead of re-evaluating");

    // experiments
    ExperimentFlags kf;
    auto* kfold_cmd = app.add_subcommand("kfold", "k-fold cross-validation experiment");
    add_common_experiment_flags(kfold_cmd, kf);
    kfold_cmd->add_option("--k", kf.k, "Number of folds")->capture_default_str();

    ExperimentFlags gf;
    auto* general_cmd =
        app.add_subcommand("general", "Optimize on the full set and evaluate per category");
    add_common_experiment_flags(general_cmd, gf);

    ExperimentFlags sf;
    auto* spec_cmd = app.add_subcommand(
        "specialized", "Per-category optimization warm-started from a saved population");
    add_common_experiment_flags(spec_cmd, sf);
    spec_cmd->add_option("--warm-start", sf.warm_start, "Population snapshot JSON")->required();
    spec_cmd->add_flag("--keep-snapshot-fitness", sf.keep_snapshot_fitness,
                       "Trust the snapshot's stored fitness instead of re-evaluating");

    ExperimentFlags nf;
    auto* indiv_cmd = app.add_subcommand(
        "individual", "Per-category optimization from scratch (no warm start)");
    add_common_experiment_flags(indiv_cmd, nf);

    ExperimentFlags cf;
    auto* cmp_cmd = app.add_subcommand(
        "compare", "Evaluate fixed detector parameters and the Canny baseline on a set");
    add_common_experiment_flags(cmp_cmd, cf);
    cmp_cmd->add_option("--delta", cf.delta, "Damping term of the model under evaluation");
    cmp_cmd->add_option("--tau", cf.tau, "Threshold of the model under evaluation");
    cmp_cmd->add_option("--rule", cf.rule, "Rule number of the model under evaluation");
    cmp_cmd->add_option("--select", cf.select, "Evaluation subset: 'all' or a category name")
        ->capture_default_str();
    cmp_cmd->add_option("--sigma", cf.sigma, "Canny Gaussian sigma")->capture_default_str();
    cmp_cmd->add_option("--low", cf.low, "Canny low threshold on gradient magnitude")
        ->capture_default_str();
    cmp_cmd->add_option("--high", cf.high, "Canny high threshold on gradient magnitude")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (pre->parsed())
            return run_preprocess(pp_image, pp_out, pp_annotations, pp_truth_out, pp_max_side,
                                  pp_square, pp_p);
        if (det->parsed())
            return run_detect(d_image, d_out, d_delta, d_tau, d_rule, d_radius, d_rule_table,
                              d_max_side, d_square);
        if (eva->parsed()) return run_evaluate(e_detected, e_annotated, e_p);
        if (opt->parsed()) return run_optimize(*opt, of);
        if (kfold_cmd->parsed())
            return run_experiment_command(*kfold_cmd, kf, ExperimentKind::kfold);
        if (general_cmd->parsed())
            return run_experiment_command(*general_cmd, gf, ExperimentKind::general);
        if (spec_cmd->parsed())
            return run_experiment_command(*spec_cmd, sf, ExperimentKind::specialized_tf);
        if (indiv_cmd->parsed())
            return run_experiment_command(*indiv_cmd, nf, ExperimentKind::individual);
        if (cmp_cmd->parsed())
            return run_experiment_command(*cmp_cmd, cf, ExperimentKind::evaluate_only);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
