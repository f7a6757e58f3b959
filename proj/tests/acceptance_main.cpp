// End-to-end acceptance checks. Each numbered criterion prints exactly one
// PASS/FAIL line; soft expectations are measured and RECORDED without being
// enforced. The process exits nonzero when any hard criterion fails.

#include <caedge/canny.hpp>
#include <caedge/detector.hpp>
#include <caedge/harness.hpp>
#include <caedge/metrics.hpp>
#include <caedge/pso.hpp>
#include <caedge/rng.hpp>
#include <caedge/synthetic.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <vector>

#include "support/oracles.hpp"

using namespace caedge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " " << criterion << " " << detail << std::endl;
    if (!ok) ++failures;
}

void record(const std::string& tag, const std::string& detail) {
    std::cout << "RECORDED " << tag << " " << detail << std::endl;
}

std::string fmt(double v, int digits = 6) {
    std::ostringstream ss;
    ss.precision(digits);
    ss << v;
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CAEDGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- criterion 1: the detector agrees with a brute-force evaluator ----

void criterion_transition_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(2024);
    int cases = 0, mismatches = 0;
    for (int radius : {1, 2}) {
        const NumberingTable& table = default_numbering(radius);
        for (int i = 0; i < 50; ++i) {
            const GrayImage img = oracle::random_gray(8, 8, rng);
            for (int p = 0; p < 10; ++p) {
                DetectorParams params;
                params.delta = static_cast<int>(rng() % 256);
                params.tau = uniform01(rng);
                const std::uint64_t z = rng() % (max_rule(radius) + 1);
                params.mask = decode_rule(z, radius);
                const EdgeMap got = detect_edges(img, params);
                const EdgeMap want =
                    oracle::brute_force_detect(img, params.delta, params.tau, z, radius, table);
                ++cases;
                if (!(got == want)) ++mismatches;
            }
        }
    }
    const double elapsed = seconds_since(start);
    report(1, mismatches == 0 && elapsed < 5.0,
           "transition rule vs brute-force oracle: " + std::to_string(mismatches) +
               " mismatches in " + std::to_string(cases) + " random cases (" + fmt(elapsed, 3) +
               "s, limit 5s)");
}

// ---- criterion 2: rule codec ----

void criterion_rule_codec() {
    bool ok = max_rule(1) == 511 && max_rule(2) == 33554431;
    int bad = 0;
    for (std::uint64_t z = 0; z <= 511; ++z)
        if (encode_rule(decode_rule(z, 1).offsets, 1) != z) ++bad;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        const std::uint64_t z = rng() % (max_rule(2) + 1);
        if (encode_rule(decode_rule(z, 2).offsets, 2) != z) ++bad;
    }
    ok = ok && bad == 0;
    report(2, ok,
           "rule codec: exhaustive radius-1 plus 10000 random radius-2 round trips, " +
               std::to_string(bad) + " failures; ranges 511/33554431");
}

// ---- criterion 3: metric oracles ----

void criterion_metric_oracles() {
    bool ok = true;
    std::string why;

    EdgeMap det(8, 1), ann(8, 1);
    det.data = {1, 1, 1, 1, 0, 0, 0, 0};
    ann.data = {1, 1, 0, 0, 1, 1, 0, 0};
    if (dsc(det, ann) != 0.5) { ok = false; why += " dsc"; }
    if (dsc(EdgeMap(4, 4, 0), EdgeMap(4, 4, 0)) != 1.0) { ok = false; why += " dsc-empty"; }

    const EdgeMap zeros(8, 8, 0);
    EdgeMap almost = zeros;
    almost.data[13] = 1;
    if (mse(zeros, almost) != 65025.0 / 64.0) { ok = false; why += " mse"; }
    if (std::abs(psnr(zeros, almost) - 10.0 * std::log10(64.0)) > 1e-9) {
        ok = false;
        why += " psnr";
    }
    if (psnr(zeros, EdgeMap(8, 8, 1)) != 0.0) { ok = false; why += " psnr-0db"; }
    if (!std::isinf(psnr(zeros, zeros))) { ok = false; why += " psnr-inf"; }

    std::mt19937_64 rng(5150);
    for (int i = 0; i < 20; ++i) {
        const EdgeMap m = oracle::random_map(18, 14, 0.3, rng);
        if (std::abs(ssim(m, m) - 1.0) > 1e-9) { ok = false; why += " ssim-self"; break; }
    }
    for (int i = 0; i < 10; ++i) {
        const EdgeMap a = oracle::random_map(20, 16, 0.3, rng);
        const EdgeMap b = oracle::random_map(20, 16, 0.3, rng);
        GrayImage ga(20, 16), gb(20, 16);
        for (std::size_t j = 0; j < a.data.size(); ++j) {
            ga.data[j] = a.data[j] ? 255 : 0;
            gb.data[j] = b.data[j] ? 255 : 0;
        }
        if (std::abs(ssim(a, b) - oracle::reference_ssim(ga, gb)) > 1e-9) {
            ok = false;
            why += " ssim-ref";
            break;
        }
    }
    report(3, ok, "metric oracles (dsc, mse exact; psnr, ssim to 1e-9)" +
                      (why.empty() ? std::string() : ":" + why));
}

// ---- criterion 4: monotonicity ----

void criterion_monotonicity() {
    std::mt19937_64 rng(88);
    int violations = 0;
    for (int i = 0; i < 20; ++i) {
        const GrayImage img = oracle::random_gray(16, 12, rng);
        const std::uint64_t z = rng() % 512;

        // growing tau: the edge set may only shrink, pixelwise
        DetectorParams params;
        params.delta = static_cast<int>(rng() % 128);
        params.mask = decode_rule(z, 1);
        EdgeMap prev;
        for (int t = 0; t < 10; ++t) {
            params.tau = t / 9.0;
            const EdgeMap cur = detect_edges(img, params);
            if (t > 0)
                for (std::size_t j = 0; j < cur.data.size(); ++j)
                    if (cur.data[j] > prev.data[j]) ++violations;
            prev = cur;
        }

        // growing delta damps the response: again pixelwise shrinking
        params.tau = 0.35;
        for (int d = 0; d < 10; ++d) {
            params.delta = d * 28;
            const EdgeMap cur = detect_edges(img, params);
            if (d > 0)
                for (std::size_t j = 0; j < cur.data.size(); ++j)
                    if (cur.data[j] > prev.data[j]) ++violations;
            prev = cur;
        }
    }
    report(4, violations == 0,
           "monotone response in tau and delta over 10-point grids on 20 images: " +
               std::to_string(violations) + " pixel violations");
}

// ---- criterion 5: optimizer sanity on the sphere ----

void criterion_pso_sphere() {
    const auto sphere = [](const std::array<double, 3>& x) {
        const double dx = x[0] - 0.3, dy = x[1] - 0.3, dz = x[2] - 0.3;
        return -(dx * dx + dy * dy + dz * dz);
    };

    Swarm swarm = init_swarm(30, 7);
    evaluate_initial(swarm, sphere);
    for (int i = 0; i < 200; ++i) step(swarm, sphere);
    double err = 0.0;
    for (int c = 0; c < 3; ++c)
        err = std::max(err, std::abs(swarm.global_best_position[c] - 0.3));

    bool monotone = true;
    for (std::uint64_t seed = 1; seed <= 10 && monotone; ++seed) {
        Swarm s = init_swarm(10, seed);
        evaluate_initial(s, sphere);
        double prev = s.global_best_fitness;
        for (int t = 0; t < 50; ++t) {
            step(s, sphere);
            if (s.global_best_fitness < prev) { monotone = false; break; }
            prev = s.global_best_fitness;
        }
    }

    report(5, err < 1e-2 && monotone,
           "swarm finds the sphere optimum (max coordinate error " + fmt(err, 3) +
               ", limit 1e-2) with non-decreasing best fitness across 10 seeds" +
               std::string(monotone ? "" : " [monotonicity violated]"));
}

// ---- criteria 6 and 7 share one corpus and one trained model ----

struct TrainedModel {
    ExperimentSpec spec;
    DetectorParams params;
    double opt_dsc = 0.0;
    double ssim_general = 0.0;
    fs::path corpus;
};

TrainedModel criterion_optimization_quality() {
    const auto start = Clock::now();

    TrainedModel model;
    model.corpus = oracle::scratch_dir("acceptance_corpus");
    write_corpus(model.corpus.string(), generate_corpus(SynthConfig{}));

    ExperimentSpec spec;
    spec.kind = ExperimentKind::general;
    spec.manifest_path = (model.corpus / "manifest.csv").string();
    spec.radius = 1;
    spec.prob_threshold = 0.02;
    spec.seed = 42;
    spec.pso.particles = 10;
    spec.pso.iterations = 50;
    spec.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    spec.max_side = 128;

    const ExperimentOutput out = run_general(spec);
    const double fitness = out.summary.at(0).opt_dsc.value();
    const double elapsed = seconds_since(start);

    model.spec = spec;
    model.params = out.summary.at(0).params.value();
    model.opt_dsc = fitness;
    model.ssim_general = out.summary.at(0).ssim.mean;

    report(6, fitness >= 0.40 && elapsed < 600.0,
           "optimized detector reaches mean train DSC " + fmt(fitness) +
               " (floor 0.40) on the 20-image corpus in " + fmt(elapsed, 3) + "s (limit 600s)");
    return model;
}

void criterion_beats_baseline(const TrainedModel& model) {
    ExperimentSpec spec = model.spec;
    spec.kind = ExperimentKind::evaluate_only;
    spec.eval_params = model.params;
    spec.train_selector = "all";

    const ExperimentOutput out = run_compare(spec);
    double ca = 0.0, base = 0.0;
    for (const auto& row : out.summary) {
        if (row.model == "ca") ca = row.ssim.mean;
        if (row.model == "canny") base = row.ssim.mean;
    }
    report(7, ca > base,
           "mean SSIM: optimized detector " + fmt(ca) + " vs canny baseline " + fmt(base) +
               " (must be strictly higher)");
}

// ---- criterion 8: byte-identical experiment outputs across thread counts ----

bool same_artifacts(const fs::path& a, const fs::path& b, std::string& detail) {
    // spec.json is the echoed invocation (it records --threads), so it is the
    // one file allowed to differ
    std::map<std::string, fs::path> left, right;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file() && e.path().filename() != "spec.json")
            left[fs::relative(e.path(), a).string()] = e.path();
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file() && e.path().filename() != "spec.json")
            right[fs::relative(e.path(), b).string()] = e.path();
    if (left.size() != right.size()) {
        detail = "different artifact sets";
        return false;
    }
    for (const auto& [rel, path] : left) {
        if (!right.count(rel)) {
            detail = "missing " + rel;
            return false;
        }
        if (slurp(path) != slurp(right.at(rel))) {
            detail = rel + " differs";
            return false;
        }
    }
    return true;
}

void criterion_thread_determinism(const TrainedModel& model) {
    const fs::path dir = oracle::scratch_dir("acceptance_repro");
    const std::string manifest = (model.corpus / "manifest.csv").string();
    const std::string common = " --manifest " + manifest +
                               " --particles 3 --iterations 2 --seed 17 --max-side 32";

    bool ok = true;
    std::string detail;

    // a general run also provides the warm-start snapshot for `specialized`
    const fs::path g1 = dir / "general1", g2 = dir / "general2";
    ok = ok && run_cli("general --out " + g1.string() + common + " --threads 1") == 0;
    ok = ok && run_cli("general --out " + g2.string() + common + " --threads 4") == 0;
    ok = ok && same_artifacts(g1, g2, detail);

    const std::string warm = " --warm-start " + (g1 / "population.json").string();
    const std::vector<std::pair<std::string, std::string>> variants = {
        {"kfold", " --k 2"},
        {"specialized", warm},
        {"individual", ""},
        {"compare", " --delta 20 --tau 0.5 --rule 350"},
    };
    for (const auto& [name, extra] : variants) {
        if (!ok) break;
        const fs::path d1 = dir / (name + "1"), d2 = dir / (name + "2");
        ok = run_cli(name + " --out " + d1.string() + common + extra + " --threads 1") == 0 &&
             run_cli(name + " --out " + d2.string() + common + extra + " --threads 4") == 0 &&
             same_artifacts(d1, d2, detail);
        if (!ok && detail.empty()) detail = name + " run failed";
        if (!ok) detail = name + ": " + detail;
    }

    report(8, ok,
           "all five experiment subcommands byte-identical across --threads 1 vs 4" +
               (ok ? std::string() : " [" + detail + "]"));
    fs::remove_all(dir);
}

// ---- criterion 9: soft expectations, recorded only ----

void record_soft_expectations(const TrainedModel& model) {
    // (a) radius 1 vs radius 2 at the same budget
    {
        ExperimentSpec spec = model.spec;
        spec.radius = 2;
        const ExperimentOutput r2 = run_general(spec);
        const double s2 = r2.summary.at(0).ssim.mean;
        record("9a", "general-set mean ssim radius-1 " + fmt(model.ssim_general) +
                         " vs radius-2 " + fmt(s2) + "; expectation radius-1 >= radius-2: " +
                         (model.ssim_general >= s2 ? "held" : "not held"));
    }

    // (b) category-specialized models: does the landscapes model rank last?
    fs::path tf_dir;
    {
        ExperimentSpec spec = model.spec;
        spec.kind = ExperimentKind::individual;
        spec.pso.particles = 10;
        spec.pso.iterations = 25;
        const ExperimentOutput out = run_specialized(spec);
        std::vector<std::pair<double, std::string>> ranking;  // (general-set ssim, model)
        for (const auto& row : out.summary)
            if (row.eval_set == "general") ranking.push_back({row.ssim.mean, row.train_set});
        std::sort(ranking.begin(), ranking.end());
        std::string order;
        for (const auto& [v, name] : ranking)
            order += name + "=" + fmt(v, 4) + " ";
        record("9b", "specialized models by general-set ssim (ascending): " + order +
                         "; expectation landscapes ranks last: " +
                         (!ranking.empty() && ranking.front().second == "landscapes" ? "held"
                                                                                     : "not held"));
    }

    // (c) transfer-learned vs cold specialization at the same step budget
    {
        const fs::path dir = oracle::scratch_dir("acceptance_tf");
        ExperimentSpec general = model.spec;
        general.output_dir = (dir / "general").string();
        write_output(general, run_general(general));

        ExperimentSpec tf = model.spec;
        tf.kind = ExperimentKind::specialized_tf;
        tf.warm_start_path = (dir / "general" / "population.json").string();
        tf.pso.iterations = 10;
        const ExperimentOutput warm = run_specialized(tf);

        ExperimentSpec cold = model.spec;
        cold.kind = ExperimentKind::individual;
        cold.pso.iterations = 10;
        const ExperimentOutput raw = run_specialized(cold);

        double gain = 0.0;
        int n = 0;
        std::string per;
        for (std::size_t i = 0; i < warm.optimizations.size(); ++i) {
            const double w = warm.optimizations[i].second.best_fitness;
            const double c = raw.optimizations[i].second.best_fitness;
            gain += w - c;
            ++n;
            per += warm.optimizations[i].first + "=" + fmt(w - c, 3) + " ";
        }
        gain /= std::max(1, n);
        record("9c", "transfer-learning fitness gain vs cold start at 10 iterations: mean " +
                         fmt(gain, 4) + " (" + per +
                         "); expectation: differences stay within run-to-run noise");
        fs::remove_all(dir);
    }
}

}  // namespace

int main() {
    std::cout << "acceptance: library + tools end-to-end checks\n";
    const auto start = Clock::now();

    criterion_transition_oracle();
    criterion_rule_codec();
    criterion_metric_oracles();
    criterion_monotonicity();
    criterion_pso_sphere();

    TrainedModel model = criterion_optimization_quality();
    criterion_beats_baseline(model);
    criterion_thread_determinism(model);
    record_soft_expectations(model);

    fs::remove_all(model.corpus);

    std::cout << (failures == 0 ? "acceptance: all hard criteria passed"
                                : "acceptance: " + std::to_string(failures) + " criteria failed")
              << " (" << fmt(seconds_since(start), 3) << "s total)" << std::endl;
    return failures == 0 ? 0 : 1;
}
