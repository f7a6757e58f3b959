#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "caedge/detector.hpp"
#include "caedge/image.hpp"

namespace caedge {

struct PsoHyper {
    double w = 0.9;
    double c1 = 0.5;
    double c2 = 0.3;
};

struct Particle {
    std::array<double, 3> position{};
    std::array<double, 3> velocity{};
    std::array<double, 3> best_position{};
    double best_fitness = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng;  // dedicated substream for this particle's r1/r2 draws
};

struct Swarm {
    std::vector<Particle> particles;
    std::array<double, 3> global_best_position{};
    double global_best_fitness = -std::numeric_limits<double>::infinity();
    PsoHyper hyper;
    std::uint64_t rng_seed = 0;
};

struct PsoConfig {
    int particles = 30;
    int iterations = 100;
    std::uint64_t seed = 0;
    PsoHyper hyper;
    bool scalar_draws = false;         // one r1/r2 per particle instead of per coordinate
    bool keep_snapshot_fitness = false;  // trust best_fitness values stored in a snapshot
    int threads = 1;
};

struct OptimizationResult {
    DetectorParams best_params;
    double best_fitness = 0.0;
    Swarm final_population;
    std::vector<double> history;  // best fitness after the initial evaluation and each step
};

/// One image with its ground-truth edge map.
struct TrainingSample {
    std::string id;
    GrayImage image;
    EdgeMap truth;
};
using TrainingSet = std::vector<TrainingSample>;

using FitnessFn = std::function<double(const std::array<double, 3>&)>;

/// Uniform positions in [0,1]^3, zero velocities, personal bests at the start
/// positions with a -infinity fitness sentinel until the first evaluation.
Swarm init_swarm(int particle_count, std::uint64_t seed, const PsoHyper& hyper = {});

/// Evaluates every particle's current position, records it as the personal
/// best, and recomputes the global best. Used before the first step.
void evaluate_initial(Swarm& swarm, const FitnessFn& fitness, int threads = 1);

/// Re-evaluates every particle's best_position against a new objective and
/// recomputes the global best. Used when warm-starting on a new training set.
void reevaluate_bests(Swarm& swarm, const FitnessFn& fitness, int threads = 1);

/// One synchronous update: every particle draws r1/r2 from its own substream,
/// moves under inertia plus personal and global attraction (with the global
/// best snapshotted at step entry), is clamped to [0,1]^3, and is evaluated;
/// personal bests update on strict improvement and the global best follows.
void step(Swarm& swarm, const FitnessFn& fitness, bool scalar_draws = false, int threads = 1);

/// Mean Dice score of the decoded position's detector over all samples, summed
/// in sample order. Images may be evaluated in parallel.
double batch_fitness(const std::array<double, 3>& position, const TrainingSet& train, int radius,
                     int threads = 1, const NumberingTable* numbering = nullptr);

/// init_swarm, initial evaluation, then config.iterations steps of batch_fitness.
OptimizationResult optimize(const TrainingSet& train, int radius, const PsoConfig& config,
                            const NumberingTable* numbering = nullptr);

/// Same loop, but starting from a saved population. Velocities and positions
/// come from the snapshot; personal-best fitness values are re-evaluated on
/// the new objective unless config.keep_snapshot_fitness asks otherwise (and
/// the snapshot actually stored them). Particle substreams are re-seeded from
/// config.seed. iterations may be 0 to just re-evaluate.
OptimizationResult warm_start_optimize(const Swarm& snapshot, const TrainingSet& train, int radius,
                                       const PsoConfig& config,
                                       const NumberingTable* numbering = nullptr);

/// Snapshot JSON: {seed, hyper, particles:[{position, velocity, best_position,
/// best_fitness}]}. best_fitness is written for the keep_snapshot_fitness
/// path; loaders treat it as optional.
void save_population(const std::string& path, const Swarm& swarm);
Swarm load_population(const std::string& path);

/// Result JSON with decoded parameters, final fitness, and the history array.
void save_result(const std::string& path, const OptimizationResult& result);

}  // namespace caedge
