#include "caedge/pso.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "caedge/metrics.hpp"
#include "caedge/parallel.hpp"
#include "caedge/rng.hpp"

namespace caedge {

namespace {

// first index wins ties, so repeated runs agree on the winning particle
void recompute_global_best(Swarm& swarm) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < swarm.particles.size(); ++i)
        if (swarm.particles[i].best_fitness > swarm.particles[best].best_fitness) best = i;
    swarm.global_best_position = swarm.particles[best].best_position;
    swarm.global_best_fitness = swarm.particles[best].best_fitness;
}

std::vector<double> evaluate_positions(const Swarm& swarm, const FitnessFn& fitness, int threads,
                                       bool at_best) {
    std::vector<double> values(swarm.particles.size());
    parallel_for(swarm.particles.size(), threads, [&](std::size_t i) {
        const Particle& p = swarm.particles[i];
        values[i] = fitness(at_best ? p.best_position : p.position);
    });
    return values;
}

}  // namespace

Swarm init_swarm(int particle_count, std::uint64_t seed, const PsoHyper& hyper) {
    if (particle_count < 1) throw std::invalid_argument("init_swarm: need at least one particle");

    Swarm swarm;
    swarm.hyper = hyper;
    swarm.rng_seed = seed;
    swarm.particles.resize(particle_count);
    std::mt19937_64 master(seed);
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        Particle& p = swarm.particles[i];
        for (auto& c : p.position) c = uniform01(master);
        p.velocity = {0.0, 0.0, 0.0};
        p.best_position = p.position;
        p.rng.seed(derive_seed(seed, i));
    }
    swarm.global_best_position = swarm.particles.front().position;
    return swarm;
}

void evaluate_initial(Swarm& swarm, const FitnessFn& fitness, int threads) {
    const auto values = evaluate_positions(swarm, fitness, threads, false);
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        swarm.particles[i].best_position = swarm.particles[i].position;
        swarm.particles[i].best_fitness = values[i];
    }
    recompute_global_best(swarm);
}

void reevaluate_bests(Swarm& swarm, const FitnessFn& fitness, int threads) {
    const auto values = evaluate_positions(swarm, fitness, threads, true);
    for (std::size_t i = 0; i < swarm.particles.size(); ++i)
        swarm.particles[i].best_fitness = values[i];
    recompute_global_best(swarm);
}

void step(Swarm& swarm, const FitnessFn& fitness, bool scalar_draws, int threads) {
    const std::array<double, 3> gbest = swarm.global_best_position;
    const PsoHyper& h = swarm.hyper;

    for (Particle& p : swarm.particles) {
        std::array<double, 3> r1, r2;
        if (scalar_draws) {
            r1.fill(uniform01(p.rng));
            r2.fill(uniform01(p.rng));
        } else {
            for (auto& r : r1) r = uniform01(p.rng);
            for (auto& r : r2) r = uniform01(p.rng);
        }
        for (int c = 0; c < 3; ++c) {
            p.velocity[c] = h.w * p.velocity[c] +
                            r1[c] * h.c1 * (p.best_position[c] - p.position[c]) +
                            r2[c] * h.c2 * (gbest[c] - p.position[c]);
            p.position[c] = std::clamp(p.position[c] + p.velocity[c], 0.0, 1.0);
        }
    }

    const auto values = evaluate_positions(swarm, fitness, threads, false);
    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
        Particle& p = swarm.particles[i];
        if (values[i] > p.best_fitness) {
            p.best_fitness = values[i];
            p.best_position = p.position;
        }
    }
    recompute_global_best(swarm);
}

double batch_fitness(const std::array<double, 3>& position, const TrainingSet& train, int radius,
                     int threads, const NumberingTable* numbering) {
    if (train.empty()) throw std::invalid_argument("batch_fitness: empty training set");
    const DetectorParams params = numbering ? decode_particle(position, radius, *numbering)
                                            : decode_particle(position, radius);

    std::vector<double> scores(train.size());
    parallel_for(train.size(), threads, [&](std::size_t i) {
        scores[i] = dsc(detect_edges(train[i].image, params), train[i].truth);
    });
    double sum = 0.0;
    for (const double s : scores) sum += s;
    return sum / static_cast<double>(train.size());
}

namespace {

enum class FirstEval { positions, bests, none };

OptimizationResult run_loop(Swarm swarm, const TrainingSet& train, int radius,
                            const PsoConfig& config, const NumberingTable* numbering,
                            FirstEval mode) {
    const FitnessFn fitness = [&](const std::array<double, 3>& position) {
        return batch_fitness(position, train, radius, config.threads, numbering);
    };

    switch (mode) {
        case FirstEval::positions: evaluate_initial(swarm, fitness, config.threads); break;
        case FirstEval::bests: reevaluate_bests(swarm, fitness, config.threads); break;
        case FirstEval::none: recompute_global_best(swarm); break;
    }

    OptimizationResult result;
    result.history.push_back(swarm.global_best_fitness);
    for (int it = 0; it < config.iterations; ++it) {
        step(swarm, fitness, config.scalar_draws, config.threads);
        result.history.push_back(swarm.global_best_fitness);
    }

    result.best_params = numbering
                             ? decode_particle(swarm.global_best_position, radius, *numbering)
                             : decode_particle(swarm.global_best_position, radius);
    result.best_fitness = swarm.global_best_fitness;
    result.final_population = std::move(swarm);
    return result;
}

}  // namespace

OptimizationResult optimize(const TrainingSet& train, int radius, const PsoConfig& config,
                            const NumberingTable* numbering) {
    if (train.empty()) throw std::invalid_argument("optimize: empty training set");
    if (config.iterations < 1) throw std::invalid_argument("optimize: need at least 1 iteration");
    Swarm swarm = init_swarm(config.particles, config.seed, config.hyper);
    return run_loop(std::move(swarm), train, radius, config, numbering, FirstEval::positions);
}

OptimizationResult warm_start_optimize(const Swarm& snapshot, const TrainingSet& train, int radius,
                                       const PsoConfig& config, const NumberingTable* numbering) {
    if (snapshot.particles.empty())
        throw std::invalid_argument("warm_start_optimize: empty population");
    if (train.empty()) throw std::invalid_argument("warm_start_optimize: empty training set");
    if (config.iterations < 0)
        throw std::invalid_argument("warm_start_optimize: negative iteration count");

    Swarm swarm;
    swarm.hyper = config.hyper;
    swarm.rng_seed = config.seed;
    swarm.particles.resize(snapshot.particles.size());
    for (std::size_t i = 0; i < snapshot.particles.size(); ++i) {
        Particle& p = swarm.particles[i];
        const Particle& s = snapshot.particles[i];
        p.position = s.position;
        p.velocity = s.velocity;
        p.best_position = s.best_position;
        p.best_fitness = s.best_fitness;
        p.rng.seed(derive_seed(config.seed, i));
    }
    return run_loop(std::move(swarm), train, radius, config, numbering,
                    config.keep_snapshot_fitness ? FirstEval::none : FirstEval::bests);
}

void save_population(const std::string& path, const Swarm& swarm) {
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
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << doc.dump(2) << '\n';
}

namespace {

std::array<double, 3> read_triple(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3)
        throw std::runtime_error(path + ": expected an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Swarm load_population(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open population file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }

    Swarm swarm;
    try {
        swarm.rng_seed = doc.value("seed", std::uint64_t{0});
        if (doc.contains("hyper")) {
            const auto& h = doc.at("hyper");
            swarm.hyper.w = h.value("w", swarm.hyper.w);
            swarm.hyper.c1 = h.value("c1", swarm.hyper.c1);
            swarm.hyper.c2 = h.value("c2", swarm.hyper.c2);
        }
        const auto& list = doc.at("particles");
        if (!list.is_array() || list.empty())
            throw std::runtime_error(path + ": particles must be a non-empty array");
        swarm.particles.resize(list.size());
        for (std::size_t i = 0; i < list.size(); ++i) {
            Particle& p = swarm.particles[i];
            const auto& item = list[i];
            p.position = read_triple(item.at("position"), path);
            p.velocity = item.contains("velocity") ? read_triple(item.at("velocity"), path)
                                                   : std::array<double, 3>{};
            p.best_position = item.contains("best_position")
                                  ? read_triple(item.at("best_position"), path)
                                  : p.position;
            if (item.contains("best_fitness")) p.best_fitness = item.at("best_fitness").get<double>();
            p.rng.seed(derive_seed(swarm.rng_seed, i));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    recompute_global_best(swarm);
    return swarm;
}

void save_result(const std::string& path, const OptimizationResult& result) {
    nlohmann::json doc;
    doc["delta"] = result.best_params.delta;
    doc["tau"] = result.best_params.tau;
    doc["rule"] = result.best_params.mask.rule_number;
    doc["radius"] = result.best_params.mask.radius;
    doc["best_fitness"] = result.best_fitness;
    doc["history"] = result.history;
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << doc.dump(2) << '\n';
}

}  // namespace caedge
