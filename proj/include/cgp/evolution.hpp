#pragma once

#include "cgp/decode.hpp"
#include "cgp/genotype.hpp"
#include "cgp/mutation.hpp"
#include "cgp/problems.hpp"
#include "cgp/random.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace cgp {

/// Which offspring may replace the parent.
enum class Acceptance {
    neutral,  // no worse than the parent; equal-fitness offspring drift across plateaus
    strict,   // strictly better than the parent
};

struct EvolutionParams {
    std::size_t lambda = 4;
    Acceptance acceptance = Acceptance::neutral;
    double target_fitness = 0.0;
    std::size_t max_evaluations = 0;  // 0 = unbounded, counts the initial parent
    std::size_t max_generations = 0;  // 0 = unbounded
    MutationParams mutation;

    void check(const Geometry& geometry) const
    {
        if (lambda < 1) throw ConfigError("lambda must be at least 1");
        if (max_evaluations == 0 && max_generations == 0)
            throw ConfigError("either an evaluation budget or a generation cap is required");
        mutation.check(geometry);
    }
};

struct Individual {
    Genotype genotype;
    double fitness;
};

struct RunRecord {
    std::uint64_t seed = 0;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    double best_fitness = 0.0;
    bool success = false;
    Genotype best_genotype;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Index of the offspring that becomes the next parent, or nullopt to keep
/// the parent. Under neutral acceptance offspring that are no worse than the
/// parent are eligible and an eligible offspring always displaces the parent;
/// under strict acceptance only improvements are. The best eligible offspring
/// wins, ties broken uniformly.
inline std::optional<std::size_t> select_successor(double parent_fitness, const std::vector<double>& offspring_fitness,
                                                   Rng& rng, Acceptance acceptance = Acceptance::neutral)
{
    auto eligible = [&](double f) { return acceptance == Acceptance::neutral ? f <= parent_fitness : f < parent_fitness; };
    std::optional<double> best;
    for (double f : offspring_fitness)
        if (eligible(f) && (!best || f < *best)) best = f;
    if (!best) return std::nullopt;
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < offspring_fitness.size(); ++i)
        if (offspring_fitness[i] == *best) ties.push_back(i);
    if (ties.size() == 1) return ties.front();
    return ties[uniform_index<std::size_t>(rng, 0, ties.size())];
}

inline Individual replace_parent(const Individual& parent, const std::vector<Individual>& offspring, Rng& rng,
                                 Acceptance acceptance = Acceptance::neutral)
{
    std::vector<double> f;
    f.reserve(offspring.size());
    for (const auto& o : offspring) f.push_back(o.fitness);
    const auto pick = select_successor(parent.fitness, f, rng, acceptance);
    return pick ? offspring[*pick] : parent;
}

/// Called after every generation with the generation number and the fitness
/// of the parent carried into the next one.
using GenerationObserver = std::function<void(std::size_t, double)>;

/// (1+lambda) loop, minimising fitness. Stops when an individual reaches the
/// target, when the next generation would exceed the evaluation budget, or
/// at the generation cap.
inline RunRecord run(const Problem& problem, const EvolutionParams& params, std::uint64_t seed,
                     const GenerationObserver& observer = {})
{
    problem.check();
    params.check(problem.geometry);

    Rng rng(seed);
    const FunctionSet& fs = problem.functions;

    Individual parent{random_genotype(problem.geometry, fs, rng), 0.0};
    parent.fitness = fitness(parent.genotype, problem);

    RunRecord rec;
    rec.seed = seed;
    rec.evaluations = 1;

    auto finish = [&](const Individual& best, bool success) {
        rec.best_fitness = best.fitness;
        rec.best_genotype = best.genotype;
        rec.success = success;
        return rec;
    };

    if (parent.fitness <= params.target_fitness) return finish(parent, true);

    std::vector<Individual> offspring;
    offspring.reserve(params.lambda);
    while (true) {
        if (params.max_generations != 0 && rec.generations >= params.max_generations) break;
        if (params.max_evaluations != 0 && rec.evaluations + params.lambda > params.max_evaluations) break;

        ++rec.generations;
        offspring.clear();
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < params.lambda; ++i) {
            Genotype child = breed_offspring(parent.genotype, fs, params.mutation, rng);
            const double f = fitness(child, problem);
            offspring.push_back({std::move(child), f});
            if (!best || f < offspring[*best].fitness) best = i;
        }
        rec.evaluations += params.lambda;

        if (offspring[*best].fitness <= params.target_fitness) return finish(offspring[*best], true);

        parent = replace_parent(parent, offspring, rng, params.acceptance);
        if (observer) observer(rec.generations, parent.fitness);
    }
    return finish(parent, false);
}

}  // namespace cgp
