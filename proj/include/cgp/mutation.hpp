#pragma once

#include "cgp/decode.hpp"
#include "cgp/function_set.hpp"
#include "cgp/genotype.hpp"
#include "cgp/random.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace cgp {

struct MutationParams {
    double point_rate = 0.05;      // per gene
    double insertion_rate = 0.0;   // per offspring
    double deletion_rate = 0.0;    // per offspring
    std::size_t min_active = 4;    // deletion floor
    bool use_sagms = false;        // single active-gene mutation instead of point mutation

    void check(const Geometry& geometry) const
    {
        auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!in_unit(point_rate) || !in_unit(insertion_rate) || !in_unit(deletion_rate))
            throw ConfigError("mutation rates must lie in [0, 1]");
        if (!geometry.allow_output_to_input && min_active < 1)
            throw ConfigError("min_active must be at least 1 when outputs cannot address inputs");
    }
};

/// Result of an operator that may decline to act.
struct Mutated {
    Genotype genotype;
    bool applied;
};

namespace detail {

/// Uniform value in `r` different from `current`. Requires r.size() >= 2.
inline Gene resample_different(Rng& rng, GeneRange r, Gene current)
{
    Gene v = uniform_index<Gene>(rng, r.lo, r.hi - 1);
    if (v >= current) ++v;
    return v;
}

}  // namespace detail

/// Each gene is redrawn with probability `rate` to a different value in its
/// permissible range. Genes whose range holds a single value are never changed.
inline Genotype point_mutation(const Genotype& genotype, double rate, Rng& rng)
{
    Genotype g = genotype;
    if (rate <= 0.0) return g;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!bernoulli(rng, rate)) continue;
        const GeneRange r = g.range(i);
        if (r.size() < 2) continue;
        g[i] = detail::resample_different(rng, r, g[i]);
    }
    return g;
}

/// Gene indices read by the phenotype: function and used connection genes of
/// active nodes, plus every output gene.
inline std::vector<std::size_t> active_gene_indices(const Genotype& g, const FunctionSet& functions)
{
    const std::vector<char> active = active_mask(g, functions);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.geometry().num_nodes; ++i) {
        if (!active[i]) continue;
        idx.push_back(g.function_gene_index(i));
        const std::size_t arity = functions.arity(g.function(i));
        for (std::size_t k = 0; k < arity; ++k) idx.push_back(g.connection_gene_index(i, k));
    }
    for (std::size_t o = 0; o < g.geometry().num_outputs; ++o) idx.push_back(g.geometry().output_gene(o));
    return idx;
}

/// Changes exactly one active gene. Not applied when no active gene has more
/// than one permissible value.
inline Mutated single_active_gene_mutation(const Genotype& genotype, const FunctionSet& functions, Rng& rng)
{
    Genotype g = genotype;
    std::vector<std::size_t> candidates;
    for (std::size_t i : active_gene_indices(g, functions))
        if (g.range(i).size() >= 2) candidates.push_back(i);
    if (candidates.empty()) return {std::move(g), false};
    const std::size_t i = candidates[uniform_index<std::size_t>(rng, 0, candidates.size())];
    g[i] = detail::resample_different(rng, g.range(i), g[i]);
    return {std::move(g), true};
}

/// Activates exactly one inactive node M by splicing it into an active
/// connection: a gene (a used connection of an active node after M, or an
/// output) currently addressing some B < address(M) is pointed at M, and M
/// takes B as its first input. M's other used inputs are drawn from program
/// inputs and active nodes before M, so nothing else becomes active.
inline Mutated insertion(const Genotype& genotype, const FunctionSet& functions, Rng& rng)
{
    const Geometry& geo = genotype.geometry();
    const std::vector<char> active = active_mask(genotype, functions);
    if (count_active(active) == geo.num_nodes) return {genotype, false};

    struct Candidate {
        std::size_t node;
        std::vector<std::size_t> sites;
    };
    std::vector<Candidate> candidates;
    for (std::size_t m = 0; m < geo.num_nodes; ++m) {
        if (active[m]) continue;
        const Gene addr = static_cast<Gene>(geo.node_address(m));
        Candidate c{m, {}};
        for (std::size_t j = m + 1; j < geo.num_nodes; ++j) {
            if (!active[j]) continue;
            const std::size_t arity = functions.arity(genotype.function(j));
            for (std::size_t k = 0; k < arity; ++k)
                if (genotype.connection(j, k) < addr) c.sites.push_back(genotype.connection_gene_index(j, k));
        }
        for (std::size_t o = 0; o < geo.num_outputs; ++o)
            if (genotype.output(o) < addr) c.sites.push_back(geo.output_gene(o));
        if (!c.sites.empty()) candidates.push_back(std::move(c));
    }
    if (candidates.empty()) return {genotype, false};

    const Candidate& pick = candidates[uniform_index<std::size_t>(rng, 0, candidates.size())];
    const std::size_t site = pick.sites[uniform_index<std::size_t>(rng, 0, pick.sites.size())];
    const std::size_t m = pick.node;
    const Gene addr = static_cast<Gene>(geo.node_address(m));

    Genotype g = genotype;
    const Gene former = g[site];
    g[site] = addr;
    g.set_connection(m, 0, former);

    std::vector<Gene> pool;
    for (std::size_t i = 0; i < geo.num_inputs; ++i) pool.push_back(static_cast<Gene>(i));
    for (std::size_t j = 0; j < m; ++j)
        if (active[j]) pool.push_back(static_cast<Gene>(geo.node_address(j)));
    const std::size_t arity = functions.arity(g.function(m));
    for (std::size_t k = 1; k < arity; ++k) g.set_connection(m, k, pool[uniform_index<std::size_t>(rng, 0, pool.size())]);
    return {std::move(g), true};
}

/// Deactivates an active node M by splicing it out: every connection and
/// output gene addressing M is redirected to M's first input B. Outputs that
/// would land on a program input while that is disallowed go to a random
/// other active node instead. M is drawn uniformly from the nodes whose
/// removal deactivates M alone; failing that, the removal with the least
/// collateral that keeps at least `min_active` nodes is used. Not applied at
/// or below the floor.
inline Mutated deletion(const Genotype& genotype, const FunctionSet& functions, std::size_t min_active, Rng& rng)
{
    const Geometry& geo = genotype.geometry();
    const std::vector<char> before = active_mask(genotype, functions);
    const std::size_t n_before = count_active(before);
    if (n_before <= min_active || n_before == 0) return {genotype, false};

    std::vector<std::size_t> active_nodes;
    for (std::size_t i = 0; i < geo.num_nodes; ++i)
        if (before[i]) active_nodes.push_back(i);

    struct Trial {
        Genotype genotype;
        std::size_t n_after;
        bool unit;
    };
    std::vector<Trial> trials;
    trials.reserve(active_nodes.size());

    for (std::size_t m : active_nodes) {
        Genotype g = genotype;
        const Gene addr = static_cast<Gene>(geo.node_address(m));
        const Gene target = g.connection(m, 0);
        for (std::size_t j = m + 1; j < geo.num_nodes; ++j)
            for (std::size_t k = 0; k < geo.max_arity; ++k)
                if (g.connection(j, k) == addr) g.set_connection(j, k, target);
        for (std::size_t o = 0; o < geo.num_outputs; ++o) {
            if (g.output(o) != addr) continue;
            if (target < geo.num_inputs && !geo.allow_output_to_input) {
                if (active_nodes.size() < 2) return {genotype, false};
                std::size_t other = m;
                while (other == m) other = active_nodes[uniform_index<std::size_t>(rng, 0, active_nodes.size())];
                g.set_output(o, static_cast<Gene>(geo.node_address(other)));
            } else {
                g.set_output(o, target);
            }
        }
        const std::vector<char> after = active_mask(g, functions);
        const std::size_t n_after = count_active(after);
        const bool unit = !after[m] && n_after + 1 == n_before;
        trials.push_back({std::move(g), n_after, unit});
    }

    std::vector<std::size_t> chosen;
    for (std::size_t t = 0; t < trials.size(); ++t)
        if (trials[t].unit) chosen.push_back(t);
    if (chosen.empty()) {
        std::optional<std::size_t> best;
        for (const Trial& t : trials)
            if (t.n_after >= min_active && (!best || t.n_after > *best)) best = t.n_after;
        if (!best) return {genotype, false};
        for (std::size_t t = 0; t < trials.size(); ++t)
            if (trials[t].n_after == *best) chosen.push_back(t);
    }
    const std::size_t t = chosen[uniform_index<std::size_t>(rng, 0, chosen.size())];
    return {std::move(trials[t].genotype), true};
}

/// Builds one offspring: point mutation (or single active-gene mutation),
/// then insertion with probability insertion_rate, then deletion with
/// probability deletion_rate.
inline Genotype breed_offspring(const Genotype& parent, const FunctionSet& functions, const MutationParams& params,
                                Rng& rng)
{
    Genotype child = params.use_sagms ? single_active_gene_mutation(parent, functions, rng).genotype
                                      : point_mutation(parent, params.point_rate, rng);
    if (bernoulli(rng, params.insertion_rate)) child = insertion(child, functions, rng).genotype;
    if (bernoulli(rng, params.deletion_rate)) child = deletion(child, functions, params.min_active, rng).genotype;
    return child;
}

}  // namespace cgp
