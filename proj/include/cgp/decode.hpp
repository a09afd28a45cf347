#pragma once

#include "cgp/function_set.hpp"
#include "cgp/genotype.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cgp {

class InvalidGenotype : public ConfigError {
public:
    explicit InvalidGenotype(const Violation& v) : ConfigError("invalid genotype: " + v.message()), violation(v) {}
    Violation violation;
};

struct ActiveNode {
    std::size_t node;
    Gene function;
    std::size_t first_input;  // offset into DecodedProgram::inputs
    std::size_t arity;

    friend bool operator==(const ActiveNode&, const ActiveNode&) = default;
};

/// The phenotype: active nodes in ascending index order together with the
/// addresses each one reads.
struct DecodedProgram {
    std::size_t num_inputs = 0;
    std::size_t num_nodes = 0;
    std::vector<ActiveNode> nodes;
    std::vector<Gene> inputs;
    std::vector<Gene> outputs;

    [[nodiscard]] std::span<const Gene> inputs_of(const ActiveNode& n) const
    {
        return {inputs.data() + n.first_input, n.arity};
    }

    [[nodiscard]] std::vector<std::size_t> active_indices() const
    {
        std::vector<std::size_t> out;
        out.reserve(nodes.size());
        for (const auto& n : nodes) out.push_back(n.node);
        return out;
    }

    friend bool operator==(const DecodedProgram&, const DecodedProgram&) = default;
};

inline void check_compatible(const Genotype& g, const FunctionSet& functions)
{
    if (g.num_functions() != functions.size())
        throw ConfigError("genotype encodes " + std::to_string(g.num_functions()) + " functions, set has "
                          + std::to_string(functions.size()));
    if (functions.max_arity() > g.geometry().max_arity)
        throw ConfigError("function set arity exceeds geometry max_arity");
}

/// Marks every node reachable backwards from the outputs. Only the first
/// `arity` connection genes of a node are followed. Assumes a valid genotype.
inline std::vector<char> active_mask(const Genotype& g, const FunctionSet& functions)
{
    const Geometry& geo = g.geometry();
    std::vector<char> active(geo.num_nodes, 0);
    for (std::size_t o = 0; o < geo.num_outputs; ++o) {
        const Gene a = g.output(o);
        if (a >= geo.num_inputs) active[a - geo.num_inputs] = 1;
    }
    for (std::size_t i = geo.num_nodes; i-- > 0;) {
        if (!active[i]) continue;
        const std::size_t arity = functions.arity(g.function(i));
        for (std::size_t k = 0; k < arity; ++k) {
            const Gene a = g.connection(i, k);
            if (a >= geo.num_inputs) active[a - geo.num_inputs] = 1;
        }
    }
    return active;
}

inline std::size_t count_active(const std::vector<char>& mask)
{
    std::size_t n = 0;
    for (char c : mask) n += c ? 1 : 0;
    return n;
}

/// Backward search from the outputs; throws InvalidGenotype on any gene out
/// of range.
inline DecodedProgram decode(const Genotype& g, const FunctionSet& functions)
{
    check_compatible(g, functions);
    if (auto v = validate(g)) throw InvalidGenotype(*v);

    const Geometry& geo = g.geometry();
    const std::vector<char> active = active_mask(g, functions);

    DecodedProgram p;
    p.num_inputs = geo.num_inputs;
    p.num_nodes = geo.num_nodes;
    for (std::size_t i = 0; i < geo.num_nodes; ++i) {
        if (!active[i]) continue;
        const Gene f = g.function(i);
        const std::size_t arity = functions.arity(f);
        p.nodes.push_back({i, f, p.inputs.size(), arity});
        for (std::size_t k = 0; k < arity; ++k) p.inputs.push_back(g.connection(i, k));
    }
    p.outputs.reserve(geo.num_outputs);
    for (std::size_t o = 0; o < geo.num_outputs; ++o) p.outputs.push_back(g.output(o));
    return p;
}

}  // namespace cgp
