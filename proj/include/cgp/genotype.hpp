#pragma once

#include "cgp/function_set.hpp"
#include "cgp/random.hpp"

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgp {

/// Raised for invalid geometries, incompatible problem/parameter pairs and
/// malformed input files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Gene = std::uint32_t;

/// Single-row CGP grid with full levels-back.
struct Geometry {
    std::size_t num_inputs = 1;
    std::size_t num_outputs = 1;
    std::size_t num_nodes = 1;
    std::size_t max_arity = 2;
    bool allow_output_to_input = false;

    [[nodiscard]] std::size_t genes_per_node() const noexcept { return max_arity + 1; }
    [[nodiscard]] std::size_t num_addresses() const noexcept { return num_inputs + num_nodes; }
    [[nodiscard]] std::size_t node_address(std::size_t node) const noexcept { return num_inputs + node; }
    [[nodiscard]] std::size_t output_gene(std::size_t output) const noexcept
    {
        return num_nodes * genes_per_node() + output;
    }

    void check() const
    {
        if (num_inputs < 1 || num_outputs < 1 || num_nodes < 1 || max_arity < 1)
            throw ConfigError("geometry requires at least one input, output, node and connection gene");
    }

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

constexpr std::size_t genotype_length(const Geometry& g) noexcept
{
    return g.num_nodes * (g.max_arity + 1) + g.num_outputs;
}

/// Half-open permissible range of a gene value.
struct GeneRange {
    Gene lo;
    Gene hi;

    [[nodiscard]] Gene size() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains(Gene v) const noexcept { return v >= lo && v < hi; }
};

enum class GeneRole { function, connection, output };

struct GeneSlot {
    GeneRole role;
    std::size_t node;    // node index, or output index for output genes
    std::size_t which;   // connection slot for connection genes, otherwise 0
};

/// Fixed-length integer encoding of a program. Node i owns genes
/// [i*(a+1), i*(a+1)+a]: the function gene followed by `a` connection genes.
/// Output genes follow the last node.
class Genotype {
public:
    Genotype() = default;

    Genotype(Geometry geometry, std::size_t num_functions, std::vector<Gene> genes)
        : geometry_(geometry), num_functions_(num_functions), genes_(std::move(genes))
    {
        geometry_.check();
        if (num_functions_ == 0) throw ConfigError("function set must not be empty");
        if (genes_.size() != genotype_length(geometry_))
            throw ConfigError("genotype has " + std::to_string(genes_.size()) + " genes, expected "
                              + std::to_string(genotype_length(geometry_)));
    }

    /// Genotype of the right length with every gene zero; not necessarily valid.
    static Genotype zeros(Geometry geometry, std::size_t num_functions)
    {
        return Genotype(geometry, num_functions, std::vector<Gene>(genotype_length(geometry), 0));
    }

    [[nodiscard]] const Geometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] std::size_t num_functions() const noexcept { return num_functions_; }
    [[nodiscard]] const std::vector<Gene>& genes() const noexcept { return genes_; }
    [[nodiscard]] std::size_t size() const noexcept { return genes_.size(); }

    [[nodiscard]] Gene operator[](std::size_t i) const { return genes_[i]; }
    Gene& operator[](std::size_t i) { return genes_[i]; }

    [[nodiscard]] std::size_t function_gene_index(std::size_t node) const noexcept
    {
        return node * geometry_.genes_per_node();
    }
    [[nodiscard]] std::size_t connection_gene_index(std::size_t node, std::size_t k) const noexcept
    {
        return node * geometry_.genes_per_node() + 1 + k;
    }

    [[nodiscard]] Gene function(std::size_t node) const { return genes_[function_gene_index(node)]; }
    [[nodiscard]] Gene connection(std::size_t node, std::size_t k) const
    {
        return genes_[connection_gene_index(node, k)];
    }
    [[nodiscard]] Gene output(std::size_t o) const { return genes_[geometry_.output_gene(o)]; }

    void set_function(std::size_t node, Gene v) { genes_[function_gene_index(node)] = v; }
    void set_connection(std::size_t node, std::size_t k, Gene v) { genes_[connection_gene_index(node, k)] = v; }
    void set_output(std::size_t o, Gene v) { genes_[geometry_.output_gene(o)] = v; }

    [[nodiscard]] GeneSlot slot(std::size_t gene_index) const noexcept
    {
        const std::size_t per = geometry_.genes_per_node();
        const std::size_t body = geometry_.num_nodes * per;
        if (gene_index >= body) return {GeneRole::output, gene_index - body, 0};
        const std::size_t node = gene_index / per;
        const std::size_t off = gene_index % per;
        if (off == 0) return {GeneRole::function, node, 0};
        return {GeneRole::connection, node, off - 1};
    }

    [[nodiscard]] GeneRange range(std::size_t gene_index) const noexcept
    {
        const GeneSlot s = slot(gene_index);
        switch (s.role) {
        case GeneRole::function: return {0, static_cast<Gene>(num_functions_)};
        case GeneRole::connection: return {0, static_cast<Gene>(geometry_.node_address(s.node))};
        case GeneRole::output:
            return {geometry_.allow_output_to_input ? Gene{0} : static_cast<Gene>(geometry_.num_inputs),
                    static_cast<Gene>(geometry_.num_addresses())};
        }
        return {0, 0};
    }

    friend bool operator==(const Genotype&, const Genotype&) = default;

private:
    Geometry geometry_;
    std::size_t num_functions_ = 1;
    std::vector<Gene> genes_;
};

struct Violation {
    std::size_t gene_index;
    Gene value;
    GeneRange range;

    [[nodiscard]] std::string message() const
    {
        std::ostringstream os;
        os << "gene " << gene_index << " = " << value << " outside [" << range.lo << ", " << range.hi << ")";
        return os.str();
    }
};

/// First gene outside its permissible range, if any.
inline std::optional<Violation> validate(const Genotype& g)
{
    for (std::size_t i = 0; i < g.size(); ++i) {
        const GeneRange r = g.range(i);
        if (!r.contains(g[i])) return Violation{i, g[i], r};
    }
    return std::nullopt;
}

inline Genotype random_genotype(const Geometry& geometry, const FunctionSet& functions, Rng& rng)
{
    geometry.check();
    if (functions.max_arity() > geometry.max_arity)
        throw ConfigError("function set arity exceeds geometry max_arity");
    Genotype g = Genotype::zeros(geometry, functions.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const GeneRange r = g.range(i);
        g[i] = uniform_index<Gene>(rng, r.lo, r.hi);
    }
    return g;
}

/// One line: `Ni No Nc Na |F|` followed by the genes.
inline std::string serialize(const Genotype& g)
{
    const Geometry& geo = g.geometry();
    std::ostringstream os;
    os << geo.num_inputs << ' ' << geo.num_outputs << ' ' << geo.num_nodes << ' ' << geo.max_arity << ' '
       << g.num_functions();
    for (Gene v : g.genes()) os << ' ' << v;
    return os.str();
}

/// Inverse of serialize(). The output-to-input flag is not part of the
/// header and must be supplied by the caller.
inline Genotype deserialize(const std::string& line, bool allow_output_to_input = false)
{
    std::istringstream is(line);
    Geometry geo;
    std::size_t nf = 0;
    if (!(is >> geo.num_inputs >> geo.num_outputs >> geo.num_nodes >> geo.max_arity >> nf))
        throw ConfigError("genotype header must be 'Ni No Nc Na |F|'");
    geo.allow_output_to_input = allow_output_to_input;
    geo.check();
    std::vector<Gene> genes;
    genes.reserve(genotype_length(geo));
    long long v = 0;
    while (is >> v) {
        if (v < 0) throw ConfigError("negative gene value");
        genes.push_back(static_cast<Gene>(v));
    }
    if (!is.eof()) throw ConfigError("non-integer token in genotype line");
    return Genotype(geo, nf, std::move(genes));
}

}  // namespace cgp
