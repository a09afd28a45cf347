#pragma once

#include "cgp/decode.hpp"
#include "cgp/function_set.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cgp {

/// One truth-table column: bit r of the sequence is the value in row r.
using BitWords = std::vector<std::uint64_t>;

class KindMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluates all truth-table rows at once. Every input column must hold the
/// same number of words.
inline std::vector<BitWords> execute_boolean(const DecodedProgram& program, const FunctionSet& functions,
                                             const std::vector<BitWords>& input_words)
{
    if (functions.kind() != FunctionKind::boolean) throw KindMismatch("execute_boolean needs a boolean function set");
    if (input_words.size() != program.num_inputs) throw std::invalid_argument("input column count mismatch");
    const std::size_t width = input_words.empty() ? 0 : input_words.front().size();
    for (const auto& col : input_words)
        if (col.size() != width) throw std::invalid_argument("input columns differ in width");

    std::vector<std::uint64_t> values((program.num_inputs + program.num_nodes) * width);
    for (std::size_t i = 0; i < program.num_inputs; ++i)
        std::copy(input_words[i].begin(), input_words[i].end(), values.begin() + static_cast<std::ptrdiff_t>(i * width));

    for (const ActiveNode& n : program.nodes) {
        const auto in = program.inputs_of(n);
        const Op op = functions[n.function].op;
        const std::uint64_t* a = values.data() + in[0] * width;
        const std::uint64_t* b = n.arity > 1 ? values.data() + in[1] * width : a;
        std::uint64_t* out = values.data() + (program.num_inputs + n.node) * width;
        for (std::size_t w = 0; w < width; ++w) out[w] = apply_boolean(op, a[w], b[w]);
    }

    std::vector<BitWords> result;
    result.reserve(program.outputs.size());
    for (Gene addr : program.outputs)
        result.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(addr * width),
                            values.begin() + static_cast<std::ptrdiff_t>((addr + 1) * width));
    return result;
}

/// Scalar evaluation at a single input point.
inline std::vector<double> execute_real(const DecodedProgram& program, const FunctionSet& functions,
                                        const std::vector<double>& inputs)
{
    if (functions.kind() != FunctionKind::real) throw KindMismatch("execute_real needs a real function set");
    if (inputs.size() != program.num_inputs) throw std::invalid_argument("input count mismatch");

    std::vector<double> values(program.num_inputs + program.num_nodes, 0.0);
    std::copy(inputs.begin(), inputs.end(), values.begin());
    for (const ActiveNode& n : program.nodes) {
        const auto in = program.inputs_of(n);
        const double a = values[in[0]];
        const double b = n.arity > 1 ? values[in[1]] : 0.0;
        values[program.num_inputs + n.node] = apply_real(functions[n.function].op, a, b);
    }

    std::vector<double> out;
    out.reserve(program.outputs.size());
    for (Gene addr : program.outputs) out.push_back(values[addr]);
    return out;
}

/// Column-wise evaluation over many points. `columns[i][p]` is input i at
/// point p; the result is indexed the same way by output.
inline std::vector<std::vector<double>> execute_real_batch(const DecodedProgram& program, const FunctionSet& functions,
                                                           const std::vector<std::vector<double>>& columns)
{
    if (functions.kind() != FunctionKind::real) throw KindMismatch("execute_real_batch needs a real function set");
    if (columns.size() != program.num_inputs) throw std::invalid_argument("input column count mismatch");
    const std::size_t n_points = columns.empty() ? 0 : columns.front().size();

    std::vector<std::vector<double>> values(program.num_inputs + program.num_nodes);
    for (std::size_t i = 0; i < program.num_inputs; ++i) values[i] = columns[i];
    for (const ActiveNode& n : program.nodes) {
        const auto in = program.inputs_of(n);
        const Op op = functions[n.function].op;
        const std::vector<double>& a = values[in[0]];
        const std::vector<double>& b = n.arity > 1 ? values[in[1]] : a;
        std::vector<double>& out = values[program.num_inputs + n.node];
        out.resize(n_points);
        for (std::size_t p = 0; p < n_points; ++p) out[p] = apply_real(op, a[p], n.arity > 1 ? b[p] : 0.0);
    }

    std::vector<std::vector<double>> result;
    result.reserve(program.outputs.size());
    for (Gene addr : program.outputs) result.push_back(values[addr]);
    return result;
}

}  // namespace cgp
