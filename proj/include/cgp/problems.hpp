#pragma once

#include "cgp/decode.hpp"
#include "cgp/execute.hpp"
#include "cgp/function_set.hpp"
#include "cgp/genotype.hpp"
#include "cgp/random.hpp"

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace cgp {

/// Packed truth table. Column i of the inputs is the standard binary counting
/// enumeration: bit r holds bit i of the row number r.
struct TruthTable {
    std::size_t num_inputs = 0;
    std::vector<BitWords> input_words;
    std::vector<BitWords> target_words;

    [[nodiscard]] std::size_t rows() const noexcept { return std::size_t{1} << num_inputs; }
    [[nodiscard]] std::size_t words() const noexcept { return (rows() + 63) / 64; }

    /// Mask of meaningful bits in word `w`.
    [[nodiscard]] std::uint64_t mask(std::size_t w) const noexcept
    {
        const std::size_t r = rows();
        if (r >= 64 * (w + 1)) return ~std::uint64_t{0};
        return (std::uint64_t{1} << (r - 64 * w)) - 1;
    }
};

inline std::vector<BitWords> enumeration_words(std::size_t num_inputs)
{
    const std::size_t rows = std::size_t{1} << num_inputs;
    const std::size_t words = (rows + 63) / 64;
    std::vector<BitWords> cols(num_inputs, BitWords(words, 0));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t i = 0; i < num_inputs; ++i)
            if ((r >> i) & 1U) cols[i][r / 64] |= std::uint64_t{1} << (r % 64);
    return cols;
}

/// `row_outputs(r)` returns the output bits for row r, output o in bit o.
inline TruthTable make_truth_table(std::size_t num_inputs, std::size_t num_outputs,
                                   const std::function<std::uint64_t(std::uint64_t)>& row_outputs)
{
    TruthTable t;
    t.num_inputs = num_inputs;
    t.input_words = enumeration_words(num_inputs);
    t.target_words.assign(num_outputs, BitWords(t.words(), 0));
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const std::uint64_t out = row_outputs(r);
        for (std::size_t o = 0; o < num_outputs; ++o)
            if ((out >> o) & 1U) t.target_words[o][r / 64] |= std::uint64_t{1} << (r % 64);
    }
    return t;
}

/// Sampled regression data stored column-wise.
struct Dataset {
    std::size_t num_inputs = 0;
    std::vector<std::vector<double>> columns;
    std::vector<double> targets;
    std::string descriptor;

    [[nodiscard]] std::size_t size() const noexcept { return targets.size(); }

    [[nodiscard]] std::vector<double> point(std::size_t p) const
    {
        std::vector<double> x(num_inputs);
        for (std::size_t i = 0; i < num_inputs; ++i) x[i] = columns[i][p];
        return x;
    }
};

using Objective = std::function<double(const std::vector<double>&)>;

/// U[a,b,count]: `count` points with every coordinate uniform in [a, b].
inline Dataset uniform_dataset(double a, double b, std::size_t count, std::size_t vars, const Objective& f, Rng& rng)
{
    Dataset d;
    d.num_inputs = vars;
    d.columns.assign(vars, {});
    std::uniform_real_distribution<double> u(a, b);
    for (std::size_t p = 0; p < count; ++p) {
        std::vector<double> x(vars);
        for (auto& v : x) v = u(rng);
        for (std::size_t i = 0; i < vars; ++i) d.columns[i].push_back(x[i]);
        d.targets.push_back(f(x));
    }
    std::ostringstream os;
    os << "U[" << a << ',' << b << ',' << count << ']';
    d.descriptor = os.str();
    return d;
}

/// E[a,b,step]: the full grid a, a+step, ..., b in every variable. The last
/// variable varies fastest.
inline Dataset grid_dataset(double a, double b, double step, std::size_t vars, const Objective& f)
{
    const auto per_axis = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    std::vector<double> axis(per_axis);
    for (std::size_t k = 0; k < per_axis; ++k) axis[k] = a + static_cast<double>(k) * step;

    Dataset d;
    d.num_inputs = vars;
    d.columns.assign(vars, {});
    std::size_t total = 1;
    for (std::size_t i = 0; i < vars; ++i) total *= per_axis;
    std::vector<double> x(vars);
    for (std::size_t p = 0; p < total; ++p) {
        std::size_t rem = p;
        for (std::size_t i = vars; i-- > 0;) {
            x[i] = axis[rem % per_axis];
            rem /= per_axis;
        }
        for (std::size_t i = 0; i < vars; ++i) d.columns[i].push_back(x[i]);
        d.targets.push_back(f(x));
    }
    std::ostringstream os;
    os << "E[" << a << ',' << b << ',' << step << ']';
    d.descriptor = os.str();
    return d;
}

/// One row per point: inputs..., target.
inline void write_dataset_csv(std::ostream& os, const Dataset& d)
{
    for (std::size_t i = 0; i < d.num_inputs; ++i) os << 'x' << i << ',';
    os << "target\n";
    char buf[32];
    for (std::size_t p = 0; p < d.size(); ++p) {
        for (std::size_t i = 0; i < d.num_inputs; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", d.columns[i][p]);
            os << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", d.targets[p]);
        os << buf << '\n';
    }
}

inline Dataset read_dataset_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("dataset CSV is empty");
    std::size_t fields = 1;
    for (char c : line) fields += c == ',' ? 1 : 0;
    if (fields < 2) throw ConfigError("dataset CSV needs at least one input column and a target column");

    Dataset d;
    d.num_inputs = fields - 1;
    d.columns.assign(d.num_inputs, {});
    d.descriptor = "CSV";
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size() && cell.find_first_not_of(" \t\r", used) != std::string::npos)
                    throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError("dataset CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
        }
        if (row.size() != fields)
            throw ConfigError("dataset CSV line " + std::to_string(line_no) + ": expected "
                              + std::to_string(fields) + " fields");
        for (std::size_t i = 0; i < d.num_inputs; ++i) d.columns[i].push_back(row[i]);
        d.targets.push_back(row.back());
    }
    return d;
}

/// A benchmark: grid geometry, primitive set and the data fitness is measured on.
struct Problem {
    std::string name;
    Geometry geometry;
    FunctionSet functions;
    std::variant<TruthTable, Dataset> payload;
    double target_fitness = 0.0;

    [[nodiscard]] bool is_boolean() const noexcept { return std::holds_alternative<TruthTable>(payload); }
    [[nodiscard]] const TruthTable& truth_table() const { return std::get<TruthTable>(payload); }
    [[nodiscard]] const Dataset& dataset() const { return std::get<Dataset>(payload); }

    void check() const
    {
        geometry.check();
        const bool boolean_set = functions.kind() == FunctionKind::boolean;
        if (boolean_set != is_boolean()) throw ConfigError(name + ": payload kind does not match function set");
        if (functions.max_arity() > geometry.max_arity) throw ConfigError(name + ": function arity exceeds max_arity");
        if (is_boolean()) {
            const auto& t = truth_table();
            if (t.num_inputs != geometry.num_inputs || t.target_words.size() != geometry.num_outputs)
                throw ConfigError(name + ": truth table does not match geometry");
        } else {
            const auto& d = dataset();
            if (d.num_inputs != geometry.num_inputs || geometry.num_outputs != 1)
                throw ConfigError(name + ": dataset does not match geometry");
        }
    }
};

/// Number of truth-table bits on which the program differs from the target.
inline double boolean_fitness(const DecodedProgram& program, const Problem& problem)
{
    if (!problem.is_boolean()) throw KindMismatch(problem.name + " is not a boolean problem");
    const TruthTable& t = problem.truth_table();
    const auto outputs = execute_boolean(program, problem.functions, t.input_words);
    std::uint64_t diff = 0;
    for (std::size_t o = 0; o < outputs.size(); ++o)
        for (std::size_t w = 0; w < t.words(); ++w)
            diff += static_cast<std::uint64_t>(std::popcount((outputs[o][w] ^ t.target_words[o][w]) & t.mask(w)));
    return static_cast<double>(diff);
}

inline double boolean_fitness(const Genotype& genotype, const Problem& problem)
{
    return boolean_fitness(decode(genotype, problem.functions), problem);
}

/// Sum of absolute errors over the dataset; +inf if any output is not finite.
inline double regression_fitness(const DecodedProgram& program, const Problem& problem)
{
    if (problem.is_boolean()) throw KindMismatch(problem.name + " is not a regression problem");
    const Dataset& d = problem.dataset();
    const auto out = execute_real_batch(program, problem.functions, d.columns);
    double sum = 0.0;
    for (std::size_t p = 0; p < d.size(); ++p) {
        const double y = out[0][p];
        if (!std::isfinite(y)) return std::numeric_limits<double>::infinity();
        sum += std::fabs(y - d.targets[p]);
    }
    return std::isfinite(sum) ? sum : std::numeric_limits<double>::infinity();
}

inline double regression_fitness(const Genotype& genotype, const Problem& problem)
{
    return regression_fitness(decode(genotype, problem.functions), problem);
}

inline double fitness(const Genotype& genotype, const Problem& problem)
{
    const DecodedProgram p = decode(genotype, problem.functions);
    return problem.is_boolean() ? boolean_fitness(p, problem) : regression_fitness(p, problem);
}

inline bool is_boolean_problem_name(const std::string& name)
{
    return name == "adder2" || name == "mul2" || name == "sub2";
}

inline bool is_regression_problem_name(const std::string& name)
{
    return name == "koza2" || name == "koza3" || name == "pagie1";
}

/// adder2: full adder over (a, b, carry-in) -> (sum, carry-out).
/// mul2:   inputs (a0, a1, b0, b1) -> product bits p0..p3.
/// sub2:   inputs (a0, a1, b0, b1) -> difference bits d0, d1 of a-b mod 4, borrow.
inline Problem make_boolean_problem(const std::string& name)
{
    Problem p;
    p.name = name;
    p.geometry.num_nodes = 30;
    p.geometry.max_arity = 2;
    p.target_fitness = 0.0;
    if (name == "adder2") {
        p.geometry.num_inputs = 3;
        p.geometry.num_outputs = 2;
        p.functions = adder_multiplier_functions();
        p.payload = make_truth_table(3, 2, [](std::uint64_t r) {
            const std::uint64_t s = (r & 1U) + ((r >> 1) & 1U) + ((r >> 2) & 1U);
            return s;  // bit 0 = sum, bit 1 = carry
        });
    } else if (name == "mul2") {
        p.geometry.num_inputs = 4;
        p.geometry.num_outputs = 4;
        p.functions = adder_multiplier_functions();
        p.payload = make_truth_table(4, 4, [](std::uint64_t r) { return (r & 3U) * ((r >> 2) & 3U); });
    } else if (name == "sub2") {
        p.geometry.num_inputs = 4;
        p.geometry.num_outputs = 3;
        p.functions = subtractor_functions();
        p.payload = make_truth_table(4, 3, [](std::uint64_t r) {
            const std::uint64_t a = r & 3U;
            const std::uint64_t b = (r >> 2) & 3U;
            const std::uint64_t diff = (a - b) & 3U;
            const std::uint64_t borrow = a < b ? 1U : 0U;
            return diff | (borrow << 2);
        });
    } else {
        throw ConfigError("unknown boolean problem '" + name + "'");
    }
    p.check();
    return p;
}

inline double koza2_objective(const std::vector<double>& v)
{
    const double x = v[0];
    return std::pow(x, 5) - 2.0 * std::pow(x, 3) + x;
}

inline double koza3_objective(const std::vector<double>& v)
{
    const double x = v[0];
    return std::pow(x, 6) - 2.0 * std::pow(x, 4) + x * x;
}

/// 1/(1+x^-4) + 1/(1+y^-4), written as x^4/(1+x^4) so that 0 maps to 0.
inline double pagie1_objective(const std::vector<double>& v)
{
    const double x4 = std::pow(v[0], 4);
    const double y4 = std::pow(v[1], 4);
    return x4 / (1.0 + x4) + y4 / (1.0 + y4);
}

/// `dataset_rng` is only consumed by the uniformly sampled problems.
inline Problem make_regression_problem(const std::string& name, Rng& dataset_rng)
{
    Problem p;
    p.name = name;
    p.geometry.num_nodes = 10;
    p.geometry.max_arity = 2;
    p.geometry.num_outputs = 1;
    p.functions = regression_functions();
    p.target_fitness = 0.01;
    if (name == "koza2") {
        p.geometry.num_inputs = 1;
        p.payload = uniform_dataset(-1.0, 1.0, 20, 1, koza2_objective, dataset_rng);
    } else if (name == "koza3") {
        p.geometry.num_inputs = 1;
        p.payload = uniform_dataset(-1.0, 1.0, 20, 1, koza3_objective, dataset_rng);
    } else if (name == "pagie1") {
        p.geometry.num_inputs = 2;
        p.payload = grid_dataset(-5.0, 5.0, 0.4, 2, pagie1_objective);
    } else {
        throw ConfigError("unknown regression problem '" + name + "'");
    }
    p.check();
    return p;
}

/// Replaces a regression problem's data, e.g. with a dataset read from CSV.
inline Problem with_dataset(Problem p, Dataset d)
{
    if (p.is_boolean()) throw ConfigError(p.name + ": datasets only apply to regression problems");
    p.payload = std::move(d);
    p.check();
    return p;
}

inline Problem make_problem(const std::string& name, Rng& dataset_rng)
{
    if (is_boolean_problem_name(name)) return make_boolean_problem(name);
    if (is_regression_problem_name(name)) return make_regression_problem(name, dataset_rng);
    throw ConfigError("unknown problem '" + name + "' (expected adder2, mul2, sub2, koza2, koza3 or pagie1)");
}

}  // namespace cgp
