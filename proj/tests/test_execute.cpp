#include "cgp/execute.hpp"
#include "cgp/problems.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cgp;
using testing_support::make_genotype;

TEST(ExecuteBoolean, IdempotentOr)
{
    const Geometry geo{.num_inputs = 1, .num_outputs = 1, .num_nodes = 1, .max_arity = 2};
    const FunctionSet fs = adder_multiplier_functions();
    const auto g = make_genotype(geo, fs.size(), {{1, {0, 0}}}, {1});
    const std::vector<BitWords> in{{0xdeadbeefcafef00dULL}};
    EXPECT_EQ(execute_boolean(decode(g, fs), fs, in), in);
}

TEST(ExecuteBoolean, XorOfEnumerationWords)
{
    const Geometry geo{.num_inputs = 3, .num_outputs = 1, .num_nodes = 1, .max_arity = 2};
    const FunctionSet fs = adder_multiplier_functions();
    const auto g = make_genotype(geo, fs.size(), {{2, {0, 1}}}, {3});
    const auto in = enumeration_words(3);
    EXPECT_EQ(in[0][0], 0b10101010U);
    EXPECT_EQ(in[1][0], 0b11001100U);
    const auto out = execute_boolean(decode(g, fs), fs, in);
    EXPECT_EQ(out[0][0], in[0][0] ^ in[1][0]);
}

TEST(ExecuteBoolean, AndStarInvertsSecondInput)
{
    const Geometry geo{.num_inputs = 2, .num_outputs = 1, .num_nodes = 1, .max_arity = 2};
    const FunctionSet fs = adder_multiplier_functions();
    const auto g = make_genotype(geo, fs.size(), {{3, {0, 1}}}, {2});
    const auto in = enumeration_words(2);
    EXPECT_EQ(execute_boolean(decode(g, fs), fs, in)[0][0], in[0][0] & ~in[1][0]);
}

TEST(ExecuteBoolean, MatchesRowwiseScalarOracle)
{
    Rng rng(31);
    const FunctionSet fs = testing_support::mixed_boolean_functions();
    for (std::size_t num_inputs : {3U, 7U}) {  // single word and a two-word table
        const Geometry geo{.num_inputs = num_inputs, .num_outputs = 2, .num_nodes = 20, .max_arity = 2};
        const auto in = enumeration_words(num_inputs);
        for (int t = 0; t < 300; ++t) {
            const Genotype g = random_genotype(geo, fs, rng);
            const auto out = execute_boolean(decode(g, fs), fs, in);
            for (std::uint64_t row = 0; row < (1ULL << num_inputs); ++row)
                for (std::size_t o = 0; o < geo.num_outputs; ++o) {
                    const bool packed = (out[o][row / 64] >> (row % 64)) & 1U;
                    ASSERT_EQ(packed, oracle::eval_bool_row(g, fs, g.output(o), row));
                }
        }
    }
}

TEST(ExecuteBoolean, RejectsRealFunctionSet)
{
    const Geometry geo{.num_inputs = 1, .num_outputs = 1, .num_nodes = 1, .max_arity = 2};
    const FunctionSet fs = regression_functions();
    const auto g = make_genotype(geo, fs.size(), {{0, {0, 0}}}, {1});
    EXPECT_THROW(execute_boolean(decode(g, fs), fs, {{1}}), KindMismatch);
}

TEST(ExecuteReal, Addition)
{
    const Geometry geo{.num_inputs = 1, .num_outputs = 1, .num_nodes = 1, .max_arity = 2};
    const FunctionSet fs = regression_functions();
    const auto g = make_genotype(geo, fs.size(), {{0, {0, 0}}}, {1});
    EXPECT_DOUBLE_EQ(execute_real(decode(g, fs), fs, {1.5})[0], 3.0);
}

TEST(ExecuteReal, ProtectedOperators)
{
    const Geometry geo{.num_inputs = 2, .num_outputs = 3, .num_nodes = 3, .max_arity = 2};
    const FunctionSet fs = regression_functions();
    const auto g = make_genotype(geo, fs.size(), {{3, {0, 1}}, {6, {1, 0}}, {7, {0, 0}}}, {2, 3, 4});
    const auto out = execute_real(decode(g, fs), fs, {1.0, 0.0});
    EXPECT_EQ(out[0], 1.0);                 // 1 / 0
    EXPECT_EQ(out[1], 0.0);                 // ln|0|
    EXPECT_DOUBLE_EQ(out[2], std::exp(1.0));
    const auto big = execute_real(decode(g, fs), fs, {1000.0, 2.0});
    EXPECT_TRUE(std::isinf(big[2]));
}

TEST(ExecuteReal, MatchesTreeWalkOracle)
{
    Rng rng(99);
    const FunctionSet fs = regression_functions();
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 200; ++t) {
        const Geometry geo = testing_support::random_geometry(rng, 2, 12, 2);
        const Genotype g = random_genotype(geo, fs, rng);
        const DecodedProgram p = decode(g, fs);
        std::vector<std::vector<double>> columns(geo.num_inputs);
        for (int pt = 0; pt < 100; ++pt) {
            std::vector<double> x(geo.num_inputs);
            for (auto& v : x) v = u(rng);
            for (std::size_t i = 0; i < x.size(); ++i) columns[i].push_back(x[i]);
            const auto got = execute_real(p, fs, x);
            for (std::size_t o = 0; o < geo.num_outputs; ++o) {
                const double want = oracle::eval_real(g, fs, g.output(o), x);
                if (std::isnan(want)) {
                    ASSERT_TRUE(std::isnan(got[o]));
                } else if (std::isinf(want)) {
                    ASSERT_EQ(got[o], want);
                } else {
                    ASSERT_LE(std::abs(got[o] - want), 1e-12 * std::max(1.0, std::abs(want)));
                }
            }
        }
        const auto batch = execute_real_batch(p, fs, columns);
        for (std::size_t pt = 0; pt < columns[0].size(); ++pt) {
            std::vector<double> x(geo.num_inputs);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = columns[i][pt];
            const auto single = execute_real(p, fs, x);
            for (std::size_t o = 0; o < geo.num_outputs; ++o) {
                if (std::isnan(single[o]))
                    ASSERT_TRUE(std::isnan(batch[o][pt]));
                else
                    ASSERT_EQ(batch[o][pt], single[o]);
            }
        }
    }
}
