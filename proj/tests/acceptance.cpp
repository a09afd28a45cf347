// Acceptance suite: one PASS/FAIL line per criterion.
//
//   cgp_acceptance                 every criterion
//   cgp_acceptance --criterion 6   a single one (repeatable)

#include "cgp/cgp.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

using namespace cgp;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Options {
    std::size_t workers = 1;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const FunctionSet& function_set_for(std::size_t t)
{
    static const FunctionSet sets[] = {testing_support::mixed_boolean_functions(), regression_functions(),
                                       adder_multiplier_functions()};
    return sets[t % 3];
}

// 1 -----------------------------------------------------------------------

Outcome decode_oracle(const Options&)
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    std::size_t agree = 0;
    const std::size_t total = 10000;
    for (std::size_t t = 0; t < total; ++t) {
        const FunctionSet& fs = function_set_for(t);
        const Genotype g = random_genotype(testing_support::random_geometry(rng, 4, 32, 3), fs, rng);
        const DecodedProgram p = decode(g, fs);
        std::set<std::size_t> got;
        for (const auto& n : p.nodes) got.insert(n.node);
        agree += got == oracle::reachable_nodes(g, fs) ? 1 : 0;
    }
    const double s = seconds_since(t0);
    return {agree == total && s < 5.0, fmt("%zu/%zu active sets agree with breadth-first reachability, %.2f s", agree, total, s)};
}

// 2 -----------------------------------------------------------------------

Outcome insertion_unit_change(const Options&)
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1002);
    std::size_t checked = 0;
    std::size_t good = 0;
    while (checked < 10000) {
        const FunctionSet& fs = function_set_for(checked);
        const Genotype g = random_genotype(testing_support::random_geometry(rng, 4, 32, 3), fs, rng);
        if (!oracle::has_legal_insertion(g, fs)) continue;
        ++checked;
        const auto before = oracle::reachable_nodes(g, fs);
        const Mutated m = insertion(g, fs, rng);
        const auto after = oracle::reachable_nodes(m.genotype, fs);
        const bool grew_by_one = after.size() == before.size() + 1 &&
                                 std::includes(after.begin(), after.end(), before.begin(), before.end());
        good += m.applied && grew_by_one && !validate(m.genotype) ? 1 : 0;
    }
    std::size_t all_active = 0;
    std::size_t unchanged = 0;
    while (all_active < 1000) {
        const FunctionSet& fs = function_set_for(all_active);
        const Genotype g = random_genotype(testing_support::random_geometry(rng, 4, 4, 3), fs, rng);
        if (oracle::reachable_nodes(g, fs).size() != g.geometry().num_nodes) continue;
        ++all_active;
        const Mutated m = insertion(g, fs, rng);
        unchanged += !m.applied && m.genotype == g ? 1 : 0;
    }
    const double s = seconds_since(t0);
    return {good == checked && unchanged == all_active && s < 5.0,
            fmt("%zu/%zu grew by exactly one active node, %zu/%zu all-active genotypes unchanged, %.2f s", good, checked,
                unchanged, all_active, s)};
}

// 3 -----------------------------------------------------------------------

Outcome deletion_floor_and_unit(const Options&)
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1003);
    const std::size_t total = 10000;
    const std::size_t min_active = 4;
    std::size_t floor_ok = 0;
    std::size_t unit_cases = 0;
    std::size_t unit_ok = 0;
    for (std::size_t t = 0; t < total; ++t) {
        const FunctionSet& fs = function_set_for(t);
        const Genotype g = random_genotype(testing_support::random_geometry(rng, 4, 32, 3), fs, rng);
        const auto before = oracle::reachable_nodes(g, fs);
        const Mutated m = deletion(g, fs, min_active, rng);
        const auto after = oracle::reachable_nodes(m.genotype, fs);
        const bool valid = !validate(m.genotype);
        if (before.size() <= min_active)
            floor_ok += valid && m.genotype == g ? 1 : 0;
        else
            floor_ok += valid && after.size() >= min_active ? 1 : 0;
        if (before.size() > min_active && oracle::deterministic_unit_deletion_exists(g, fs)) {
            ++unit_cases;
            const bool subset = std::includes(before.begin(), before.end(), after.begin(), after.end());
            unit_ok += subset && after.size() + 1 == before.size() ? 1 : 0;
        }
    }
    const double s = seconds_since(t0);
    return {floor_ok == total && unit_ok == unit_cases && unit_cases > 0 && s < 5.0,
            fmt("%zu/%zu respect the floor of %zu, %zu/%zu with a unit candidate lost exactly one node, %.2f s", floor_ok,
                total, min_active, unit_ok, unit_cases, s)};
}

// 4 -----------------------------------------------------------------------

Outcome bit_parallel_fitness(const Options&)
{
    Rng rng(1004);
    std::string detail;
    bool pass = true;
    const std::pair<const char*, std::uint64_t (*)(std::uint64_t)> cases[] = {
        {"adder2", oracle::adder_row}, {"mul2", oracle::mul_row}, {"sub2", oracle::sub_row}};
    for (const auto& [name, expected] : cases) {
        const Problem p = make_boolean_problem(name);
        std::size_t agree = 0;
        for (int i = 0; i < 1000; ++i) {
            const Genotype g = random_genotype(p.geometry, p.functions, rng);
            agree += boolean_fitness(g, p) == static_cast<double>(oracle::rowwise_bit_errors(g, p.functions, expected)) ? 1 : 0;
        }
        pass = pass && agree == 1000;
        detail += fmt("%s %zu/1000 ", name, agree);
    }
    return {pass, detail + "match the row-wise interpreter"};
}

// 5 -----------------------------------------------------------------------

Outcome mann_whitney(const Options&)
{
    std::mt19937_64 rng(1005);
    double worst = 0.0;
    std::size_t comparisons = 0;
    for (std::size_t na = 1; na <= 8; ++na)
        for (std::size_t nb = 1; nb <= 8; ++nb)
            for (int levels : {2, 4, 10, 1000}) {
                std::uniform_int_distribution<int> d(0, levels - 1);
                std::vector<double> a(na), b(nb);
                for (auto& x : a) x = d(rng);
                for (auto& x : b) x = d(rng) + (levels > 4 ? levels / 3 : 0);
                const double got = mann_whitney_u(a, b).p;
                worst = std::max(worst, std::abs(got - oracle::brute_force_mwu_p(a, b)));
                ++comparisons;
            }
    const auto r = mann_whitney_u({1, 2, 3}, {4, 5, 6});
    const bool example = r.u == 0.0 && std::abs(r.p - 0.1) < 1e-12;
    return {worst <= 0.02 && example,
            fmt("max |p - enumeration| = %.2e over %zu sample pairs with n <= 8; {1,2,3} vs {4,5,6}: U = %g, p = %.4f", worst,
                comparisons, r.u, r.p)};
}

// 6-9 ---------------------------------------------------------------------

struct CellComparison {
    GridCellSummary baseline;
    GridCellSummary treatment;
    double seconds;
};

CellComparison compare_cells(const ExperimentConfig& config, double ins, double del, const Options& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Metric metric = metric_for_problem(config.problem);
    const auto base = run_cell(config, 0.0, 0.0, config.runs_per_cell, o.workers);
    const auto treat = run_cell(config, ins, del, config.runs_per_cell, o.workers);
    CellComparison c{summarize_cell(base, base, metric), summarize_cell(treat, base, metric), 0.0};
    c.seconds = seconds_since(t0);
    return c;
}

std::string describe_cells(const CellComparison& c)
{
    return fmt("baseline mean %.6g (n=%zu, %zu capped), treatment mean %.6g (n=%zu, %zu capped), ratio %.3f, U = %g, p = %.3g, "
               "%.0f s",
               c.baseline.mean, c.baseline.n_runs, c.baseline.excluded, c.treatment.mean, c.treatment.n_runs,
               c.treatment.excluded, c.treatment.mean / c.baseline.mean, c.treatment.u_statistic, c.treatment.p_value,
               c.seconds);
}

ExperimentConfig replication_config(const std::string& problem)
{
    ExperimentConfig c;
    c.problem = problem;
    c.runs_per_cell = 100;
    c.base_seed = 2024;
    return c;
}

Outcome multiplier_replication(const Options& o)
{
    const auto c = compare_cells(replication_config("mul2"), 0.1, 0.0, o);
    const double ratio = c.treatment.mean / c.baseline.mean;
    const bool pass = c.baseline.mean >= 8000 && c.baseline.mean <= 40000 && ratio < 0.9 && c.treatment.p_value < 0.05 &&
                      c.baseline.excluded == 0 && c.treatment.excluded == 0;
    return {pass, "mul2 (del 0.0, ins 0.1) vs (0.0, 0.0): " + describe_cells(c)};
}

Outcome adder_replication(const Options& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig c = replication_config("adder2");
    c.workers = o.workers;
    const GridResult g = run_grid(c);
    const GridCellSummary& base = g.cells.front().summary;
    const CellResult* best = nullptr;
    std::size_t significant = 0;
    for (std::size_t k = 1; k < g.cells.size(); ++k) {
        const auto& s = g.cells[k].summary;
        const bool lower = s.mean < base.mean && s.p_value < 0.01;
        significant += lower ? 1 : 0;
        if (lower && (!best || s.p_value < best->summary.p_value)) best = &g.cells[k];
    }
    const bool in_band = base.mean >= 40000 && base.mean <= 180000 && base.excluded == 0;
    std::string detail = fmt("adder2 4x4 grid: baseline mean %.6g (n=%zu, %zu capped), %zu/%zu nonzero cells lower at p < 0.01",
                             base.mean, base.n_runs, base.excluded, significant, g.cells.size() - 1);
    if (best)
        detail += fmt(", strongest (del %.1f, ins %.1f) mean %.6g p = %.3g", best->deletion_rate, best->insertion_rate,
                      best->summary.mean, best->summary.p_value);
    return {in_band && significant > 0, detail + fmt(", %.0f s", seconds_since(t0))};
}

Outcome koza_replication(const Options& o)
{
    const auto c = compare_cells(replication_config("koza2"), 0.3, 0.0, o);
    const bool pass = c.baseline.mean >= 0.2 && c.baseline.mean <= 0.5 && c.treatment.mean < c.baseline.mean &&
                      c.treatment.p_value < 0.01;
    return {pass, "koza2 (del 0.0, ins 0.3) vs (0.0, 0.0): " + describe_cells(c)};
}

Outcome pagie_replication(const Options& o)
{
    const auto c = compare_cells(replication_config("pagie1"), 0.3, 0.0, o);
    const bool pass = c.baseline.mean >= 150 && c.baseline.mean <= 250 && c.treatment.mean < c.baseline.mean &&
                      c.treatment.p_value < 0.05;
    return {pass, "pagie1 (del 0.0, ins 0.3) vs (0.0, 0.0): " + describe_cells(c)};
}

// 10 ----------------------------------------------------------------------

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism(const Options&)
{
    const auto root = std::filesystem::temp_directory_path() / ("cgp_acceptance_" + std::to_string(::getpid()));
    ExperimentConfig c;
    c.problem = "koza2";
    c.runs_per_cell = 8;
    c.base_seed = 77;
    c.output_dir = root / "w1";
    c.workers = 1;
    (void)run_grid(c);
    c.output_dir = root / "w8";
    c.workers = 8;
    (void)run_grid(c);
    const std::string a = read_file(root / "w1" / "runs.csv");
    const std::string b = read_file(root / "w8" / "runs.csv");
    std::filesystem::remove_all(root);
    const std::size_t rows = static_cast<std::size_t>(std::count(a.begin(), a.end(), '\n'));
    return {!a.empty() && a == b, fmt("koza2 4x4 grid, 8 runs per cell: per-run CSVs (%zu lines, %zu bytes) %s", rows,
                                      a.size(), a == b ? "byte-identical" : "differ")};
}

// 11 ----------------------------------------------------------------------

Outcome neutral_drift(const Options&)
{
    std::size_t frozen_runs = 0;
    std::size_t frozen_ok = 0;
    std::size_t logged_runs = 0;
    std::size_t logged_generations = 0;
    std::size_t increases = 0;
    for (const char* name : {"adder2", "mul2", "koza2", "pagie1"}) {
        Rng dataset_rng(5);
        const Problem p = make_problem(name, dataset_rng);
        EvolutionParams e;
        e.target_fitness = p.target_fitness;
        e.max_generations = 1000;
        e.mutation.point_rate = 0.0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            std::vector<double> trace;
            const RunRecord r = run(p, e, seed, [&](std::size_t, double f) { trace.push_back(f); });
            if (r.success && r.generations == 0) continue;  // solved by the initial parent
            ++frozen_runs;
            const bool constant = trace.size() == 1000 &&
                                  std::all_of(trace.begin(), trace.end(), [&](double f) { return f == trace.front(); });
            frozen_ok += constant ? 1 : 0;
        }
        e.mutation.point_rate = 0.05;
        e.max_generations = p.is_boolean() ? 20000 : 2500;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            ++logged_runs;
            double last = std::numeric_limits<double>::infinity();
            (void)run(p, e, 100 + seed, [&](std::size_t, double f) {
                ++logged_generations;
                increases += f > last ? 1 : 0;
                last = f;
            });
        }
    }
    return {frozen_ok == frozen_runs && frozen_runs > 0 && increases == 0,
            fmt("rates 0: %zu/%zu runs constant over 1000 generations; point rate 0.05: %zu increases over %zu generations "
                "in %zu runs",
                frozen_ok, frozen_runs, increases, logged_generations, logged_runs)};
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome(const Options&)> check;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all{
        {1, "decode oracle equivalence", decode_oracle},
        {2, "insertion unit change", insertion_unit_change},
        {3, "deletion floor and unit change", deletion_floor_and_unit},
        {4, "bit-parallel fitness oracle", bit_parallel_fitness},
        {5, "Mann-Whitney correctness", mann_whitney},
        {6, "2-bit multiplier replication", multiplier_replication},
        {7, "2-bit adder replication", adder_replication},
        {8, "Koza-2 replication", koza_replication},
        {9, "Pagie-1 replication", pagie_replication},
        {10, "determinism across worker counts", determinism},
        {11, "neutral drift sanity", neutral_drift},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    std::vector<int> selected;
    Options options;
    options.workers = std::max(1U, std::thread::hardware_concurrency());
    app.add_option("--criterion", selected, "Criterion number, repeatable (default: all)")->check(CLI::Range(1, 11));
    app.add_option("--workers", options.workers, "Worker threads for the replication criteria")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (const auto& c : criteria()) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        Outcome o;
        try {
            o = c.check(options);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all_pass = all_pass && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.title << "): " << o.detail
                  << std::endl;
    }
    return all_pass ? 0 : 1;
}
