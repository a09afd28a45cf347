// Command-line driver: single-cell runs, rate-grid sweeps, and significance
// tests between two per-run CSV files.

#include "cgp/cgp.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

enum ExitCode { exit_ok = 0, exit_config = 1, exit_io = 2 };

struct CommonOptions {
    std::string problem;
    std::uint64_t seed = 1;
    std::size_t runs = 100;
    std::size_t lambda = 4;
    double point_rate = -1.0;
    std::size_t min_active = 4;
    std::size_t budget = 0;
    std::size_t generation_cap = 0;
    bool sagms = false;
    std::string acceptance = "neutral";
    std::uint64_t dataset_seed = 0;
    std::string dataset_file;
    std::size_t workers = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--problem", o.problem, "adder2, mul2, sub2, koza2, koza3 or pagie1")->required();
    cmd->add_option("--seed", o.seed, "Base seed");
    cmd->add_option("--lambda", o.lambda, "Offspring per generation");
    cmd->add_option("--point-rate", o.point_rate, "Per-gene point mutation rate (default 0.05 boolean, 0.2 regression)");
    cmd->add_option("--min-active", o.min_active, "Deletion floor on active nodes");
    cmd->add_option("--budget", o.budget, "Fitness evaluation budget (default 10000 for regression)");
    cmd->add_option("--generation-cap", o.generation_cap, "Generation cap (default 10^7 for boolean problems)");
    cmd->add_flag("--sagms", o.sagms, "Single active-gene mutation instead of point mutation");
    cmd->add_option("--acceptance", o.acceptance, "Parent replacement: neutral (offspring no worse) or strict (better)")
        ->check(CLI::IsMember({"neutral", "strict"}));
    cmd->add_option("--dataset-seed", o.dataset_seed, "Sample one shared dataset from this seed for all runs");
    cmd->add_option("--dataset", o.dataset_file, "Regression dataset CSV used for every run");
    cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
}

cgp::ExperimentConfig to_config(const CommonOptions& o, const CLI::App* cmd)
{
    cgp::ExperimentConfig c;
    c.problem = o.problem;
    c.base_seed = o.seed;
    c.runs_per_cell = o.runs;
    c.lambda = o.lambda;
    if (cmd->count("--point-rate")) c.point_rate = o.point_rate;
    c.min_active = o.min_active;
    if (cmd->count("--budget")) c.eval_budget = o.budget;
    if (cmd->count("--generation-cap")) c.generation_cap = o.generation_cap;
    c.use_sagms = o.sagms;
    c.acceptance = o.acceptance == "strict" ? cgp::Acceptance::strict : cgp::Acceptance::neutral;
    if (cmd->count("--dataset-seed")) c.dataset_seed = o.dataset_seed;
    if (!o.dataset_file.empty()) {
        std::ifstream in(o.dataset_file);
        if (!in) throw cgp::IoError("cannot read " + o.dataset_file);
        c.dataset = cgp::read_dataset_csv(in);
    }
    c.workers = o.workers;
    return c;
}

std::vector<double> parse_rates(const std::string& s)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = s.find(',', start);
        const std::string tok = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw cgp::ConfigError("bad rate '" + tok + "'");
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

/// Splices `key=value` pairs from a --config file in front of the explicit
/// arguments; later occurrences win, so flags override the file.
std::vector<std::string> expand_config(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw cgp::IoError("cannot read config file " + path);
    std::vector<std::string> from_file;
    for (const auto& [key, value] : cgp::parse_key_values(in)) {
        if (key == "sagms") {
            if (value == "1" || value == "true" || value == "yes") from_file.push_back("--sagms");
            continue;
        }
        from_file.push_back("--" + key);
        from_file.push_back(value);
    }
    // program name, subcommand, file options, then everything else
    std::vector<std::string> out;
    out.push_back(rest.front());
    std::size_t body = 1;
    if (rest.size() > 1 && rest[1].rfind("-", 0) != 0) {
        out.push_back(rest[1]);
        body = 2;
    }
    out.insert(out.end(), from_file.begin(), from_file.end());
    out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(body), rest.end());
    return out;
}

int run_command(const CommonOptions& o, const CLI::App* cmd, double insertion, double deletion,
                const std::string& dump)
{
    cgp::ExperimentConfig c = to_config(o, cmd);
    c.check();
    std::vector<cgp::RunRecord> runs = cgp::run_cell(c, insertion, deletion, c.runs_per_cell, c.workers);
    std::cout << cgp::runs_csv_header << '\n';
    cgp::write_run_rows(std::cout, c.problem, deletion, insertion, runs);

    const cgp::Metric metric = cgp::metric_for_problem(c.problem);
    std::size_t excluded = 0;
    const auto m = cgp::describe(cgp::metric_values(runs, metric, &excluded));
    std::cerr << c.problem << ": mean " << (metric == cgp::Metric::generations ? "generations" : "best fitness") << ' '
              << cgp::format_double(m.mean, 6) << ", median " << cgp::format_double(m.median, 6);
    if (excluded) std::cerr << ", " << excluded << " run(s) unsuccessful";
    std::cerr << '\n';

    if (!dump.empty()) {
        std::ofstream out(dump);
        if (!out) throw cgp::IoError("cannot write " + dump);
        for (const auto& r : runs) out << cgp::serialize(r.best_genotype) << '\n';
        if (!out) throw cgp::IoError("write to " + dump + " failed");
    }
    return exit_ok;
}

int grid_command(const CommonOptions& o, const CLI::App* cmd, const std::string& rates, const std::string& out_dir)
{
    cgp::ExperimentConfig c = to_config(o, cmd);
    if (!rates.empty()) c.rate_axis = parse_rates(rates);
    c.output_dir = out_dir;
    c.check();
    const cgp::GridResult g = cgp::run_grid(c, &std::cerr);
    if (out_dir.empty()) {
        cgp::write_markdown_table(std::cout, g);
        std::cout << '\n';
        cgp::write_summary_csv(std::cout, g);
    } else {
        std::cerr << "wrote " << out_dir << "/{runs.csv,best.txt,summary.csv,summary.md}\n";
    }
    return exit_ok;
}

std::vector<cgp::RunRecord> load_runs(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw cgp::IoError("cannot read " + path);
    return cgp::read_runs_csv(in);
}

int stats_command(const std::string& baseline_file, const std::string& treatment_file, const std::string& metric_name)
{
    const cgp::Metric metric = metric_name == "generations" ? cgp::Metric::generations : cgp::Metric::best_fitness;
    const auto baseline = load_runs(baseline_file);
    const auto treatment = load_runs(treatment_file);
    if (baseline.empty() || treatment.empty()) throw cgp::ConfigError("both run files need at least one row");
    const cgp::GridCellSummary base = cgp::summarize_cell(baseline, baseline, metric);
    const cgp::GridCellSummary s = cgp::summarize_cell(treatment, baseline, metric);
    std::cout << "sample,n,mean,median,stddev,u,p,marker,excluded\n";
    std::cout << "baseline," << base.n_runs << ',' << cgp::format_double(base.mean) << ','
              << cgp::format_double(base.median) << ',' << cgp::format_double(base.std_dev) << ",,,none,"
              << base.excluded << '\n';
    std::cout << "treatment," << s.n_runs << ',' << cgp::format_double(s.mean) << ',' << cgp::format_double(s.median)
              << ',' << cgp::format_double(s.std_dev) << ',' << cgp::format_double(s.u_statistic) << ','
              << cgp::format_double(s.p_value) << ',' << cgp::marker_name(s.marker) << ',' << s.excluded << '\n';
    return exit_ok;
}

int dataset_command(const std::string& problem, std::uint64_t seed, const std::string& out_file)
{
    if (!cgp::is_regression_problem_name(problem)) throw cgp::ConfigError("'" + problem + "' has no dataset");
    cgp::Rng rng(cgp::substream_seed(seed, cgp::dataset_stream));
    const cgp::Problem p = cgp::make_regression_problem(problem, rng);
    if (out_file.empty()) {
        cgp::write_dataset_csv(std::cout, p.dataset());
        return exit_ok;
    }
    std::ofstream out(out_file);
    if (!out) throw cgp::IoError("cannot write " + out_file);
    cgp::write_dataset_csv(out, p.dataset());
    if (!out) throw cgp::IoError("write to " + out_file + " failed");
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cartesian genetic programming with insertion and deletion mutations"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_help_all_flag("--help-all");

    CommonOptions run_opts;
    double insertion_rate = 0.0;
    double deletion_rate = 0.0;
    std::string dump;
    auto* run_cmd = app.add_subcommand("run", "Run one grid cell");
    add_common(run_cmd, run_opts);
    run_opts.runs = 1;
    run_cmd->add_option("--runs", run_opts.runs, "Independent runs")->check(CLI::PositiveNumber);
    run_cmd->add_option("--insertion-rate", insertion_rate, "Per-offspring insertion probability")->check(CLI::Range(0.0, 1.0));
    run_cmd->add_option("--deletion-rate", deletion_rate, "Per-offspring deletion probability")->check(CLI::Range(0.0, 1.0));
    run_cmd->add_option("--dump", dump, "Write the best genotype of every run to this file");

    CommonOptions grid_opts;
    std::string rates;
    std::string out_dir;
    auto* grid_cmd = app.add_subcommand("grid", "Sweep insertion x deletion rates");
    add_common(grid_cmd, grid_opts);
    grid_cmd->add_option("--runs", grid_opts.runs, "Runs per cell")->check(CLI::PositiveNumber);
    grid_cmd->add_option("--rates", rates, "Comma-separated rate axis (default 0.0,0.1,0.2,0.3)");
    grid_cmd->add_option("--out", out_dir, "Output directory");

    std::string baseline_file;
    std::string treatment_file;
    std::string metric = "generations";
    auto* stats_cmd = app.add_subcommand("stats", "Mann-Whitney U test between two per-run CSV files");
    stats_cmd->add_option("--baseline", baseline_file, "Per-run CSV of the baseline")->required();
    stats_cmd->add_option("--treatment", treatment_file, "Per-run CSV of the treatment")->required();
    stats_cmd->add_option("--metric", metric, "generations or fitness")
        ->check(CLI::IsMember({"generations", "fitness"}));

    std::string dataset_problem;
    std::uint64_t dataset_seed = 1;
    std::string dataset_out;
    auto* dataset_cmd = app.add_subcommand("dataset", "Export a regression dataset as CSV");
    dataset_cmd->add_option("--problem", dataset_problem, "koza2, koza3 or pagie1")->required();
    dataset_cmd->add_option("--seed", dataset_seed, "Dataset seed (same as --dataset-seed of run/grid)");
    dataset_cmd->add_option("--out", dataset_out, "Output file (default: stdout)");

    try {
        const std::vector<std::string> args = expand_config(argc, argv);
        std::vector<const char*> cargs;
        for (const auto& a : args) cargs.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(cargs.size()), cargs.data());
        } catch (const CLI::Success& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return exit_config;
        }

        if (*run_cmd) return run_command(run_opts, run_cmd, insertion_rate, deletion_rate, dump);
        if (*grid_cmd) return grid_command(grid_opts, grid_cmd, rates, out_dir);
        if (*stats_cmd) return stats_command(baseline_file, treatment_file, metric);
        if (*dataset_cmd) return dataset_command(dataset_problem, dataset_seed, dataset_out);
    } catch (const cgp::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    return exit_config;
}
