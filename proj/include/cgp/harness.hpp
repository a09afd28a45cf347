#pragma once

#include "cgp/evolution.hpp"
#include "cgp/problems.hpp"
#include "cgp/random.hpp"
#include "cgp/stats.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace cgp {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string problem;
    std::vector<double> rate_axis{0.0, 0.1, 0.2, 0.3};
    std::size_t runs_per_cell = 100;
    std::uint64_t base_seed = 1;
    std::size_t lambda = 4;
    std::optional<double> point_rate;              // problem default when unset
    std::size_t min_active = 4;
    std::optional<std::size_t> eval_budget;        // regression default 10000
    std::optional<std::size_t> generation_cap;     // boolean default 10^7
    bool use_sagms = false;
    Acceptance acceptance = Acceptance::neutral;
    std::optional<std::uint64_t> dataset_seed;     // share one sampled dataset across runs
    std::optional<Dataset> dataset;                // imported dataset, overrides sampling
    std::filesystem::path output_dir;
    std::size_t workers = 1;

    void check() const
    {
        if (!is_boolean_problem_name(problem) && !is_regression_problem_name(problem))
            throw ConfigError("unknown problem '" + problem + "'");
        if (runs_per_cell < 1) throw ConfigError("runs per cell must be at least 1");
        if (rate_axis.empty()) throw ConfigError("rate axis must not be empty");
        for (double r : rate_axis)
            if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("rates must lie in [0, 1]");
        if (lambda < 1) throw ConfigError("lambda must be at least 1");
        if (point_rate && !(*point_rate >= 0.0 && *point_rate <= 1.0))
            throw ConfigError("point rate must lie in [0, 1]");
        if (workers < 1) throw ConfigError("workers must be at least 1");
        if (dataset && is_boolean_problem_name(problem)) throw ConfigError("datasets only apply to regression problems");
    }

    [[nodiscard]] double effective_point_rate() const
    {
        return point_rate.value_or(is_boolean_problem_name(problem) ? 0.05 : 0.2);
    }
};

/// Rates enter seed derivation as integer permille so that a cell keeps its
/// seeds regardless of which axis it was run from.
inline std::uint64_t rate_key(double rate) { return static_cast<std::uint64_t>(std::llround(rate * 1000.0)); }

inline std::uint64_t derive_seed(std::uint64_t base_seed, double deletion_rate, double insertion_rate,
                                 std::size_t run_index)
{
    std::uint64_t h = mix64(base_seed);
    h = mix64(h ^ rate_key(deletion_rate));
    h = mix64(h ^ (rate_key(insertion_rate) + 0x5851f42d4c957f2dULL));
    h = mix64(h ^ (static_cast<std::uint64_t>(run_index) + 0x14057b7ef767814fULL));
    return h;
}

constexpr std::uint64_t dataset_stream = 1;

inline Problem problem_for_run(const ExperimentConfig& config, std::uint64_t run_seed)
{
    Rng dataset_rng(substream_seed(config.dataset_seed.value_or(run_seed), dataset_stream));
    Problem p = make_problem(config.problem, dataset_rng);
    if (config.dataset) p = with_dataset(std::move(p), *config.dataset);
    return p;
}

inline EvolutionParams evolution_params(const ExperimentConfig& config, const Problem& problem, double insertion_rate,
                                        double deletion_rate)
{
    EvolutionParams e;
    e.lambda = config.lambda;
    e.acceptance = config.acceptance;
    e.target_fitness = problem.target_fitness;
    const bool boolean = problem.is_boolean();
    e.max_evaluations = config.eval_budget.value_or(boolean ? 0 : 10000);
    e.max_generations = config.generation_cap.value_or(boolean ? 10'000'000 : 0);
    e.mutation.point_rate = config.effective_point_rate();
    e.mutation.insertion_rate = insertion_rate;
    e.mutation.deletion_rate = deletion_rate;
    e.mutation.min_active = config.min_active;
    e.mutation.use_sagms = config.use_sagms;
    return e;
}

inline RunRecord run_single(const ExperimentConfig& config, double insertion_rate, double deletion_rate,
                            std::size_t run_index)
{
    config.check();
    const std::uint64_t seed = derive_seed(config.base_seed, deletion_rate, insertion_rate, run_index);
    const Problem problem = problem_for_run(config, seed);
    return run(problem, evolution_params(config, problem, insertion_rate, deletion_rate), seed);
}

/// Runs `count` independent runs of one cell on `workers` threads; results
/// are indexed by run so the output does not depend on scheduling.
inline std::vector<RunRecord> run_cell(const ExperimentConfig& config, double insertion_rate, double deletion_rate,
                                       std::size_t count, std::size_t workers)
{
    std::vector<RunRecord> out(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i] = run_single(config, insertion_rate, deletion_rate, i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    const std::size_t n_threads = std::min(workers, count);
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

struct CellResult {
    double insertion_rate;
    double deletion_rate;
    std::vector<RunRecord> runs;
    GridCellSummary summary;
};

struct GridResult {
    std::string problem;
    Metric metric;
    std::vector<double> rate_axis;
    std::vector<CellResult> cells;  // deletion-major, then insertion

    [[nodiscard]] const CellResult& cell(std::size_t deletion_index, std::size_t insertion_index) const
    {
        return cells.at(deletion_index * rate_axis.size() + insertion_index);
    }
};

inline Metric metric_for_problem(const std::string& problem)
{
    return is_boolean_problem_name(problem) ? Metric::generations : Metric::best_fitness;
}

inline std::string format_double(double v, int precision = 17)
{
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

inline std::string format_rate(double r)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", r);
    if (std::fabs(std::round(r * 10.0) - r * 10.0) > 1e-9) std::snprintf(buf, sizeof buf, "%g", r);
    return buf;
}

inline constexpr const char* runs_csv_header =
    "problem,deletion_rate,insertion_rate,run,seed,generations,evaluations,best_fitness,success";
inline constexpr const char* summary_csv_header =
    "problem,deletion_rate,insertion_rate,n,mean,median,stddev,u,p,marker,excluded";

inline void write_run_rows(std::ostream& os, const std::string& problem, double deletion_rate, double insertion_rate,
                           const std::vector<RunRecord>& runs)
{
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const RunRecord& r = runs[i];
        os << problem << ',' << format_rate(deletion_rate) << ',' << format_rate(insertion_rate) << ',' << i << ','
           << r.seed << ',' << r.generations << ',' << r.evaluations << ',' << format_double(r.best_fitness) << ','
           << (r.success ? 1 : 0) << '\n';
    }
}

inline void write_summary_row(std::ostream& os, const std::string& problem, const GridCellSummary& s)
{
    os << problem << ',' << format_rate(s.deletion_rate) << ',' << format_rate(s.insertion_rate) << ',' << s.n_runs
       << ',' << format_double(s.mean) << ',' << format_double(s.median) << ',' << format_double(s.std_dev) << ','
       << format_double(s.u_statistic) << ',' << format_double(s.p_value) << ',' << marker_name(s.marker) << ','
       << s.excluded << '\n';
}

/// Deletion rate down the rows, insertion rate across the columns.
inline void write_markdown_table(std::ostream& os, const GridResult& g)
{
    const bool generations = g.metric == Metric::generations;
    os << "### " << g.problem << ": mean " << (generations ? "generations to success" : "best fitness of run")
       << "\n\n| deletion \\ insertion |";
    for (double r : g.rate_axis) os << ' ' << format_rate(r) << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < g.rate_axis.size(); ++i) os << "---:|";
    os << '\n';
    for (std::size_t d = 0; d < g.rate_axis.size(); ++d) {
        os << "| **" << format_rate(g.rate_axis[d]) << "** |";
        for (std::size_t i = 0; i < g.rate_axis.size(); ++i) {
            const GridCellSummary& s = g.cell(d, i).summary;
            os << ' ' << format_double(s.mean, generations ? 6 : 4) << marker_symbol(s.marker);
            if (s.excluded) os << " (" << s.excluded << " capped)";
            os << " |";
        }
        os << '\n';
    }
    os << "\n† p < 0.05, ‡ p < 0.01 (two-tailed Mann-Whitney U against the top-left cell)\n";
}

inline void write_summary_csv(std::ostream& os, const GridResult& g)
{
    os << summary_csv_header << '\n';
    for (const auto& c : g.cells) write_summary_row(os, g.problem, c.summary);
}

inline void write_runs_csv(std::ostream& os, const GridResult& g)
{
    os << runs_csv_header << '\n';
    for (const auto& c : g.cells) write_run_rows(os, g.problem, c.deletion_rate, c.insertion_rate, c.runs);
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& p)
{
    std::ofstream f(p);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
}

}  // namespace detail

/// Every (deletion, insertion) pair of the rate axis, `runs_per_cell` runs
/// each. Cells run one after another with the runs of a cell spread over the
/// workers. When an output directory is set, runs.csv and best.txt grow after
/// every finished cell and summary.csv / summary.md are written at the end.
inline GridResult run_grid(const ExperimentConfig& config, std::ostream* progress = nullptr)
{
    config.check();
    GridResult g;
    g.problem = config.problem;
    g.metric = metric_for_problem(config.problem);
    g.rate_axis = config.rate_axis;

    std::ofstream runs_csv;
    std::ofstream best_txt;
    const bool to_disk = !config.output_dir.empty();
    if (to_disk) {
        std::error_code ec;
        std::filesystem::create_directories(config.output_dir, ec);
        if (ec) throw IoError("cannot create " + config.output_dir.string() + ": " + ec.message());
        runs_csv = detail::open_for_write(config.output_dir / "runs.csv");
        best_txt = detail::open_for_write(config.output_dir / "best.txt");
        runs_csv << runs_csv_header << '\n';
    }

    const std::size_t n = config.rate_axis.size();
    for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t i = 0; i < n; ++i) {
            CellResult c;
            c.deletion_rate = config.rate_axis[d];
            c.insertion_rate = config.rate_axis[i];
            c.runs = run_cell(config, c.insertion_rate, c.deletion_rate, config.runs_per_cell, config.workers);
            if (to_disk) {
                write_run_rows(runs_csv, g.problem, c.deletion_rate, c.insertion_rate, c.runs);
                for (const auto& r : c.runs) best_txt << serialize(r.best_genotype) << '\n';
                runs_csv.flush();
                best_txt.flush();
                if (!runs_csv || !best_txt) throw IoError("write to " + config.output_dir.string() + " failed");
            }
            g.cells.push_back(std::move(c));
            if (progress) {
                const auto& cell = g.cells.back();
                std::size_t ok = 0;
                for (const auto& r : cell.runs) ok += r.success ? 1 : 0;
                *progress << g.problem << " deletion " << format_rate(cell.deletion_rate) << " insertion "
                          << format_rate(cell.insertion_rate) << ": " << cell.runs.size() << " runs, " << ok
                          << " successful\n";
            }
        }
    }

    const std::vector<RunRecord>& baseline = g.cells.front().runs;
    for (auto& c : g.cells) {
        c.summary = summarize_cell(c.runs, baseline, g.metric);
        c.summary.insertion_rate = c.insertion_rate;
        c.summary.deletion_rate = c.deletion_rate;
    }
    GridCellSummary& base = g.cells.front().summary;
    base.p_value = std::numeric_limits<double>::quiet_NaN();
    base.u_statistic = std::numeric_limits<double>::quiet_NaN();
    base.marker = Marker::none;

    if (progress)
        for (const auto& c : g.cells)
            if (c.summary.excluded)
                *progress << "warning: " << c.summary.excluded << " run(s) at deletion " << format_rate(c.deletion_rate)
                          << " insertion " << format_rate(c.insertion_rate)
                          << " hit the generation cap and are excluded from the statistics\n";

    if (to_disk) {
        auto summary = detail::open_for_write(config.output_dir / "summary.csv");
        write_summary_csv(summary, g);
        auto md = detail::open_for_write(config.output_dir / "summary.md");
        write_markdown_table(md, g);
        if (!summary || !md) throw IoError("write to " + config.output_dir.string() + " failed");
    }
    return g;
}

/// Rows of a per-run CSV, as far as the statistics need them.
inline std::vector<RunRecord> read_runs_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("run CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != runs_csv_header) throw ConfigError("unexpected run CSV header: " + line);
    std::vector<RunRecord> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 9) throw ConfigError("run CSV line " + std::to_string(line_no) + ": expected 9 fields");
        try {
            RunRecord r;
            r.seed = std::stoull(f[4]);
            r.generations = std::stoull(f[5]);
            r.evaluations = std::stoull(f[6]);
            r.best_fitness = f[7] == "inf" ? std::numeric_limits<double>::infinity() : std::stod(f[7]);
            r.success = f[8] == "1";
            out.push_back(std::move(r));
        } catch (const std::exception&) {
            throw ConfigError("run CSV line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return out;
}

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
inline std::map<std::string, std::string> parse_key_values(std::istream& is)
{
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

}  // namespace cgp
