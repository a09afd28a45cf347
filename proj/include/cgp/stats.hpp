#pragma once

#include "cgp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cgp {

struct MannWhitneyResult {
    double u;      // min(U_a, U_b)
    double p;      // two-tailed
    bool exact;    // p from the permutation distribution rather than the normal approximation
};

namespace detail {

struct RankedSamples {
    std::vector<double> ranks_a;  // midranks of sample a in the pooled ordering
    std::vector<double> pooled;   // midranks of every pooled value
    double tie_term = 0.0;        // sum of t^3 - t over tie groups
    bool all_tied = false;
};

inline RankedSamples rank(std::span<const double> a, std::span<const double> b)
{
    const std::size_t n = a.size() + b.size();
    std::vector<std::pair<double, std::size_t>> v;
    v.reserve(n);
    for (std::size_t i = 0; i < a.size(); ++i) v.emplace_back(a[i], i);
    for (std::size_t i = 0; i < b.size(); ++i) v.emplace_back(b[i], a.size() + i);
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    RankedSamples r;
    std::vector<double> by_index(n);
    r.pooled.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[j + 1].first == v[i].first) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        const double t = static_cast<double>(j - i + 1);
        r.tie_term += t * t * t - t;
        for (std::size_t k = i; k <= j; ++k) {
            by_index[v[k].second] = mid;
            r.pooled[k] = mid;
        }
        if (i == 0 && j + 1 == n) r.all_tied = true;
        i = j + 1;
    }
    r.ranks_a.assign(by_index.begin(), by_index.begin() + static_cast<std::ptrdiff_t>(a.size()));
    return r;
}

}  // namespace detail

/// Normal approximation with tie and continuity correction.
inline double mann_whitney_normal_p(double u, std::size_t na, std::size_t nb, double tie_term)
{
    const double n1 = static_cast<double>(na);
    const double n2 = static_cast<double>(nb);
    const double n = n1 + n2;
    const double mu = 0.5 * n1 * n2;
    double var = n1 * n2 / 12.0 * (n + 1.0);
    if (n > 1.0) var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0;
    const double z = std::max(0.0, std::fabs(u - mu) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

/// Exact two-tailed p of the rank-sum statistic, conditional on the observed
/// ties: the fraction of all C(N, na) assignments of pooled midranks to
/// sample a whose rank sum is at least as far from its mean as the observed one.
inline double mann_whitney_exact_p(std::span<const double> pooled_midranks, std::size_t na, double observed_rank_sum)
{
    const std::size_t n = pooled_midranks.size();
    // Midranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<std::size_t> doubled(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        doubled[i] = static_cast<std::size_t>(std::llround(2.0 * pooled_midranks[i]));
        total += doubled[i];
    }
    // ways[k][s]: number of k-subsets with doubled rank sum s
    const std::size_t max_sum = total;
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
        reach += doubled[i];
        const std::size_t kmax = std::min(na, i + 1);
        for (std::size_t k = kmax; k >= 1; --k) {
            auto& dst = ways[k];
            const auto& src = ways[k - 1];
            for (std::size_t s = std::min(reach, max_sum); s >= doubled[i]; --s) {
                dst[s] += src[s - doubled[i]];
                if (s == doubled[i]) break;
            }
        }
    }
    const double mean2 = static_cast<double>(na) * static_cast<double>(n + 1);
    const double obs_dev = std::fabs(2.0 * observed_rank_sum - mean2);
    double extreme = 0.0;
    double all = 0.0;
    for (std::size_t s = 0; s <= max_sum; ++s) {
        const double w = ways[na][s];
        if (w == 0.0) continue;
        all += w;
        if (std::fabs(static_cast<double>(s) - mean2) >= obs_dev - 1e-9) extreme += w;
    }
    return std::min(1.0, extreme / all);
}

/// Two-sample Mann-Whitney U test, two-tailed. Exact permutation p when the
/// smaller sample has at most `exact_limit` values (and the pooled size keeps
/// the enumeration table small), otherwise the normal approximation.
inline MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                        std::size_t exact_limit = 8)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("Mann-Whitney U needs two non-empty samples");
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const detail::RankedSamples r = detail::rank(a, b);
    const double rank_sum_a = std::accumulate(r.ranks_a.begin(), r.ranks_a.end(), 0.0);
    const double u_a = rank_sum_a - 0.5 * static_cast<double>(na) * static_cast<double>(na + 1);
    const double u_b = static_cast<double>(na) * static_cast<double>(nb) - u_a;
    const double u = std::min(u_a, u_b);

    if (r.all_tied) return {u, 1.0, false};

    const bool exact = std::min(na, nb) <= exact_limit && na + nb <= 2000;
    if (!exact) return {u, mann_whitney_normal_p(u, na, nb, r.tie_term), false};

    // Enumerate subsets of the smaller sample; the two-tailed p is symmetric.
    if (na <= nb) return {u, mann_whitney_exact_p(r.pooled, na, rank_sum_a), true};
    const double total = 0.5 * static_cast<double>(na + nb) * static_cast<double>(na + nb + 1);
    return {u, mann_whitney_exact_p(r.pooled, nb, total - rank_sum_a), true};
}

inline MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b)
{
    return mann_whitney_u(std::span<const double>(a), std::span<const double>(b));
}

enum class Marker { none, dagger, double_dagger };

/// double dagger below 0.01, dagger below 0.05.
inline Marker marker_for(double p) noexcept
{
    if (std::isnan(p)) return Marker::none;
    if (p < 0.01) return Marker::double_dagger;
    if (p < 0.05) return Marker::dagger;
    return Marker::none;
}

inline const char* marker_name(Marker m) noexcept
{
    switch (m) {
    case Marker::dagger: return "dagger";
    case Marker::double_dagger: return "double_dagger";
    case Marker::none: break;
    }
    return "none";
}

inline const char* marker_symbol(Marker m) noexcept
{
    switch (m) {
    case Marker::dagger: return "†";
    case Marker::double_dagger: return "‡";
    case Marker::none: break;
    }
    return "";
}

enum class Metric { generations, best_fitness };

struct GridCellSummary {
    double insertion_rate = 0.0;
    double deletion_rate = 0.0;
    std::size_t n_runs = 0;    // runs contributing to the statistics
    std::size_t excluded = 0;  // unsuccessful runs left out of generation statistics
    double mean = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double std_dev = std::numeric_limits<double>::quiet_NaN();
    double u_statistic = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
    Marker marker = Marker::none;
};

/// Metric values of the runs that count for `metric`. Generations-to-success
/// is only defined for successful runs.
inline std::vector<double> metric_values(const std::vector<RunRecord>& records, Metric metric, std::size_t* excluded = nullptr)
{
    std::vector<double> v;
    std::size_t skipped = 0;
    for (const auto& r : records) {
        if (metric == Metric::generations) {
            if (!r.success) {
                ++skipped;
                continue;
            }
            v.push_back(static_cast<double>(r.generations));
        } else {
            v.push_back(r.best_fitness);
        }
    }
    if (excluded) *excluded = skipped;
    return v;
}

struct Moments {
    double mean;
    double median;
    double std_dev;
};

inline Moments describe(std::vector<double> v)
{
    if (v.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan};
    }
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    const double median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    return {mean, median, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

/// Aggregates one grid cell and tests it against the baseline cell.
inline GridCellSummary summarize_cell(const std::vector<RunRecord>& records, const std::vector<RunRecord>& baseline,
                                      Metric metric)
{
    if (records.empty()) throw std::invalid_argument("summarize_cell needs at least one run");
    GridCellSummary s;
    const std::vector<double> values = metric_values(records, metric, &s.excluded);
    const std::vector<double> base = metric_values(baseline, metric);
    s.n_runs = values.size();
    const Moments m = describe(values);
    s.mean = m.mean;
    s.median = m.median;
    s.std_dev = m.std_dev;
    if (!values.empty() && !base.empty()) {
        const MannWhitneyResult t = mann_whitney_u(values, base);
        s.u_statistic = t.u;
        s.p_value = t.p;
    }
    s.marker = marker_for(s.p_value);
    return s;
}

}  // namespace cgp
