#ifndef REACHEST_RATES_HPP
#define REACHEST_RATES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "defect/profile.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "synth.hpp"

namespace reachest {

/// SplitMix64 finaliser.
inline std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed of one run: splitmix64(splitmix64(base ^ splitmix64(n)) ^ trial).
inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t n, std::uint64_t trial)
{
    return splitmix64(splitmix64(base ^ splitmix64(n)) ^ trial);
}

inline constexpr const char* kSeedRule = "seed = splitmix64(splitmix64(base ^ splitmix64(n)) ^ trial)";

struct RateConfig
{
    ManifoldSpec spec = Circle{};
    std::vector<std::size_t> n_grid;
    std::size_t trials = 10;
    std::uint64_t base_seed = 0;
    ModelParams params;
    DefectConfig defect;
    std::size_t workers = 0; // concurrent runs; 0 picks the hardware count
};

struct RateRow
{
    std::size_t n = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double r_hat = std::numeric_limits<double>::quiet_NaN();
    double r_local = std::numeric_limits<double>::quiet_NaN();
    double r_wfs = std::numeric_limits<double>::quiet_NaN();
    double abs_error = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

struct RateSummaryEntry
{
    std::size_t n = 0;
    double median_abs_error = std::numeric_limits<double>::quiet_NaN();
    std::size_t ok_runs = 0;
};

struct RateReport
{
    std::string manifold;
    double truth = 0.0;
    std::vector<RateRow> rows;
    std::vector<RateSummaryEntry> summary;
    double slope = std::numeric_limits<double>::quiet_NaN();
};

/// Median of a nonempty sample (mean of the two middle values for even sizes).
inline double median(std::vector<double> v)
{
    if (v.empty())
        throw InputError("median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Least-squares slope of y against x; needs two distinct x values.
inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw InputError("least_squares_slope: need at least two matched points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0))
        throw InputError("least_squares_slope: x values must not all coincide");
    return sxy / sxx;
}

/**
 * Runs trials x |n_grid| sample -> reach pipelines in parallel. A failing run
 * is recorded in its row; the others go on. The summary holds the median
 * absolute error per n and the slope of log(median) against log(n).
 */
inline RateReport run_rates(const RateConfig& config)
{
    validate(config.spec);
    config.params.validate();
    config.defect.validate();
    if (config.trials < 1)
        throw InputError("rates: trials must be at least 1");
    const std::set<std::size_t> distinct(config.n_grid.begin(), config.n_grid.end());
    if (distinct.size() < 3)
        throw InputError("rates: the n grid needs at least 3 distinct values to fit a slope");
    for (auto n : config.n_grid)
        if (n < 2)
            throw InputError("rates: every n must be at least 2");

    RateReport report;
    report.manifold = describe(config.spec);
    report.truth = ground_truth(config.spec).r.value;

    for (auto n : config.n_grid)
        for (std::size_t t = 0; t < config.trials; ++t)
        {
            RateRow row;
            row.n = n;
            row.trial = t;
            row.seed = run_seed(config.base_seed, n, t);
            report.rows.push_back(row);
        }

    DefectConfig defect = config.defect;
    defect.workers = 1;
    const std::size_t workers = config.workers == 0 ? worker_count() : config.workers;
    parallel_for(report.rows.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
        {
            RateRow& row = report.rows[i];
            try
            {
                const auto cloud = sample(config.spec, row.n, row.seed);
                const auto est = reach(cloud, config.params, defect);
                row.r_hat = est.r_hat;
                row.r_local = est.r_local;
                row.r_wfs = est.r_wfs;
                row.abs_error = std::abs(est.r_hat - report.truth);
            }
            catch (const std::exception& e)
            {
                row.status = std::string("error: ") + e.what();
            }
        }
    });

    std::vector<double> lx, ly;
    bool slope_ok = true;
    for (auto n : distinct)
    {
        RateSummaryEntry entry;
        entry.n = n;
        std::vector<double> errs;
        for (const auto& row : report.rows)
            if (row.n == n && row.status == "ok")
                errs.push_back(row.abs_error);
        entry.ok_runs = errs.size();
        if (!errs.empty())
            entry.median_abs_error = median(errs);
        if (entry.median_abs_error > 0.0)
        {
            lx.push_back(std::log(static_cast<double>(n)));
            ly.push_back(std::log(entry.median_abs_error));
        }
        else
            slope_ok = false;
        report.summary.push_back(entry);
    }
    if (slope_ok)
        report.slope = least_squares_slope(lx, ly);
    return report;
}

inline void write_rate_rows_csv(std::ostream& out, const RateReport& report)
{
    out << "n,trial,seed,r_hat,r_local,r_wfs,abs_error,status\n";
    auto num = [](double v) { return std::isfinite(v) ? format_decimal(v) : std::string("nan"); };
    for (const auto& r : report.rows)
    {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        out << r.n << ',' << r.trial << ',' << r.seed << ',' << num(r.r_hat) << ',' << num(r.r_local) << ','
            << num(r.r_wfs) << ',' << num(r.abs_error) << ',' << status << '\n';
    }
}

inline nlohmann::json rate_summary_json(const RateReport& report, const RateConfig& config)
{
    nlohmann::json per_n = nlohmann::json::array();
    for (const auto& e : report.summary)
        per_n.push_back({{"n", e.n},
                         {"median_abs_error", std::isfinite(e.median_abs_error) ? nlohmann::json(e.median_abs_error)
                                                                                : nlohmann::json(nullptr)},
                         {"ok_runs", e.ok_runs}});
    std::size_t failed = 0;
    for (const auto& r : report.rows)
        failed += r.status != "ok";
    return nlohmann::json{{"manifold", report.manifold},
                          {"truth", report.truth},
                          {"trials", config.trials},
                          {"n_grid", config.n_grid},
                          {"base_seed", config.base_seed},
                          {"seed_rule", kSeedRule},
                          {"rows", report.rows.size()},
                          {"failed_rows", failed},
                          {"median_abs_error", per_n},
                          {"slope", std::isfinite(report.slope) ? nlohmann::json(report.slope) : nlohmann::json(nullptr)}};
}

} // namespace reachest

#endif
