#ifndef REACHEST_ESTIMATORS_HPP
#define REACHEST_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "defect/engine.hpp"
#include "defect/profile.hpp"
#include "errors.hpp"
#include "geom/kd_tree.hpp"
#include "geom/point.hpp"

namespace reachest {

/**
 * Regularity class the estimators are tuned for.
 *
 * `length_unit` fixes the unit in which the scale rule Delta = eps^p is
 * evaluated: Delta = unit * (eps / unit)^p. With the default unit of 1 this
 * is the plain power rule; scaling the unit together with every other length
 * makes the whole pipeline scale-equivariant.
 */
struct ModelParams
{
    int d = 1;
    int k = 3;
    std::optional<double> r_min;
    double r_max = 0.0;
    std::optional<double> epsilon;
    std::optional<double> f_min;
    std::optional<double> f_max; // accepted, not used by any estimator
    double length_unit = 1.0;

    void validate() const
    {
        if (d < 1)
            throw ConfigError("intrinsic dimension d must be a positive integer");
        if (k < 3)
            throw ConfigError("regularity order k must be at least 3");
        if (!(r_max > 0.0) || !std::isfinite(r_max))
            throw ConfigError("r_max must be positive and finite");
        if (r_min && (!(*r_min > 0.0) || !std::isfinite(*r_min)))
            throw ConfigError("r_min must be positive and finite");
        if (r_min && *r_min > r_max)
            throw ConfigError("r_min must not exceed r_max");
        if (epsilon && (!(*epsilon > 0.0) || !std::isfinite(*epsilon)))
            throw ConfigError("epsilon must be positive and finite");
        if (f_min && (!(*f_min > 0.0) || !std::isfinite(*f_min)))
            throw ConfigError("f_min must be positive and finite");
        if (f_max && (!(*f_max > 0.0) || !std::isfinite(*f_max)))
            throw ConfigError("f_max must be positive and finite");
        if (f_min && f_max && *f_min > *f_max)
            throw ConfigError("f_min must not exceed f_max");
        if (!(length_unit > 0.0) || !std::isfinite(length_unit))
            throw ConfigError("length unit must be positive and finite");
    }
};

enum class Branch
{
    local,
    global,
    capped
};

inline const char* to_string(Branch b)
{
    switch (b)
    {
    case Branch::local:
        return "local";
    case Branch::global:
        return "global";
    case Branch::capped:
        return "capped";
    }
    return "capped";
}

struct ReachEstimate
{
    double r_hat = 0.0;
    double r_local = 0.0;
    double r_wfs = 0.0;
    double epsilon_used = 0.0;
    double delta_used = 0.0;
    Branch branch = Branch::capped;
    std::size_t n_points = 0;
    std::size_t dim = 0;
    int order = 2;
    std::vector<std::string> warnings;
};

struct LocalReach
{
    double r_local = 0.0;
    double delta_used = 0.0;
    bool capped = false;
};

namespace detail {

// Largest squared distance from a point to its nearest distinct neighbour
// (0 when every point coincides).
inline double max_neighbour_dist2(const PointCloud& cloud)
{
    const KdTree tree(cloud);
    double worst2 = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (auto hit = tree.nearest(cloud[i], std::numeric_limits<double>::infinity(), 0.0))
            worst2 = std::max(worst2, hit->dist2);
    return worst2;
}

} // namespace detail

/// Twice the largest nearest-distinct-neighbour distance in the cloud.
inline double estimate_epsilon(const PointCloud& cloud)
{
    if (cloud.size() < 2)
        throw InputError("estimate_epsilon: need at least two points");
    const double worst2 = detail::max_neighbour_dist2(cloud);
    if (!(worst2 > 0.0))
        throw InputError("estimate_epsilon: all points coincide");
    return 2.0 * std::sqrt(worst2);
}

/// Delta = unit * (eps / unit)^(1/3) for k = 3, exponent 1/4 for k >= 4.
inline double delta_for(double epsilon, const ModelParams& params)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw ConfigError("epsilon must be positive and finite");
    const double p = params.k == 3 ? 1.0 / 3.0 : 0.25;
    const double u = params.length_unit;
    return u * std::pow(epsilon / u, p);
}

namespace detail {

inline double require_epsilon(const ModelParams& params)
{
    if (!params.epsilon)
        throw ConfigError("epsilon is required here (estimate it from the cloud first)");
    return *params.epsilon;
}

} // namespace detail

/**
 * Local reach from the curvature of the defect profile at scale Delta:
 * min{ t'^2 / (2 h(t')), r_max } with t' the first grid scale >= Delta.
 */
inline LocalReach local_reach(const DefectProfile& profile, const ModelParams& params, double epsilon)
{
    params.validate();
    const double delta = delta_for(epsilon, params);
    const auto idx = profile.index_at_or_above(delta);
    if (!idx)
        throw ConfigError("Delta = " + std::to_string(delta) + " exceeds the profile's largest scale " +
                          std::to_string(profile.max_scale()) + "; extend the scale grid");
    const double t = profile.scales()[*idx];
    const double h = profile.values()[*idx];
    if (!(h > 0.0))
        return {params.r_max, delta, true};
    const double r = t * t / (2.0 * h);
    if (r >= params.r_max)
        return {params.r_max, delta, true};
    return {r, delta, false};
}

inline LocalReach local_reach(const DefectProfile& profile, const ModelParams& params)
{
    return local_reach(profile, params, detail::require_epsilon(params));
}

/// Weak feature size: first diagonal touch of the profile, capped at r_max.
inline double wfs(const DefectProfile& profile, const ModelParams& params, double epsilon)
{
    params.validate();
    const auto touch = first_diagonal_touch(profile, epsilon);
    return touch ? std::min(*touch, params.r_max) : params.r_max;
}

inline double wfs(const DefectProfile& profile, const ModelParams& params)
{
    return wfs(profile, params, detail::require_epsilon(params));
}

/// Warning text when epsilon is outside the regime the wfs detector is tuned for.
inline std::optional<std::string> wfs_precondition_warning(const ModelParams& params, double epsilon)
{
    if (params.r_min && !(epsilon < 2.0 / 9.0 * *params.r_min))
        return "epsilon = " + std::to_string(epsilon) + " is not below (2/9) r_min = " +
               std::to_string(2.0 / 9.0 * *params.r_min) + "; the weak feature size estimate is unreliable";
    return std::nullopt;
}

/// Volume of the unit d-sphere in R^(d+1).
inline double unit_sphere_volume(int d)
{
    const double a = 0.5 * (d + 1);
    return 2.0 * std::pow(std::numbers::pi, a) / std::tgamma(a);
}

/**
 * (f_min * omega_d)^(-1/d): the density part of the upper bound on the local
 * reach and weak feature size. It omits the bound's second, constant-free
 * term, so it is only a partial cap.
 */
inline double rmax_from_density(double f_min, int d)
{
    if (!(f_min > 0.0) || !std::isfinite(f_min))
        throw InputError("rmax_from_density: f_min must be positive and finite");
    if (d < 1)
        throw InputError("rmax_from_density: d must be a positive integer");
    return std::pow(f_min * unit_sphere_volume(d), -1.0 / d);
}

namespace detail {

// Grid for reach(): the configured grid with Delta inserted, extended up to
// Delta when the largest scale was left to its default.
inline std::vector<double> reach_grid(const PointCloud& cloud, const DefectConfig& config, double delta)
{
    config.validate();
    std::vector<double> grid;
    if (!config.grid.empty())
    {
        grid = config.grid;
        if (grid.back() < delta)
            throw ConfigError("Delta = " + std::to_string(delta) +
                              " lies beyond the explicit scale grid; extend the grid");
    }
    else if (config.max_scale)
    {
        if (*config.max_scale < delta)
            throw ConfigError("Delta = " + std::to_string(delta) + " exceeds max scale " +
                              std::to_string(*config.max_scale) + "; raise the max scale");
        grid = uniform_grid(*config.max_scale, config.grid_size);
    }
    else
    {
        double max_scale = 0.5 * diameter(cloud);
        if (!(max_scale >= delta))
            max_scale = delta;
        grid = uniform_grid(max_scale, config.grid_size);
    }
    auto it = std::lower_bound(grid.begin(), grid.end(), delta);
    if (it == grid.end() || *it != delta)
        grid.insert(it, delta);
    return grid;
}

} // namespace detail

/**
 * Combined reach estimate min{ local reach, weak feature size }.
 *
 * The profile is computed only as far as the two estimators read it: up to
 * Delta, and then until the diagonal touch is found or r_max is passed.
 * Results equal those from the full profile.
 */
inline ReachEstimate reach(const PointCloud& cloud, const ModelParams& params, const DefectConfig& config)
{
    params.validate();
    if (cloud.size() < 2)
        throw InputError("reach: need at least two points");

    ReachEstimate est;
    est.n_points = cloud.size();
    est.dim = cloud.dim();
    est.order = config.order;

    double epsilon = 0.0;
    if (params.epsilon)
        epsilon = *params.epsilon;
    else
    {
        const double worst2 = detail::max_neighbour_dist2(cloud);
        if (!(worst2 > 0.0))
        {
            // every point coincides: flat at every scale
            est.epsilon_used = 0.0;
            est.delta_used = 0.0;
            est.r_local = est.r_wfs = est.r_hat = params.r_max;
            est.branch = Branch::capped;
            est.warnings.push_back("all points coincide; estimates capped at r_max");
            return est;
        }
        epsilon = 2.0 * std::sqrt(worst2);
    }
    const double delta = delta_for(epsilon, params);
    est.epsilon_used = epsilon;
    est.delta_used = delta;
    if (auto w = wfs_precondition_warning(params, epsilon))
        est.warnings.push_back(*w);

    auto grid = detail::reach_grid(cloud, config, delta);
    const double lower = 22.0 / 4.0 * epsilon;
    bool touched = false;
    detail::DefectEngine engine(cloud, std::move(grid), config.order, config.triple_grid,
                                detail::resolve_workers(config));
    const auto profile = engine.run([&](std::size_t, double t, double h) {
        if (t > lower && h >= t - 3.0 * epsilon)
            touched = true;
        return t >= delta && (touched || t >= params.r_max);
    });

    const auto loc = local_reach(profile, params, epsilon);
    est.r_local = loc.r_local;
    est.r_wfs = wfs(profile, params, epsilon);
    est.r_hat = std::min(est.r_local, est.r_wfs);
    if (est.r_hat >= params.r_max)
        est.branch = Branch::capped;
    else if (est.r_wfs < est.r_local)
        est.branch = Branch::global;
    else
        est.branch = Branch::local;
    return est;
}

} // namespace reachest

#endif
