#ifndef REACHEST_DEFECT_PROFILE_HPP
#define REACHEST_DEFECT_PROFILE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "../errors.hpp"

namespace reachest {

/// Slack used when checking h(t) <= t on computed profiles.
inline constexpr double kDefectSlack = 1e-12;

/**
 * Settings for the convexity defect computation.
 *
 * An explicit `grid` wins; otherwise the grid is t = 0 followed by
 * `grid_size` uniform scales on (0, max_scale], with max_scale defaulting to
 * half the cloud diameter.
 */
struct DefectConfig
{
    int order = 2;        // 2: pairs, 3: pairs + sampled triples
    int triple_grid = 15; // barycentric subdivisions per triangle (order 3)
    std::optional<double> max_scale;
    std::size_t grid_size = 200;
    std::vector<double> grid;
    std::size_t workers = 0; // threads for the sweep; 0 picks the hardware count

    void validate() const
    {
        if (order != 2 && order != 3)
            throw InputError("simplex order must be 2 or 3");
        if (triple_grid < 1)
            throw InputError("triple grid resolution must be a positive integer");
        if (max_scale && !(*max_scale > 0.0 && std::isfinite(*max_scale)))
            throw InputError("max scale must be positive and finite");
        if (grid.empty() && grid_size < 1)
            throw InputError("grid size must be at least 1");
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
                throw InputError("scale grid entries must be finite and nonnegative");
            if (i > 0 && !(grid[i] > grid[i - 1]))
                throw InputError("scale grid must be strictly increasing");
        }
        if (!grid.empty() && !(grid.back() > 0.0))
            throw InputError("scale grid must reach a positive scale");
    }
};

/// Uniform grid: 0, then `count` scales max_scale * i / count, i = 1..count.
inline std::vector<double> uniform_grid(double max_scale, std::size_t count)
{
    std::vector<double> g;
    g.reserve(count + 1);
    g.push_back(0.0);
    for (std::size_t i = 1; i <= count; ++i)
        g.push_back(max_scale * static_cast<double>(i) / static_cast<double>(count));
    g.back() = max_scale;
    return g;
}

/**
 * The convexity defect function sampled on a scale grid.
 *
 * Invariants (checked on construction): scales strictly increasing and
 * nonnegative; values nonnegative, non-decreasing, h_i <= t_i; h = 0 at t = 0.
 */
class DefectProfile
{
public:
    DefectProfile(std::vector<double> scales, std::vector<double> values, int order)
        : scales_(std::move(scales)), values_(std::move(values)), order_(order)
    {
        if (scales_.empty() || scales_.size() != values_.size())
            throw InputError("profile needs matching, nonempty scale and value sequences");
        for (std::size_t i = 0; i < scales_.size(); ++i)
        {
            const double t = scales_[i], h = values_[i];
            if (!(t >= 0.0) || !std::isfinite(t) || (i > 0 && !(t > scales_[i - 1])))
                throw InputError("profile scales must be finite, nonnegative, strictly increasing");
            if (!(h >= 0.0) || !std::isfinite(h))
                throw InputError("profile values must be finite and nonnegative");
            if (h > t + kDefectSlack * std::max(1.0, t))
                throw InputError("profile violates h(t) <= t at t = " + std::to_string(t));
            if (i > 0 && h < values_[i - 1])
                throw InputError("profile values must be non-decreasing");
        }
        if (scales_.front() == 0.0 && values_.front() != 0.0)
            throw InputError("profile must vanish at t = 0");
    }

    const std::vector<double>& scales() const noexcept { return scales_; }
    const std::vector<double>& values() const noexcept { return values_; }
    int order() const noexcept { return order_; }
    std::size_t size() const noexcept { return scales_.size(); }
    double max_scale() const noexcept { return scales_.back(); }

    /// Index of the first grid scale >= t, if any.
    std::optional<std::size_t> index_at_or_above(double t) const
    {
        auto it = std::lower_bound(scales_.begin(), scales_.end(), t);
        if (it == scales_.end())
            return std::nullopt;
        return static_cast<std::size_t>(it - scales_.begin());
    }

    /// Index of the last grid scale <= t, if any.
    std::optional<std::size_t> index_at_or_below(double t) const
    {
        auto it = std::upper_bound(scales_.begin(), scales_.end(), t);
        if (it == scales_.begin())
            return std::nullopt;
        return static_cast<std::size_t>(it - scales_.begin()) - 1;
    }

private:
    std::vector<double> scales_;
    std::vector<double> values_;
    int order_;
};

/**
 * Smallest grid scale t with t > (22/4) epsilon and h(t) >= t - 3 epsilon:
 * the first place the profile comes within 3 epsilon of the diagonal.
 */
inline std::optional<double> first_diagonal_touch(const DefectProfile& profile, double epsilon)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InputError("first_diagonal_touch: epsilon must be positive");
    const double lower = 22.0 / 4.0 * epsilon;
    for (std::size_t i = 0; i < profile.size(); ++i)
    {
        const double t = profile.scales()[i];
        if (t > lower && profile.values()[i] >= t - 3.0 * epsilon)
            return t;
    }
    return std::nullopt;
}

} // namespace reachest

#endif
