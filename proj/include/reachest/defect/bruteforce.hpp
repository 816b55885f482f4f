#ifndef REACHEST_DEFECT_BRUTEFORCE_HPP
#define REACHEST_DEFECT_BRUTEFORCE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "../geom/enclosing_ball.hpp"
#include "../geom/metric.hpp"
#include "../geom/point.hpp"

namespace reachest {

/// Largest cloud defect_bruteforce accepts.
inline constexpr std::size_t kBruteforceMaxPoints = 25;

namespace detail {

inline double brute_dist_to_cloud(PointView y, const PointCloud& cloud)
{
    double best2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cloud.size(); ++i)
        best2 = std::min(best2, dist2_unchecked(y, cloud[i]));
    return std::sqrt(best2);
}

// Max of d(., cloud) over the barycentric lattice of resolution `res` on the
// simplex spanned by `verts` (every composition of res into verts.size() parts).
inline double sample_simplex(const std::vector<PointView>& verts, int res, const PointCloud& cloud)
{
    const std::size_t m = verts.size();
    const std::size_t d = cloud.dim();
    std::vector<int> w(m, 0);
    std::vector<double> y(d);
    double best = 0.0;

    // enumerate weights w_0..w_{m-1} >= 0 summing to res
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
        if (pos + 1 == m)
        {
            w[pos] = left;
            std::fill(y.begin(), y.end(), 0.0);
            for (std::size_t v = 0; v < m; ++v)
                for (std::size_t k = 0; k < d; ++k)
                    y[k] += w[v] * verts[v][k];
            for (auto& c : y)
                c /= res;
            best = std::max(best, brute_dist_to_cloud(y, cloud));
            return;
        }
        for (int x = left; x >= 0; --x)
        {
            w[pos] = x;
            rec(pos + 1, left - x);
        }
    };
    rec(0, res);
    return best;
}

} // namespace detail

/**
 * Reference value of the convexity defect function at scale t, straight from
 * the definition: every subset sigma with |sigma| <= max_subset and
 * rad(sigma) <= t, its hull sampled densely (hull_samples subdivisions per
 * simplex), and the largest distance back to the cloud.
 *
 * Exponential in max_subset and meant for clouds of at most 25 points.
 */
inline double defect_bruteforce(const PointCloud& cloud, double t, int max_subset, int hull_samples)
{
    if (cloud.size() > kBruteforceMaxPoints)
        throw InputError("defect_bruteforce: cloud too large (at most 25 points)");
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InputError("defect_bruteforce: scale must be finite and nonnegative");
    if (max_subset < 1 || hull_samples < 1)
        throw InputError("defect_bruteforce: subset size and sample count must be positive");

    const std::size_t n = cloud.size();
    const std::size_t kmax = std::min<std::size_t>(static_cast<std::size_t>(max_subset), n);
    double best = 0.0;
    std::vector<std::size_t> idx;
    std::vector<PointView> verts;

    // subsets of size >= 2; singletons contribute 0
    for (std::size_t k = 2; k <= kmax; ++k)
    {
        idx.resize(k);
        for (std::size_t i = 0; i < k; ++i)
            idx[i] = i;
        while (true)
        {
            verts.clear();
            for (auto i : idx)
                verts.push_back(cloud[i]);
            const double rad = min_enclosing_ball(verts).radius;
            if (rad <= t * (1.0 + 1e-12))
                best = std::max(best, detail::sample_simplex(verts, hull_samples, cloud));

            // next combination
            std::size_t pos = k;
            while (pos > 0 && idx[pos - 1] == n - k + pos - 1)
                --pos;
            if (pos == 0)
                break;
            ++idx[pos - 1];
            for (std::size_t i = pos; i < k; ++i)
                idx[i] = idx[i - 1] + 1;
        }
    }
    return best;
}

} // namespace reachest

#endif
