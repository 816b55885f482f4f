// Independent reference computations used by the tests. Slow and simple on
// purpose; none of them share code with the library's algorithms.
#ifndef REACHEST_TESTS_ORACLES_HPP
#define REACHEST_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <reachest/geom/point.hpp>

namespace oracle {

using Vec = std::vector<double>;

inline double dist(const Vec& a, const Vec& b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

inline std::vector<Vec> rows(const reachest::PointCloud& c)
{
    std::vector<Vec> out;
    for (std::size_t i = 0; i < c.size(); ++i)
        out.emplace_back(c[i].begin(), c[i].end());
    return out;
}

inline double nearest(const std::vector<Vec>& cloud, const Vec& q)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : cloud)
        best = std::min(best, dist(p, q));
    return best;
}

inline double hausdorff_asym(const std::vector<Vec>& a, const std::vector<Vec>& b)
{
    double worst = 0.0;
    for (const auto& p : a)
        worst = std::max(worst, nearest(b, p));
    return worst;
}

struct Ball
{
    Vec center;
    double radius;
};

// Centre of the smallest sphere through all points of `s`, within their
// affine hull; false when the points are affinely dependent.
inline bool circumcenter(const std::vector<Vec>& s, Vec& center)
{
    const std::size_t m = s.size();
    const std::size_t d = s[0].size();
    if (m == 1)
    {
        center = s[0];
        return true;
    }
    Eigen::MatrixXd A(d, m - 1);
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t k = 0; k < d; ++k)
            A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j - 1)) = s[j][k] - s[0][k];
    // c = s0 + A l with (A^T A) l = diag(A^T A) / 2
    const Eigen::MatrixXd G = A.transpose() * A;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (lu.rank() < static_cast<Eigen::Index>(m - 1))
        return false;
    const Eigen::VectorXd rhs = 0.5 * G.diagonal();
    const Eigen::VectorXd l = lu.solve(rhs);
    center = s[0];
    const Eigen::VectorXd off = A * l;
    for (std::size_t k = 0; k < d; ++k)
        center[k] += off(static_cast<Eigen::Index>(k));
    return true;
}

/// Smallest enclosing ball by trying every support subset of size <= D + 1.
inline Ball min_ball(const std::vector<Vec>& pts)
{
    const std::size_t n = pts.size();
    const std::size_t d = pts[0].size();
    Ball best{pts[0], std::numeric_limits<double>::infinity()};
    const std::size_t max_support = std::min(n, d + 1);
    std::vector<std::size_t> idx;
    for (std::size_t k = 1; k <= max_support; ++k)
    {
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
        do
        {
            std::vector<Vec> s;
            for (std::size_t i = 0; i < n; ++i)
                if (pick[i])
                    s.push_back(pts[i]);
            Vec c;
            if (!circumcenter(s, c))
                continue;
            const double r = dist(c, s[0]);
            bool ok = true;
            for (const auto& p : pts)
                if (dist(c, p) > r * (1.0 + 1e-10) + 1e-12)
                {
                    ok = false;
                    break;
                }
            if (ok && r < best.radius)
                best = {c, r};
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return best;
}

/// max over `samples + 1` evenly spaced points of [a, b] of the distance to the cloud.
inline double segment_farthest(const Vec& a, const Vec& b, const std::vector<Vec>& cloud, int samples)
{
    double best = 0.0;
    Vec y(a.size());
    for (int i = 0; i <= samples; ++i)
    {
        const double s = static_cast<double>(i) / samples;
        for (std::size_t k = 0; k < a.size(); ++k)
            y[k] = a[k] + s * (b[k] - a[k]);
        best = std::max(best, nearest(cloud, y));
    }
    return best;
}

/**
 * Convexity defect at scale t straight from the definition, over subsets of
 * size <= max_subset (enclosing radius from min_ball), with each hull sampled
 * on a barycentric lattice of resolution `res`.
 */
inline double defect(const std::vector<Vec>& cloud, double t, std::size_t max_subset, int res)
{
    const std::size_t n = cloud.size();
    double best = 0.0;
    for (std::size_t k = 2; k <= std::min(max_subset, n); ++k)
    {
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
        do
        {
            std::vector<Vec> s;
            for (std::size_t i = 0; i < n; ++i)
                if (pick[i])
                    s.push_back(cloud[i]);
            if (min_ball(s).radius > t * (1.0 + 1e-12))
                continue;
            // lattice points: compositions of res into k parts
            std::vector<int> w(k, 0);
            w[0] = res;
            while (true)
            {
                Vec y(cloud[0].size(), 0.0);
                for (std::size_t v = 0; v < k; ++v)
                    for (std::size_t c = 0; c < y.size(); ++c)
                        y[c] += w[v] * s[v][c] / res;
                best = std::max(best, nearest(cloud, y));
                // next composition (reverse lexicographic)
                std::size_t pos = k - 1;
                while (pos > 0 && w[pos - 1] == 0)
                    --pos;
                if (pos == 0)
                    break;
                --w[pos - 1];
                const int tail = w[k - 1];
                w[k - 1] = 0;
                w[pos] = tail + 1;
            }
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return best;
}

/// Uniform random cloud in [lo, hi]^d.
inline reachest::PointCloud random_cloud(std::size_t n, std::size_t d, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> flat(n * d);
    for (auto& v : flat)
        v = u(rng);
    return reachest::PointCloud(std::move(flat), d);
}

} // namespace oracle

#endif
