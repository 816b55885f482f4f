#ifndef REACHEST_GEOM_ENCLOSING_BALL_HPP
#define REACHEST_GEOM_ENCLOSING_BALL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "metric.hpp"
#include "point.hpp"

namespace reachest {

/// Closed Euclidean ball. `approximate` marks balls from the high-dimension
/// fallback, which enclose the input but need not be minimal.
struct Ball
{
    Point center;
    double radius = 0.0;
    bool approximate = false;

    bool contains(PointView p, double slack = 1e-12) const
    {
        return dist(center, p) <= radius + slack * std::max(1.0, radius);
    }
};

namespace detail {

/**
 * Smallest ball having every point of a support set on its boundary. Its
 * center lies in the affine hull of the support:
 *
 *     c = p0 + sum_i l_i (p_i - p0),   2 (p_i - p0).(c - p0) = |p_i - p0|^2
 *
 * which is a Gram system in l. Returns nullopt when the support is affinely
 * dependent (singular system).
 */
inline std::optional<std::vector<double>> support_center(const std::vector<PointView>& support)
{
    const std::size_t m = support.size();
    const std::size_t d = support.front().size();
    std::vector<double> c(support.front().begin(), support.front().end());
    if (m == 1)
        return c;

    const std::size_t k = m - 1;
    std::vector<std::vector<double>> rel(k, std::vector<double>(d));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t a = 0; a < d; ++a)
            rel[i][a] = support[i + 1][a] - support[0][a];

    // augmented matrix [A | b]
    std::vector<std::vector<double>> A(k, std::vector<double>(k + 1, 0.0));
    double scale = 0.0;
    for (std::size_t i = 0; i < k; ++i)
    {
        for (std::size_t j = 0; j < k; ++j)
        {
            double s = 0.0;
            for (std::size_t a = 0; a < d; ++a)
                s += rel[i][a] * rel[j][a];
            A[i][j] = 2.0 * s;
        }
        A[i][k] = 0.5 * A[i][i];
        scale = std::max(scale, std::abs(A[i][i]));
    }
    if (scale == 0.0)
        return std::nullopt;

    // Gaussian elimination with partial pivoting
    for (std::size_t col = 0; col < k; ++col)
    {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col]))
                piv = r;
        if (std::abs(A[piv][col]) <= 1e-14 * scale)
            return std::nullopt;
        std::swap(A[piv], A[col]);
        for (std::size_t r = col + 1; r < k; ++r)
        {
            const double f = A[r][col] / A[col][col];
            for (std::size_t j = col; j <= k; ++j)
                A[r][j] -= f * A[col][j];
        }
    }
    std::vector<double> lambda(k);
    for (std::size_t i = k; i-- > 0;)
    {
        double s = A[i][k];
        for (std::size_t j = i + 1; j < k; ++j)
            s -= A[i][j] * lambda[j];
        lambda[i] = s / A[i][i];
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t a = 0; a < d; ++a)
            c[a] += lambda[i] * rel[i][a];
    return c;
}

// Move-to-front Welzl solver (Gaertner's formulation).
class MoveToFrontBall
{
public:
    MoveToFrontBall(std::vector<PointView> points, std::size_t dim)
        : pts_(std::move(points)), dim_(dim)
    {
        center_.assign(pts_.front().begin(), pts_.front().end());
        radius2_ = 0.0;
        order_.resize(pts_.size());
        for (std::size_t i = 0; i < order_.size(); ++i)
            order_[i] = i;
    }

    void shuffle(std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        for (std::size_t i = order_.size(); i > 1; --i)
        {
            const std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(order_[i - 1], order_[j]);
        }
    }

    void solve()
    {
        support_.clear();
        // Seed with the empty-support ball: the first point, radius 0.
        center_.assign(pts_[order_.front()].begin(), pts_[order_.front()].end());
        radius2_ = 0.0;
        mtf(order_.size(), true);
    }

    Ball ball() const
    {
        return Ball{Point(std::vector<double>(center_)), std::sqrt(radius2_), false};
    }

private:
    bool outside(PointView p) const
    {
        const double r = std::sqrt(radius2_);
        const double slack = 1e-13 + 1e-12 * r;
        return dist2_unchecked(p, center_) > (r + slack) * (r + slack);
    }

    bool recompute_from_support()
    {
        auto c = support_center(support_);
        if (!c)
            return false;
        center_ = std::move(*c);
        radius2_ = dist2_unchecked(support_.front(), center_);
        return true;
    }

    void mtf(std::size_t end, bool top)
    {
        if (!top && !recompute_from_support())
            return;
        if (support_.size() == dim_ + 1)
            return;
        for (std::size_t i = 0; i < end; ++i)
        {
            const std::size_t idx = order_[i];
            if (!outside(pts_[idx]))
                continue;
            support_.push_back(pts_[idx]);
            const auto saved_center = center_;
            const double saved_r2 = radius2_;
            if (!recompute_from_support())
            {
                // affinely dependent support: keep the previous ball
                support_.pop_back();
                center_ = saved_center;
                radius2_ = saved_r2;
                continue;
            }
            mtf(i, false);
            support_.pop_back();
            std::rotate(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(i),
                        order_.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        }
    }

    std::vector<PointView> pts_;
    std::size_t dim_;
    std::vector<std::size_t> order_;
    std::vector<PointView> support_;
    std::vector<double> center_;
    double radius2_ = 0.0;
};

// Badoiu-Clarkson core-set iteration: (1 + 1/sqrt(iters))-approximate.
inline Ball approximate_ball(const std::vector<PointView>& pts)
{
    std::vector<double> c(pts.front().begin(), pts.front().end());
    constexpr int iters = 400;
    for (int it = 1; it <= iters; ++it)
    {
        std::size_t far = 0;
        double far2 = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            const double d2 = dist2_unchecked(pts[i], c);
            if (d2 > far2)
            {
                far2 = d2;
                far = i;
            }
        }
        const double step = 1.0 / (it + 1);
        for (std::size_t a = 0; a < c.size(); ++a)
            c[a] += step * (pts[far][a] - c[a]);
    }
    double r2 = 0.0;
    for (auto p : pts)
        r2 = std::max(r2, dist2_unchecked(p, c));
    return Ball{Point(std::move(c)), std::sqrt(r2), true};
}

} // namespace detail

/// Dimension above which min_enclosing_ball switches to the approximate solver.
inline constexpr std::size_t kExactBallMaxDim = 10;

/**
 * Smallest enclosing ball of a nonempty point set.
 *
 * Exact for D <= 10 (move-to-front Welzl); above that an approximate ball is
 * returned with `approximate` set. `seed` fixes the insertion order shuffle,
 * so results are deterministic for a given input order and seed.
 */
inline Ball min_enclosing_ball(const std::vector<PointView>& points, std::uint64_t seed = 0)
{
    if (points.empty())
        throw InputError("min_enclosing_ball: empty input");
    const std::size_t d = points.front().size();
    for (auto p : points)
        require_same_dim(p.size(), d, "min_enclosing_ball");
    if (d > kExactBallMaxDim)
        return detail::approximate_ball(points);

    detail::MoveToFrontBall solver(points, d);
    if (seed != 0)
        solver.shuffle(seed);
    solver.solve();
    return solver.ball();
}

inline Ball min_enclosing_ball(const std::vector<Point>& points, std::uint64_t seed = 0)
{
    std::vector<PointView> views(points.begin(), points.end());
    return min_enclosing_ball(views, seed);
}

inline Ball min_enclosing_ball(const PointCloud& cloud, std::uint64_t seed = 0)
{
    std::vector<PointView> views;
    views.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        views.push_back(cloud[i]);
    return min_enclosing_ball(views, seed);
}

/// rad(sigma): radius of the smallest enclosing ball.
inline double enclosing_radius(const std::vector<PointView>& points)
{
    return min_enclosing_ball(points).radius;
}

} // namespace reachest

#endif
