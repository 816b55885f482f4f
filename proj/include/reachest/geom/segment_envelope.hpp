#ifndef REACHEST_GEOM_SEGMENT_ENVELOPE_HPP
#define REACHEST_GEOM_SEGMENT_ENVELOPE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <vector>

#include "kd_tree.hpp"
#include "metric.hpp"
#include "point.hpp"

namespace reachest {

/// Farthest point of a segment [a, b] from a cloud: y(s) = a + s (b - a).
struct SegmentFarthest
{
    double s_star = 0.0; // maximiser in [0, 1]
    double d_star = 0.0; // max over s of d(y(s), cloud)
};

namespace detail {

/**
 * Lower envelope of the squared distances |y(s) - x|^2, x in a candidate set,
 * over s in [0, 1].
 *
 * Every squared distance has the same leading term s^2 |u|^2 (u = b - a), so
 * after dropping it each candidate is a line c_x + m_x s with
 * c_x = |x - a|^2 and m_x = -2 u.(x - a). The lower envelope of those lines is
 * the 1-D Voronoi diagram of the candidates restricted to the segment. On
 * every envelope piece the true squared distance is a convex quadratic, so its
 * maximum over [0, 1] sits at a breakpoint or at an end of the segment.
 */
class SegmentEnvelope
{
    struct Line
    {
        double c, m;
        PointView x;
    };

public:
    struct Peak
    {
        double s = 0.0;
        double value = 0.0;
    };

    SegmentEnvelope(PointView a, PointView b) { reset(a, b); }

    void reset(PointView a, PointView b)
    {
        a_ = a;
        dim_ = a.size();
        u_.resize(dim_);
        for (std::size_t k = 0; k < dim_; ++k)
            u_[k] = b[k] - a[k];
        y_.resize(dim_);
    }

    /// Peak of the envelope over the given candidates (nonempty).
    template <typename Range>
    Peak peak(const Range& candidates)
    {
        lines_.clear();
        for (PointView x : candidates)
            lines_.push_back(make_line(x));
        std::stable_sort(lines_.begin(), lines_.end(), steeper);
        return solve();
    }

    void clear()
    {
        lines_.clear();
        pending_.clear();
    }

    /// Queues one candidate; it joins the envelope at the next solve.
    void insert(PointView x) { pending_.push_back(make_line(x)); }

    /**
     * Peak over the inserted candidates (at least one). Every envelope vertex
     * (breakpoint or segment end) whose value exceeds `hot_above` is listed
     * in hot().
     */
    Peak solve(double hot_above = std::numeric_limits<double>::infinity())
    {
        if (!pending_.empty())
            merge_pending();
        hot_.clear();
        hull_.clear();
        for (const Line& l : lines_)
        {
            if (!hull_.empty() && hull_.back().m == l.m)
                continue; // parallel and not lower
            while (hull_.size() >= 2 &&
                   meet(hull_[hull_.size() - 2], l) <= meet(hull_[hull_.size() - 2], hull_.back()))
                hull_.pop_back();
            hull_.push_back(l);
        }

        // Skip pieces that end before s = 0.
        std::size_t i = 0;
        while (i + 1 < hull_.size() && meet(hull_[i], hull_[i + 1]) <= 0.0)
            ++i;

        Peak best{0.0, value_at(0.0, hull_[i])};
        if (best.value > hot_above)
            hot_.push_back(best);
        for (; i + 1 < hull_.size(); ++i)
        {
            const double s = meet(hull_[i], hull_[i + 1]);
            if (s >= 1.0)
                break;
            const double v = std::min(value_at(s, hull_[i]), value_at(s, hull_[i + 1]));
            if (v > hot_above)
                hot_.push_back(Peak{s, v});
            if (v > best.value)
                best = Peak{s, v};
        }
        const double v1 = value_at(1.0, hull_[i]);
        if (v1 > hot_above)
            hot_.push_back(Peak{1.0, v1});
        if (v1 > best.value)
            best = Peak{1.0, v1};
        return best;
    }

    const std::vector<Peak>& hot() const noexcept { return hot_; }

    PointView point_at(double s)
    {
        for (std::size_t k = 0; k < dim_; ++k)
            y_[k] = a_[k] + s * u_[k];
        return y_;
    }

private:
    static double meet(const Line& p, const Line& q) { return (q.c - p.c) / (p.m - q.m); }

    static bool steeper(const Line& p, const Line& q) { return p.m > q.m || (p.m == q.m && p.c < q.c); }

    // Stable merge of the queued lines into the ordered ones, without
    // per-call allocation once the buffers have grown.
    void merge_pending()
    {
        if (pending_.size() <= 32)
        {
            for (std::size_t i = 1; i < pending_.size(); ++i)
            {
                const Line l = pending_[i];
                std::size_t j = i;
                for (; j > 0 && steeper(l, pending_[j - 1]); --j)
                    pending_[j] = pending_[j - 1];
                pending_[j] = l;
            }
        }
        else
            std::stable_sort(pending_.begin(), pending_.end(), steeper);
        scratch_.clear();
        std::merge(lines_.begin(), lines_.end(), pending_.begin(), pending_.end(), std::back_inserter(scratch_),
                   steeper);
        lines_.swap(scratch_);
        pending_.clear();
    }

    Line make_line(PointView x) const
    {
        double c = 0.0, m = 0.0;
        for (std::size_t k = 0; k < dim_; ++k)
        {
            const double r = x[k] - a_[k];
            c += r * r;
            m -= 2.0 * u_[k] * r;
        }
        return Line{c, m, x};
    }

    double value_at(double s, const Line& l)
    {
        return std::sqrt(dist2_unchecked(point_at(s), l.x));
    }

    PointView a_;
    std::size_t dim_;
    std::vector<double> u_;
    std::vector<double> y_;
    std::vector<Line> lines_;
    std::vector<Line> pending_;
    std::vector<Line> scratch_;
    std::vector<Line> hull_;
    std::vector<Peak> hot_;
};

} // namespace detail

/**
 * Exact max over s in [0, 1] of d(a + s (b - a), cloud), by the lower
 * envelope over every cloud point. O(n log n).
 */
inline SegmentFarthest segment_farthest(PointView a, PointView b, const PointCloud& cloud)
{
    require_same_dim(a.size(), cloud.dim(), "segment_farthest");
    require_same_dim(b.size(), cloud.dim(), "segment_farthest");
    std::vector<PointView> all;
    all.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        all.push_back(cloud[i]);
    if (std::equal(a.begin(), a.end(), b.begin()))
    {
        double best2 = std::numeric_limits<double>::infinity();
        for (auto x : all)
            best2 = std::min(best2, dist2_unchecked(a, x));
        return {0.0, std::sqrt(best2)};
    }
    detail::SegmentEnvelope env(a, b);
    auto pk = env.peak(all);
    return {pk.s, pk.value};
}

/**
 * Envelope over a growing subset S of the cloud.
 *
 * The envelope of S bounds d(y(s), cloud) from above everywhere, so its peak
 * value is an upper bound on the segment's farthest distance. If no cloud
 * point is strictly closer to the peak point y* than the peak value, the bound
 * is attained and therefore exact. `certify` adds the violating nearest
 * point until that holds.
 */
class SegmentProbe
{
public:
    SegmentProbe(const PointCloud& cloud, PointView a, PointView b) : cloud_(cloud), env_(a, b) {}

    /// Starts over on a new segment, keeping allocations.
    void reset(PointView a, PointView b)
    {
        env_.reset(a, b);
        env_.clear();
        ids_.clear();
        dirty_ = true;
    }

    bool has(std::size_t id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

    /// Adds a candidate; returns false when it was already present.
    bool add(std::size_t id)
    {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it != ids_.end() && *it == id)
            return false;
        ids_.insert(it, id);
        env_.insert(cloud_[id]);
        dirty_ = true;
        return true;
    }

    std::size_t candidate_count() const noexcept { return ids_.size(); }

    const detail::SegmentEnvelope::Peak& peak()
    {
        if (dirty_)
        {
            peak_ = env_.solve();
            dirty_ = false;
        }
        return peak_;
    }

    PointView peak_point() { return env_.point_at(peak().s); }

    /**
     * Refines with a point lookup (any cloud point near a query), feeding it
     * every envelope vertex above `enough` per round. Stops once the bound
     * is at or below `enough`. Returns the bound.
     */
    template <typename Lookup>
    double tighten(Lookup&& lookup, int rounds, double enough = -1.0)
    {
        for (int r = 0; r < rounds; ++r)
        {
            if (solve_hot(enough).value <= enough)
                break;
            // the highest vertices; the batch doubles every round
            const std::size_t take = std::min<std::size_t>(hot_.size(), std::size_t{1} << std::min(std::max(r - 4, 0), 16));
            std::partial_sort(hot_.begin(), hot_.begin() + static_cast<std::ptrdiff_t>(take), hot_.end(),
                              [](const auto& p, const auto& q) { return p.value > q.value; });
            bool grew = false;
            for (std::size_t h = 0; h < take; ++h)
                grew = add(lookup(env_.point_at(hot_[h].s))) || grew;
            if (!grew)
                break;
        }
        return peak().value;
    }

    /**
     * Exact farthest distance, certified against the kd-tree. With a floor,
     * the answer is only exact when it exceeds the floor; otherwise it is
     * some upper bound at or below the floor.
     */
    SegmentFarthest certify(const KdTree& tree, double floor = -1.0)
    {
        while (true)
        {
            const auto pk = solve_hot(floor);
            if (pk.value <= floor)
                return {pk.s, pk.value};
            bool grew = false;
            for (const auto& h : hot_)
            {
                auto hit = tree.nearest(env_.point_at(h.s), h.value * h.value);
                if (hit)
                    grew = add(hit->index) || grew;
            }
            if (!grew)
                return {pk.s, pk.value};
        }
    }

private:
    detail::SegmentEnvelope::Peak solve_hot(double above)
    {
        peak_ = env_.solve(above);
        dirty_ = false;
        hot_ = env_.hot();
        return peak_;
    }

    const PointCloud& cloud_;
    detail::SegmentEnvelope env_;
    std::vector<std::size_t> ids_;
    std::vector<detail::SegmentEnvelope::Peak> hot_;
    detail::SegmentEnvelope::Peak peak_;
    bool dirty_ = true;
};

/// Exact segment farthest distance using a kd-tree over the cloud.
inline SegmentFarthest segment_farthest(PointView a, PointView b, const PointCloud& cloud,
                                        const KdTree& tree)
{
    require_same_dim(a.size(), cloud.dim(), "segment_farthest");
    require_same_dim(b.size(), cloud.dim(), "segment_farthest");
    if (std::equal(a.begin(), a.end(), b.begin()))
        return {0.0, std::sqrt(tree.nearest(a)->dist2)};
    SegmentProbe probe(cloud, a, b);
    probe.add(tree.nearest(a)->index);
    probe.add(tree.nearest(b)->index);
    return probe.certify(tree);
}

} // namespace reachest

#endif
