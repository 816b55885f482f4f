#ifndef REACHEST_DEFECT_ENGINE_HPP
#define REACHEST_DEFECT_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <unordered_map>
#include <vector>

#include "../geom/kd_tree.hpp"
#include "../geom/metric.hpp"
#include "../geom/segment_envelope.hpp"
#include "../geom/spatial_index.hpp"
#include "../parallel.hpp"
#include "profile.hpp"

namespace reachest {

/// One two-point simplex: rad = half its length, and its hull's farthest
/// distance from the cloud.
struct PairContribution
{
    double half_length = 0.0;
    double farthest = 0.0;
};

namespace detail {

/// rad of a triangle: half the longest side if it is not acute, else the
/// circumradius.
inline double triangle_enclosing_radius(PointView a, PointView b, PointView c)
{
    const double ab = dist2_unchecked(a, b), bc = dist2_unchecked(b, c), ca = dist2_unchecked(c, a);
    const double longest = std::max({ab, bc, ca});
    if (ab + bc <= ca || bc + ca <= ab || ca + ab <= bc)
        return 0.5 * std::sqrt(longest);
    // u = b - a, v = c - a: 4 area^2 = |u|^2 |v|^2 - (u.v)^2, u.v = (ab + ca - bc) / 2
    const double uv = 0.5 * (ab + ca - bc);
    const double four_area2 = ab * ca - uv * uv;
    if (!(four_area2 > 0.0))
        return 0.5 * std::sqrt(longest);
    return std::sqrt(ab * bc * ca / four_area2) / 2.0;
}

/**
 * Maps a query point to some cloud point near it: the exact nearest neighbour
 * of the centre of the lattice cell containing the query, memoised per cell.
 * Any cloud point gives a valid envelope bound, so a cell collision in the
 * hashed key only costs tightness.
 */
class NearestCellCache
{
public:
    NearestCellCache(const KdTree& tree, std::vector<double> origin, double cell, std::int64_t per_axis)
        : tree_(tree), origin_(std::move(origin)), cell_(cell), per_axis_(per_axis), center_(origin_.size())
    {
        // dense table when the lattice over the bounding box is small
        double cells = 1.0;
        for (std::size_t k = 0; k < origin_.size(); ++k)
            cells *= static_cast<double>(per_axis_ + 1);
        if (cells <= kDenseLimit)
            dense_.assign(static_cast<std::size_t>(cells), kEmpty);
    }

    std::size_t operator()(PointView y)
    {
        const std::size_t d = origin_.size();
        std::uint64_t key = dense_.empty() ? 0x9E3779B97F4A7C15ull : 0;
        for (std::size_t k = 0; k < d; ++k)
        {
            auto c = static_cast<std::int64_t>(std::floor((y[k] - origin_[k]) / cell_));
            c = std::clamp<std::int64_t>(c, 0, per_axis_);
            center_[k] = origin_[k] + (static_cast<double>(c) + 0.5) * cell_;
            if (!dense_.empty())
                key = key * static_cast<std::uint64_t>(per_axis_ + 1) + static_cast<std::uint64_t>(c);
            else
                key ^= static_cast<std::uint64_t>(c) + 0x9E3779B97F4A7C15ull + (key << 6) + (key >> 2);
        }
        if (!dense_.empty())
        {
            auto& slot = dense_[key];
            if (slot == kEmpty)
                slot = static_cast<std::uint32_t>(tree_.nearest(center_)->index);
            return slot;
        }
        auto [it, inserted] = memo_.try_emplace(key, 0u);
        if (inserted)
            it->second = static_cast<std::uint32_t>(tree_.nearest(center_)->index);
        return it->second;
    }

private:
    static constexpr double kDenseLimit = 1 << 20;
    static constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;

    const KdTree& tree_;
    std::vector<double> origin_;
    double cell_;
    std::int64_t per_axis_;
    std::vector<double> center_;
    std::vector<std::uint32_t> dense_;
    std::unordered_map<std::uint64_t, std::uint32_t> memo_;
};

/**
 * Prefix-maximum sweep computing h on a scale grid.
 *
 * Every simplex contributes a constant (its hull's farthest distance from the
 * cloud) from the grid scale at or above its rad onward, so h(t_i) is the
 * running maximum over the simplices binned at scales <= t_i. Inside a bin,
 * pairs are ranked by a cheap envelope upper bound; only pairs whose bound
 * beats the current maximum get the exact (certified) evaluation, which leaves
 * the computed maxima unchanged.
 */
class DefectEngine
{
public:
    /// Called after each grid scale; returning true stops the sweep there.
    using StopRule = std::function<bool(std::size_t index, double t, double h)>;

    DefectEngine(const PointCloud& cloud, std::vector<double> grid, int order, int triple_grid,
                 std::size_t workers = worker_count())
        : cloud_(cloud), grid_(std::move(grid)), order_(order), triple_grid_(triple_grid),
          workers_(workers), tree_(cloud)
    {
        const std::size_t d = cloud.dim();
        std::vector<double> lo(d, std::numeric_limits<double>::infinity());
        std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < cloud.size(); ++i)
            for (std::size_t k = 0; k < d; ++k)
            {
                lo[k] = std::min(lo[k], cloud[i][k]);
                hi[k] = std::max(hi[k], cloud[i][k]);
            }
        double extent = 0.0;
        for (std::size_t k = 0; k < d; ++k)
            extent = std::max(extent, hi[k] - lo[k]);
        per_axis_ = d == 1 ? 4096 : d == 2 ? 256 : d == 3 ? 64 : 16;
        cache_cell_ = extent > 0.0 ? extent / static_cast<double>(per_axis_) : 1.0;
        origin_ = lo;
        caches_.reserve(std::max<std::size_t>(workers_, 1));
        for (std::size_t w = 0; w < std::max<std::size_t>(workers_, 1); ++w)
            caches_.emplace_back(tree_, origin_, cache_cell_, per_axis_);
    }

    DefectEngine(const DefectEngine&) = delete;
    DefectEngine& operator=(const DefectEngine&) = delete;

    DefectProfile run(const StopRule& stop = {})
    {
        bin_simplices();
        std::vector<double> values;
        values.reserve(grid_.size());
        double running = 0.0;
        for (std::size_t b = 0; b < grid_.size(); ++b)
        {
            running = sweep_bin(b, running);
            values.push_back(running);
            if (stop && stop(b, grid_[b], running))
                break;
        }
        std::vector<double> scales(grid_.begin(), grid_.begin() + static_cast<std::ptrdiff_t>(values.size()));
        return DefectProfile(std::move(scales), std::move(values), order_);
    }

    /// Exact contribution of one pair of cloud points.
    PairContribution pair_contribution(std::size_t i, std::size_t j)
    {
        NearestCellCache cache(tree_, origin_, cache_cell_, per_axis_);
        SegmentProbe probe(cloud_, cloud_[i], cloud_[j]);
        return {0.5 * std::sqrt(dist2_unchecked(cloud_[i], cloud_[j])), exact_pair(probe, cache, i, j)};
    }

private:
    struct PairRef
    {
        std::uint32_t i, j;
    };
    struct TripleRef
    {
        std::uint32_t i, j, k;
        double rad;
    };
    struct Candidate
    {
        double bound;
        std::uint32_t i, j;
    };

    static constexpr int kCoarseRounds = 3;  // first pass over a whole bin
    static constexpr int kTightenRounds = 32; // before exact evaluation

    std::size_t bin_of(double rad) const
    {
        return static_cast<std::size_t>(std::lower_bound(grid_.begin(), grid_.end(), rad) - grid_.begin());
    }

    void bin_simplices()
    {
        const double max_scale = grid_.back();
        const double reach2 = 4.0 * max_scale * max_scale;
        pair_bins_.assign(grid_.size(), {});
        triple_bins_.assign(grid_.size(), {});
        std::vector<std::vector<std::uint32_t>> nbrs;
        if (order_ == 3)
            nbrs.resize(cloud_.size());

        const SpatialIndex index(cloud_, 2.0 * max_scale);
        index.for_each_near_pair([&](std::uint32_t i, std::uint32_t j) {
            const double d2 = dist2_unchecked(cloud_[i], cloud_[j]);
            if (d2 == 0.0)
                return; // duplicate point: its segment contributes 0
            const std::size_t b = bin_of(0.5 * std::sqrt(d2));
            if (b < grid_.size())
                pair_bins_[b].push_back({i, j});
            if (order_ == 3 && d2 <= reach2 * (1.0 + 1e-12))
                nbrs[i].push_back(j);
        });

        if (order_ != 3)
            return;
        for (auto& list : nbrs)
            std::sort(list.begin(), list.end());
        for (std::uint32_t i = 0; i < nbrs.size(); ++i)
        {
            const auto& ni = nbrs[i];
            for (std::size_t a = 0; a < ni.size(); ++a)
                for (std::size_t c = a + 1; c < ni.size(); ++c)
                {
                    const std::uint32_t j = ni[a], k = ni[c];
                    if (!std::binary_search(nbrs[j].begin(), nbrs[j].end(), k))
                        continue;
                    const double rad = triangle_enclosing_radius(cloud_[i], cloud_[j], cloud_[k]);
                    const std::size_t b = bin_of(rad);
                    if (b < grid_.size())
                        triple_bins_[b].push_back({i, j, k, rad});
                }
        }
    }

    double bound_pair(SegmentProbe& probe, NearestCellCache& cache, std::uint32_t i, std::uint32_t j,
                      double enough = -1.0, int rounds = kTightenRounds)
    {
        probe.reset(cloud_[i], cloud_[j]);
        probe.add(i);
        probe.add(j);
        return probe.tighten(cache, rounds, enough);
    }

    // Exact when the result exceeds `floor`; otherwise at or below it.
    double exact_pair(SegmentProbe& probe, NearestCellCache& cache, std::size_t i, std::size_t j,
                      double floor = -1.0)
    {
        bound_pair(probe, cache, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), floor);
        return probe.certify(tree_, floor).d_star;
    }

    double triple_farthest(const TripleRef& t, double floor_value)
    {
        const int res = triple_grid_;
        const std::size_t d = cloud_.dim();
        PointView a = cloud_[t.i], b = cloud_[t.j], c = cloud_[t.k];
        std::vector<double> y(d);
        double best = floor_value;
        for (int p = 0; p <= res; ++p)
            for (int q = 0; q <= res - p; ++q)
            {
                const int r = res - p - q;
                for (std::size_t m = 0; m < d; ++m)
                    y[m] = (p * a[m] + q * b[m] + r * c[m]) / res;
                // only a strictly larger distance matters
                if (auto hit = tree_.nearest(y, std::numeric_limits<double>::infinity()); hit)
                    best = std::max(best, std::sqrt(hit->dist2));
            }
        return best;
    }

    double sweep_bin(std::size_t b, double running)
    {
        double best = running;
        const auto& pairs = pair_bins_[b];
        // pairs that cannot exceed `running` are skipped: farthest <= half length
        const double skip_below = running * (1.0 - 1e-9);

        std::vector<std::vector<Candidate>> found(workers_);
        parallel_for(pairs.size(), workers_, [&](std::size_t w, std::size_t begin, std::size_t end) {
            NearestCellCache& cache = cache_for(w);
            SegmentProbe probe(cloud_, cloud_[0], cloud_[0]);
            auto& out = found[w];
            for (std::size_t p = begin; p < end; ++p)
            {
                const auto [i, j] = pairs[p];
                const double half = 0.5 * std::sqrt(dist2_unchecked(cloud_[i], cloud_[j]));
                if (half < skip_below)
                    continue;
                const double bound = bound_pair(probe, cache, i, j, running, kCoarseRounds) * (1.0 + 1e-12);
                if (bound > running)
                    out.push_back({bound, i, j});
            }
        });
        std::vector<Candidate> cands;
        for (auto& f : found)
            cands.insert(cands.end(), f.begin(), f.end());
        std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
            return x.bound > y.bound || (x.bound == y.bound && (x.i < y.i || (x.i == y.i && x.j < y.j)));
        });

        SegmentProbe probe(cloud_, cloud_[0], cloud_[0]);
        NearestCellCache& cache = cache_for(0);
        for (const auto& c : cands)
        {
            if (c.bound <= best)
                break;
            best = std::max(best, exact_pair(probe, cache, c.i, c.j, best));
        }

        for (const auto& t : triple_bins_[b])
        {
            if (t.rad <= best)
                continue;
            best = std::max(best, triple_farthest(t, best));
        }
        return best;
    }

    NearestCellCache& cache_for(std::size_t w) { return caches_.at(w); }

    const PointCloud& cloud_;
    std::vector<double> grid_;
    int order_;
    int triple_grid_;
    std::size_t workers_;
    KdTree tree_;
    double cache_cell_ = 1.0;
    std::int64_t per_axis_ = 1;
    std::vector<double> origin_;
    std::vector<NearestCellCache> caches_;
    std::vector<std::vector<PairRef>> pair_bins_;
    std::vector<std::vector<TripleRef>> triple_bins_;
};

} // namespace detail

namespace detail {

inline std::size_t resolve_workers(const DefectConfig& config)
{
    return config.workers == 0 ? worker_count() : config.workers;
}

} // namespace detail

/// Scale grid a config resolves to for a given cloud.
inline std::vector<double> resolve_grid(const PointCloud& cloud, const DefectConfig& config)
{
    config.validate();
    if (!config.grid.empty())
        return config.grid;
    double max_scale = config.max_scale.value_or(0.5 * diameter(cloud));
    if (!(max_scale > 0.0))
        max_scale = 1.0; // every point coincides; h vanishes at all scales
    return uniform_grid(max_scale, config.grid_size);
}

/**
 * Convexity defect profile of a cloud on the configured grid.
 *
 * Order 2 takes the supremum over every pair's segment exactly; order 3 also
 * folds in triangles sampled on a barycentric lattice. Both are lower bounds
 * of the full defect function, which ranges over all subsets.
 */
inline DefectProfile defect_profile(const PointCloud& cloud, const DefectConfig& config)
{
    auto grid = resolve_grid(cloud, config);
    detail::DefectEngine engine(cloud, std::move(grid), config.order, config.triple_grid,
                                detail::resolve_workers(config));
    return engine.run();
}

/// h at a single scale t; equals defect_profile at t when t is a grid scale.
inline double defect_at(const PointCloud& cloud, double t, const DefectConfig& config)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InputError("defect_at: scale must be finite and nonnegative");
    DefectConfig single = config;
    single.grid.clear();
    single.max_scale.reset();
    single.validate();
    if (t == 0.0)
        return 0.0;
    detail::DefectEngine engine(cloud, {t}, config.order, config.triple_grid, detail::resolve_workers(config));
    return engine.run().values().back();
}

} // namespace reachest

#endif
