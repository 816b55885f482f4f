#ifndef REACHEST_GEOM_SPATIAL_INDEX_HPP
#define REACHEST_GEOM_SPATIAL_INDEX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "metric.hpp"
#include "point.hpp"

namespace reachest {

/**
 * Uniform grid over a point cloud: lattice cell -> indices of the points it
 * holds. Every point lives in exactly one bucket, the cell containing it at
 * resolution cell_size.
 */
class SpatialIndex
{
public:
    using Cell = std::vector<std::int64_t>;

    SpatialIndex(const PointCloud& cloud, double cell_size)
        : cell_size_(cell_size), dim_(cloud.dim()), count_(cloud.size())
    {
        if (!(cell_size > 0.0) || !std::isfinite(cell_size))
            throw InputError("SpatialIndex: cell size must be positive and finite");
        lo_.assign(dim_, std::numeric_limits<std::int64_t>::max());
        hi_.assign(dim_, std::numeric_limits<std::int64_t>::min());
        for (std::size_t i = 0; i < cloud.size(); ++i)
        {
            Cell c = cell_of(cloud[i]);
            for (std::size_t k = 0; k < dim_; ++k)
            {
                lo_[k] = std::min(lo_[k], c[k]);
                hi_[k] = std::max(hi_[k], c[k]);
            }
            buckets_[std::move(c)].push_back(static_cast<std::uint32_t>(i));
        }
    }

    double cell_size() const noexcept { return cell_size_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t point_count() const noexcept { return count_; }
    std::size_t bucket_count() const noexcept { return buckets_.size(); }

    Cell cell_of(PointView p) const
    {
        Cell c(dim_);
        for (std::size_t k = 0; k < dim_; ++k)
            c[k] = static_cast<std::int64_t>(std::floor(p[k] / cell_size_));
        return c;
    }

    /// Indices in the given cell, or nullptr for an empty cell.
    const std::vector<std::uint32_t>* bucket(const Cell& c) const
    {
        auto it = buckets_.find(c);
        return it == buckets_.end() ? nullptr : &it->second;
    }

    template <typename F>
    void for_each_bucket(F&& f) const
    {
        for (const auto& [cell, members] : buckets_)
            f(cell, members);
    }

    const Cell& occupied_lo() const noexcept { return lo_; }
    const Cell& occupied_hi() const noexcept { return hi_; }

    /**
     * Calls f(i, j), i < j, once for every pair of points lying in the same or
     * in adjacent cells. Every pair at distance <= cell_size is visited.
     */
    template <typename F>
    void for_each_near_pair(F&& f) const
    {
        // 3^D neighbour offsets; for large D one bucket per point is likely and
        // the offset walk dominates, so scan all pairs instead.
        if (dim_ > 8)
        {
            for (std::uint32_t i = 0; i < count_; ++i)
                for (std::uint32_t j = i + 1; j < count_; ++j)
                    f(i, j);
            return;
        }
        std::vector<Cell> offsets;
        Cell off(dim_, -1);
        while (true)
        {
            offsets.push_back(off);
            std::size_t k = 0;
            while (k < dim_ && off[k] == 1)
                off[k++] = -1;
            if (k == dim_)
                break;
            ++off[k];
        }
        Cell nb(dim_);
        for (const auto& [cell, members] : buckets_)
        {
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b)
                    emit(f, members[a], members[b]);
            for (const auto& o : offsets)
            {
                for (std::size_t k = 0; k < dim_; ++k)
                    nb[k] = cell[k] + o[k];
                if (!(cell < nb)) // each unordered cell pair once
                    continue;
                const auto* other = bucket(nb);
                if (!other)
                    continue;
                for (auto i : members)
                    for (auto j : *other)
                        emit(f, i, j);
            }
        }
    }

private:
    struct CellHash
    {
        std::size_t operator()(const Cell& c) const noexcept
        {
            std::uint64_t h = 0x9E3779B97F4A7C15ull;
            for (auto v : c)
            {
                h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            }
            return static_cast<std::size_t>(h);
        }
    };

    template <typename F>
    static void emit(F& f, std::uint32_t i, std::uint32_t j)
    {
        if (i < j)
            f(i, j);
        else
            f(j, i);
    }

    double cell_size_;
    std::size_t dim_;
    std::size_t count_;
    Cell lo_, hi_;
    std::unordered_map<Cell, std::vector<std::uint32_t>, CellHash> buckets_;
};

/**
 * Distance from `query` to the nearest cloud point, by expanding-ring search
 * over the grid. Ring k holds the cells at Chebyshev cell-distance k from the
 * query's cell; anything beyond ring k is at least k * cell_size away, which
 * bounds the search.
 */
inline double nearest_dist(const SpatialIndex& index, const PointCloud& cloud, PointView query)
{
    require_same_dim(query.size(), cloud.dim(), "nearest_dist");
    require_same_dim(index.dim(), cloud.dim(), "nearest_dist");
    const std::size_t d = cloud.dim();
    const auto home = index.cell_of(query);

    // Largest ring that can still contain occupied cells.
    std::int64_t max_ring = 0;
    for (std::size_t k = 0; k < d; ++k)
    {
        max_ring = std::max(max_ring, home[k] - index.occupied_lo()[k]);
        max_ring = std::max(max_ring, index.occupied_hi()[k] - home[k]);
    }

    double best2 = std::numeric_limits<double>::infinity();
    SpatialIndex::Cell cell(d), off(d);
    for (std::int64_t ring = 0; ring <= max_ring; ++ring)
    {
        std::fill(off.begin(), off.end(), -ring);
        while (true)
        {
            std::int64_t cheb = 0;
            for (auto o : off)
                cheb = std::max<std::int64_t>(cheb, o < 0 ? -o : o);
            if (cheb == ring)
            {
                for (std::size_t k = 0; k < d; ++k)
                    cell[k] = home[k] + off[k];
                if (const auto* members = index.bucket(cell))
                    for (auto i : *members)
                        best2 = std::min(best2, dist2_unchecked(query, cloud[i]));
            }
            std::size_t k = 0;
            while (k < d && off[k] == ring)
                off[k++] = -ring;
            if (k == d)
                break;
            ++off[k];
        }
        const double reach_of_ring = static_cast<double>(ring) * index.cell_size();
        if (best2 <= reach_of_ring * reach_of_ring)
            break;
    }
    return std::sqrt(best2);
}

} // namespace reachest

#endif
