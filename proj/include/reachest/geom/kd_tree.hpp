#ifndef REACHEST_GEOM_KD_TREE_HPP
#define REACHEST_GEOM_KD_TREE_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "point.hpp"

namespace reachest {

/**
 * Static kd-tree over a point cloud for exact nearest-neighbour and
 * fixed-radius queries.
 *
 * The tree keeps its own reordered copy of the coordinates, so it does not
 * borrow the cloud it was built from. Queries are const and may run
 * concurrently.
 */
class KdTree
{
public:
    struct Hit
    {
        std::size_t index; // index into the original cloud
        double dist2;
    };

    explicit KdTree(const PointCloud& cloud, std::size_t leaf_size = 8)
        : dim_(cloud.dim()), leaf_size_(std::max<std::size_t>(leaf_size, 1))
    {
        const std::size_t n = cloud.size();
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        nodes_.reserve(2 * n / leaf_size_ + 2);
        build(cloud, order, 0, n);
        index_ = std::move(order);
        coords_.resize(n * dim_);
        for (std::size_t i = 0; i < n; ++i)
        {
            auto p = cloud[index_[i]];
            std::copy(p.begin(), p.end(), coords_.begin() + i * dim_);
        }
    }

    std::size_t size() const noexcept { return index_.size(); }
    std::size_t dim() const noexcept { return dim_; }

    /**
     * Nearest point with squared distance in (min_dist2, bound2). Among equally
     * near points the first one met in the fixed traversal order wins, so the
     * answer is deterministic.
     */
    std::optional<Hit> nearest(PointView q,
                               double bound2 = std::numeric_limits<double>::infinity(),
                               double min_dist2 = -1.0) const
    {
        require_same_dim(q.size(), dim_, "KdTree::nearest");
        Hit best{0, bound2};
        bool found = false;
        nearest_rec(0, q, best, found, min_dist2);
        if (!found)
            return std::nullopt;
        best.index = index_[best.index];
        return best;
    }

    /// Calls f(index) for every point with squared distance <= radius2.
    template <typename F>
    void for_each_within(PointView q, double radius2, F&& f) const
    {
        require_same_dim(q.size(), dim_, "KdTree::for_each_within");
        within_rec(0, q, radius2, f);
    }

private:
    struct Node
    {
        std::uint32_t begin, end;
        std::uint32_t left = 0, right = 0;
        bool leaf = true;
    };

    std::uint32_t build(const PointCloud& cloud, std::vector<std::uint32_t>& order,
                        std::size_t begin, std::size_t end)
    {
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back(Node{static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(end)});
        // bounding box
        std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
        std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
        for (std::size_t i = begin; i < end; ++i)
        {
            auto p = cloud[order[i]];
            for (std::size_t k = 0; k < dim_; ++k)
            {
                lo[k] = std::min(lo[k], p[k]);
                hi[k] = std::max(hi[k], p[k]);
            }
        }
        boxes_.insert(boxes_.end(), lo.begin(), lo.end());
        boxes_.insert(boxes_.end(), hi.begin(), hi.end());

        if (end - begin <= leaf_size_)
            return id;

        std::size_t split_dim = 0;
        double widest = -1.0;
        for (std::size_t k = 0; k < dim_; ++k)
            if (hi[k] - lo[k] > widest)
            {
                widest = hi[k] - lo[k];
                split_dim = k;
            }
        if (widest <= 0.0)
            return id; // all points coincide

        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(mid),
                         order.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::uint32_t a, std::uint32_t b) {
                             const double va = cloud[a][split_dim], vb = cloud[b][split_dim];
                             return va < vb || (va == vb && a < b);
                         });
        const std::uint32_t left = build(cloud, order, begin, mid);
        const std::uint32_t right = build(cloud, order, mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
        nodes_[id].leaf = false;
        return id;
    }

    double box_dist2(std::uint32_t node, PointView q) const
    {
        const double* lo = boxes_.data() + 2 * dim_ * node;
        const double* hi = lo + dim_;
        double d2 = 0.0;
        for (std::size_t k = 0; k < dim_; ++k)
        {
            double e = 0.0;
            if (q[k] < lo[k])
                e = lo[k] - q[k];
            else if (q[k] > hi[k])
                e = q[k] - hi[k];
            d2 += e * e;
        }
        return d2;
    }

    double point_dist2(std::size_t slot, PointView q) const
    {
        const double* p = coords_.data() + slot * dim_;
        double d2 = 0.0;
        for (std::size_t k = 0; k < dim_; ++k)
        {
            const double e = p[k] - q[k];
            d2 += e * e;
        }
        return d2;
    }

    void nearest_rec(std::uint32_t id, PointView q, Hit& best, bool& found, double min_dist2) const
    {
        const Node& node = nodes_[id];
        if (node.leaf)
        {
            for (std::uint32_t s = node.begin; s < node.end; ++s)
            {
                const double d2 = point_dist2(s, q);
                if (d2 < best.dist2 && d2 > min_dist2)
                {
                    best = Hit{s, d2};
                    found = true;
                }
            }
            return;
        }
        const double dl = box_dist2(node.left, q);
        const double dr = box_dist2(node.right, q);
        const bool left_first = dl <= dr;
        const std::uint32_t first = left_first ? node.left : node.right;
        const std::uint32_t second = left_first ? node.right : node.left;
        const double d_first = left_first ? dl : dr;
        const double d_second = left_first ? dr : dl;
        if (d_first < best.dist2)
            nearest_rec(first, q, best, found, min_dist2);
        if (d_second < best.dist2)
            nearest_rec(second, q, best, found, min_dist2);
    }

    template <typename F>
    void within_rec(std::uint32_t id, PointView q, double radius2, F& f) const
    {
        if (box_dist2(id, q) > radius2)
            return;
        const Node& node = nodes_[id];
        if (node.leaf)
        {
            for (std::uint32_t s = node.begin; s < node.end; ++s)
                if (point_dist2(s, q) <= radius2)
                    f(static_cast<std::size_t>(index_[s]));
            return;
        }
        within_rec(node.left, q, radius2, f);
        within_rec(node.right, q, radius2, f);
    }

    std::size_t dim_;
    std::size_t leaf_size_;
    std::vector<Node> nodes_;
    std::vector<double> boxes_;         // per node: lo[dim], hi[dim]
    std::vector<std::uint32_t> index_;  // slot -> original index
    std::vector<double> coords_;        // slot-ordered coordinates
};

} // namespace reachest

#endif
