#ifndef REACHEST_GEOM_METRIC_HPP
#define REACHEST_GEOM_METRIC_HPP

#include <algorithm>
#include <cmath>

#include "kd_tree.hpp"
#include "point.hpp"

namespace reachest {

/// Squared Euclidean distance without dimension checks (inner loops only).
inline double dist2_unchecked(PointView p, PointView q) noexcept
{
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
    {
        const double e = p[k] - q[k];
        s += e * e;
    }
    return s;
}

/// Euclidean distance. Throws InputError on dimension mismatch.
inline double dist(PointView p, PointView q)
{
    require_same_dim(p.size(), q.size(), "dist");
    return std::sqrt(dist2_unchecked(p, q));
}

/// d(p, X): distance from a point to a cloud, by kd-tree.
inline double dist_to_cloud(PointView p, const KdTree& tree)
{
    return std::sqrt(tree.nearest(p)->dist2);
}

/// Asymmetric Hausdorff distance H(A|B) = max over a in A of d(a, B).
inline double hausdorff_asym(const PointCloud& a, const PointCloud& b)
{
    require_same_dim(a.dim(), b.dim(), "hausdorff_asym");
    const KdTree tree(b);
    double worst2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst2 = std::max(worst2, tree.nearest(a[i])->dist2);
    return std::sqrt(worst2);
}

/// Symmetric Hausdorff distance max{H(A|B), H(B|A)}.
inline double hausdorff(const PointCloud& a, const PointCloud& b)
{
    return std::max(hausdorff_asym(a, b), hausdorff_asym(b, a));
}

/// Largest pairwise distance, by exhaustive scan.
inline double diameter(const PointCloud& cloud)
{
    double best2 = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (std::size_t j = i + 1; j < cloud.size(); ++j)
            best2 = std::max(best2, dist2_unchecked(cloud[i], cloud[j]));
    return std::sqrt(best2);
}

} // namespace reachest

#endif
