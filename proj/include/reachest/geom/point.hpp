#ifndef REACHEST_GEOM_POINT_HPP
#define REACHEST_GEOM_POINT_HPP

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "../errors.hpp"

namespace reachest {

/// Non-owning view of one point's coordinates.
using PointView = std::span<const double>;

/**
 * A point of the ambient Euclidean space R^D.
 *
 * Coordinates are validated on construction: D >= 1 and every coordinate
 * finite.
 */
class Point
{
public:
    Point() = default;

    explicit Point(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }

    Point(std::initializer_list<double> coords) : coords_(coords) { validate(); }

    explicit Point(PointView view) : coords_(view.begin(), view.end()) { validate(); }

    std::size_t dim() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    PointView view() const noexcept { return coords_; }
    operator PointView() const noexcept { return coords_; }
    const std::vector<double>& coords() const noexcept { return coords_; }

    friend bool operator==(const Point&, const Point&) = default;

private:
    void validate() const
    {
        if (coords_.empty())
            throw InputError("point must have at least one coordinate");
        for (double c : coords_)
            if (!std::isfinite(c))
                throw InputError("point coordinates must be finite");
    }

    std::vector<double> coords_;
};

/**
 * A finite, nonempty set of points of common dimension, stored row-major in
 * one contiguous buffer. Immutable after construction.
 */
class PointCloud
{
public:
    PointCloud(std::vector<double> flat, std::size_t dim) : data_(std::move(flat)), dim_(dim)
    {
        if (dim_ == 0)
            throw InputError("point cloud dimension must be at least 1");
        if (data_.empty())
            throw InputError("point cloud must be nonempty");
        if (data_.size() % dim_ != 0)
            throw InputError("flat coordinate buffer is not a multiple of the dimension");
        for (double c : data_)
            if (!std::isfinite(c))
                throw InputError("point cloud contains a non-finite coordinate");
    }

    explicit PointCloud(const std::vector<Point>& points)
        : PointCloud(flatten(points), points.empty() ? 1 : points.front().dim())
    {
    }

    PointCloud(std::initializer_list<Point> points) : PointCloud(std::vector<Point>(points)) {}

    std::size_t size() const noexcept { return data_.size() / dim_; }
    std::size_t dim() const noexcept { return dim_; }

    PointView operator[](std::size_t i) const noexcept
    {
        return PointView(data_.data() + i * dim_, dim_);
    }

    const std::vector<double>& flat() const noexcept { return data_; }

    std::vector<Point> points() const
    {
        std::vector<Point> out;
        out.reserve(size());
        for (std::size_t i = 0; i < size(); ++i)
            out.emplace_back((*this)[i]);
        return out;
    }

    friend bool operator==(const PointCloud&, const PointCloud&) = default;

private:
    static std::vector<double> flatten(const std::vector<Point>& points)
    {
        std::vector<double> flat;
        if (points.empty())
            return flat;
        const std::size_t d = points.front().dim();
        flat.reserve(points.size() * d);
        for (const auto& p : points)
        {
            if (p.dim() != d)
                throw InputError("all points of a cloud must share one dimension");
            flat.insert(flat.end(), p.coords().begin(), p.coords().end());
        }
        return flat;
    }

    std::vector<double> data_;
    std::size_t dim_;
};

inline void require_same_dim(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
        throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
}

} // namespace reachest

#endif
