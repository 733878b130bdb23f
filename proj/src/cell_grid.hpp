#ifndef GNMN_CELL_GRID_HPP
#define GNMN_CELL_GRID_HPP

#include "gnmn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace gnmn::detail {

// Uniform bucket grid over the bounding box of a point set. Cells are at least
// `min_cell` wide, so every point within `min_cell` of a query point lies in
// the 3x3 block around the query's cell. Indices inside a cell are ascending.
class CellGrid {
public:
    CellGrid(std::span<const Point2D> points, double min_cell)
        : points_(points)
    {
        if (points.empty())
            return;
        auto [xlo, xhi] = std::minmax_element(points.begin(), points.end(),
                                              [](auto& a, auto& b) { return a.x < b.x; });
        auto [ylo, yhi] = std::minmax_element(points.begin(), points.end(),
                                              [](auto& a, auto& b) { return a.y < b.y; });
        x0_ = xlo->x;
        y0_ = ylo->y;
        const double w = xhi->x - x0_;
        const double h = yhi->y - y0_;

        // keep the cell count O(n) even for tiny radii
        const double cap = 4.0 * static_cast<double>(points.size()) + 16.0;
        double cell = std::max({min_cell, std::sqrt(w * h / cap), std::max(w, h) / cap});
        if (!(cell > 0.0))
            cell = 1.0;
        cell_ = cell;
        nx_ = static_cast<std::size_t>(w / cell_) + 1;
        ny_ = static_cast<std::size_t>(h / cell_) + 1;

        std::vector<std::size_t> cell_of(points.size());
        start_.assign(nx_ * ny_ + 1, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            cell_of[i] = index(cx(points[i].x), cy(points[i].y));
            ++start_[cell_of[i] + 1];
        }
        for (std::size_t c = 0; c < nx_ * ny_; ++c)
            start_[c + 1] += start_[c];
        members_.resize(points.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < points.size(); ++i)
            members_[fill[cell_of[i]]++] = i;
    }

    double cell_size() const { return cell_; }

    // Calls fn(j) for every point j in the 3x3 cell block around point i,
    // including i itself. Order: cells row-major, then ascending j.
    template <class Fn>
    void for_each_candidate(std::size_t i, Fn&& fn) const
    {
        const std::size_t ix = cx(points_[i].x);
        const std::size_t iy = cy(points_[i].y);
        const std::size_t ylo = iy > 0 ? iy - 1 : 0;
        const std::size_t yhi = std::min(ny_ - 1, iy + 1);
        const std::size_t xlo = ix > 0 ? ix - 1 : 0;
        const std::size_t xhi = std::min(nx_ - 1, ix + 1);
        for (std::size_t y = ylo; y <= yhi; ++y)
            for (std::size_t x = xlo; x <= xhi; ++x) {
                const std::size_t c = index(x, y);
                for (std::size_t k = start_[c]; k < start_[c + 1]; ++k)
                    fn(members_[k]);
            }
    }

private:
    std::size_t cx(double x) const
    {
        return std::min(nx_ - 1, static_cast<std::size_t>((x - x0_) / cell_));
    }
    std::size_t cy(double y) const
    {
        return std::min(ny_ - 1, static_cast<std::size_t>((y - y0_) / cell_));
    }
    std::size_t index(std::size_t x, std::size_t y) const { return y * nx_ + x; }

    std::span<const Point2D> points_;
    double x0_ = 0.0;
    double y0_ = 0.0;
    double cell_ = 1.0;
    std::size_t nx_ = 1;
    std::size_t ny_ = 1;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> members_;
};

} // namespace gnmn::detail

#endif // GNMN_CELL_GRID_HPP
