#include "roughflow/grid.hpp"

#include <cmath>

namespace roughflow {

PeriodicGrid::PeriodicGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("PeriodicGrid: dim must be 1 or 2, got " + std::to_string(dim));
    if (points_per_axis < 16 || (points_per_axis & (points_per_axis - 1)) != 0)
        throw std::invalid_argument("PeriodicGrid: points_per_axis must be a power of two >= 16, got " +
                                    std::to_string(points_per_axis));
    h_ = 1.0 / points_per_axis;
    count_ = dim == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
}

double wrap_unit(double x) noexcept {
    double r = x - std::floor(x);
    // floor can round x - floor(x) up to exactly 1 for tiny negative x
    return r >= 1.0 ? 0.0 : r;
}

double periodic_delta(double a, double b) noexcept {
    double d = b - a;
    d -= std::floor(d + 0.5);
    return d;
}

}  // namespace roughflow
