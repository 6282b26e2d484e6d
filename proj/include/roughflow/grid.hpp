#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace roughflow {

/// Uniform tensor grid on the unit torus R^n / Z^n, n = 1 or 2.
///
/// Nodes are stored row-major over (axis 0, axis 1): node (i0, i1) has flat
/// index i0 * N + i1 and coordinates (i0 * h, i1 * h).
class PeriodicGrid {
public:
    PeriodicGrid(int dim, int points_per_axis);

    int dim() const noexcept { return dim_; }
    int points_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    std::size_t node_count() const noexcept { return count_; }

    std::size_t index(int i0, int i1 = 0) const noexcept {
        return dim_ == 1 ? static_cast<std::size_t>(i0)
                         : static_cast<std::size_t>(i0) * n_ + i1;
    }
    std::array<int, 2> multi_index(std::size_t node) const noexcept {
        if (dim_ == 1) return {static_cast<int>(node), 0};
        return {static_cast<int>(node / n_), static_cast<int>(node % n_)};
    }
    /// Torus coordinates in [0, 1); the unused second entry is 0 when dim == 1.
    std::array<double, 2> coordinate(std::size_t node) const noexcept {
        const auto m = multi_index(node);
        return {m[0] * h_, m[1] * h_};
    }
    /// Volume element h^dim used by every discrete integral.
    double cell_volume() const noexcept { return dim_ == 1 ? h_ : h_ * h_; }

    PeriodicGrid refined() const { return PeriodicGrid(dim_, 2 * n_); }

    friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) noexcept {
        return a.dim_ == b.dim_ && a.n_ == b.n_;
    }

private:
    int dim_;
    int n_;
    double h_;
    std::size_t count_;
};

/// Signed integer frequency of DFT slot `i` on an axis with `n` points,
/// in [-n/2, n/2).
constexpr int wave_number(int i, int n) noexcept { return i < n / 2 ? i : i - n; }

/// Wraps a real coordinate into [0, 1).
double wrap_unit(double x) noexcept;

/// Signed minimum-image displacement b - a on the unit circle, in [-1/2, 1/2).
double periodic_delta(double a, double b) noexcept;

}  // namespace roughflow
