#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "roughflow/grid.hpp"

namespace roughflow {

using Complex = std::complex<double>;

/// Complex node data on a periodic grid. Real fields carry zero imaginary parts.
class ScalarField {
public:
    explicit ScalarField(const PeriodicGrid& grid, Complex fill = 0.0);
    ScalarField(const PeriodicGrid& grid, std::vector<Complex> values);

    /// Samples `f(x, y)` at every node (y = 0 on 1-D grids).
    static ScalarField sample(const PeriodicGrid& grid,
                              const std::function<Complex(double, double)>& f);
    static ScalarField from_real(const PeriodicGrid& grid, std::span<const double> values);

    const PeriodicGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<Complex> values() noexcept { return values_; }
    std::span<const Complex> values() const noexcept { return values_; }
    Complex& operator[](std::size_t i) noexcept { return values_[i]; }
    const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }

    std::vector<double> real_part() const;
    /// True when every |imag| <= tol * max(1, max |value|).
    bool is_real(double tol = 1e-12) const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(const ScalarField& other);
    ScalarField& operator*=(Complex s);

    ScalarField conj() const;
    ScalarField map(const std::function<Complex(Complex)>& f) const;
    ScalarField map_real(const std::function<double(double)>& f) const;

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
    friend ScalarField operator*(Complex s, ScalarField a) { return a *= s; }

private:
    void require_same_grid(const ScalarField& other) const;

    PeriodicGrid grid_;
    std::vector<Complex> values_;
};

/// Real vector field with one component per torus axis.
class DiscreteVectorField {
public:
    explicit DiscreteVectorField(std::vector<ScalarField> components);

    const PeriodicGrid& grid() const noexcept { return components_.front().grid(); }
    int dim() const noexcept { return static_cast<int>(components_.size()); }
    const ScalarField& component(int axis) const { return components_.at(axis); }
    ScalarField& component(int axis) { return components_.at(axis); }
    const std::vector<ScalarField>& components() const noexcept { return components_; }

    /// max over nodes of the Euclidean speed.
    double sup_speed() const;
    DiscreteVectorField negated() const;

private:
    std::vector<ScalarField> components_;
};

}  // namespace roughflow
