#include "roughflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughflow {

ScalarField::ScalarField(const PeriodicGrid& grid, Complex fill)
    : grid_(grid), values_(grid.node_count(), fill) {}

ScalarField::ScalarField(const PeriodicGrid& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
        throw std::invalid_argument("ScalarField: value count does not match grid node count");
}

ScalarField ScalarField::sample(const PeriodicGrid& grid,
                                const std::function<Complex(double, double)>& f) {
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const auto x = grid.coordinate(i);
        out.values_[i] = f(x[0], x[1]);
    }
    return out;
}

ScalarField ScalarField::from_real(const PeriodicGrid& grid, std::span<const double> values) {
    if (values.size() != grid.node_count())
        throw std::invalid_argument("ScalarField: value count does not match grid node count");
    std::vector<Complex> v(values.begin(), values.end());
    return ScalarField(grid, std::move(v));
}

std::vector<double> ScalarField::real_part() const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](Complex z) { return z.real(); });
    return out;
}

bool ScalarField::is_real(double tol) const {
    double scale = 1.0;
    for (const auto& z : values_) scale = std::max(scale, std::abs(z));
    return std::all_of(values_.begin(), values_.end(),
                       [&](Complex z) { return std::abs(z.imag()) <= tol * scale; });
}

void ScalarField::require_same_grid(const ScalarField& other) const {
    if (!(grid_ == other.grid_)) throw std::invalid_argument("ScalarField: grid mismatch");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(Complex s) {
    for (auto& z : values_) z *= s;
    return *this;
}

ScalarField ScalarField::conj() const {
    return map([](Complex z) { return std::conj(z); });
}

ScalarField ScalarField::map(const std::function<Complex(Complex)>& f) const {
    ScalarField out(grid_);
    std::transform(values_.begin(), values_.end(), out.values_.begin(), f);
    return out;
}

ScalarField ScalarField::map_real(const std::function<double(double)>& f) const {
    ScalarField out(grid_);
    std::transform(values_.begin(), values_.end(), out.values_.begin(),
                   [&](Complex z) { return Complex(f(z.real()), 0.0); });
    return out;
}

DiscreteVectorField::DiscreteVectorField(std::vector<ScalarField> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("DiscreteVectorField: no components");
    const auto& g = components_.front().grid();
    if (static_cast<int>(components_.size()) != g.dim())
        throw std::invalid_argument("DiscreteVectorField: component count must equal grid dimension");
    for (const auto& c : components_)
        if (!(c.grid() == g)) throw std::invalid_argument("DiscreteVectorField: components on different grids");
}

double DiscreteVectorField::sup_speed() const {
    double best = 0.0;
    const std::size_t n = grid().node_count();
    for (std::size_t i = 0; i < n; ++i) {
        double s2 = 0.0;
        for (const auto& c : components_) s2 += std::norm(c[i].real());
        best = std::max(best, std::sqrt(s2));
    }
    return best;
}

DiscreteVectorField DiscreteVectorField::negated() const {
    std::vector<ScalarField> comps = components_;
    for (auto& c : comps) c *= -1.0;
    return DiscreteVectorField(std::move(comps));
}

}  // namespace roughflow
