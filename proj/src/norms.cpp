#include "roughflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "roughflow/spectral.hpp"

namespace roughflow {

namespace {

template <class Value>
double lp_reduce(std::size_t n, double vol, double p, Value value) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, value(i));
        return m;
    }
    double s = 0.0;
    if (p == 1.0) {
        for (std::size_t i = 0; i < n; ++i) s += value(i);
        return s * vol;
    }
    if (p == 2.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double a = value(i);
            s += a * a;
        }
        return std::sqrt(s * vol);
    }
    for (std::size_t i = 0; i < n; ++i) s += std::pow(value(i), p);
    return std::pow(s * vol, 1.0 / p);
}

}  // namespace

double lp_norm(const ScalarField& f, double p) {
    const auto v = f.values();
    return lp_reduce(v.size(), f.grid().cell_volume(), p, [&](std::size_t i) { return std::abs(v[i]); });
}

double lp_distance(const ScalarField& f, const ScalarField& g, double p) {
    if (!(f.grid() == g.grid())) throw std::invalid_argument("lp_distance: grid mismatch");
    const auto a = f.values();
    const auto b = g.values();
    return lp_reduce(a.size(), f.grid().cell_volume(), p, [&](std::size_t i) { return std::abs(a[i] - b[i]); });
}

double negative_sobolev_norm(const ScalarField& f, double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("negative_sobolev_norm: s must be >= 0");
    const auto c = spectral::forward(f);
    const auto k2 = spectral::squared_frequencies(f.grid());
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += std::pow(1.0 + k2[i], -s) * std::norm(c[i]);
    return std::sqrt(acc);
}

double discrete_tv(const ScalarField& f) {
    if (!f.is_real(1e-10)) throw std::invalid_argument("discrete_tv: field must be real-valued");
    const auto& g = f.grid();
    const int n = g.points_per_axis();
    const double weight = g.dim() == 1 ? 1.0 : g.spacing();
    double tv = 0.0;
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) tv += std::abs(f[(i + 1) % n].real() - f[i].real());
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = f[g.index(i, j)].real();
                tv += std::abs(f[g.index((i + 1) % n, j)].real() - v);
                tv += std::abs(f[g.index(i, (j + 1) % n)].real() - v);
            }
    }
    return tv * weight;
}

Complex integral(const ScalarField& f) {
    Complex s = 0.0;
    for (const auto& z : f.values()) s += z;
    return s * f.grid().cell_volume();
}

}  // namespace roughflow
