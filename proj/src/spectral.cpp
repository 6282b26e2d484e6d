#include "roughflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace roughflow {

namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(const std::vector<int>& shape, bool forward) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(shape, forward);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::size_t total = 1;
        for (int n : shape) total *= static_cast<std::size_t>(n);
        // FFTW_ESTIMATE leaves the scratch array untouched; UNALIGNED lets the
        // plan run on any std::vector storage through fftw_execute_dft.
        fftw_complex* scratch = fftw_alloc_complex(total);
        fftw_plan plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), scratch, scratch,
                                       forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        if (plan == nullptr) throw std::runtime_error("fft: FFTW failed to create a plan");
        plans_.emplace(std::move(key), plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::vector<int>, bool>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

std::vector<int> grid_shape(const PeriodicGrid& g) {
    return std::vector<int>(static_cast<std::size_t>(g.dim()), g.points_per_axis());
}

}  // namespace

void fft_in_place(std::span<Complex> data, std::span<const int> shape, bool forward) {
    std::vector<int> s(shape.begin(), shape.end());
    std::size_t total = 1;
    for (int n : s) total *= static_cast<std::size_t>(n);
    if (total != data.size()) throw std::invalid_argument("fft: data size does not match shape");
    fftw_plan plan = plan_cache().get(s, forward);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

namespace spectral {

std::vector<Complex> forward(const ScalarField& f) {
    std::vector<Complex> c(f.values().begin(), f.values().end());
    const auto shape = grid_shape(f.grid());
    fft_in_place(c, shape, true);
    const double scale = 1.0 / static_cast<double>(c.size());
    for (auto& z : c) z *= scale;
    return c;
}

ScalarField inverse(const PeriodicGrid& grid, std::vector<Complex> coefficients) {
    const auto shape = grid_shape(grid);
    fft_in_place(coefficients, shape, false);
    return ScalarField(grid, std::move(coefficients));
}

ScalarField apply_multiplier(const ScalarField& f, std::span<const Complex> multiplier) {
    auto c = forward(f);
    if (multiplier.size() != c.size()) throw std::invalid_argument("apply_multiplier: size mismatch");
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= multiplier[i];
    return inverse(f.grid(), std::move(c));
}

std::vector<double> squared_frequencies(const PeriodicGrid& grid) {
    const int n = grid.points_per_axis();
    std::vector<double> out(grid.node_count());
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto m = grid.multi_index(i);
        double s = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double k = two_pi * wave_number(m[a], n);
            s += k * k;
        }
        out[i] = s;
    }
    return out;
}

std::vector<Complex> derivative_multiplier(const PeriodicGrid& grid, int axis) {
    if (axis < 0 || axis >= grid.dim()) throw std::invalid_argument("derivative: axis out of range");
    const int n = grid.points_per_axis();
    std::vector<Complex> out(grid.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int slot = grid.multi_index(i)[axis];
        const int k = wave_number(slot, n);
        out[i] = (k == -n / 2) ? Complex(0.0) : Complex(0.0, 2.0 * std::numbers::pi * k);
    }
    return out;
}

ScalarField derivative(const ScalarField& f, int axis) {
    return apply_multiplier(f, derivative_multiplier(f.grid(), axis));
}

ScalarField heat(const ScalarField& f, double kappa_times_t) {
    const auto k2 = squared_frequencies(f.grid());
    std::vector<Complex> m(k2.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(-kappa_times_t * k2[i]);
    return apply_multiplier(f, m);
}

}  // namespace spectral

ScalarField divergence(const DiscreteVectorField& b) {
    const auto& g = b.grid();
    std::vector<Complex> acc(g.node_count(), 0.0);
    for (int a = 0; a < b.dim(); ++a) {
        const auto c = spectral::forward(b.component(a));
        const auto m = spectral::derivative_multiplier(g, a);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += m[i] * c[i];
    }
    return spectral::inverse(g, std::move(acc));
}

DiscreteVectorField gradient(const ScalarField& f) {
    const auto c = spectral::forward(f);
    std::vector<ScalarField> comps;
    for (int a = 0; a < f.grid().dim(); ++a) {
        const auto m = spectral::derivative_multiplier(f.grid(), a);
        std::vector<Complex> d(c.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = m[i] * c[i];
        comps.push_back(spectral::inverse(f.grid(), std::move(d)));
    }
    return DiscreteVectorField(std::move(comps));
}

}  // namespace roughflow
