#include "roughflow/mollifier.hpp"

#include <cmath>
#include <sstream>

#include "roughflow/errors.hpp"
#include "roughflow/spectral.hpp"

namespace roughflow {

double Mollifier::profile(double dist) const noexcept {
    const double z = dist / radius;
    if (z >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - z * z));
}

double min_admissible_eps(const PeriodicGrid& grid, const Mollifier& m) {
    return 2.0 * grid.spacing() / m.radius;
}

bool is_resolved(const PeriodicGrid& grid, double eps, const Mollifier& m) {
    return eps * m.radius >= 2.0 * grid.spacing() * (1.0 - 1e-12);
}

ScalarField kernel_samples(const PeriodicGrid& grid, double eps, const Mollifier& m) {
    if (!(m.radius > 0.0 && m.radius < 0.5)) throw GuardError("mollifier: radius must lie in (0, 1/2)");
    if (!(eps > 0.0 && eps <= 1.0)) throw GuardError("mollify: eps must lie in (0, 1]");
    if (!is_resolved(grid, eps, m)) {
        std::ostringstream msg;
        msg << "mollify: eps = " << eps << " under-resolved on N = " << grid.points_per_axis()
            << "; minimal admissible eps is " << min_admissible_eps(grid, m);
        throw ResolutionError(msg.str(), min_admissible_eps(grid, m));
    }
    const Mollifier scaled{eps * m.radius};
    ScalarField w(grid);
    double total = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const auto x = grid.coordinate(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double d = periodic_delta(0.0, x[a]);
            r2 += d * d;
        }
        const double v = scaled.profile(std::sqrt(r2));
        w[i] = v;
        total += v;
    }
    w *= 1.0 / (total * grid.cell_volume());
    return w;
}

std::vector<Complex> kernel_multiplier(const PeriodicGrid& grid, double eps, const Mollifier& m) {
    auto w = kernel_samples(grid, eps, m);
    auto c = spectral::forward(w);
    // h^n = 1/N^n, so forward() already yields sum rho h^n e^{-2 pi i k x};
    // the kernel is even, drop the roundoff imaginary part
    for (auto& z : c) z = z.real();
    c[0] = 1.0;
    return c;
}

ScalarField mollify(const ScalarField& f, double eps, const Mollifier& m) {
    return spectral::apply_multiplier(f, kernel_multiplier(f.grid(), eps, m));
}

DiscreteVectorField mollify(const DiscreteVectorField& b, double eps, const Mollifier& m) {
    const auto mult = kernel_multiplier(b.grid(), eps, m);
    std::vector<ScalarField> comps;
    for (const auto& c : b.components()) comps.push_back(spectral::apply_multiplier(c, mult));
    return DiscreteVectorField(std::move(comps));
}

ScalarField mollify_or_identity(const ScalarField& f, double eps, const Mollifier& m) {
    return is_resolved(f.grid(), eps, m) ? mollify(f, eps, m) : f;
}

DiscreteVectorField mollify_or_identity(const DiscreteVectorField& b, double eps, const Mollifier& m) {
    return is_resolved(b.grid(), eps, m) ? mollify(b, eps, m) : b;
}

}  // namespace roughflow
