#pragma once

#include <vector>

#include "roughflow/field.hpp"

namespace roughflow {

/// Standard bump exp(-1/(1 - |z/r|^2)) supported in the ball of radius r.
struct Mollifier {
    double radius = 0.25;

    /// Unnormalized profile value at distance `dist`.
    double profile(double dist) const noexcept;
};

/// Smallest eps whose scaled support radius eps * r spans two grid cells.
double min_admissible_eps(const PeriodicGrid& grid, const Mollifier& m = {});

/// Sampled kernel rho_eps at every node (minimum-image distance to the
/// origin), renormalized so that sum rho h^n = 1.
/// Throws ResolutionError when eps * r < 2h.
ScalarField kernel_samples(const PeriodicGrid& grid, double eps, const Mollifier& m = {});

/// Fourier multiplier of C_eps: discrete transform of the kernel samples,
/// entry 0 set to exactly 1.
std::vector<Complex> kernel_multiplier(const PeriodicGrid& grid, double eps, const Mollifier& m = {});

/// C_eps f as a periodic convolution.
ScalarField mollify(const ScalarField& f, double eps, const Mollifier& m = {});
DiscreteVectorField mollify(const DiscreteVectorField& b, double eps, const Mollifier& m = {});

/// C_eps f when eps is admissible on the grid, f itself otherwise
/// (an unresolved kernel is a discrete delta).
ScalarField mollify_or_identity(const ScalarField& f, double eps, const Mollifier& m = {});
DiscreteVectorField mollify_or_identity(const DiscreteVectorField& b, double eps, const Mollifier& m = {});

bool is_resolved(const PeriodicGrid& grid, double eps, const Mollifier& m = {});

}  // namespace roughflow
