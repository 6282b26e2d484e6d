#pragma once

#include <limits>

#include "roughflow/field.hpp"

namespace roughflow {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (sum |f|^p h^n)^(1/p), or max |f| for p = infinity. Throws for p < 1.
double lp_norm(const ScalarField& f, double p);

/// lp_norm(f - g, p) without materializing the difference.
double lp_distance(const ScalarField& f, const ScalarField& g, double p);

/// H^{-s} norm: (sum_k (1 + |2 pi k|^2)^{-s} |f_k|^2)^{1/2}, f_0 = mean of f.
double negative_sobolev_norm(const ScalarField& f, double s);

/// Anisotropic discrete total variation with periodic wraparound:
/// sum over nodes and axes of |f(node + e_axis) - f(node)| h^{n-1}.
/// Requires a real field.
double discrete_tv(const ScalarField& f);

/// Discrete integral sum f h^n.
Complex integral(const ScalarField& f);

}  // namespace roughflow
