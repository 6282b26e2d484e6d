#pragma once

#include <span>
#include <string>
#include <vector>

#include "roughflow/field.hpp"

namespace roughflow {

enum class Interp { linear, cubic };

std::string to_string(Interp i);
Interp interp_from_string(const std::string& s);

namespace kernels {

/// Periodic interpolation of node data at torus point (x, y).
/// Linear: (bi)linear, a convex combination. Cubic: 4-point Lagrange per axis.
double interpolate(const PeriodicGrid& g, std::span<const double> v, double x, double y, Interp kind);
Complex interpolate(const PeriodicGrid& g, std::span<const Complex> v, double x, double y, Interp kind);

/// Endpoint X_tau(node) of x' = b(x) for every node, by `substeps` RK4 steps of
/// size tau / substeps on the interpolated field; tau < 0 traces backward.
/// `b` holds one real array per axis; `out` receives dim coordinates per node in [0, 1).
void trace_serial(const PeriodicGrid& g, const std::vector<std::vector<double>>& b, double tau, int substeps,
                  Interp kind, std::span<double> out);
void trace_parallel(const PeriodicGrid& g, const std::vector<std::vector<double>>& b, double tau, int substeps,
                    Interp kind, std::span<double> out);

/// dst[node] = src interpolated at points[node].
void remap_serial(const PeriodicGrid& g, std::span<const Complex> src, std::span<const double> points, Interp kind,
                  std::span<Complex> dst);
void remap_parallel(const PeriodicGrid& g, std::span<const Complex> src, std::span<const double> points,
                    Interp kind, std::span<Complex> dst);

/// Transpose of remap: src[node] is spread onto the stencil of points[node]
/// with the interpolation weights. Serial only; the sum is order dependent.
void scatter_serial(const PeriodicGrid& g, std::span<const Complex> src, std::span<const double> points,
                    Interp kind, std::span<Complex> dst);
/// Threads an OpenMP region would use (1 when built without OpenMP).
int max_threads();

}  // namespace kernels
}  // namespace roughflow
