#include "roughflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace roughflow {

std::string to_string(Interp i) { return i == Interp::linear ? "linear" : "cubic"; }

Interp interp_from_string(const std::string& s) {
    if (s == "linear") return Interp::linear;
    if (s == "cubic") return Interp::cubic;
    throw std::invalid_argument("interp must be 'linear' or 'cubic', got '" + s + "'");
}

namespace kernels {

namespace {

struct Stencil {
    int base;
    double w[4];
};

// Cell index and weights for coordinate x on an axis of n points (n a power of two).
inline Stencil linear_stencil(double x, int n) {
    const double fx = (x - std::floor(x)) * n;
    int i = static_cast<int>(fx);
    const double s = fx - i;
    return {i & (n - 1), {1.0 - s, s, 0.0, 0.0}};
}

inline Stencil cubic_stencil(double x, int n) {
    const double fx = (x - std::floor(x)) * n;
    int i = static_cast<int>(fx);
    const double s = fx - i;
    const double sm = s - 1.0, sp = s + 1.0, s2 = s - 2.0;
    return {(i - 1) & (n - 1),
            {-s * sm * s2 / 6.0, sp * sm * s2 / 2.0, -sp * s * s2 / 2.0, sp * s * sm / 6.0}};
}

template <class T>
inline T interp_1d(const T* v, int n, double x, Interp kind) {
    const Stencil st = kind == Interp::linear ? linear_stencil(x, n) : cubic_stencil(x, n);
    const int taps = kind == Interp::linear ? 2 : 4;
    T acc{};
    for (int a = 0; a < taps; ++a) acc += st.w[a] * v[(st.base + a) & (n - 1)];
    return acc;
}

template <class T>
inline T interp_2d(const T* v, int n, double x, double y, Interp kind) {
    const bool lin = kind == Interp::linear;
    const Stencil sx = lin ? linear_stencil(x, n) : cubic_stencil(x, n);
    const Stencil sy = lin ? linear_stencil(y, n) : cubic_stencil(y, n);
    const int taps = lin ? 2 : 4;
    T acc{};
    for (int a = 0; a < taps; ++a) {
        const T* row = v + static_cast<std::size_t>((sx.base + a) & (n - 1)) * n;
        T r{};
        for (int c = 0; c < taps; ++c) r += sy.w[c] * row[(sy.base + c) & (n - 1)];
        acc += sx.w[a] * r;
    }
    return acc;
}

template <class T>
inline T interp_any(const PeriodicGrid& g, const T* v, double x, double y, Interp kind) {
    return g.dim() == 1 ? interp_1d(v, g.points_per_axis(), x, kind)
                        : interp_2d(v, g.points_per_axis(), x, y, kind);
}

inline double wrap(double x) {
    const double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

// One node of the tracer; shared verbatim by the serial and parallel drivers.
inline void trace_node(const PeriodicGrid& g, const std::vector<std::vector<double>>& b, double step, int substeps,
                       Interp kind, std::size_t node, double* out) {
    const int d = g.dim();
    const auto x0 = g.coordinate(node);
    double p[2] = {x0[0], x0[1]};
    auto vel = [&](const double* q, double* v) {
        for (int a = 0; a < d; ++a) v[a] = interp_any(g, b[a].data(), q[0], d == 2 ? q[1] : 0.0, kind);
    };
    double k1[2] = {0, 0}, k2[2] = {0, 0}, k3[2] = {0, 0}, k4[2] = {0, 0}, q[2] = {0, 0};
    for (int s = 0; s < substeps; ++s) {
        vel(p, k1);
        for (int a = 0; a < d; ++a) q[a] = p[a] + 0.5 * step * k1[a];
        vel(q, k2);
        for (int a = 0; a < d; ++a) q[a] = p[a] + 0.5 * step * k2[a];
        vel(q, k3);
        for (int a = 0; a < d; ++a) q[a] = p[a] + step * k3[a];
        vel(q, k4);
        for (int a = 0; a < d; ++a) p[a] += step / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
    for (int a = 0; a < d; ++a) out[a] = wrap(p[a]);
}

void check_trace_args(const PeriodicGrid& g, const std::vector<std::vector<double>>& b, int substeps,
                      std::span<double> out) {
    if (static_cast<int>(b.size()) != g.dim()) throw std::invalid_argument("trace: need one component per axis");
    for (const auto& c : b)
        if (c.size() != g.node_count()) throw std::invalid_argument("trace: component size mismatch");
    if (substeps < 1) throw std::invalid_argument("trace: substeps must be >= 1");
    if (out.size() != g.node_count() * static_cast<std::size_t>(g.dim()))
        throw std::invalid_argument("trace: output size mismatch");
}

void check_remap_args(const PeriodicGrid& g, std::span<const Complex> src, std::span<const double> points,
                      std::span<Complex> dst) {
    if (src.size() != g.node_count() || dst.size() != g.node_count() ||
        points.size() != g.node_count() * static_cast<std::size_t>(g.dim()))
        throw std::invalid_argument("remap: size mismatch");
}

}  // namespace

double interpolate(const PeriodicGrid& g, std::span<const double> v, double x, double y, Interp kind) {
    return interp_any(g, v.data(), x, y, kind);
}

Complex interpolate(const PeriodicGrid& g, std::span<const Complex> v, double x, double y, Interp kind) {
    return interp_any(g, v.data(), x, y, kind);
}

void trace_serial(const PeriodicGrid& g, const std::vector<std::vector<double>>& b, double tau, int substeps,
                  Interp kind, std::span<double> out) {
    check_trace_args(g, b, substeps, out);
    const double step = tau / substeps;
    const std::size_t n = g.node_count();
    for (std::size_t i = 0; i < n; ++i) trace_node(g, b, step, substeps, kind, i, out.data() + i * g.dim());
}

void trace_parallel(const PeriodicGrid& g, const std::vector<std::vector<double>>& b, double tau, int substeps,
                    Interp kind, std::span<double> out) {
    check_trace_args(g, b, substeps, out);
    const double step = tau / substeps;
    const auto n = static_cast<std::ptrdiff_t>(g.node_count());
    double* o = out.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        trace_node(g, b, step, substeps, kind, static_cast<std::size_t>(i), o + i * g.dim());
}

void remap_serial(const PeriodicGrid& g, std::span<const Complex> src, std::span<const double> points, Interp kind,
                  std::span<Complex> dst) {
    check_remap_args(g, src, points, dst);
    const int d = g.dim();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const double* p = points.data() + i * d;
        dst[i] = interp_any(g, src.data(), p[0], d == 2 ? p[1] : 0.0, kind);
    }
}

void remap_parallel(const PeriodicGrid& g, std::span<const Complex> src, std::span<const double> points,
                    Interp kind, std::span<Complex> dst) {
    check_remap_args(g, src, points, dst);
    const int d = g.dim();
    const auto n = static_cast<std::ptrdiff_t>(g.node_count());
    const Complex* s = src.data();
    const double* pts = points.data();
    Complex* o = dst.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double* p = pts + i * d;
        o[i] = interp_any(g, s, p[0], d == 2 ? p[1] : 0.0, kind);
    }
}

void scatter_serial(const PeriodicGrid& g, std::span<const Complex> src, std::span<const double> points, Interp kind,
                    std::span<Complex> dst) {
    check_remap_args(g, src, points, dst);
    const int d = g.dim();
    const int n = g.points_per_axis();
    const bool lin = kind == Interp::linear;
    const int taps = lin ? 2 : 4;
    std::fill(dst.begin(), dst.end(), Complex(0.0));
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const double* p = points.data() + i * d;
        const Stencil sx = lin ? linear_stencil(p[0], n) : cubic_stencil(p[0], n);
        if (d == 1) {
            for (int a = 0; a < taps; ++a) dst[(sx.base + a) & (n - 1)] += sx.w[a] * src[i];
            continue;
        }
        const Stencil sy = lin ? linear_stencil(p[1], n) : cubic_stencil(p[1], n);
        for (int a = 0; a < taps; ++a) {
            Complex* row = dst.data() + static_cast<std::size_t>((sx.base + a) & (n - 1)) * n;
            const Complex m = sx.w[a] * src[i];
            for (int c = 0; c < taps; ++c) row[(sy.base + c) & (n - 1)] += sy.w[c] * m;
        }
    }
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace kernels
}  // namespace roughflow
