#include "roughflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "roughflow/errors.hpp"
#include "roughflow/norms.hpp"
#include "roughflow/spectral.hpp"

namespace roughflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::vector<double>> real_components(const DiscreteVectorField& b) {
    std::vector<std::vector<double>> out;
    for (const auto& c : b.components()) out.push_back(c.real_part());
    return out;
}

void validate(const DiscreteVectorField& b, const ScalarField& u0, const TransportOptions& opt) {
    if (!(b.grid() == u0.grid())) throw std::invalid_argument("transport: field and data live on different grids");
    if (!(opt.T >= 0.0) || !std::isfinite(opt.T)) throw std::invalid_argument("transport: T must be >= 0");
    if (!(opt.dt >= 0.0) || !std::isfinite(opt.dt)) throw std::invalid_argument("transport: dt must be >= 0");
    if (opt.record_stride < 1) throw std::invalid_argument("transport: record_stride must be >= 1");
    if (opt.trace_substeps < 0) throw std::invalid_argument("transport: trace_substeps must be >= 0");
}

int step_count(const DiscreteVectorField& b, const TransportOptions& opt) {
    if (opt.T == 0.0) return 0;
    const double dt = opt.dt > 0.0 ? opt.dt : default_dt(b);
    return std::max(1, static_cast<int>(std::ceil(opt.T / dt - 1e-9)));
}

int resolve_substeps(const DiscreteVectorField& b, double step, int requested) {
    if (requested == 0) return auto_substeps(b, step);
    const double limit = max_trace_step(b);
    if (step / requested > limit) {
        std::ostringstream msg;
        msg << "transport: step " << step / requested << " exceeds h / (2 |b|_inf) = " << limit
            << "; use dt <= " << limit * requested << " or more trace substeps";
        throw StepSizeError(msg.str(), limit * requested);
    }
    return requested;
}

// composite Simpson on uniform spacing with an even interval count, trapezoid otherwise
double time_integral(const std::vector<double>& t, const std::vector<double>& f) {
    const std::size_t m = t.size();
    if (m < 2) return 0.0;
    const double h = (t.back() - t.front()) / static_cast<double>(m - 1);
    bool uniform = (m - 1) % 2 == 0;
    for (std::size_t i = 1; uniform && i < m; ++i)
        uniform = std::abs((t[i] - t[i - 1]) - h) <= 1e-9 * std::max(1.0, std::abs(h));
    if (uniform) {
        double s = f.front() + f.back();
        for (std::size_t i = 1; i + 1 < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
        return s * h / 3.0;
    }
    double s = 0.0;
    for (std::size_t i = 1; i < m; ++i) s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return s;
}

double bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

}  // namespace

void Trajectory::push(double t, ScalarField f) {
    if (!(f.grid() == grid)) throw std::invalid_argument("Trajectory: snapshot grid mismatch");
    if (!times.empty() && !(t > times.back())) throw std::invalid_argument("Trajectory: times must increase");
    times.push_back(t);
    snapshots.push_back(std::move(f));
}

std::size_t Trajectory::nearest(double t) const {
    if (times.empty()) throw std::out_of_range("Trajectory: empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
    return best;
}

double max_trace_step(const DiscreteVectorField& b) {
    return b.grid().spacing() / (2.0 * b.sup_speed() + 1e-12);
}

int auto_substeps(const DiscreteVectorField& b, double dt) {
    return std::max(1, static_cast<int>(std::ceil(std::abs(dt) / max_trace_step(b) - 1e-9)));
}

double default_dt(const DiscreteVectorField& b) {
    return b.grid().spacing() / 4.0 / std::max(1.0, b.sup_speed());
}

Remapper::Remapper(const DiscreteVectorField& b, double tau, int substeps, Interp kind, bool parallel)
    : grid_(b.grid()), kind_(kind), parallel_(parallel),
      points_(b.grid().node_count() * static_cast<std::size_t>(b.grid().dim())) {
    const auto comps = real_components(b);
    if (parallel)
        kernels::trace_parallel(grid_, comps, tau, substeps, kind, points_);
    else
        kernels::trace_serial(grid_, comps, tau, substeps, kind, points_);
}

void Remapper::apply(const ScalarField& f, ScalarField& out) const {
    if (!(f.grid() == grid_) || !(out.grid() == grid_)) throw std::invalid_argument("Remapper: grid mismatch");
    if (parallel_)
        kernels::remap_parallel(grid_, f.values(), points_, kind_, out.values());
    else
        kernels::remap_serial(grid_, f.values(), points_, kind_, out.values());
}

void Remapper::apply_transpose(const ScalarField& f, ScalarField& out) const {
    if (!(f.grid() == grid_) || !(out.grid() == grid_)) throw std::invalid_argument("Remapper: grid mismatch");
    kernels::scatter_serial(grid_, f.values(), points_, kind_, out.values());
}

ScalarField Remapper::apply(const ScalarField& f) const {
    ScalarField out(grid_);
    apply(f, out);
    return out;
}

Trajectory run_remap_steps(const Remapper& remap, const ScalarField& u0, int steps, double dt, double heat_eps,
                           int record_stride, const ScalarField* source) {
    Trajectory traj(u0.grid());
    traj.push(0.0, u0);
    ScalarField cur = u0, next(u0.grid());
    std::vector<Complex> heat;
    if (heat_eps > 0.0) {
        const auto k2 = spectral::squared_frequencies(u0.grid());
        heat.resize(k2.size());
        for (std::size_t i = 0; i < k2.size(); ++i) heat[i] = std::exp(-heat_eps * heat_eps * k2[i] * dt);
    }
    for (int n = 1; n <= steps; ++n) {
        remap.apply(cur, next);
        std::swap(cur, next);
        if (!heat.empty()) cur = spectral::apply_multiplier(cur, heat);
        if (source) {
            const auto s = source->values();
            auto c = cur.values();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] += dt * s[i];
        }
        if (n % record_stride == 0 || n == steps) traj.push(n * dt, cur);
    }
    return traj;
}

Trajectory solve_classical_transport(const DiscreteVectorField& b, const ScalarField& u0,
                                     const TransportOptions& opt) {
    return solve_viscous(b, u0, 0.0, opt);
}

Trajectory solve_viscous(const DiscreteVectorField& b, const ScalarField& u0, double eps,
                         const TransportOptions& opt) {
    validate(b, u0, opt);
    if (!(eps >= 0.0)) throw std::invalid_argument("solve_viscous: eps must be >= 0");
    const int steps = step_count(b, opt);
    if (steps == 0) {
        Trajectory t(u0.grid());
        t.push(0.0, u0);
        return t;
    }
    const double dt = opt.T / steps;
    const int sub = resolve_substeps(b, dt, opt.trace_substeps);
    const Remapper remap(b, dt, sub, opt.interp, opt.parallel);
    return run_remap_steps(remap, u0, steps, dt, eps, opt.record_stride);
}

Trajectory solve_density(const DiscreteVectorField& b, const ScalarField& rho0, const TransportOptions& opt) {
    validate(b, rho0, opt);
    const int steps = step_count(b, opt);
    Trajectory traj(rho0.grid());
    traj.push(0.0, rho0);
    if (steps == 0) return traj;
    const double dt = opt.T / steps;
    const int sub = resolve_substeps(b, dt, opt.trace_substeps);
    const Remapper remap(b, dt, sub, opt.interp, opt.parallel);
    ScalarField cur = rho0, next(rho0.grid());
    for (int n = 1; n <= steps; ++n) {
        remap.apply_transpose(cur, next);
        std::swap(cur, next);
        if (n % opt.record_stride == 0 || n == steps) traj.push(n * dt, cur);
    }
    return traj;
}

CharacteristicPath solve_characteristics(const VectorFieldSpec& spec, const std::vector<double>& x0, double T,
                                         double dt, bool reverse, double clamp_radius) {
    if (!(dt > 0.0)) throw std::invalid_argument("solve_characteristics: dt must be > 0");
    if (!(T >= 0.0)) throw std::invalid_argument("solve_characteristics: T must be >= 0");
    const bool torus = spec.grid_supported();
    const std::size_t d = torus ? static_cast<std::size_t>(spec.dim()) : static_cast<std::size_t>(spec.dim());
    if (x0.size() != d)
        throw std::invalid_argument("solve_characteristics: start point needs " + std::to_string(d) + " coordinates");
    const double sign = reverse ? -1.0 : 1.0;
    CharacteristicPath path;
    path.start = x0;
    bool grazing = false;
    auto rhs = [&](const std::vector<double>& x) {
        if (!torus) {
            auto v = eval_nbody(spec, x);
            for (auto& c : v) c *= sign;
            return v;
        }
        const auto fv = eval_field(spec, {x[0], d == 2 ? x[1] : 0.0}, clamp_radius);
        grazing = grazing || fv.clamped;
        std::vector<double> v(d);
        for (std::size_t a = 0; a < d; ++a) v[a] = sign * fv.v[a];
        return v;
    };
    auto wrapped = [&](std::vector<double> x) {
        if (torus)
            for (auto& c : x) c = wrap_unit(c);
        return x;
    };
    const int steps = T == 0.0 ? 0 : std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
    const double h = steps ? T / steps : 0.0;
    std::vector<double> x = x0, tmp(d);
    path.times.push_back(0.0);
    path.points.push_back(wrapped(x));
    for (int n = 1; n <= steps; ++n) {
        const auto k1 = rhs(x);
        for (std::size_t a = 0; a < d; ++a) tmp[a] = x[a] + 0.5 * h * k1[a];
        const auto k2 = rhs(tmp);
        for (std::size_t a = 0; a < d; ++a) tmp[a] = x[a] + 0.5 * h * k2[a];
        const auto k3 = rhs(tmp);
        for (std::size_t a = 0; a < d; ++a) tmp[a] = x[a] + h * k3[a];
        const auto k4 = rhs(tmp);
        for (std::size_t a = 0; a < d; ++a) x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        path.times.push_back(n * h);
        path.points.push_back(wrapped(x));
    }
    path.singular_grazing = grazing;
    return path;
}

double TestFunction::psi(double x, double y, int dim) const {
    const double a = bump(periodic_delta(center[0], x) / width);
    return dim == 1 ? a : a * bump(periodic_delta(center[1], y) / width);
}

double TestFunction::theta(double s) const {
    switch (profile) {
        case 0: return (1 - s) * (1 - s);
        case 1: return std::cos(kPi * s / 2) * std::cos(kPi * s / 2);
        case 2: return (1 - s) * (1 - s) * (1 - s) * (1 + 3 * s);
        default: throw std::invalid_argument("TestFunction: profile must be 0, 1 or 2");
    }
}

double TestFunction::theta_prime(double s) const {
    switch (profile) {
        case 0: return -2 * (1 - s);
        case 1: return -kPi / 2 * std::sin(kPi * s);
        case 2: return -12 * s * (1 - s) * (1 - s);
        default: throw std::invalid_argument("TestFunction: profile must be 0, 1 or 2");
    }
}

std::vector<TestFunction> test_function_battery(std::uint64_t seed) {
    std::vector<std::array<double, 2>> centers = {
        {0.5, 0.5}, {0.25, 0.75}, {0.7, 0.3}, {0.1, 0.45}, {0.6, 0.9},
    };
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        for (auto& c : centers)
            for (auto& v : c) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
    std::vector<TestFunction> out;
    for (const auto& c : centers)
        for (double w : {0.2, 0.35})
            for (int p = 0; p < 3; ++p) out.push_back(TestFunction{c, w, p});
    return out;
}

double weak_defect(const Trajectory& traj, const DiscreteVectorField& b, const TestFunction& phi,
                   const ScalarField* u0) {
    if (traj.size() < 2) throw std::invalid_argument("weak_defect: need at least two snapshots");
    if (traj.times.front() != 0.0) throw std::invalid_argument("weak_defect: trajectory must start at t = 0");
    if (std::abs(phi.theta(1.0)) > 1e-14) throw std::invalid_argument("weak_defect: phi(., T) must vanish");
    const auto& g = traj.grid;
    if (!(b.grid() == g)) throw std::invalid_argument("weak_defect: field grid mismatch");
    const double T = traj.times.back();
    const int dim = g.dim();
    const ScalarField psi = ScalarField::sample(g, [&](double x, double y) { return Complex(phi.psi(x, y, dim)); });
    std::vector<ScalarField> bpsi;
    for (const auto& c : b.components()) bpsi.push_back(c * psi);
    const ScalarField div_bpsi = divergence(DiscreteVectorField(std::move(bpsi)));
    const double vol = g.cell_volume();
    auto pair = [&](const ScalarField& u, const ScalarField& w) {
        Complex s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * w[i];
        return s * vol;
    };
    const std::size_t m = traj.size();
    std::vector<double> re1(m), im1(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double s = traj.times[i] / T;
        const Complex a = pair(traj.snapshots[i], psi) * (phi.theta_prime(s) / T);
        const Complex c = pair(traj.snapshots[i], div_bpsi) * phi.theta(s);
        re1[i] = a.real() - c.real();
        im1[i] = a.imag() - c.imag();
    }
    const ScalarField& init = u0 ? *u0 : traj.snapshots.front();
    const Complex start = pair(init, psi) * phi.theta(0.0);
    const Complex total = Complex(time_integral(traj.times, re1), time_integral(traj.times, im1)) + start;
    return std::abs(total);
}

double weak_defect_max(const Trajectory& traj, const DiscreteVectorField& b, const std::vector<TestFunction>& battery,
                       const ScalarField* u0) {
    double m = 0.0;
    for (const auto& phi : battery) m = std::max(m, weak_defect(traj, b, phi, u0));
    return m;
}

}  // namespace roughflow
