#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "roughflow/field.hpp"
#include "roughflow/field_zoo.hpp"
#include "roughflow/kernels.hpp"

namespace roughflow {

/// Time-indexed snapshots sharing one grid.
struct Trajectory {
    PeriodicGrid grid;
    std::vector<double> times;
    std::vector<ScalarField> snapshots;

    explicit Trajectory(const PeriodicGrid& g) : grid(g) {}
    void push(double t, ScalarField f);
    const ScalarField& final() const { return snapshots.back(); }
    std::size_t size() const noexcept { return snapshots.size(); }
    /// Snapshot index whose time is closest to t.
    std::size_t nearest(double t) const;
};

struct TransportOptions {
    double T = 0.5;
    /// Remap interval; the run uses ceil(T / dt) equal steps. 0: default_dt.
    double dt = 0.0;
    Interp interp = Interp::linear;
    /// RK4 substeps per remap interval; 0 picks the fewest satisfying the step guard.
    int trace_substeps = 1;
    /// Keep every k-th step (the final step is always kept).
    int record_stride = 1;
    bool parallel = true;
};

/// Largest admissible tracing step h / (2 |b|_inf + 1e-12).
double max_trace_step(const DiscreteVectorField& b);
int auto_substeps(const DiscreteVectorField& b, double dt);
/// Default remap interval h/4 / max(1, |b|_inf).
double default_dt(const DiscreteVectorField& b);

/// Departure points of every node under the frozen field, reused across steps.
class Remapper {
public:
    /// tau > 0 traces forward, tau < 0 backward.
    Remapper(const DiscreteVectorField& b, double tau, int substeps, Interp kind, bool parallel = true);

    ScalarField apply(const ScalarField& f) const;
    void apply(const ScalarField& f, ScalarField& out) const;
    /// Adjoint of apply under the discrete L2 pairing; preserves the discrete integral.
    void apply_transpose(const ScalarField& f, ScalarField& out) const;
    const std::vector<double>& points() const noexcept { return points_; }
    const PeriodicGrid& grid() const noexcept { return grid_; }

private:
    PeriodicGrid grid_;
    Interp kind_;
    bool parallel_;
    std::vector<double> points_;
};

/// u(x, t + dt) = u(X_dt(x), t): semi-Lagrangian transport for du/dt = b . grad u.
Trajectory solve_classical_transport(const DiscreteVectorField& b, const ScalarField& u0,
                                     const TransportOptions& opt);

/// d rho/dt + div(b rho) = 0 as the transpose of the transport remap: node mass
/// is pushed to X_dt(node) and spread with the interpolation weights. Mass is
/// conserved exactly and <T u, rho> = <u, T^t rho> holds per step.
Trajectory solve_density(const DiscreteVectorField& b, const ScalarField& rho0, const TransportOptions& opt);

/// Lie splitting: transport step, then exact heat step exp(-eps^2 |2 pi k|^2 dt).
/// eps = 0 reproduces solve_classical_transport bit for bit.
Trajectory solve_viscous(const DiscreteVectorField& b, const ScalarField& u0, double eps,
                         const TransportOptions& opt);

/// Steps `u0` with an already built remapper, optional heat factor and an
/// additive source added after each step: u <- remap(u) [heat] + dt * source.
Trajectory run_remap_steps(const Remapper& remap, const ScalarField& u0, int steps, double dt, double heat_eps,
                           int record_stride, const ScalarField* source = nullptr);

struct CharacteristicPath {
    std::vector<double> times;
    std::vector<std::vector<double>> points;
    std::vector<double> start;
    bool singular_grazing = false;
};

/// Classical RK4 for x' = b(x) (or -b when reverse). Torus kinds wrap into
/// [0, 1)^2; nbody_hamiltonian integrates in R^{6n}.
CharacteristicPath solve_characteristics(const VectorFieldSpec& spec, const std::vector<double>& x0, double T,
                                         double dt, bool reverse = false,
                                         double clamp_radius = kDefaultClampRadius);

/// Separable test function phi(x, t) = psi(x) theta(t / T).
struct TestFunction {
    std::array<double, 2> center{0.5, 0.5};
    double width = 0.25;
    /// 0: (1-s)^2, 1: cos^2(pi s / 2), 2: (1-s)^3 (1+3s)
    int profile = 0;

    double psi(double x, double y, int dim) const;
    double theta(double s) const;
    double theta_prime(double s) const;
};

/// 5 centers x widths {0.2, 0.35} x 3 profiles. seed 0 is the shipped table;
/// other seeds draw centers from mt19937_64.
std::vector<TestFunction> test_function_battery(std::uint64_t seed = 0);

/// |int int u phi_t + int u0 phi(., 0) - int int u div(b phi)| with spectral
/// spatial products and composite Simpson in time (trapezoid when the
/// snapshot spacing is not uniform with an even count). u0 defaults to snapshot 0.
double weak_defect(const Trajectory& traj, const DiscreteVectorField& b, const TestFunction& phi,
                   const ScalarField* u0 = nullptr);

/// Max of weak_defect over a battery.
double weak_defect_max(const Trajectory& traj, const DiscreteVectorField& b, const std::vector<TestFunction>& battery,
                       const ScalarField* u0 = nullptr);

}  // namespace roughflow
