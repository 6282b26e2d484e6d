#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roughflow/field_zoo.hpp"
#include "roughflow/mollifier.hpp"
#include "roughflow/transport.hpp"

namespace roughflow {

/// [B, C_eps] = B C_eps - C_eps B with B u = b . grad u, evaluated through
/// sum_i [ b_i (u * d_i rho) - (u b_i) * d_i rho ] + (u div b) * rho,
/// every convolution a Fourier multiplier. Precomputes the kernel pieces so
/// repeated application (one per snapshot) costs seven transforms.
class CommutatorOperator {
public:
    CommutatorOperator(const DiscreteVectorField& b, double eps, const Mollifier& m = {},
                       const ScalarField* div_b = nullptr);
    ScalarField apply(const ScalarField& u) const;

private:
    DiscreteVectorField b_;
    ScalarField div_;
    std::vector<Complex> kernel_;
    std::vector<std::vector<Complex>> dkernel_;
};

ScalarField commutator_apply(const DiscreteVectorField& b, const ScalarField& u, double eps,
                             const Mollifier& m = {});

/// B(C_eps u) - C_eps(B u) with spectral gradients; the cross-check oracle.
ScalarField commutator_direct(const DiscreteVectorField& b, const ScalarField& u, double eps,
                              const Mollifier& m = {});

struct CommutatorRow {
    double eps;
    double l1_norm;
};

/// L1 norm of [B, C_eps] u for every eps, b sampled from the spec on u's grid.
std::vector<CommutatorRow> commutator_sweep(const VectorFieldSpec& spec, const ScalarField& u,
                                            const std::vector<double>& eps_list, const Mollifier& m = {});

/// Default dyadic schedule 2^-k, k = 1, 2, ... down to the smallest admissible eps.
std::vector<double> default_eps_schedule(const PeriodicGrid& g, const Mollifier& m = {});
/// ceil(dim / 2 + 2)
int default_sobolev_index(int dim);

struct CascadeOptions {
    double T = 0.5;
    double dt = 0.0;  // 0: default_dt of the sampled field
    Interp interp = Interp::cubic;
    int trace_substeps = 1;
    /// Stored snapshots per trajectory are capped at max_snapshots + 1 by
    /// choosing the record stride (0 keeps every step).
    int max_snapshots = 128;
    std::vector<double> eps_schedule;    // empty: default_eps_schedule
    std::vector<double> delta_schedule;  // empty: eps^2
    Mollifier mollifier{};
    double s = 0.0;  // 0: default_sobolev_index
    double gap_threshold = 1e-3;
    bool diagnostics = true;
    bool parallel = true;
};

struct CascadeResult {
    Trajectory solution;
    std::vector<double> eps_schedule;
    std::vector<double> delta_schedule;
    std::vector<bool> delta_resolved;
    /// remainder_tv[k][i]: weighted L1 norm of r at stage k, snapshot i
    std::vector<std::vector<double>> remainder_tv;
    std::vector<double> hs_gaps;
    /// measured sup_i |u(t_{i+1}) - u(t_i)|_{H^-s} / dt_i per stage
    std::vector<double> hs_lipschitz;
    double s = 0.0;
    double gap_threshold = 1e-3;
    bool converged = false;
    std::vector<std::string> warnings;

    explicit CascadeResult(const PeriodicGrid& g) : solution(g) {}
};

/// Double mollification: for every (delta, eps) pair solve with C_delta b and
/// C_delta u0 (identity when delta is below grid resolution), mollify the
/// trajectory by C_eps, record r = -[B_delta, C_eps] u_delta and H^-s gaps.
CascadeResult cascade_solve(const VectorFieldSpec& spec, const ScalarField& u0, const CascadeOptions& opt);
CascadeResult cascade_solve(const DiscreteVectorField& b, const ScalarField& u0, const CascadeOptions& opt,
                            const std::vector<std::string>& warnings = {});

struct Beta {
    std::string name;
    std::function<double(double)> f;
};

/// {clamp to [lo, hi], square, arctan, tanh ramp}
std::vector<Beta> beta_battery(double lo, double hi);

struct RenormalizationRow {
    std::string beta;
    double defect;
};

double renormalization_defect(const CascadeResult& result, const DiscreteVectorField& b, const Beta& beta,
                              const std::vector<TestFunction>& battery);
std::vector<RenormalizationRow> renormalization_sweep(const CascadeResult& result, const DiscreteVectorField& b,
                                                      const std::vector<TestFunction>& battery);

struct UniquenessRow {
    double eta;
    double integral;  // I(T) = int v(T)
    double bound;     // exp(M T) T eta (1 + tolerance)
};

struct UniquenessReport {
    double T;
    double m_hat;
    double tolerance;
    std::vector<UniquenessRow> rows;
    bool within_bound = true;
};

/// Zero data, v' = b . grad v + r with a positive smooth seeded remainder of
/// weighted L1 norm eta; reports I(T) against exp(M T) T eta (1 + tolerance).
UniquenessReport uniqueness_probe(const VectorFieldSpec& spec, const PeriodicGrid& grid, double T,
                                  const std::vector<double>& etas, std::uint64_t seed = 1,
                                  const TransportOptions* opt = nullptr, double tolerance = 0.1);

ScalarField smooth_random_remainder(const PeriodicGrid& grid, double eta, std::uint64_t seed);

enum class PlanKind { identical, mollified_field, perturbed_data };
std::string to_string(PlanKind p);
PlanKind plan_kind_from_string(const std::string& s);

struct StabilityReport {
    std::vector<int> n_values;
    std::vector<double> field_l1_gaps;
    std::vector<double> div_l1_gaps;
    std::vector<double> solution_gaps;
    bool monotone_convergent = false;
    std::string verdict;
};

/// Cascade-solves the problem for every n and the limit problem; gaps are
/// sup over snapshots of the L1 distance. Rejects plans whose field or
/// divergence gaps increase with n.
StabilityReport stability_experiment(const VectorFieldSpec& spec, const ScalarField& u0, PlanKind plan,
                                     const std::vector<int>& n_values, const CascadeOptions& opt);

}  // namespace roughflow
