#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "roughflow/field.hpp"

namespace roughflow {

enum class FieldKind {
    constant,
    smooth_swirl,
    bv_shear,
    singular_vortex,
    attracting_sink,
    powerlaw_hamiltonian,
    nbody_hamiltonian,
};

enum class RegularityClass { lipschitz, w11, w11_star, non_conforming };

std::string to_string(FieldKind k);
std::string to_string(RegularityClass r);
FieldKind field_kind_from_string(const std::string& s);

/// Analytic velocity field plus regularity metadata.
///
/// Parameters by kind (defaults in parentheses):
///   constant             c0 (0.25), c1 (0), dim (2)
///   smooth_swirl         compression a (0): b = (sin 2pi y + a sin 2pi x, sin 2pi x)
///   bv_shear             height (1): b = (height * sigma(y), 0)
///   singular_vortex      gamma (1), x0 (0.5), y0 (0.5)
///   attracting_sink      alpha (0.5), x0 (0.5), y0 (0.5)
///   powerlaw_hamiltonian alpha (0.5), charge (1); phase space (q, p) = (x, y)
///   nbody_hamiltonian    alpha (1), particles (2), masses[], charges[]
class VectorFieldSpec {
public:
    VectorFieldSpec(FieldKind kind, std::map<std::string, double> params = {});

    static VectorFieldSpec constant(double c0, double c1 = 0.0);
    static VectorFieldSpec constant_1d(double c0);
    static VectorFieldSpec smooth_swirl(double compression = 0.0);
    static VectorFieldSpec bv_shear(double height = 1.0);
    static VectorFieldSpec singular_vortex(double gamma, double x0 = 0.5, double y0 = 0.5);
    static VectorFieldSpec attracting_sink(double alpha, double x0 = 0.5, double y0 = 0.5);
    static VectorFieldSpec powerlaw_hamiltonian(double alpha, double charge = 1.0);
    static VectorFieldSpec nbody_hamiltonian(double alpha, std::vector<double> masses, std::vector<double> charges);

    FieldKind kind() const noexcept { return kind_; }
    double param(const std::string& name) const;
    const std::map<std::string, double>& params() const noexcept { return params_; }
    const std::vector<double>& masses() const noexcept { return masses_; }
    const std::vector<double>& charges() const noexcept { return charges_; }

    /// Torus dimension (2 for every grid kind except 1-D constants);
    /// phase-space dimension 6 * particles for nbody_hamiltonian.
    int dim() const;
    bool grid_supported() const noexcept { return kind_ != FieldKind::nbody_hamiltonian; }
    RegularityClass declared_class() const;
    bool has_closed_form_divergence() const;
    /// Torus points where the formula is singular (empty for regular kinds).
    std::vector<std::array<double, 2>> singular_points() const;

    nlohmann::json to_json() const;
    static VectorFieldSpec from_json(const nlohmann::json& j);

private:
    void validate() const;

    FieldKind kind_;
    std::map<std::string, double> params_;
    std::vector<double> masses_;
    std::vector<double> charges_;
};

/// Smooth cutoff: 1 for r <= 1/8, 0 for r >= 1/4.
double cutoff(double r);
double cutoff_derivative(double r);

inline constexpr double kDefaultClampRadius = 1.0 / 512.0;

struct FieldValue {
    std::array<double, 2> v{0.0, 0.0};
    bool clamped = false;
};

/// Closed-form velocity at a torus point. Points closer than `clamp_radius`
/// to the singular set are radially projected onto distance clamp_radius
/// (direction +x at the singular point itself) and flagged.
FieldValue eval_field(const VectorFieldSpec& spec, std::array<double, 2> x,
                      double clamp_radius = kDefaultClampRadius);

/// Closed-form divergence under the same clamping rule; throws when the
/// spec carries none.
double eval_divergence(const VectorFieldSpec& spec, std::array<double, 2> x,
                       double clamp_radius = kDefaultClampRadius);

/// Right-hand side of Hamilton's equations in R^{6n}: state = (q_1..q_n, p_1..p_n),
/// each q_i, p_i in R^3. Returns (dq/dt, dp/dt).
std::vector<double> eval_nbody(const VectorFieldSpec& spec, const std::vector<double>& state);

/// Node-wise sampling with clamp radius h/2; `clamped_nodes` receives the count.
DiscreteVectorField sample_field(const VectorFieldSpec& spec, const PeriodicGrid& grid,
                                 std::size_t* clamped_nodes = nullptr);

/// Node-wise divergence: closed form when available (clamped at h/2),
/// spectral divergence of the sample otherwise.
ScalarField sample_divergence(const VectorFieldSpec& spec, const PeriodicGrid& grid);

enum class Verdict { conforming, non_conforming, resolution_limited };
std::string to_string(Verdict v);

struct ConditionReport {
    double div_sup_estimate = 0.0;
    double w11_star_estimate = 0.0;
    double div_growth = 1.0;
    double w11_growth = 1.0;
    int points_per_axis = 0;
    Verdict verdict = Verdict::conforming;
    std::string notes;
};

inline constexpr int kMaxConditionGrid = 2048;

/// Extended conditions: sup |div b| and sum of component TVs, each measured at
/// N and 2N; conforming iff both grow by a factor < 1.5.
ConditionReport check_conditions(const VectorFieldSpec& spec, const PeriodicGrid& grid,
                                 int max_points_per_axis = kMaxConditionGrid);

}  // namespace roughflow
