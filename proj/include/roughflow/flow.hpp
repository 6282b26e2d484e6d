#pragma once

#include <vector>

#include "roughflow/diperna_lions.hpp"

namespace roughflow {

/// How the Cauchy operator T_t is realized.
struct FlowConfig {
    bool use_cascade = false;
    /// T is overridden by t; dt 0 means h / 4 with tracing substeps from the
    /// step guard when trace_substeps is 0.
    TransportOptions transport{.trace_substeps = 0};
    CascadeOptions cascade{};  // T is overridden by t
};

/// T_t f: time-t snapshot of the configured solve with initial datum f.
ScalarField cauchy_operator(const DiscreteVectorField& b, const ScalarField& f, double t, const FlowConfig& cfg);
ScalarField cauchy_operator(const VectorFieldSpec& spec, const ScalarField& f, double t, const FlowConfig& cfg);

/// |T_t(f g) - T_t f T_t g|_{L1}
double multiplicativity_defect(const DiscreteVectorField& b, const ScalarField& f, const ScalarField& g, double t,
                               const FlowConfig& cfg);

struct DiscreteFlowMap {
    PeriodicGrid grid;
    /// dim coordinates per node, each in [0, 1)
    std::vector<double> images;
    /// | |T_t e_j| - 1 | for j = 0..dim-1, dim entries per node
    std::vector<double> modulus_defect;
    /// |T_t e_j| < 0.1 for some j: phase unreliable
    std::vector<bool> flagged;

    explicit DiscreteFlowMap(const PeriodicGrid& g) : grid(g) {}
    double max_modulus_defect() const;
    std::size_t flagged_count() const;
};

/// Phi_j = arg(T_t e_j) / 2 pi mod 1 with e_j(x) = exp(2 pi i x_j).
DiscreteFlowMap extract_flow_map(const DiscreteVectorField& b, double t, const FlowConfig& cfg);
DiscreteFlowMap extract_flow_map(const VectorFieldSpec& spec, double t, const PeriodicGrid& grid,
                                 const FlowConfig& cfg);

/// Total-variation distance between the pushed-forward node measure
/// (histogram of images on an m^dim box partition) and the uniform measure.
double pushforward_discrepancy(const DiscreteFlowMap& map, int boxes_per_axis);

struct ReversibilityRow {
    double eps;
    double return_error;
};

struct ReversibilityOptions {
    Interp interp = Interp::cubic;
    double dt = 0.0;         // 0: h / 4
    int trace_substeps = 0;  // 0: from the step guard
    bool parallel = true;
};

/// Viscous solve forward under b for time T, then forward under -b for time T;
/// return error |final - u0|_{L1} per eps.
std::vector<ReversibilityRow> reversibility_probe(const DiscreteVectorField& b, const ScalarField& u0, double T,
                                                  const std::vector<double>& eps_list,
                                                  const ReversibilityOptions& opt = {});

struct ReversibilityVerdict {
    double floor = 0.0;        // smooth control at eps = 0
    double extrapolated = 0.0; // eps -> 0 extrapolant of the last three rows
    double order = 0.0;        // fitted convergence order in eps
    bool above_floor = false;  // every error > factor * floor
    bool extrapolates_to_floor = false;
};

/// Default sweep 0.1 * 2^-k, k = 0..5.
std::vector<double> default_reversibility_sweep();

/// Trend comparison against a control floor. above_floor: all errors exceed
/// factor * floor. The last three rows (eps halving) give an Aitken
/// extrapolant E* = E3 - (E2 - E3) / (2^p - 1) with the fitted order p;
/// extrapolates_to_floor: |E* - floor| <= 0.25 * E3.
ReversibilityVerdict classify_reversibility(const std::vector<ReversibilityRow>& rows, double floor,
                                            double factor = 10.0);

}  // namespace roughflow
