#include "roughflow/flow.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "roughflow/norms.hpp"

namespace roughflow {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

ScalarField cauchy_operator(const DiscreteVectorField& b, const ScalarField& f, double t, const FlowConfig& cfg) {
    if (!(t >= 0.0)) throw std::invalid_argument("cauchy_operator: t must be >= 0");
    if (t == 0.0) return f;
    if (cfg.use_cascade) {
        CascadeOptions o = cfg.cascade;
        o.T = t;
        o.diagnostics = false;
        return cascade_solve(b, f, o).solution.final();
    }
    TransportOptions o = cfg.transport;
    o.T = t;
    if (!(o.dt > 0.0)) o.dt = b.grid().spacing() / 4.0;
    o.record_stride = 1 << 30;
    return solve_classical_transport(b, f, o).final();
}

ScalarField cauchy_operator(const VectorFieldSpec& spec, const ScalarField& f, double t, const FlowConfig& cfg) {
    return cauchy_operator(sample_field(spec, f.grid()), f, t, cfg);
}

double multiplicativity_defect(const DiscreteVectorField& b, const ScalarField& f, const ScalarField& g, double t,
                               const FlowConfig& cfg) {
    const auto tfg = cauchy_operator(b, f * g, t, cfg);
    const auto tf = cauchy_operator(b, f, t, cfg);
    const auto tg = cauchy_operator(b, g, t, cfg);
    return lp_distance(tfg, tf * tg, 1.0);
}

double DiscreteFlowMap::max_modulus_defect() const {
    double m = 0.0;
    for (double v : modulus_defect) m = std::max(m, v);
    return m;
}

std::size_t DiscreteFlowMap::flagged_count() const {
    std::size_t c = 0;
    for (bool f : flagged) c += f ? 1 : 0;
    return c;
}

DiscreteFlowMap extract_flow_map(const DiscreteVectorField& b, double t, const FlowConfig& cfg) {
    const auto& g = b.grid();
    const int d = g.dim();
    DiscreteFlowMap map(g);
    map.images.assign(g.node_count() * d, 0.0);
    map.modulus_defect.assign(g.node_count() * d, 0.0);
    map.flagged.assign(g.node_count(), false);
    for (int j = 0; j < d; ++j) {
        const auto e = ScalarField::sample(g, [j](double x, double y) {
            return std::exp(Complex(0.0, 2.0 * kPi * (j == 0 ? x : y)));
        });
        const auto w = cauchy_operator(b, e, t, cfg);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const double mod = std::abs(w[i]);
            map.images[i * d + j] = wrap_unit(std::arg(w[i]) / (2.0 * kPi));
            map.modulus_defect[i * d + j] = std::abs(mod - 1.0);
            if (mod < 0.1) map.flagged[i] = true;
        }
    }
    return map;
}

DiscreteFlowMap extract_flow_map(const VectorFieldSpec& spec, double t, const PeriodicGrid& grid,
                                 const FlowConfig& cfg) {
    return extract_flow_map(sample_field(spec, grid), t, cfg);
}

double pushforward_discrepancy(const DiscreteFlowMap& map, int boxes_per_axis) {
    if (boxes_per_axis < 1) throw std::invalid_argument("pushforward_discrepancy: need >= 1 box per axis");
    const int d = map.grid.dim();
    const std::size_t boxes = d == 1 ? boxes_per_axis : static_cast<std::size_t>(boxes_per_axis) * boxes_per_axis;
    std::vector<double> hist(boxes, 0.0);
    std::size_t used = 0;
    for (std::size_t i = 0; i < map.grid.node_count(); ++i) {
        if (map.flagged[i]) continue;
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) {
            const int k = std::min(boxes_per_axis - 1, static_cast<int>(map.images[i * d + a] * boxes_per_axis));
            idx = idx * boxes_per_axis + k;
        }
        hist[idx] += 1.0;
        ++used;
    }
    if (used == 0) return 1.0;
    double tv = 0.0;
    for (double h : hist) tv += std::abs(h / used - 1.0 / boxes);
    return 0.5 * tv;
}

std::vector<ReversibilityRow> reversibility_probe(const DiscreteVectorField& b, const ScalarField& u0, double T,
                                                  const std::vector<double>& eps_list,
                                                  const ReversibilityOptions& opt) {
    if (!(T > 0.0)) throw std::invalid_argument("reversibility_probe: T must be > 0");
    const auto& g = b.grid();
    const double dt_req = opt.dt > 0.0 ? opt.dt : g.spacing() / 4.0;
    const int steps = std::max(1, static_cast<int>(std::ceil(T / dt_req - 1e-9)));
    const double dt = T / steps;
    const int sub = opt.trace_substeps > 0 ? opt.trace_substeps : auto_substeps(b, dt);
    const Remapper forward(b, dt, sub, opt.interp, opt.parallel);
    const Remapper backward(b.negated(), dt, sub, opt.interp, opt.parallel);
    std::vector<ReversibilityRow> rows;
    for (double eps : eps_list) {
        if (!(eps >= 0.0)) throw std::invalid_argument("reversibility_probe: eps must be >= 0");
        const auto there = run_remap_steps(forward, u0, steps, dt, eps, steps);
        const auto back = run_remap_steps(backward, there.final(), steps, dt, eps, steps);
        rows.push_back({eps, lp_distance(back.final(), u0, 1.0)});
    }
    return rows;
}

std::vector<double> default_reversibility_sweep() {
    std::vector<double> out;
    for (int k = 0; k <= 5; ++k) out.push_back(0.1 * std::ldexp(1.0, -k));
    return out;
}

ReversibilityVerdict classify_reversibility(const std::vector<ReversibilityRow>& rows, double floor, double factor) {
    ReversibilityVerdict v;
    v.floor = floor;
    v.above_floor = !rows.empty();
    for (const auto& r : rows) v.above_floor = v.above_floor && r.return_error > factor * floor;
    if (rows.empty()) return v;
    const double e3 = rows.back().return_error;
    v.extrapolated = e3;
    if (rows.size() >= 3) {
        const auto& r1 = rows[rows.size() - 3];
        const auto& r2 = rows[rows.size() - 2];
        const auto& r3 = rows.back();
        for (const auto* p : {&r1, &r2})
            if (std::abs(p->eps - 2.0 * (p == &r1 ? r2.eps : r3.eps)) > 1e-12 * p->eps)
                throw std::invalid_argument("classify_reversibility: the last three eps must halve");
        const double d1 = r1.return_error - r2.return_error;
        const double d2 = r2.return_error - r3.return_error;
        // geometric decay of the increments; otherwise no extrapolation
        if (d1 > 0.0 && d2 > 0.0 && d1 > d2) {
            const double ratio = d1 / d2;
            v.order = std::log2(ratio);
            v.extrapolated = e3 - d2 / (ratio - 1.0);
        }
    }
    v.extrapolates_to_floor = std::abs(v.extrapolated - floor) <= 0.25 * e3;
    return v;
}

}  // namespace roughflow
