#include "roughflow/diperna_lions.hpp"

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

ScalarField multiply_spectrum(const PeriodicGrid& g, const std::vector<Complex>& coeffs,
                              const std::vector<Complex>& mult) {
    std::vector<Complex> c(coeffs.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs[i] * mult[i];
    return spectral::inverse(g, std::move(c));
}

int stride_for(int steps, int max_snapshots) {
    if (max_snapshots <= 0 || steps <= max_snapshots) return 1;
    return (steps + max_snapshots - 1) / max_snapshots;
}

double sup_hs_distance(const Trajectory& a, const Trajectory& b, double s) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, negative_sobolev_norm(a.snapshots[i] - b.snapshots[i], s));
    return m;
}

double sup_l1_distance(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) throw std::logic_error("trajectories differ in snapshot count");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, lp_distance(a.snapshots[i], b.snapshots[i], 1.0));
    return m;
}

}  // namespace

CommutatorOperator::CommutatorOperator(const DiscreteVectorField& b, double eps, const Mollifier& m,
                                       const ScalarField* div_b)
    : b_(b), div_(div_b ? *div_b : divergence(b)), kernel_(kernel_multiplier(b.grid(), eps, m)) {
    for (int a = 0; a < b.dim(); ++a) {
        auto d = spectral::derivative_multiplier(b.grid(), a);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] *= kernel_[i];
        dkernel_.push_back(std::move(d));
    }
}

ScalarField CommutatorOperator::apply(const ScalarField& u) const {
    const auto& g = b_.grid();
    if (!(u.grid() == g)) throw std::invalid_argument("commutator: grid mismatch");
    const auto uh = spectral::forward(u);
    std::vector<Complex> acc(uh.size(), 0.0);
    ScalarField local(g);
    for (int a = 0; a < b_.dim(); ++a) {
        // b_a (u * d_a rho) accumulates in physical space
        const auto conv = multiply_spectrum(g, uh, dkernel_[a]);
        const auto& ba = b_.component(a);
        for (std::size_t i = 0; i < local.size(); ++i) local[i] += ba[i] * conv[i];
        // -(u b_a) * d_a rho accumulates in Fourier space
        const auto ub = spectral::forward(u * ba);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= ub[i] * dkernel_[a][i];
    }
    const auto ud = spectral::forward(u * div_);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += ud[i] * kernel_[i];
    local += spectral::inverse(g, std::move(acc));
    return local;
}

ScalarField commutator_apply(const DiscreteVectorField& b, const ScalarField& u, double eps, const Mollifier& m) {
    return CommutatorOperator(b, eps, m).apply(u);
}

ScalarField commutator_direct(const DiscreteVectorField& b, const ScalarField& u, double eps, const Mollifier& m) {
    auto advect = [&](const ScalarField& f) {
        const auto grad = gradient(f);
        ScalarField out(f.grid());
        for (int a = 0; a < b.dim(); ++a) out += b.component(a) * grad.component(a);
        return out;
    };
    return advect(mollify(u, eps, m)) - mollify(advect(u), eps, m);
}

std::vector<CommutatorRow> commutator_sweep(const VectorFieldSpec& spec, const ScalarField& u,
                                            const std::vector<double>& eps_list, const Mollifier& m) {
    const auto b = sample_field(spec, u.grid());
    std::optional<ScalarField> div;
    if (spec.has_closed_form_divergence()) div = sample_divergence(spec, u.grid());
    std::vector<CommutatorRow> rows;
    for (double eps : eps_list) {
        const CommutatorOperator op(b, eps, m, div ? &*div : nullptr);
        rows.push_back({eps, lp_norm(op.apply(u), 1.0)});
    }
    return rows;
}

std::vector<double> default_eps_schedule(const PeriodicGrid& g, const Mollifier& m) {
    std::vector<double> out;
    for (double e = 0.5; is_resolved(g, e, m); e *= 0.5) out.push_back(e);
    if (out.empty()) throw ResolutionError("cascade: grid too coarse for any dyadic eps", min_admissible_eps(g, m));
    return out;
}

int default_sobolev_index(int dim) { return static_cast<int>(std::ceil(dim / 2.0 + 2.0)); }

CascadeResult cascade_solve(const VectorFieldSpec& spec, const ScalarField& u0, const CascadeOptions& opt) {
    std::vector<std::string> warnings;
    if (spec.declared_class() == RegularityClass::non_conforming)
        warnings.push_back("field '" + to_string(spec.kind()) +
                           "' is declared non-conforming; diagnostics are reported without guarantees");
    return cascade_solve(sample_field(spec, u0.grid()), u0, opt, warnings);
}

CascadeResult cascade_solve(const DiscreteVectorField& b, const ScalarField& u0, const CascadeOptions& opt,
                            const std::vector<std::string>& warnings) {
    const auto& g = u0.grid();
    if (!(b.grid() == g)) throw std::invalid_argument("cascade: field and data live on different grids");
    CascadeResult res(g);
    res.warnings = warnings;
    res.eps_schedule = opt.eps_schedule.empty() ? default_eps_schedule(g, opt.mollifier) : opt.eps_schedule;
    res.delta_schedule = opt.delta_schedule;
    if (res.delta_schedule.empty())
        for (double e : res.eps_schedule) res.delta_schedule.push_back(e * e);
    const auto& eps = res.eps_schedule;
    const auto& del = res.delta_schedule;
    if (del.size() != eps.size()) throw std::invalid_argument("cascade: eps and delta schedules differ in length");
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0 && eps[k] <= 1.0) || !(del[k] > 0.0 && del[k] <= 1.0))
            throw std::invalid_argument("cascade: schedule entries must lie in (0, 1]");
        if (k > 0 && (eps[k] >= eps[k - 1] || del[k] > del[k - 1]))
            throw std::invalid_argument("cascade: schedules must decrease");
        if (!is_resolved(g, eps[k], opt.mollifier)) {
            std::ostringstream msg;
            msg << "cascade: eps = " << eps[k] << " under-resolved; minimal admissible eps is "
                << min_admissible_eps(g, opt.mollifier);
            throw ResolutionError(msg.str(), min_admissible_eps(g, opt.mollifier));
        }
    }
    res.s = opt.s > 0.0 ? opt.s : default_sobolev_index(g.dim());
    if (!(res.s > g.dim() / 2.0 + 1.0)) throw std::invalid_argument("cascade: s must exceed dim/2 + 1");
    res.gap_threshold = opt.gap_threshold;

    TransportOptions topt;
    topt.T = opt.T;
    topt.dt = opt.dt > 0.0 ? opt.dt : default_dt(b);
    topt.interp = opt.interp;
    topt.trace_substeps = opt.trace_substeps;
    topt.parallel = opt.parallel;
    const int steps = opt.T == 0.0 ? 0 : std::max(1, static_cast<int>(std::ceil(opt.T / topt.dt - 1e-9)));
    topt.record_stride = stride_for(steps, opt.max_snapshots);

    double cached_key = -1.0;
    std::optional<Trajectory> u_delta;
    std::optional<DiscreteVectorField> b_delta;
    std::optional<Trajectory> prev;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const bool resolved = is_resolved(g, del[k], opt.mollifier);
        res.delta_resolved.push_back(resolved);
        const double key = resolved ? del[k] : 0.0;
        if (key != cached_key) {
            b_delta = mollify_or_identity(b, del[k], opt.mollifier);
            const auto u0d = mollify_or_identity(u0, del[k], opt.mollifier);
            u_delta = solve_classical_transport(*b_delta, u0d, topt);
            cached_key = key;
        }
        const auto kernel = kernel_multiplier(g, eps[k], opt.mollifier);
        Trajectory stage(g);
        for (std::size_t i = 0; i < u_delta->size(); ++i)
            stage.push(u_delta->times[i], spectral::apply_multiplier(u_delta->snapshots[i], kernel));

        std::vector<double> tv;
        if (opt.diagnostics) {
            const CommutatorOperator op(*b_delta, eps[k], opt.mollifier);
            for (const auto& snap : u_delta->snapshots) tv.push_back(lp_norm(op.apply(snap), 1.0));
        }
        res.remainder_tv.push_back(std::move(tv));

        double lip = 0.0;
        for (std::size_t i = 1; i < stage.size(); ++i) {
            const double d = negative_sobolev_norm(stage.snapshots[i] - stage.snapshots[i - 1], res.s);
            lip = std::max(lip, d / (stage.times[i] - stage.times[i - 1]));
        }
        res.hs_lipschitz.push_back(lip);
        if (prev) res.hs_gaps.push_back(sup_hs_distance(stage, *prev, res.s));
        prev = std::move(stage);
    }
    res.solution = std::move(*prev);
    res.converged = !res.hs_gaps.empty() && res.hs_gaps.back() < res.gap_threshold;
    if (res.hs_gaps.empty()) res.warnings.push_back("single-stage schedule: no H^-s gap to test");
    return res;
}

std::vector<Beta> beta_battery(double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = std::max(0.5 * (hi - lo), 1e-12);
    return {
        {"clamp", [lo, hi](double v) { return std::clamp(v, lo, hi); }},
        {"square", [](double v) { return v * v; }},
        {"arctan", [](double v) { return std::atan(v); }},
        {"tanh_ramp", [mid, half](double v) { return std::tanh((v - mid) / half); }},
    };
}

double renormalization_defect(const CascadeResult& result, const DiscreteVectorField& b, const Beta& beta,
                              const std::vector<TestFunction>& battery) {
    Trajectory bt(result.solution.grid);
    for (std::size_t i = 0; i < result.solution.size(); ++i)
        bt.push(result.solution.times[i], result.solution.snapshots[i].map_real(beta.f));
    return weak_defect_max(bt, b, battery);
}

std::vector<RenormalizationRow> renormalization_sweep(const CascadeResult& result, const DiscreteVectorField& b,
                                                      const std::vector<TestFunction>& battery) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& v : result.solution.snapshots.front().values()) {
        lo = first ? v.real() : std::min(lo, v.real());
        hi = first ? v.real() : std::max(hi, v.real());
        first = false;
    }
    std::vector<RenormalizationRow> rows;
    for (const auto& beta : beta_battery(lo, hi))
        rows.push_back({beta.name, renormalization_defect(result, b, beta, battery)});
    return rows;
}

ScalarField smooth_random_remainder(const PeriodicGrid& grid, double eta, std::uint64_t seed) {
    if (!(eta >= 0.0)) throw std::invalid_argument("remainder scale must be >= 0");
    std::mt19937_64 rng(seed);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    struct Mode {
        int k0, k1;
        double amp, phase;
    };
    std::vector<Mode> modes;
    for (int k0 = -3; k0 <= 3; ++k0)
        for (int k1 = (grid.dim() == 2 ? -3 : 0); k1 <= (grid.dim() == 2 ? 3 : 0); ++k1) {
            if (k0 == 0 && k1 == 0) continue;
            modes.push_back({k0, k1, 0.5 * (2.0 * unit() - 1.0) / (k0 * k0 + k1 * k1), 2.0 * kPi * unit()});
        }
    auto r = ScalarField::sample(grid, [&](double x, double y) {
        double s = 0.0;
        for (const auto& m : modes) s += m.amp * std::cos(2.0 * kPi * (m.k0 * x + m.k1 * y) + m.phase);
        return Complex(std::exp(s));
    });
    const double norm = lp_norm(r, 1.0);
    r *= eta / norm;
    return r;
}

UniquenessReport uniqueness_probe(const VectorFieldSpec& spec, const PeriodicGrid& grid, double T,
                                  const std::vector<double>& etas, std::uint64_t seed, const TransportOptions* opt,
                                  double tolerance) {
    if (!(T > 0.0)) throw std::invalid_argument("uniqueness: T must be > 0");
    const auto b = sample_field(spec, grid);
    UniquenessReport rep;
    rep.T = T;
    rep.tolerance = tolerance;
    rep.m_hat = lp_norm(sample_divergence(spec, grid), kInfinity);
    TransportOptions o = opt ? *opt : TransportOptions{};
    o.T = T;
    if (!(o.dt > 0.0)) o.dt = default_dt(b);
    const int steps = std::max(1, static_cast<int>(std::ceil(T / o.dt - 1e-9)));
    const double dt = T / steps;
    const Remapper remap(b, dt, o.trace_substeps == 0 ? auto_substeps(b, dt) : o.trace_substeps, o.interp, o.parallel);
    for (double eta : etas) {
        const auto r = smooth_random_remainder(grid, eta, seed);
        const auto traj = run_remap_steps(remap, ScalarField(grid), steps, dt, 0.0, steps, &r);
        const double I = integral(traj.final()).real();
        const double bound = std::exp(rep.m_hat * T) * T * eta * (1.0 + tolerance);
        rep.rows.push_back({eta, I, bound});
        rep.within_bound = rep.within_bound && I <= bound;
    }
    return rep;
}

std::string to_string(PlanKind p) {
    switch (p) {
        case PlanKind::identical: return "identical";
        case PlanKind::mollified_field: return "mollified_field";
        case PlanKind::perturbed_data: return "perturbed_data";
    }
    return "unknown";
}

PlanKind plan_kind_from_string(const std::string& s) {
    for (auto p : {PlanKind::identical, PlanKind::mollified_field, PlanKind::perturbed_data})
        if (to_string(p) == s) return p;
    throw std::invalid_argument("unknown stability plan '" + s + "'");
}

StabilityReport stability_experiment(const VectorFieldSpec& spec, const ScalarField& u0, PlanKind plan,
                                     const std::vector<int>& n_values, const CascadeOptions& opt) {
    if (n_values.empty()) throw std::invalid_argument("stability: plan needs at least one n");
    const auto& g = u0.grid();
    const auto b = sample_field(spec, g);
    const auto div = divergence(b);
    StabilityReport rep;
    rep.n_values = n_values;
    std::vector<DiscreteVectorField> fields;
    std::vector<ScalarField> data;
    for (int n : n_values) {
        if (n < 1) throw std::invalid_argument("stability: n must be >= 1");
        DiscreteVectorField bn = b;
        ScalarField un = u0;
        if (plan == PlanKind::mollified_field) bn = mollify(b, std::ldexp(1.0, -n), opt.mollifier);
        if (plan == PlanKind::perturbed_data)
            un += ScalarField::sample(g, [n](double x, double) { return Complex(std::cos(2 * kPi * x) / n); });
        double fg = 0.0;
        for (int a = 0; a < g.dim(); ++a) fg += lp_distance(bn.component(a), b.component(a), 1.0);
        rep.field_l1_gaps.push_back(fg);
        rep.div_l1_gaps.push_back(lp_distance(divergence(bn), div, 1.0));
        fields.push_back(std::move(bn));
        data.push_back(std::move(un));
    }
    for (std::size_t i = 1; i < n_values.size(); ++i) {
        const double tol = 1e-12;
        if (rep.field_l1_gaps[i] > rep.field_l1_gaps[i - 1] + tol || rep.div_l1_gaps[i] > rep.div_l1_gaps[i - 1] + tol) {
            std::ostringstream msg;
            msg << "stability: plan violates the L1 convergence premise; field gaps";
            for (double v : rep.field_l1_gaps) msg << ' ' << v;
            msg << "; divergence gaps";
            for (double v : rep.div_l1_gaps) msg << ' ' << v;
            throw std::invalid_argument(msg.str());
        }
    }
    CascadeOptions o = opt;
    o.diagnostics = false;
    const auto limit = cascade_solve(b, u0, o);
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        const auto r = cascade_solve(fields[i], data[i], o);
        rep.solution_gaps.push_back(sup_l1_distance(r.solution, limit.solution));
    }
    bool strict = true, tiny = true;
    for (std::size_t i = 0; i < rep.solution_gaps.size(); ++i) {
        tiny = tiny && rep.solution_gaps[i] < 1e-12;
        if (i > 0) strict = strict && rep.solution_gaps[i] < rep.solution_gaps[i - 1];
    }
    rep.monotone_convergent = tiny || strict;
    rep.verdict = tiny ? "reproduced" : (strict ? "monotone-convergent" : "not monotone");
    return rep;
}

}  // namespace roughflow
