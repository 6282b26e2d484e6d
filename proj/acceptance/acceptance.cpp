#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "roughflow/diperna_lions.hpp"
#include "roughflow/flow.hpp"
#include "roughflow/norms.hpp"
#include "roughflow/osgood.hpp"
#include "roughflow/spectral.hpp"

using namespace roughflow;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Check {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + sci(v[i]);
    return "[" + s + "]";
}

ScalarField cos_x(const PeriodicGrid& g) {
    return ScalarField::sample(g, [](double x, double) { return std::cos(2 * pi * x); });
}

ScalarField smooth_data(const PeriodicGrid& g) {
    return ScalarField::sample(g, [](double x, double y) {
        return std::cos(2 * pi * x) * std::cos(2 * pi * y) + 0.5 * std::sin(2 * pi * y);
    });
}

ScalarField shear_exact(const PeriodicGrid& g, double t) {
    return ScalarField::sample(g, [t](double x, double y) { return std::cos(2 * pi * (x + t * (y < 0.5 ? 1.0 : -1.0))); });
}

const std::vector<VectorFieldSpec>& grid_zoo() {
    static const std::vector<VectorFieldSpec> zoo = {
        VectorFieldSpec::constant(0.25, 0.1),  VectorFieldSpec::smooth_swirl(0.0),
        VectorFieldSpec::smooth_swirl(0.5),    VectorFieldSpec::bv_shear(),
        VectorFieldSpec::singular_vortex(1.0), VectorFieldSpec::singular_vortex(1.5),
        VectorFieldSpec::attracting_sink(0.5), VectorFieldSpec::attracting_sink(0.9),
        VectorFieldSpec::powerlaw_hamiltonian(0.5)};
    return zoo;
}

// shear cascades at N = 128, 256 are shared by criteria 2 and 7
const CascadeResult& shear_cascade(int N) {
    static std::map<int, std::unique_ptr<CascadeResult>> cache;
    auto& slot = cache[N];
    if (!slot) {
        PeriodicGrid g(2, N);
        CascadeOptions o;
        o.T = 0.5;
        o.max_snapshots = 64;
        slot = std::make_unique<CascadeResult>(cascade_solve(VectorFieldSpec::bv_shear(), cos_x(g), o));
    }
    return *slot;
}

Check classical_oracle() {
    PeriodicGrid g(2, 128);
    const auto spec = VectorFieldSpec::smooth_swirl();
    const auto u0 = ScalarField::sample(g, [](double x, double y) {
        return std::cos(2 * pi * x) * std::sin(2 * pi * y) + 0.5 * std::sin(2 * pi * x);
    });
    CascadeOptions o;
    o.T = 0.5;
    o.dt = 1.0 / 512;
    o.parallel = false;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = cascade_solve(spec, u0, o);
    const double secs = seconds_since(t0);
    TransportOptions to{.T = 0.5, .dt = 1.0 / 512, .interp = Interp::cubic, .parallel = false};
    const auto c = solve_classical_transport(sample_field(spec, g), u0, to);
    const double err = lp_distance(r.solution.final(), c.final(), 2.0);
    return {err < 1e-3 && secs < 60.0, "L2 " + sci(err) + " (limit 1e-3), cascade " + sci(secs) + " s (limit 60 s)"};
}

Check exact_solution() {
    std::vector<double> errs;
    for (int N : {128, 256}) {
        const auto& r = shear_cascade(N);
        const auto& g = r.solution.grid;
        double m = 0.0;
        for (std::size_t i = 0; i < r.solution.size(); ++i)
            m = std::max(m, lp_distance(r.solution.snapshots[i], shear_exact(g, r.solution.times[i]), 1.0));
        errs.push_back(m);
    }
    const double ratio = errs[0] / errs[1];
    return {errs[1] < 2e-2 && ratio >= 1.5,
            "sup-t L1 error N=128,256 " + list(errs) + " (limit 2e-2), ratio " + sci(ratio) + " (>= 1.5)"};
}

Check max_principle() {
    PeriodicGrid g(2, 64);
    const auto jump = ScalarField::sample(g, [](double x, double y) {
        return std::cos(2 * pi * x) * std::sin(4 * pi * y) + (x < 0.3 ? 0.7 : -0.2);
    });
    const auto smooth = ScalarField::sample(g, [](double x, double y) { return std::cos(2 * pi * x) * std::sin(4 * pi * y); });
    double worst = 0.0;
    std::size_t snaps = 0;
    auto scan = [&](const Trajectory& t, const ScalarField& u0) {
        const double bound = lp_norm(u0, kInfinity);
        for (const auto& s : t.snapshots) {
            worst = std::max(worst, lp_norm(s, kInfinity) - bound);
            ++snaps;
        }
    };
    const TransportOptions opt{.T = 0.5, .interp = Interp::linear, .trace_substeps = 0};
    for (const auto& spec : grid_zoo()) {
        const auto b = sample_field(spec, g);
        scan(solve_classical_transport(b, jump, opt), jump);
        scan(solve_classical_transport(b, smooth, opt), smooth);
        scan(solve_viscous(b, smooth, 0.05, opt), smooth);
    }
    return {worst <= 1e-10, "max violation " + sci(std::max(0.0, worst)) + " over " + std::to_string(snaps) +
                                " snapshots, " + std::to_string(grid_zoo().size()) + " fields (limit 1e-10)"};
}

Check gronwall() {
    PeriodicGrid g(2, 128);
    const auto u0 = ScalarField::sample(g, [](double x, double y) { return std::exp(std::sin(2 * pi * x) + std::cos(2 * pi * y)); });
    const auto b = sample_field(VectorFieldSpec::smooth_swirl(0.5), g);
    const double m = lp_norm(divergence(b), kInfinity);
    const auto traj = solve_classical_transport(b, u0, {.T = 0.5, .trace_substeps = 0});
    double worst = 0.0, growth = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double ratio = lp_norm(traj.snapshots[k], 1.0) / lp_norm(u0, 1.0);
        growth = std::max(growth, ratio);
        worst = std::max(worst, ratio / std::exp(m * traj.times[k]));
    }
    return {m > 0.0 && worst <= 1.05, "M = " + sci(m) + ", max |u|_1 / |u0|_1 = " + sci(growth) +
                                          ", max |u|_1 / (exp(Mt) |u0|_1) = " + sci(worst) + " (limit 1.05)"};
}

Check commutator() {
    PeriodicGrid g(2, 256);
    const auto shear = VectorFieldSpec::bv_shear();
    const auto u = cos_x(g);
    // C = int |z| |grad rho| dz + 1, a grid-independent constant of the bump
    const int M = 200000;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < M; ++i) {
        const double r = (i + 0.5) / M, q = 1.0 - r * r, phi = std::exp(-1.0 / q);
        num += r * r * phi * 2.0 * r / (q * q);
        den += phi * r;
    }
    const double C = num / den + 1.0;
    const double tv = check_conditions(shear, g).w11_star_estimate;
    const double bound = C * tv * lp_norm(u, kInfinity);
    const auto rows = commutator_sweep(shear, u, default_eps_schedule(g));
    bool ok = true;
    std::vector<double> norms;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        norms.push_back(rows[k].l1_norm);
        ok = ok && rows[k].l1_norm <= bound;
        if (k > 0) ok = ok && rows[k].l1_norm <= rows[k - 1].l1_norm * 1.05;
    }
    const auto sw = commutator_sweep(VectorFieldSpec::smooth_swirl(), smooth_data(g), {0.25, 0.125, 0.0625});
    const double r1 = sw[0].l1_norm / sw[1].l1_norm, r2 = sw[1].l1_norm / sw[2].l1_norm;
    ok = ok && r1 >= 1.8 && r2 >= 1.8;
    return {ok, "shear sweep " + list(norms) + " <= C TV |u|_inf = " + sci(bound) + "; smooth halving ratios " +
                    sci(r1) + ", " + sci(r2) + " (>= 1.8)"};
}

Check uniqueness() {
    PeriodicGrid g(2, 128);
    const auto rep = uniqueness_probe(VectorFieldSpec::bv_shear(), g, 0.5, {1e-3, 5e-4, 2.5e-4});
    const double i0 = rep.rows[0].integral;
    const double s1 = rep.rows[1].integral / i0 / 0.5, s2 = rep.rows[2].integral / i0 / 0.25;
    const bool linear = std::abs(s1 - 1.0) <= 0.1 && std::abs(s2 - 1.0) <= 0.1;
    return {i0 <= 5.5e-4 && linear, "I(T) at eta 1e-3 = " + sci(i0) + " (limit 5.5e-4), I/eta relative to eta=1e-3: " +
                                        sci(s1) + ", " + sci(s2) + " (within 10%)"};
}

Check renormalization() {
    std::map<std::string, std::vector<double>> by_beta;
    for (int N : {128, 256}) {
        const auto& r = shear_cascade(N);
        const auto b = sample_field(VectorFieldSpec::bv_shear(), r.solution.grid);
        for (const auto& row : renormalization_sweep(r, b, test_function_battery(0))) by_beta[row.beta].push_back(row.defect);
    }
    bool ok = true;
    std::string s;
    for (const auto& [name, d] : by_beta) {
        ok = ok && d[1] < 5e-2 && d[1] < d[0];
        s += (s.empty() ? "" : "; ") + name + " " + list(d);
    }
    return {ok, "defects N=128,256: " + s + " (limit 5e-2 at N=256, shrinking)"};
}

Check stability() {
    PeriodicGrid g(2, 512);
    CascadeOptions o;
    o.T = 0.25;
    o.diagnostics = false;
    const auto full = default_eps_schedule(g);
    o.eps_schedule.assign(full.end() - 2, full.end());
    const auto rep = stability_experiment(VectorFieldSpec::bv_shear(), cos_x(g), PlanKind::mollified_field, {2, 3, 4, 5, 6}, o);
    bool strict = true;
    for (std::size_t k = 1; k < rep.solution_gaps.size(); ++k) strict = strict && rep.solution_gaps[k] < rep.solution_gaps[k - 1];
    return {strict, "n = 2..6 sup-t L1 gaps " + list(rep.solution_gaps) + ", verdict " + rep.verdict};
}

Check multiplicativity() {
    std::vector<double> mult, mod, peak;
    for (int N : {64, 128, 256, 512}) {
        PeriodicGrid g(2, N);
        const auto b = sample_field(VectorFieldSpec::bv_shear(), g);
        mult.push_back(multiplicativity_defect(b, cos_x(g), cos_x(g), 0.5, {}));
        const auto map = extract_flow_map(b, 0.5, {});
        double m = 0.0;
        for (double v : map.modulus_defect) m += v;
        mod.push_back(m / static_cast<double>(map.modulus_defect.size()));
        peak.push_back(map.max_modulus_defect());
    }
    bool ok = true;
    for (std::size_t k = 1; k < mult.size(); ++k)
        ok = ok && mult[k] * 1.5 <= mult[k - 1] && mod[k] * 1.5 <= mod[k - 1] && peak[k] * 1.5 <= peak[k - 1];
    return {ok, "N=64..512 defect " + list(mult) + ", modulus defect mean " + list(mod) + " max " + list(peak) +
                    " (factor >= 1.5)"};
}

Check irreversibility() {
    PeriodicGrid g(2, 256);
    const auto u0 = smooth_data(g);
    const auto eps = default_reversibility_sweep();
    const auto swirl = sample_field(VectorFieldSpec::smooth_swirl(), g);
    const double floor = reversibility_probe(swirl, u0, 0.5, {0.0})[0].return_error;
    const auto smooth = reversibility_probe(swirl, u0, 0.5, eps);
    const auto sink = reversibility_probe(sample_field(VectorFieldSpec::attracting_sink(0.8), g), u0, 0.5, eps);
    bool above = true;
    std::vector<double> se, ke;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        above = above && sink[k].return_error > 10.0 * floor;
        se.push_back(smooth[k].return_error);
        ke.push_back(sink[k].return_error);
    }
    const auto v = classify_reversibility(smooth, floor);
    return {above && v.extrapolates_to_floor, "floor " + sci(floor) + "; sink " + list(ke) + " (> 10x floor); smooth " +
                                                  list(se) + " extrapolates to " + sci(v.extrapolated)};
}

Check section_suite() {
    double dil = 0.0;
    for (auto [K, m] : {std::pair{8, 1}, {4, 3}, {1, 1}, {10, 5}, {16, 4}, {20, 2}, {5, 0}})
        dil = std::max(dil, dilation_identity_defect(K, m));
    const auto w = weierstrass_modulus(20, default_weierstrass_steps());
    const auto l = lacunary_l1_growth({1, 2, 4, 8, 16, 20});
    const double k2 = std::abs(l.rows[1].l1_norm - 4.0 / pi);
    const bool ok = dil < 1e-12 && w.residual < 0.15 && l.fit.c > 0.0 && l.fit.residual < 0.1 && k2 < 1e-6;
    return {ok, "dilation " + sci(dil) + " (< 1e-12); Weierstrass c " + sci(w.c) + " residual " + sci(w.residual) +
                    " (< 0.15); lacunary c " + sci(l.fit.c) + " residual " + sci(l.fit.residual) +
                    " (< 0.1); |K=2 - 4/pi| " + sci(k2) + " (< 1e-6)"};
}

Check reproducibility() {
    const auto root = fs::temp_directory_path() / "roughflow_acceptance_repro";
    fs::remove_all(root);
    fs::create_directories(root);
    std::ofstream(root / "config.json") << R"({"field": {"kind": "bv_shear"}, "grid": 64, "T": 0.5})";
    std::ostringstream sink;
    std::vector<std::string> bodies;
    int code = 0;
    for (const char* run : {"a", "b"}) {
        cli::Invocation inv{.subcommand = "cascade", .config = root / "config.json", .out = root / run, .seed = 42, .quiet = true};
        code = std::max(code, cli::run(inv, sink, sink));
        std::ifstream in(root / run / "report.json", std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        bodies.push_back(s.str());
    }
    const bool same = !bodies[0].empty() && bodies[0] == bodies[1];
    return {same && code == 0, std::string("cascade report.json ") + (same ? "identical" : "differs") + " across two runs (" +
                                   std::to_string(bodies[0].size()) + " bytes), exit " + std::to_string(code)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::vector<int> only;
    app.add_option("--only", only, "criteria to run (default all)")->check(CLI::Range(1, 12));
    CLI11_PARSE(app, argc, argv);
    const std::set<int> pick(only.begin(), only.end());

    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"classical-oracle agreement", classical_oracle},
        {"exact-solution agreement", exact_solution},
        {"maximum principle", max_principle},
        {"Gronwall L1 bound", gronwall},
        {"commutator contract", commutator},
        {"uniqueness probe", uniqueness},
        {"renormalization", renormalization},
        {"stability", stability},
        {"flow multiplicativity", multiplicativity},
        {"irreversibility probe", irreversibility},
        {"Osgood-lab suite", section_suite},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!pick.empty() && !pick.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Check v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("criterion %2d %s  %s: %s [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
