#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "roughflow/diperna_lions.hpp"
#include "roughflow/errors.hpp"
#include "roughflow/norms.hpp"
#include "roughflow/spectral.hpp"

using namespace roughflow;

namespace {

constexpr double pi = std::numbers::pi;

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

double sup_l1(const Trajectory& traj, const std::function<ScalarField(double)>& exact) {
    double m = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) m = std::max(m, lp_distance(traj.snapshots[i], exact(traj.times[i]), 1.0));
    return m;
}

// int |z| |grad rho(z)| dz for the unit-mass bump in the plane; scale invariant
double kernel_moment() {
    const int M = 200000;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < M; ++i) {
        const double r = (i + 0.5) / M;
        const double q = 1.0 - r * r;
        const double phi = std::exp(-1.0 / q);
        const double dphi = phi * 2.0 * r / (q * q);
        num += r * dphi * r;
        den += phi * r;
    }
    return num / den;
}

}  // namespace

TEST_CASE("commutator examples") {
    PeriodicGrid g(2, 128);
    const auto u = smooth_data(g);
    const auto cst = sample_field(VectorFieldSpec::constant(0.3, -0.7), g);
    CHECK(lp_norm(commutator_apply(cst, u, 0.25), kInfinity) <= 1e-10);

    const auto b = sample_field(VectorFieldSpec::smooth_swirl(0.5), g);
    for (double eps : {0.5, 0.25, 0.125}) {
        const double a = lp_norm(commutator_apply(b, u, eps), 1.0);
        const double h = lp_norm(commutator_apply(b, u, eps / 2), 1.0);
        CHECK(a / h >= 1.8);
        CHECK(lp_distance(commutator_apply(b, u, eps), commutator_direct(b, u, eps), 1.0) < 1e-8);
    }
}

TEST_CASE("commutator is linear in u") {
    PeriodicGrid g(2, 64);
    const auto b = sample_field(VectorFieldSpec::singular_vortex(1.5), g);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        ScalarField u(g), v(g);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            u[i] = d(rng);
            v[i] = d(rng);
        }
        const Complex a = d(rng);
        const auto lhs = commutator_apply(b, a * u + v, 0.25);
        const auto rhs = a * commutator_apply(b, u, 0.25) + commutator_apply(b, v, 0.25);
        CHECK(lp_distance(lhs, rhs, kInfinity) < 1e-10);
    }
}

TEST_CASE("commutator sweeps") {
    const double C = kernel_moment() + 1.0;
    PeriodicGrid g(2, 256);
    const auto shear = VectorFieldSpec::bv_shear();
    const auto rows = commutator_sweep(shear, cos_x(g), default_eps_schedule(g));
    const double tv = check_conditions(shear, g).w11_star_estimate;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].l1_norm <= 3.0 * tv);
        CHECK(rows[k].l1_norm <= C * tv);
        if (k > 0) CHECK(rows[k].l1_norm <= rows[k - 1].l1_norm * 1.05);
    }

    const auto swirl = commutator_sweep(VectorFieldSpec::smooth_swirl(), smooth_data(g), {0.25, 0.125, 0.0625});
    CHECK(swirl[0].l1_norm / swirl[1].l1_norm >= 1.8);
    CHECK(swirl[1].l1_norm / swirl[2].l1_norm >= 1.8);

    // finest admissible eps per grid: the shear commutator halves per refinement, the sink's stalls
    const auto sink = VectorFieldSpec::attracting_sink(0.9);
    std::vector<double> sv, hv;
    for (int N : {64, 128, 256}) {
        PeriodicGrid gn(2, N);
        const double e = min_admissible_eps(gn);
        sv.push_back(commutator_sweep(sink, smooth_data(gn), {e})[0].l1_norm);
        hv.push_back(commutator_sweep(shear, smooth_data(gn), {e})[0].l1_norm);
    }
    for (std::size_t k = 1; k < sv.size(); ++k) {
        CHECK(hv[k - 1] / hv[k] >= 1.8);
        CHECK(sv[k - 1] / sv[k] < 1.2);
        CHECK(sv[k] > 10 * hv[k]);
    }
}

TEST_CASE("schedules and indices") {
    PeriodicGrid g(2, 128);
    const auto s = default_eps_schedule(g);
    CHECK(s.front() == 0.5);
    CHECK(s.back() == doctest::Approx(8.0 / 128));
    CHECK(default_sobolev_index(2) == 3);
    CHECK(default_sobolev_index(1) == 3);
    CHECK(default_eps_schedule(PeriodicGrid(2, 16)) == std::vector<double>{0.5});
}

TEST_CASE("cascade on zero data") {
    PeriodicGrid g(2, 64);
    const auto res = cascade_solve(VectorFieldSpec::bv_shear(), ScalarField(g), {.T = 0.25});
    for (const auto& s : res.solution.snapshots) CHECK(lp_norm(s, kInfinity) == 0.0);
    for (const auto& row : res.remainder_tv)
        for (double v : row) CHECK(v == 0.0);
    CHECK(res.converged);
}

TEST_CASE("cascade on the shear converges to the layer translation") {
    double prev = kInfinity;
    for (int N : {64, 128}) {
        PeriodicGrid g(2, N);
        CascadeOptions opt{.T = 0.5, .max_snapshots = 64};
        const auto res = cascade_solve(VectorFieldSpec::bv_shear(), cos_x(g), opt);
        const double err = sup_l1(res.solution, [&](double t) { return shear_exact(g, t); });
        CHECK(err * 1.5 <= prev);
        prev = err;

        CHECK(res.converged);
        for (std::size_t k = 1; k < res.hs_gaps.size(); ++k) CHECK(res.hs_gaps[k] < res.hs_gaps[k - 1]);
        auto sup = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
        for (std::size_t k = 1; k < res.remainder_tv.size(); ++k) {
            CHECK(res.remainder_tv[k][0] <= res.remainder_tv[k - 1][0] * 1.1);
            CHECK(sup(res.remainder_tv[k]) <= sup(res.remainder_tv[k - 1]) * 1.1);
        }
        CHECK(res.s == 3.0);
        CHECK(res.solution.size() <= 65);
    }
    CHECK(prev < 2e-2);
}

TEST_CASE("cascade on a smooth field approaches the classical solution") {
    double prev = kInfinity;
    for (int N : {64, 128}) {
        PeriodicGrid g(2, N);
        const auto spec = VectorFieldSpec::smooth_swirl();
        const auto res = cascade_solve(spec, smooth_data(g), {.T = 0.5, .dt = 1.0 / 512});
        const auto classical =
            solve_classical_transport(sample_field(spec, g), smooth_data(g), {.T = 0.5, .dt = 1.0 / 512, .interp = Interp::cubic});
        const double err = lp_distance(res.solution.final(), classical.final(), 2.0);
        CHECK(err * 2 <= prev);
        prev = err;
        CHECK(res.warnings.empty());
    }
}

TEST_CASE("cascade guards") {
    PeriodicGrid g(2, 64);
    CHECK_THROWS_AS(cascade_solve(VectorFieldSpec::bv_shear(), cos_x(g), {.eps_schedule = {0.5, 0.05}}), ResolutionError);
    CHECK_THROWS(cascade_solve(VectorFieldSpec::bv_shear(), cos_x(g), {.eps_schedule = {0.25, 0.5}}));
    CHECK_THROWS(cascade_solve(VectorFieldSpec::bv_shear(), cos_x(g), {.s = 1.5}));
    const auto sink = cascade_solve(VectorFieldSpec::attracting_sink(0.5), cos_x(g), {.T = 0.1, .diagnostics = false});
    CHECK_FALSE(sink.warnings.empty());
}

TEST_CASE("renormalization") {
    PeriodicGrid g(2, 128);
    const auto battery = test_function_battery();
    const auto shear = VectorFieldSpec::bv_shear();
    const auto b = sample_field(shear, g);
    const auto res = cascade_solve(shear, cos_x(g), {.T = 0.5, .interp = Interp::linear, .max_snapshots = 64});

    const auto rows = renormalization_sweep(res, b, battery);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].beta == "clamp");
    CHECK(std::abs(rows[0].defect - weak_defect_max(res.solution, b, battery)) <= 1e-10);
    for (const auto& r : rows) CHECK(r.defect < 5e-2);

    const auto coarse = cascade_solve(shear, cos_x(PeriodicGrid(2, 64)), {.T = 0.5, .interp = Interp::linear, .max_snapshots = 64});
    const auto coarse_rows = renormalization_sweep(coarse, sample_field(shear, PeriodicGrid(2, 64)), battery);
    CHECK(rows[1].defect < coarse_rows[1].defect);

    const auto swirl = VectorFieldSpec::smooth_swirl();
    const auto sres = cascade_solve(swirl, smooth_data(g), {.T = 0.5, .max_snapshots = 64});
    const auto arctan = beta_battery(-1.0, 1.0)[2];
    CHECK(arctan.name == "arctan");
    CHECK(renormalization_defect(sres, sample_field(swirl, g), arctan, battery) < 1e-3);
}

TEST_CASE("uniqueness probe") {
    PeriodicGrid g(2, 128);
    const auto rep = uniqueness_probe(VectorFieldSpec::bv_shear(), g, 0.5, {0.0, 1e-3, 5e-4, 2.5e-4});
    CHECK(rep.m_hat == 0.0);
    CHECK(rep.rows[0].integral == 0.0);
    CHECK(rep.rows[1].integral <= 5.5e-4);
    CHECK(rep.within_bound);
    for (std::size_t k = 2; k < rep.rows.size(); ++k)
        CHECK(rep.rows[k].integral <= 0.5 * rep.rows[k - 1].integral * 1.1);
    for (std::size_t k = 2; k < rep.rows.size(); ++k)
        CHECK(rep.rows[k].integral / rep.rows[k - 1].integral == doctest::Approx(0.5).epsilon(0.1));

    const auto r = smooth_random_remainder(g, 1e-3, 1);
    CHECK(lp_norm(r, 1.0) == doctest::Approx(1e-3));
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i].real() > 0.0);
}

TEST_CASE("stability plans") {
    PeriodicGrid g(2, 128);
    const auto shear = VectorFieldSpec::bv_shear();
    CascadeOptions opt{.T = 0.25, .max_snapshots = 32, .eps_schedule = {0.125, 0.0625}};

    const auto same = stability_experiment(shear, cos_x(g), PlanKind::identical, {2, 3}, opt);
    for (double v : same.solution_gaps) CHECK(v < 1e-12);
    CHECK(same.verdict == "reproduced");

    const auto moll = stability_experiment(shear, cos_x(g), PlanKind::mollified_field, {2, 3, 4}, opt);
    CHECK(moll.monotone_convergent);
    CHECK(moll.verdict == "monotone-convergent");
    for (std::size_t k = 1; k < moll.field_l1_gaps.size(); ++k) CHECK(moll.field_l1_gaps[k] < moll.field_l1_gaps[k - 1]);

    const auto pert = stability_experiment(shear, cos_x(g), PlanKind::perturbed_data, {2, 4, 8}, opt);
    for (std::size_t k = 0; k < pert.n_values.size(); ++k)
        CHECK(pert.solution_gaps[k] * pert.n_values[k] == doctest::Approx(pert.solution_gaps[0] * 2).epsilon(0.05));

    CHECK_THROWS(stability_experiment(shear, cos_x(g), PlanKind::mollified_field, {2, 3, 6}, opt));
}
