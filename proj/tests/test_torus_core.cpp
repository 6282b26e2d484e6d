#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "roughflow/errors.hpp"
#include "roughflow/io.hpp"
#include "roughflow/mollifier.hpp"
#include "roughflow/norms.hpp"
#include "roughflow/spectral.hpp"

using namespace roughflow;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField random_field(const PeriodicGrid& g, std::uint64_t seed, bool real = true) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) f[i] = real ? Complex(u(rng), 0.0) : Complex(u(rng), u(rng));
    return f;
}

// smooth random field: a few low modes
ScalarField smooth_random(const PeriodicGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double a[3][3];
    for (auto& row : a)
        for (double& v : row) v = u(rng);
    return ScalarField::sample(g, [&](double x, double y) -> Complex {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += a[i][j] * std::cos(2 * pi * (i * x + j * y) + i - j);
        return s;
    });
}

// bump profile and its node sum, written out independently of the library
double bump(double d, double r) {
    const double s = d / r;
    return s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
}

double min_image(double a) { return a - std::round(a); }

}  // namespace

TEST_CASE("grid layout") {
    PeriodicGrid g(2, 32);
    CHECK(g.node_count() == 1024);
    CHECK(g.spacing() * g.points_per_axis() == 1.0);
    const auto x = g.coordinate(g.index(3, 5));
    CHECK(x[0] == doctest::Approx(3.0 / 32));
    CHECK(x[1] == doctest::Approx(5.0 / 32));
    CHECK_THROWS(PeriodicGrid(2, 24));
    CHECK_THROWS(PeriodicGrid(2, 8));
    CHECK_THROWS(PeriodicGrid(3, 16));
    CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
    CHECK(periodic_delta(0.9, 0.1) == doctest::Approx(0.2));
}

TEST_CASE("FFT round trip") {
    for (int dim : {1, 2}) {
        PeriodicGrid g(dim, 64);
        const auto f = random_field(g, 7 + dim, false);
        const auto back = spectral::inverse(g, spectral::forward(f));
        double err = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            err = std::max(err, std::abs(back[i] - f[i]));
            mag = std::max(mag, std::abs(f[i]));
        }
        CHECK(err <= 1e-12 * mag);
    }
}

TEST_CASE("lp norms") {
    PeriodicGrid g1(1, 256);
    const auto one = ScalarField(g1, 1.0);
    for (double p : {1.0, 1.5, 2.0, 3.0, kInfinity}) CHECK(lp_norm(one, p) == doctest::Approx(1.0).epsilon(1e-14));

    const auto c = ScalarField::sample(g1, [](double x, double) { return std::cos(2 * pi * x); });
    CHECK(lp_norm(c, kInfinity) == doctest::Approx(1.0));
    // midpoint quadrature at 10^6 cells for int |cos 2 pi x|
    double q = 0.0;
    const int M = 1000000;
    for (int i = 0; i < M; ++i) q += std::abs(std::cos(2 * pi * (i + 0.5) / M));
    q /= M;
    CHECK(q == doctest::Approx(2.0 / pi).epsilon(1e-9));
    CHECK(lp_norm(c, 1.0) == doctest::Approx(q).epsilon(1e-4));

    CHECK_THROWS_AS(lp_norm(c, 0.5), std::invalid_argument);
    CHECK(lp_distance(c, c, 1.0) == 0.0);
}

TEST_CASE("negative Sobolev norm") {
    PeriodicGrid g(1, 64);
    CHECK(negative_sobolev_norm(ScalarField(g, Complex(3.0, 4.0)), 2.0) == doctest::Approx(5.0));
    const auto c = ScalarField::sample(g, [](double x, double) { return std::cos(2 * pi * x); });
    // two modes k = +-1 with coefficient 1/2
    const double want = std::sqrt(2.0 * 0.25 * std::pow(1.0 + 4 * pi * pi, -2.0));
    CHECK(negative_sobolev_norm(c, 2.0) == doctest::Approx(want).epsilon(1e-12));
    CHECK(want == doctest::Approx(0.5 * std::sqrt(2.0) / (1.0 + 4 * pi * pi)));

    PeriodicGrid g2(2, 32);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto f = random_field(g2, seed, false);
        CHECK(negative_sobolev_norm(f, 0.0) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-12));
        for (double s : {0.5, 1.0, 3.0}) CHECK(negative_sobolev_norm(f, s) <= lp_norm(f, 2.0) + 1e-14);
    }
}

TEST_CASE("discrete total variation") {
    PeriodicGrid g1(1, 128);
    CHECK(discrete_tv(ScalarField(g1, 2.5)) == 0.0);
    const auto step = ScalarField::sample(g1, [](double x, double) { return x < 0.5 ? 1.0 : 0.0; });
    CHECK(discrete_tv(step) == doctest::Approx(2.0));
    for (int N : {64, 256}) {
        PeriodicGrid g(1, N);
        const auto s = ScalarField::sample(g, [](double x, double) { return std::sin(2 * pi * x); });
        // peaks at node positions x = 1/4, 3/4 give exactly 4 when N % 4 == 0
        CHECK(discrete_tv(s) == doctest::Approx(4.0).epsilon(1e-12));
        const auto shifted = ScalarField::sample(g, [](double x, double) { return std::sin(2 * pi * x + 0.3); });
        CHECK(std::abs(discrete_tv(shifted) - 4.0) <= 40.0 / (N * N));
    }
    CHECK_THROWS(discrete_tv(ScalarField(g1, Complex(0.0, 1.0))));

    PeriodicGrid g2(2, 32);
    const auto f = random_field(g2, 3);
    ScalarField t(g2);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) t[g2.index((i + 5) % 32, (j + 11) % 32)] = f[g2.index(i, j)];
    CHECK(discrete_tv(t) == doctest::Approx(discrete_tv(f)).epsilon(1e-13));
}

TEST_CASE("divergence") {
    PeriodicGrid g(2, 32);
    const DiscreteVectorField cst({ScalarField(g, 0.3), ScalarField(g, -1.2)});
    CHECK(lp_norm(divergence(cst), kInfinity) <= 1e-14);
    const DiscreteVectorField shear({ScalarField::sample(g, [](double, double y) { return std::tanh(8 * std::sin(2 * pi * y)); }),
                                     ScalarField(g, 0.0)});
    CHECK(lp_norm(divergence(shear), kInfinity) <= 1e-12);

    PeriodicGrid g1(1, 128);
    const auto s = ScalarField::sample(g1, [](double x, double) { return std::sin(2 * pi * x); });
    const auto d = divergence(DiscreteVectorField({s}));
    const double h = g1.spacing();
    double err = 0.0;
    for (int i = 0; i < 128; ++i) {
        const double fd = (s[(i + 1) % 128].real() - s[(i + 127) % 128].real()) / (2 * h);
        err = std::max(err, std::abs(d[i].real() - fd));
    }
    CHECK(err <= 2 * pi * std::pow(2 * pi * h, 2));
}

TEST_CASE("mollifier kernel") {
    PeriodicGrid g(2, 64);
    const Mollifier m;
    CHECK(min_admissible_eps(g, m) == doctest::Approx(8.0 / 64));
    for (double eps : {1.0, 0.5, 0.25, 0.125}) {
        const auto k = kernel_samples(g, eps, m);
        CHECK(integral(k).real() == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const auto x = g.coordinate(i);
            if (std::hypot(min_image(x[0]), min_image(x[1])) >= eps * m.radius) CHECK(k[i] == Complex(0.0));
        }
    }
    CHECK_THROWS_AS(kernel_samples(g, 0.1, m), ResolutionError);
    try {
        mollify(ScalarField(g, 1.0), 0.05, m);
        FAIL("expected ResolutionError");
    } catch (const ResolutionError& e) {
        CHECK(e.min_admissible_eps() == doctest::Approx(0.125));
    }
}

TEST_CASE("mollify examples") {
    PeriodicGrid g(2, 64);
    const auto one = ScalarField(g, 1.0);
    CHECK(lp_distance(mollify(one, 0.5), one, kInfinity) <= 1e-14);

    // exp(2 pi i x) is an eigenfunction; eigenvalue from a direct node sum
    const auto e = ScalarField::sample(g, [](double x, double) { return std::polar(1.0, 2 * pi * x); });
    double prev = 0.0;
    for (double eps : {1.0, 0.5, 0.25, 0.125}) {
        Complex num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const auto x = g.coordinate(i);
            const double dx = min_image(x[0]), dy = min_image(x[1]);
            const double w = bump(std::hypot(dx, dy), 0.25 * eps);
            num += w * std::polar(1.0, -2 * pi * dx);
            den += w;
        }
        const Complex lambda = num / den;
        const auto me = mollify(e, eps);
        for (std::size_t i = 0; i < g.node_count(); i += 97) CHECK(std::abs(me[i] - lambda * e[i]) <= 1e-12);
        CHECK(std::abs(lambda) < 1.0);
        CHECK(std::abs(lambda) > prev);
        prev = std::abs(lambda);
    }
    CHECK(prev > 0.99);

    // spike -> rescaled kernel centred at the spike
    ScalarField spike(g, 0.0);
    const std::size_t c = g.index(20, 41);
    spike[c] = 1.0;
    const auto ms = mollify(spike, 0.25);
    double den = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto x = g.coordinate(i);
        den += bump(std::hypot(min_image(x[0]), min_image(x[1])), 0.0625);
    }
    const auto xc = g.coordinate(c);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto x = g.coordinate(i);
        const double w = bump(std::hypot(min_image(x[0] - xc[0]), min_image(x[1] - xc[1])), 0.0625) / den;
        CHECK(std::abs(ms[i] - w) <= 1e-13);
    }
}

TEST_CASE("mollification invariants") {
    PeriodicGrid g(2, 64);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto f = random_field(g, seed, seed % 2 == 1);
        for (double eps : {0.125, 0.3, 1.0}) {
            const auto mf = mollify(f, eps);
            for (double p : {1.0, 2.0, 4.0, kInfinity}) CHECK(lp_norm(mf, p) <= lp_norm(f, p) + 1e-10);
            CHECK(std::abs(integral(mf) - integral(f)) <= 1e-13);
        }
        const auto sm = smooth_random(g, seed);
        double prev = kInfinity;
        for (double eps : {1.0, 0.5, 0.25, 0.125}) {
            const double d = lp_distance(mollify(sm, eps), sm, 1.0);
            CHECK(d <= prev * 1.05);
            prev = d;
        }
        const DiscreteVectorField b({smooth_random(g, seed + 10), smooth_random(g, seed + 20)});
        const auto lhs = divergence(mollify(b, 0.25));
        const auto rhs = mollify(divergence(b), 0.25);
        CHECK(lp_distance(lhs, rhs, 2.0) <= 1e-10);
    }
}

TEST_CASE("binary container round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "roughflow_io_test";
    std::filesystem::create_directories(dir);
    PeriodicGrid g(2, 16);
    std::vector<ScalarField> snaps = {random_field(g, 1, false), random_field(g, 2, false)};
    const auto c = pack_snapshots(snaps, {0.0, 0.25}, ValueKind::complex);
    write_container(dir / "f.bin", c);
    const auto r = read_container(dir / "f.bin");
    CHECK(r.dim == 2);
    CHECK(r.points_per_axis == 16);
    CHECK(r.kind == ValueKind::complex);
    CHECK(r.components == 2);
    CHECK(r.times == std::vector<double>{0.0, 0.25});
    CHECK(r.payload == c.payload);
    const auto back = unpack_snapshots(r);
    REQUIRE(back.size() == 2);
    CHECK(lp_distance(back[1], snaps[1], kInfinity) == 0.0);

    std::ifstream in(dir / "f.bin", std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    CHECK(std::string(magic, 8) == "RFLOWBIN");
    CHECK(std::filesystem::file_size(dir / "f.bin") == 8 + 5 * 4 + 8 + 2 * 8 + 2 * 256 * 2 * 8);

    write_csv(dir / "t.csv", {"a", "b"}, {{0.1, 1.0 / 3.0}});
    std::ifstream csv(dir / "t.csv");
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header == "a,b");
    CHECK(std::stod(row.substr(row.find(',') + 1)) == 1.0 / 3.0);
    std::filesystem::remove_all(dir);
}
