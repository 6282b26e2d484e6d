#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace roughflow {

/// Modulus of continuity omega on (0, 1].
struct ModulusSpec {
    enum class Kind { power, log_lipschitz, table };
    Kind kind = Kind::power;
    double theta = 1.0;
    /// table kind: increasing abscissae in (0, 1] and omega values;
    /// log-log linear interpolation, end slopes extended
    std::vector<double> table_t, table_omega;

    static ModulusSpec power(double theta);
    /// t log(1/t) for t <= 1/e, 1/e above (keeps omega non-decreasing)
    static ModulusSpec log_lipschitz();
    static ModulusSpec table(std::vector<double> t, std::vector<double> omega);

    double operator()(double t) const;
    std::string name() const;
    /// Closed-form integral of 1/omega over [delta, 1] when one exists.
    std::optional<double> exact_integral(double delta) const;
    /// Closed-form limit of the integral as delta -> 0 (infinity when divergent).
    std::optional<double> exact_limit() const;
};

enum class OsgoodVerdict { divergent, convergent, undecided };
std::string to_string(OsgoodVerdict v);

struct OsgoodRow {
    double delta;
    double integral;
};

struct OsgoodResult {
    OsgoodVerdict verdict = OsgoodVerdict::undecided;
    /// verdict from the quadrature table alone
    OsgoodVerdict numeric_verdict = OsgoodVerdict::undecided;
    /// "antiderivative" or "quadrature"
    std::string decided_by;
    /// best growth law on the tail: "log", "loglog", "power" or "none"
    std::string growth_law = "none";
    double growth_exponent = 0.0;  // power law only
    double fit_mismatch = 0.0;     // worst relative increment mismatch of the law
    std::vector<OsgoodRow> rows;
};

/// I(delta) = int_delta^1 dt / omega(t) by Gauss-Legendre panels in s = log(1/t).
/// delta_list: strictly decreasing, at least 4 entries, last <= 1e-8.
OsgoodResult osgood_classify(const ModulusSpec& spec, const std::vector<double>& delta_list);
/// 10^-1, 10^-2, ..., 10^-12
std::vector<double> default_osgood_deltas();

struct LinearFit {
    double c = 0.0;
    double d = 0.0;
    double residual = 0.0;
};

struct WeierstrassRow {
    double h;
    double sup_difference;
};

struct WeierstrassResult {
    int K = 0;
    std::size_t samples = 0;
    std::vector<WeierstrassRow> rows;
    /// S(h) ~ c h log2(1/h), least squares in relative error
    double c = 0.0;
    /// sqrt(mean((S - c x)^2 / S^2))
    double residual = 0.0;
};

/// Sample count for single-transform grids of u_K and f_K: 2^max(K + 4, 14), capped at 2^24.
std::size_t lacunary_sample_count(int K);

/// Trapezoid sample count for L1 norms of f_K: 2^max(K + 5, 14).
std::size_t lacunary_quadrature_count(int K);

/// sum_{k=1..K} coeff(k) exp(i 2^k t_j) on t_j = 2 pi j / M via one inverse FFT.
std::vector<std::complex<double>> lacunary_samples(int K, std::size_t M, double decay);

/// S(h) = max_t |u_K(t + h) - u_K(t)| for u_K = sum 2^-k exp(i 2^k t), K <= 22,
/// h >= 2 pi 2^(-K-1).
WeierstrassResult weierstrass_modulus(int K, const std::vector<double>& h_list);
/// 2^-j for j = 6..18
std::vector<double> default_weierstrass_steps();

/// max_t |f_K(2^m t) - (f_{K+m}(t) - sum_{k=1..m} e^{i 2^k t})|, m + K <= 22.
double dilation_identity_defect(int K, int m);

struct LacunaryRow {
    int K;
    double l1_norm;
    /// max over m = 1, 2 of |int |f_K(2^m t)| - int |f_K(t)||; the dilated side
    /// uses midpoint nodes on 2^m times as many points
    double dilation_gap;
};

struct LacunaryResult {
    std::vector<LacunaryRow> rows;
    /// norm ~ c log K + d, ordinary least squares; residual = |y - fit| / |y|
    LinearFit fit;
    bool bounds_hold = false;  // 1 <= norm <= K for every row
};

/// (1/2 pi) int |f_K| by the trapezoidal rule on lacunary_quadrature_count(K) points.
double lacunary_l1_norm(int K);
LacunaryResult lacunary_l1_growth(const std::vector<int>& K_list);

}  // namespace roughflow
