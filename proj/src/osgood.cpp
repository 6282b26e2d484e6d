#include "roughflow/osgood.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "roughflow/errors.hpp"
#include "roughflow/spectral.hpp"

namespace roughflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 8-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 4> kGLNode = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                           0.9602898564975363};
constexpr std::array<double, 4> kGLWeight = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                             0.1012285362903763};

template <class F>
double gauss_legendre(F f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < kGLNode.size(); ++i)
        s += kGLWeight[i] * (f(mid - half * kGLNode[i]) + f(mid + half * kGLNode[i]));
    return s * half;
}

// int over s in [a, b] of e^{-s} / omega(e^{-s}); panels break at integers
double log_panel_integral(const ModulusSpec& spec, double a, double b) {
    auto g = [&](double s) {
        const double t = std::exp(-s);
        const double w = spec(t);
        if (!(w > 0.0)) throw GuardError("osgood_classify: non-positive omega sample at t = " + std::to_string(t));
        return t / w;
    };
    constexpr double kPanel = 0.25;
    double total = 0.0;
    double lo = a;
    while (lo < b) {
        const double hi = std::min(b, std::floor(lo) + 1.0);
        const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / kPanel)));
        const double w = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) total += gauss_legendre(g, lo + p * w, p + 1 == panels ? hi : lo + (p + 1) * w);
        lo = hi;
    }
    return total;
}

// least squares I = a + b phi(L) on the given points; returns (a, b)
template <class Phi>
std::pair<double, double> fit_affine(const std::vector<double>& L, const std::vector<double>& I, Phi phi) {
    const double n = static_cast<double>(L.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < L.size(); ++i) {
        const double x = phi(L[i]);
        sx += x;
        sy += I[i];
        sxx += x * x;
        sxy += x * I[i];
    }
    const double den = n * sxx - sx * sx;
    if (std::abs(den) < 1e-300) return {sy / n, 0.0};
    const double b = (n * sxy - sx * sy) / den;
    return {(sy - b * sx) / n, b};
}

template <class Phi>
double increment_mismatch(const std::vector<double>& L, const std::vector<double>& I, double b, Phi phi) {
    double worst = 0.0;
    for (std::size_t i = 1; i < L.size(); ++i) {
        const double actual = I[i] - I[i - 1];
        const double predicted = b * (phi(L[i]) - phi(L[i - 1]));
        if (actual == 0.0) {
            worst = std::max(worst, predicted == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            continue;
        }
        worst = std::max(worst, std::abs(predicted - actual) / std::abs(actual));
    }
    return worst;
}

}  // namespace

// ---------------------------------------------------------------- modulus

ModulusSpec ModulusSpec::power(double theta) {
    if (!(theta > 0.0)) throw GuardError("ModulusSpec: power exponent must be > 0");
    ModulusSpec m;
    m.kind = Kind::power;
    m.theta = theta;
    return m;
}

ModulusSpec ModulusSpec::log_lipschitz() {
    ModulusSpec m;
    m.kind = Kind::log_lipschitz;
    return m;
}

ModulusSpec ModulusSpec::table(std::vector<double> t, std::vector<double> omega) {
    if (t.size() < 2 || t.size() != omega.size()) throw GuardError("ModulusSpec: table needs >= 2 matching samples");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0 && t[i] <= 1.0)) throw GuardError("ModulusSpec: table abscissae must lie in (0, 1]");
        if (!(omega[i] > 0.0)) throw GuardError("ModulusSpec: non-positive omega sample in table");
        if (i > 0 && !(t[i] > t[i - 1])) throw GuardError("ModulusSpec: table abscissae must increase");
        if (i > 0 && omega[i] < omega[i - 1]) throw GuardError("ModulusSpec: omega must be non-decreasing");
    }
    ModulusSpec m;
    m.kind = Kind::table;
    m.table_t = std::move(t);
    m.table_omega = std::move(omega);
    return m;
}

double ModulusSpec::operator()(double t) const {
    switch (kind) {
        case Kind::power:
            return std::pow(t, theta);
        case Kind::log_lipschitz:
            return t <= std::exp(-1.0) ? -t * std::log(t) : std::exp(-1.0);
        case Kind::table: {
            const double x = std::log(t);
            std::size_t i = 1;
            while (i + 1 < table_t.size() && table_t[i] < t) ++i;
            const double x0 = std::log(table_t[i - 1]), x1 = std::log(table_t[i]);
            const double y0 = std::log(table_omega[i - 1]), y1 = std::log(table_omega[i]);
            return std::exp(y0 + (y1 - y0) * (x - x0) / (x1 - x0));
        }
    }
    return 0.0;
}

std::string ModulusSpec::name() const {
    switch (kind) {
        case Kind::power:
            return "power";
        case Kind::log_lipschitz:
            return "log_lipschitz";
        case Kind::table:
            return "table";
    }
    return "?";
}

std::optional<double> ModulusSpec::exact_integral(double delta) const {
    switch (kind) {
        case Kind::power:
            if (theta == 1.0) return -std::log(delta);
            return (1.0 - std::pow(delta, 1.0 - theta)) / (1.0 - theta);
        case Kind::log_lipschitz: {
            const double e1 = std::exp(-1.0);
            if (delta >= e1) return std::numbers::e * (1.0 - delta);
            return std::numbers::e - 1.0 + std::log(-std::log(delta));
        }
        case Kind::table:
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<double> ModulusSpec::exact_limit() const {
    switch (kind) {
        case Kind::power:
            if (theta >= 1.0) return std::numeric_limits<double>::infinity();
            return 1.0 / (1.0 - theta);
        case Kind::log_lipschitz:
            return std::numeric_limits<double>::infinity();
        case Kind::table:
            return std::nullopt;
    }
    return std::nullopt;
}

std::string to_string(OsgoodVerdict v) {
    switch (v) {
        case OsgoodVerdict::divergent:
            return "divergent";
        case OsgoodVerdict::convergent:
            return "convergent";
        case OsgoodVerdict::undecided:
            return "undecided";
    }
    return "?";
}

std::vector<double> default_osgood_deltas() {
    std::vector<double> d;
    for (int k = 1; k <= 12; ++k) d.push_back(std::pow(10.0, -k));
    return d;
}

OsgoodResult osgood_classify(const ModulusSpec& spec, const std::vector<double>& delta_list) {
    if (delta_list.size() < 4) throw GuardError("osgood_classify: need at least 4 delta values");
    for (std::size_t i = 0; i < delta_list.size(); ++i) {
        if (!(delta_list[i] > 0.0 && delta_list[i] < 1.0)) throw GuardError("osgood_classify: delta must lie in (0, 1)");
        if (i > 0 && !(delta_list[i] < delta_list[i - 1])) throw GuardError("osgood_classify: delta_list must decrease");
    }
    if (delta_list.back() > 1e-8) throw GuardError("osgood_classify: last delta must be <= 1e-8");

    OsgoodResult r;
    double s_prev = 0.0, acc = 0.0;
    for (double d : delta_list) {
        const double s = -std::log(d);
        acc += log_panel_integral(spec, s_prev, s);
        s_prev = s;
        r.rows.push_back({d, acc});
    }

    // tail: last four rows, three increments
    std::vector<double> L, I;
    for (std::size_t i = r.rows.size() - 4; i < r.rows.size(); ++i) {
        L.push_back(-std::log(r.rows[i].delta));
        I.push_back(r.rows[i].integral);
    }
    const double last_increment = std::abs(I[3] - I[2]);

    constexpr double kLawTol = 0.2;
    auto id = [](double x) { return x; };
    auto loglog = [](double x) { return std::log(x); };
    const double b_log = fit_affine(L, I, id).second;
    const double m_log = increment_mismatch(L, I, b_log, id);
    const double b_ll = fit_affine(L, I, loglog).second;
    const double m_ll = increment_mismatch(L, I, b_ll, loglog);

    double best_p = 0.0, best_m = std::numeric_limits<double>::infinity(), best_b = 0.0;
    auto try_p = [&](double p) {
        if (p == 0.0) return;
        auto phi = [p](double x) { return std::exp(p * x); };
        const auto [a, b] = fit_affine(L, I, phi);
        double res = 0.0;
        for (std::size_t i = 0; i < L.size(); ++i) res += std::pow(a + b * phi(L[i]) - I[i], 2);
        const double m = increment_mismatch(L, I, b, phi) + 1e-12 * res;
        if (m < best_m) {
            best_m = m;
            best_p = p;
            best_b = b;
        }
    };
    for (int k = -3000; k <= 3000; ++k) try_p(k * 1e-3);
    for (int k = -100; k <= 100; ++k) try_p(best_p + k * 1e-5);

    r.numeric_verdict = OsgoodVerdict::undecided;
    // best law wins; two-parameter laws are preferred on near ties
    const double two_param = std::min(m_log, m_ll);
    if (two_param <= kLawTol && two_param <= best_m + 1e-9) {
        r.growth_law = m_log <= m_ll ? "log" : "loglog";
        r.fit_mismatch = two_param;
    } else if (best_m <= kLawTol) {
        r.growth_law = "power";
        r.growth_exponent = best_p;
        r.fit_mismatch = best_m;
    }
    if (last_increment <= 1e-6) {
        r.numeric_verdict = OsgoodVerdict::convergent;
    } else if (r.growth_law == "log" || r.growth_law == "loglog") {
        const double b = r.growth_law == "log" ? b_log : b_ll;
        r.numeric_verdict = b > 0.0 ? OsgoodVerdict::divergent : OsgoodVerdict::undecided;
    } else if (r.growth_law == "power") {
        if (best_p > 0.0 && best_b > 0.0) {
            r.numeric_verdict = OsgoodVerdict::divergent;
        } else if (best_p < 0.0 && std::abs(best_b) * std::exp(best_p * L[3]) <= 1e-6) {
            r.numeric_verdict = OsgoodVerdict::convergent;
        }
    }

    if (const auto lim = spec.exact_limit()) {
        r.verdict = std::isinf(*lim) ? OsgoodVerdict::divergent : OsgoodVerdict::convergent;
        r.decided_by = "antiderivative";
    } else {
        r.verdict = r.numeric_verdict;
        r.decided_by = "quadrature";
    }
    return r;
}

// ---------------------------------------------------------------- lacunary sums

std::size_t lacunary_sample_count(int K) {
    const int e = std::min(std::max(K + 4, 14), 24);
    return std::size_t{1} << e;
}

std::size_t lacunary_quadrature_count(int K) {
    return std::size_t{1} << std::max(K + 5, 14);
}

namespace {

template <class Coeff>
std::vector<std::complex<double>> sparse_synthesis(int K, std::size_t M, Coeff coeff) {
    if (K < 0 || (K > 0 && (std::size_t{1} << K) >= M / 2))
        throw GuardError("lacunary: " + std::to_string(M) + " samples cannot resolve frequency 2^" + std::to_string(K));
    std::vector<std::complex<double>> c(M, 0.0);
    for (int k = 1; k <= K; ++k) c[std::size_t{1} << k] += coeff(k);
    const int shape[] = {static_cast<int>(M)};
    fft_in_place(c, shape, false);
    return c;
}

void check_K(int K, int max_K, const char* who) {
    if (K < 1 || K > max_K)
        throw GuardError(std::string(who) + ": K must lie in [1, " + std::to_string(max_K) + "], got " +
                         std::to_string(K));
}

}  // namespace

std::vector<std::complex<double>> lacunary_samples(int K, std::size_t M, double decay) {
    return sparse_synthesis(K, M, [decay](int k) { return std::complex<double>(std::pow(decay, k), 0.0); });
}

std::vector<double> default_weierstrass_steps() {
    std::vector<double> h;
    for (int j = 6; j <= 18; ++j) h.push_back(std::ldexp(1.0, -j));
    return h;
}

WeierstrassResult weierstrass_modulus(int K, const std::vector<double>& h_list) {
    check_K(K, 22, "weierstrass_modulus");
    const double h_min = kTwoPi * std::ldexp(1.0, -K - 1);
    for (double h : h_list)
        if (!(h >= h_min)) throw GuardError("weierstrass_modulus: h below 2 pi 2^(-K-1) = " + std::to_string(h_min));
    WeierstrassResult r;
    r.K = K;
    r.samples = lacunary_sample_count(K);
    for (double h : h_list) {
        const auto d = sparse_synthesis(K, r.samples, [h](int k) {
            return std::ldexp(1.0, -k) * (std::polar(1.0, std::ldexp(h, k)) - 1.0);
        });
        double s = 0.0;
        for (const auto& z : d) s = std::max(s, std::abs(z));
        r.rows.push_back({h, s});
    }
    // relative least squares on rows with h < 1 and S > 0
    double num = 0.0, den = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : r.rows) {
        if (!(row.h < 1.0 && row.sup_difference > 0.0)) continue;
        const double q = row.h * std::log2(1.0 / row.h) / row.sup_difference;
        num += q;
        den += q * q;
        pts.emplace_back(q, row.sup_difference);
    }
    if (den > 0.0) {
        r.c = num / den;
        double acc = 0.0;
        for (const auto& [q, s] : pts) acc += std::pow(1.0 - r.c * q, 2);
        r.residual = std::sqrt(acc / static_cast<double>(pts.size()));
    }
    return r;
}

double dilation_identity_defect(int K, int m) {
    check_K(K, 22, "dilation_identity_defect");
    if (m < 0 || K + m > 22) throw GuardError("dilation_identity_defect: need m >= 0 and K + m <= 22");
    const std::size_t M = lacunary_sample_count(K + m);
    if ((std::size_t{1} << (K + m)) >= M / 2) throw GuardError("dilation_identity_defect: K + m too large for the sample cap");
    const auto fK = lacunary_samples(K, M, 1.0);
    const auto fKm = m == 0 ? fK : lacunary_samples(K + m, M, 1.0);
    const std::size_t mask = M - 1;
    double worst = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        std::complex<double> rhs = fKm[j];
        for (int k = 1; k <= m; ++k) rhs -= std::polar(1.0, kTwoPi * static_cast<double>((j << k) & mask) / M);
        worst = std::max(worst, std::abs(fK[(j << m) & mask] - rhs));
    }
    return worst;
}

namespace {

// (1/N) sum_j |sum_{k=1..K} exp(i 2^(k+m) (t_j + offset h))|, t_j = j h, h = 2 pi / N;
// evaluated in shifted chunks of at most 2^24 samples
double mean_abs_chunked(int K, int m, std::size_t N, double offset) {
    constexpr std::size_t kChunk = std::size_t{1} << 24;
    const std::size_t C = std::min(N, kChunk);
    const std::size_t R = N / C;
    const int shape[] = {static_cast<int>(C)};
    std::vector<std::complex<double>> c(C);
    double total = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        std::fill(c.begin(), c.end(), 0.0);
        for (int k = 1; k <= K; ++k) {
            const double f = std::ldexp(1.0, k + m);
            const double turns = std::fmod(f * (static_cast<double>(r) + offset), static_cast<double>(N));
            c[static_cast<std::size_t>(std::fmod(f, static_cast<double>(C)))] +=
                std::polar(1.0, kTwoPi * turns / static_cast<double>(N));
        }
        fft_in_place(c, shape, false);
        double s = 0.0;
        for (const auto& z : c) s += std::abs(z);
        total += s;
    }
    return total / static_cast<double>(N);
}

}  // namespace

double lacunary_l1_norm(int K) {
    check_K(K, 20, "lacunary_l1_norm");
    return mean_abs_chunked(K, 0, lacunary_quadrature_count(K), 0.0);
}

LacunaryResult lacunary_l1_growth(const std::vector<int>& K_list) {
    if (K_list.size() < 2) throw GuardError("lacunary_l1_growth: need at least two K values");
    LacunaryResult r;
    r.bounds_hold = true;
    for (int K : K_list) {
        check_K(K, 20, "lacunary_l1_growth");
        const std::size_t N = lacunary_quadrature_count(K);
        const double norm = mean_abs_chunked(K, 0, N, 0.0);
        double gap = 0.0;
        // dilated sum on its own grid, midpoint nodes
        for (int m = 1; m <= 2; ++m) gap = std::max(gap, std::abs(mean_abs_chunked(K, m, N << m, 0.5) - norm));
        r.rows.push_back({K, norm, gap});
        if (!(norm >= 1.0 - 1e-9 && norm <= K + 1e-9)) r.bounds_hold = false;
    }
    std::vector<double> x, y;
    for (const auto& row : r.rows) {
        x.push_back(std::log(static_cast<double>(row.K)));
        y.push_back(row.l1_norm);
    }
    const auto [d, c] = fit_affine(x, y, [](double v) { return v; });
    double rr = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        rr += std::pow(y[i] - (c * x[i] + d), 2);
        yy += y[i] * y[i];
    }
    r.fit = {c, d, std::sqrt(rr / yy)};
    return r;
}

}  // namespace roughflow
