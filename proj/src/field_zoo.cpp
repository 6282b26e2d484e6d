#include "roughflow/field_zoo.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "roughflow/norms.hpp"
#include "roughflow/spectral.hpp"

namespace roughflow {

namespace {

constexpr double kPi = std::numbers::pi;

const std::map<FieldKind, std::map<std::string, double>>& defaults() {
    static const std::map<FieldKind, std::map<std::string, double>> d = {
        {FieldKind::constant, {{"c0", 0.25}, {"c1", 0.0}, {"dim", 2.0}}},
        {FieldKind::smooth_swirl, {{"compression", 0.0}}},
        {FieldKind::bv_shear, {{"height", 1.0}}},
        {FieldKind::singular_vortex, {{"gamma", 1.0}, {"x0", 0.5}, {"y0", 0.5}}},
        {FieldKind::attracting_sink, {{"alpha", 0.5}, {"x0", 0.5}, {"y0", 0.5}}},
        {FieldKind::powerlaw_hamiltonian, {{"alpha", 0.5}, {"charge", 1.0}}},
        {FieldKind::nbody_hamiltonian, {{"alpha", 1.0}, {"particles", 2.0}}},
    };
    return d;
}

double smooth_g(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double smooth_g_prime(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

struct Polar {
    double dx, dy, r;
    bool clamped;
};

// Minimum-image offset from the singular point, projected out to `clamp`.
Polar offset(const VectorFieldSpec& s, std::array<double, 2> x, double clamp) {
    Polar p{periodic_delta(s.param("x0"), x[0]), periodic_delta(s.param("y0"), x[1]), 0.0, false};
    p.r = std::hypot(p.dx, p.dy);
    if (p.r < clamp) {
        if (p.r == 0.0) {
            p.dx = clamp;
            p.dy = 0.0;
        } else {
            p.dx *= clamp / p.r;
            p.dy *= clamp / p.r;
        }
        p.r = clamp;
        p.clamped = true;
    }
    return p;
}

// Signed distance of q to the line q = 0, projected out to `clamp`; returns q in [0, 1).
double clamp_line(double q, double clamp, bool& clamped) {
    double d = periodic_delta(0.0, q);
    if (std::abs(d) < clamp) {
        d = d < 0.0 ? -clamp : clamp;
        clamped = true;
    }
    return wrap_unit(d);
}

}  // namespace

std::string to_string(FieldKind k) {
    switch (k) {
        case FieldKind::constant: return "constant";
        case FieldKind::smooth_swirl: return "smooth_swirl";
        case FieldKind::bv_shear: return "bv_shear";
        case FieldKind::singular_vortex: return "singular_vortex";
        case FieldKind::attracting_sink: return "attracting_sink";
        case FieldKind::powerlaw_hamiltonian: return "powerlaw_hamiltonian";
        case FieldKind::nbody_hamiltonian: return "nbody_hamiltonian";
    }
    return "unknown";
}

std::string to_string(RegularityClass r) {
    switch (r) {
        case RegularityClass::lipschitz: return "lipschitz";
        case RegularityClass::w11: return "W11";
        case RegularityClass::w11_star: return "W11_star";
        case RegularityClass::non_conforming: return "non-conforming";
    }
    return "unknown";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::conforming: return "conforming";
        case Verdict::non_conforming: return "non-conforming";
        case Verdict::resolution_limited: return "resolution-limited";
    }
    return "unknown";
}

FieldKind field_kind_from_string(const std::string& s) {
    for (const auto& [k, _] : defaults())
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown field kind '" + s + "'");
}

VectorFieldSpec::VectorFieldSpec(FieldKind kind, std::map<std::string, double> params)
    : kind_(kind), params_(defaults().at(kind)) {
    for (const auto& [name, value] : params) {
        if (!params_.count(name))
            throw std::invalid_argument("field '" + to_string(kind) + "': unknown parameter '" + name + "'");
        params_[name] = value;
    }
    if (kind_ == FieldKind::nbody_hamiltonian) {
        const auto n = static_cast<std::size_t>(param("particles"));
        masses_.assign(n, 1.0);
        charges_.assign(n, 1.0);
    }
    validate();
}

VectorFieldSpec VectorFieldSpec::constant(double c0, double c1) {
    return VectorFieldSpec(FieldKind::constant, {{"c0", c0}, {"c1", c1}});
}
VectorFieldSpec VectorFieldSpec::constant_1d(double c0) {
    return VectorFieldSpec(FieldKind::constant, {{"c0", c0}, {"c1", 0.0}, {"dim", 1.0}});
}
VectorFieldSpec VectorFieldSpec::smooth_swirl(double compression) {
    return VectorFieldSpec(FieldKind::smooth_swirl, {{"compression", compression}});
}
VectorFieldSpec VectorFieldSpec::bv_shear(double height) {
    return VectorFieldSpec(FieldKind::bv_shear, {{"height", height}});
}
VectorFieldSpec VectorFieldSpec::singular_vortex(double gamma, double x0, double y0) {
    return VectorFieldSpec(FieldKind::singular_vortex, {{"gamma", gamma}, {"x0", x0}, {"y0", y0}});
}
VectorFieldSpec VectorFieldSpec::attracting_sink(double alpha, double x0, double y0) {
    return VectorFieldSpec(FieldKind::attracting_sink, {{"alpha", alpha}, {"x0", x0}, {"y0", y0}});
}
VectorFieldSpec VectorFieldSpec::powerlaw_hamiltonian(double alpha, double charge) {
    return VectorFieldSpec(FieldKind::powerlaw_hamiltonian, {{"alpha", alpha}, {"charge", charge}});
}
VectorFieldSpec VectorFieldSpec::nbody_hamiltonian(double alpha, std::vector<double> masses,
                                                   std::vector<double> charges) {
    VectorFieldSpec s(FieldKind::nbody_hamiltonian,
                      {{"alpha", alpha}, {"particles", static_cast<double>(masses.size())}});
    s.masses_ = std::move(masses);
    s.charges_ = std::move(charges);
    s.validate();
    return s;
}

double VectorFieldSpec::param(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end())
        throw std::invalid_argument("field '" + to_string(kind_) + "' has no parameter '" + name + "'");
    return it->second;
}

void VectorFieldSpec::validate() const {
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("field '" + to_string(kind_) + "': " + what);
    };
    for (const auto& [name, v] : params_)
        if (!std::isfinite(v)) fail("parameter '" + name + "' must be finite");
    switch (kind_) {
        case FieldKind::constant:
            if (param("dim") != 1.0 && param("dim") != 2.0) fail("dim must be 1 or 2");
            break;
        case FieldKind::singular_vortex:
            if (!(param("gamma") > 0.0 && param("gamma") < 2.0)) fail("gamma must lie in (0, 2)");
            break;
        case FieldKind::attracting_sink:
        case FieldKind::powerlaw_hamiltonian:
            if (!(param("alpha") > 0.0 && param("alpha") <= 1.0)) fail("alpha must lie in (0, 1]");
            break;
        case FieldKind::nbody_hamiltonian: {
            if (!(param("alpha") > 0.0 && param("alpha") <= 1.0)) fail("alpha must lie in (0, 1]");
            const double n = param("particles");
            if (n < 2.0 || n != std::floor(n)) fail("particles must be an integer >= 2");
            if (masses_.size() != static_cast<std::size_t>(n) || charges_.size() != masses_.size())
                fail("masses and charges need one entry per particle");
            for (double m : masses_)
                if (!(m > 0.0)) fail("masses must be positive");
            break;
        }
        default: break;
    }
}

int VectorFieldSpec::dim() const {
    if (kind_ == FieldKind::constant) return static_cast<int>(param("dim"));
    if (kind_ == FieldKind::nbody_hamiltonian) return 6 * static_cast<int>(param("particles"));
    return 2;
}

RegularityClass VectorFieldSpec::declared_class() const {
    switch (kind_) {
        case FieldKind::constant:
        case FieldKind::smooth_swirl: return RegularityClass::lipschitz;
        case FieldKind::bv_shear: return RegularityClass::w11_star;
        case FieldKind::singular_vortex: return RegularityClass::w11;
        case FieldKind::attracting_sink: return RegularityClass::non_conforming;
        // one degree of freedom: |q|^{-alpha-1} is not integrable on a line
        case FieldKind::powerlaw_hamiltonian: return RegularityClass::non_conforming;
        case FieldKind::nbody_hamiltonian:
            return param("alpha") < 1.0 ? RegularityClass::w11 : RegularityClass::non_conforming;
    }
    return RegularityClass::non_conforming;
}

bool VectorFieldSpec::has_closed_form_divergence() const {
    if (kind_ == FieldKind::nbody_hamiltonian) return false;
    if (kind_ == FieldKind::attracting_sink) return param("alpha") < 1.0;
    return true;
}

std::vector<std::array<double, 2>> VectorFieldSpec::singular_points() const {
    if (kind_ == FieldKind::singular_vortex || kind_ == FieldKind::attracting_sink)
        return {{param("x0"), param("y0")}};
    return {};
}

nlohmann::json VectorFieldSpec::to_json() const {
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [k, v] : params_) p[k] = v;
    if (kind_ == FieldKind::nbody_hamiltonian) {
        p["masses"] = masses_;
        p["charges"] = charges_;
    }
    return {{"kind", to_string(kind_)}, {"params", p}};
}

VectorFieldSpec VectorFieldSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("field: descriptor needs a 'kind'");
    for (const auto& [key, _] : j.items())
        if (key != "kind" && key != "params") throw std::invalid_argument("field: unknown key '" + key + "'");
    const auto kind = field_kind_from_string(j.at("kind").get<std::string>());
    std::map<std::string, double> params;
    std::vector<double> masses, charges;
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw std::invalid_argument("field: 'params' must be an object");
        for (const auto& [key, v] : j["params"].items()) {
            if (kind == FieldKind::nbody_hamiltonian && (key == "masses" || key == "charges")) {
                (key == "masses" ? masses : charges) = v.get<std::vector<double>>();
                continue;
            }
            if (!v.is_number()) throw std::invalid_argument("field: parameter '" + key + "' must be a number");
            params[key] = v.get<double>();
        }
    }
    if (kind == FieldKind::nbody_hamiltonian) {
        const double alpha = params.count("alpha") ? params["alpha"] : 1.0;
        std::size_t n = masses.empty() ? static_cast<std::size_t>(params.count("particles") ? params["particles"] : 2.0)
                                       : masses.size();
        if (masses.empty()) masses.assign(n, 1.0);
        if (charges.empty()) charges.assign(n, 1.0);
        return nbody_hamiltonian(alpha, masses, charges);
    }
    return VectorFieldSpec(kind, params);
}

double cutoff(double r) {
    if (r <= 0.125) return 1.0;
    if (r >= 0.25) return 0.0;
    const double s = (r - 0.125) / 0.125;
    const double a = smooth_g(1.0 - s);
    return a / (a + smooth_g(s));
}

double cutoff_derivative(double r) {
    if (r <= 0.125 || r >= 0.25) return 0.0;
    const double s = (r - 0.125) / 0.125;
    const double a = smooth_g(1.0 - s), b = smooth_g(s);
    const double da = -smooth_g_prime(1.0 - s), db = smooth_g_prime(s);
    // d/ds [a / (a + b)] times ds/dr = 8
    return 8.0 * (da * b - a * db) / ((a + b) * (a + b));
}

FieldValue eval_field(const VectorFieldSpec& spec, std::array<double, 2> x, double clamp_radius) {
    FieldValue out;
    switch (spec.kind()) {
        case FieldKind::constant:
            out.v = {spec.param("c0"), spec.dim() == 2 ? spec.param("c1") : 0.0};
            break;
        case FieldKind::smooth_swirl:
            out.v = {std::sin(2 * kPi * x[1]) + spec.param("compression") * std::sin(2 * kPi * x[0]),
                     std::sin(2 * kPi * x[0])};
            break;
        case FieldKind::bv_shear: {
            const double y = wrap_unit(x[1]);
            out.v = {y < 0.5 ? spec.param("height") : -spec.param("height"), 0.0};
            break;
        }
        case FieldKind::singular_vortex: {
            const auto p = offset(spec, x, clamp_radius);
            const double f = cutoff(p.r) * std::pow(p.r, -spec.param("gamma"));
            out.v = {-p.dy * f, p.dx * f};
            out.clamped = p.clamped;
            break;
        }
        case FieldKind::attracting_sink: {
            const auto p = offset(spec, x, clamp_radius);
            const double f = -cutoff(p.r) * std::pow(p.r, -1.0 - spec.param("alpha"));
            out.v = {p.dx * f, p.dy * f};
            out.clamped = p.clamped;
            break;
        }
        case FieldKind::powerlaw_hamiltonian: {
            const double q = clamp_line(x[0], clamp_radius, out.clamped);
            const double pw = wrap_unit(x[1]);
            const double p = pw < 0.5 ? pw : pw - 1.0;
            const double a = spec.param("alpha");
            const double s = std::sin(kPi * q);
            out.v = {p, spec.param("charge") * a * kPi * std::cos(kPi * q) * std::pow(s, -a - 1.0)};
            break;
        }
        case FieldKind::nbody_hamiltonian:
            throw std::invalid_argument("eval_field: nbody_hamiltonian lives in R^{6n}; use eval_nbody");
    }
    return out;
}

double eval_divergence(const VectorFieldSpec& spec, std::array<double, 2> x, double clamp_radius) {
    if (!spec.has_closed_form_divergence())
        throw std::invalid_argument("eval_divergence: no closed form for " + to_string(spec.kind()));
    switch (spec.kind()) {
        case FieldKind::smooth_swirl:
            return 2 * kPi * spec.param("compression") * std::cos(2 * kPi * x[0]);
        case FieldKind::attracting_sink: {
            const auto p = offset(spec, x, clamp_radius);
            const double a = spec.param("alpha");
            return -(1.0 - a) * cutoff(p.r) * std::pow(p.r, -1.0 - a) - cutoff_derivative(p.r) * std::pow(p.r, -a);
        }
        default: return 0.0;
    }
}

std::vector<double> eval_nbody(const VectorFieldSpec& spec, const std::vector<double>& state) {
    if (spec.kind() != FieldKind::nbody_hamiltonian) throw std::invalid_argument("eval_nbody: not an nbody spec");
    const std::size_t n = spec.masses().size();
    if (state.size() != 6 * n) throw std::invalid_argument("eval_nbody: state must have 6 * particles entries");
    const double a = spec.param("alpha");
    std::vector<double> out(6 * n, 0.0);
    const double* q = state.data();
    const double* p = state.data() + 3 * n;
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) out[3 * i + c] = p[3 * i + c] / spec.masses()[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double d[3], r2 = 0.0;
            for (int c = 0; c < 3; ++c) {
                d[c] = q[3 * i + c] - q[3 * j + c];
                r2 += d[c] * d[c];
            }
            if (r2 == 0.0) throw std::domain_error("eval_nbody: collision (q_i = q_j)");
            const double w = a * spec.charges()[i] * spec.charges()[j] * std::pow(r2, -(a + 2.0) / 2.0);
            for (int c = 0; c < 3; ++c) out[3 * n + 3 * i + c] += w * d[c];
        }
    return out;
}

DiscreteVectorField sample_field(const VectorFieldSpec& spec, const PeriodicGrid& grid, std::size_t* clamped_nodes) {
    if (!spec.grid_supported()) throw std::invalid_argument("sample_field: " + to_string(spec.kind()) + " has no grid form");
    if (spec.dim() != grid.dim())
        throw std::invalid_argument("sample_field: field dimension " + std::to_string(spec.dim()) +
                                    " does not match grid dimension " + std::to_string(grid.dim()));
    std::vector<ScalarField> comps(static_cast<std::size_t>(grid.dim()), ScalarField(grid));
    std::size_t clamped = 0;
    const double clamp = grid.spacing() / 2.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const auto v = eval_field(spec, grid.coordinate(i), clamp);
        for (int a = 0; a < grid.dim(); ++a) comps[a][i] = v.v[a];
        clamped += v.clamped ? 1 : 0;
    }
    if (clamped_nodes) *clamped_nodes = clamped;
    return DiscreteVectorField(std::move(comps));
}

ScalarField sample_divergence(const VectorFieldSpec& spec, const PeriodicGrid& grid) {
    if (!spec.has_closed_form_divergence()) return divergence(sample_field(spec, grid));
    const double clamp = grid.spacing() / 2.0;
    return ScalarField::sample(grid, [&](double x, double y) { return Complex(eval_divergence(spec, {x, y}, clamp)); });
}

ConditionReport check_conditions(const VectorFieldSpec& spec, const PeriodicGrid& grid, int max_points_per_axis) {
    ConditionReport rep;
    rep.points_per_axis = grid.points_per_axis();
    std::ostringstream notes;
    if (!spec.grid_supported()) {
        // symbolic: div b = 0 (Hamiltonian), grad b ~ |q|^{-alpha-2} integrable in R^3 iff alpha < 1
        rep.verdict = spec.param("alpha") < 1.0 ? Verdict::conforming : Verdict::non_conforming;
        notes << "symbolic verdict: divergence-free Hamiltonian field, |grad b| ~ |q_i - q_j|^(-alpha-2) is "
              << (spec.param("alpha") < 1.0 ? "locally integrable" : "not locally integrable")
              << " in R^3; growth condition b/(1+|x|) in L^inf + L^1 fails (metadata only)";
        rep.notes = notes.str();
        return rep;
    }
    auto measure = [&](const PeriodicGrid& g) {
        const auto b = sample_field(spec, g);
        double tv = 0.0;
        for (const auto& c : b.components()) tv += discrete_tv(c);
        return std::make_pair(lp_norm(sample_divergence(spec, g), kInfinity), tv);
    };
    const auto [div1, tv1] = measure(grid);
    rep.div_sup_estimate = div1;
    rep.w11_star_estimate = tv1;
    if (2 * grid.points_per_axis() > max_points_per_axis) {
        rep.verdict = Verdict::resolution_limited;
        notes << "refinement to N=" << 2 * grid.points_per_axis() << " exceeds the limit " << max_points_per_axis;
        rep.notes = notes.str();
        return rep;
    }
    const auto [div2, tv2] = measure(grid.refined());
    auto growth = [](double a, double b) {
        constexpr double tiny = 1e-9;
        if (a < tiny && b < tiny) return 1.0;
        return b / std::max(a, tiny);
    };
    rep.div_growth = growth(div1, div2);
    rep.w11_growth = growth(tv1, tv2);
    const bool ok = rep.div_growth < 1.5 && rep.w11_growth < 1.5;
    rep.verdict = ok ? Verdict::conforming : Verdict::non_conforming;
    notes << "sup|div b| " << div1 << " -> " << div2 << " (x" << rep.div_growth << "), TV " << tv1 << " -> " << tv2
          << " (x" << rep.w11_growth << ") under N=" << grid.points_per_axis() << " -> " << 2 * grid.points_per_axis()
          << "; declared class " << to_string(spec.declared_class())
          << (spec.has_closed_form_divergence() ? ", closed-form divergence" : ", spectral divergence");
    rep.notes = notes.str();
    return rep;
}

}  // namespace roughflow
