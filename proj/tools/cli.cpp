#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "roughflow/diperna_lions.hpp"
#include "roughflow/errors.hpp"
#include "roughflow/field_zoo.hpp"
#include "roughflow/flow.hpp"
#include "roughflow/io.hpp"
#include "roughflow/norms.hpp"
#include "roughflow/osgood.hpp"
#include "roughflow/transport.hpp"

#ifndef ROUGHFLOW_VERSION
#define ROUGHFLOW_VERSION "0.0.0"
#endif

namespace roughflow::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Bad user input; reported with exit 2 before anything is written.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical verdict came out negative.
struct Outcome {
    json results = json::object();
    std::string verdict;
    bool ok = true;
    std::vector<std::pair<std::string, std::function<void(const fs::path&)>>> artifacts;
    std::string summary;
};

// ---------------------------------------------------------------- config schema

const std::set<std::string>& grid_commands() {
    static const std::set<std::string> s = {"solve", "commutator", "cascade", "renormalize", "uniqueness",
                                            "stability", "flow", "reverse", "check-field"};
    return s;
}

json defaults_for(const std::string& sub) {
    json d = {{"seed", 0}};
    if (grid_commands().count(sub)) {
        d["field"] = {{"kind", "bv_shear"}};
        d["grid"] = 64;
    }
    auto transport = [&](const char* interp) {
        d["T"] = 0.5;
        d["dt"] = nullptr;
        d["interp"] = interp;
        d["trace_substeps"] = 0;
    };
    auto cascade = [&] {
        transport("cubic");
        d["initial"] = "cos_x";
        d["eps_schedule"] = json::array();
        d["delta_schedule"] = json::array();
        d["mollifier_radius"] = 0.25;
        d["s"] = nullptr;
        d["gap_threshold"] = 1e-3;
        d["max_snapshots"] = 128;
    };
    if (sub == "solve") {
        transport("linear");
        d["initial"] = "cos_x";
        d["mode"] = "classical";
        d["viscosity"] = 0.0;
        d["max_snapshots"] = 128;
    } else if (sub == "characteristics") {
        d["field"] = {{"kind", "singular_vortex"}};
        d["start"] = {0.6, 0.5};
        d["T"] = 1.0;
        d["dt"] = 1e-3;
        d["reverse"] = false;
        d["clamp_radius"] = kDefaultClampRadius;
    } else if (sub == "commutator") {
        d["initial"] = "cos_x";
        d["eps_schedule"] = json::array();
        d["mollifier_radius"] = 0.25;
    } else if (sub == "cascade") {
        cascade();
    } else if (sub == "renormalize") {
        cascade();
    } else if (sub == "uniqueness") {
        transport("linear");
        d["etas"] = {1e-3, 2e-3, 4e-3};
        d["tolerance"] = 0.1;
    } else if (sub == "stability") {
        cascade();
        d["plan"] = "mollified_field";
        d["n_values"] = {2, 3, 4, 5, 6};
    } else if (sub == "flow") {
        transport("cubic");
        d["initial"] = "cos_x";
        d["boxes"] = 8;
    } else if (sub == "reverse") {
        transport("cubic");
        d["field"] = {{"kind", "attracting_sink"}, {"params", {{"alpha", 0.8}}}};
        d["grid"] = 256;
        d["control"] = {{"kind", "smooth_swirl"}};
        d["initial"] = "product";
        d["eps_list"] = json::array();
        d["factor"] = 10.0;
    } else if (sub == "osgood") {
        d["modulus"] = {{"kind", "log_lipschitz"}};
        d["deltas"] = json::array();
    } else if (sub == "weierstrass") {
        d["K"] = 20;
        d["h_list"] = json::array();
    } else if (sub == "lacunary") {
        d["K_list"] = {1, 2, 4, 8, 16, 20};
    } else if (sub == "check-field") {
        d["field"] = {{"kind", "attracting_sink"}, {"params", {{"alpha", 0.9}}}};
        d["max_grid"] = kMaxConditionGrid;
    }
    return d;
}

bool type_matches(const json& def, const json& v) {
    if (def.is_null()) return v.is_null() || v.is_number();
    if (def.is_boolean()) return v.is_boolean();
    if (def.is_number_integer() || def.is_number_unsigned()) return v.is_number_integer() || v.is_number_unsigned();
    if (def.is_number()) return v.is_number();
    if (def.is_string()) return v.is_string();
    if (def.is_array()) return v.is_array() || (v.is_null());
    if (def.is_object()) return v.is_object();
    return false;
}

std::string type_name(const json& def) {
    if (def.is_null()) return "number or null";
    if (def.is_boolean()) return "boolean";
    if (def.is_number_integer() || def.is_number_unsigned()) return "integer";
    if (def.is_number()) return "number";
    if (def.is_string()) return "string";
    if (def.is_array()) return "array";
    return "object";
}

class Config {
public:
    Config(std::string sub, json values) : sub_(std::move(sub)), v_(std::move(values)) {}

    const json& raw() const { return v_; }
    const json& at(const std::string& k) const { return v_.at(k); }
    bool is_null(const std::string& k) const { return v_.at(k).is_null(); }
    double num(const std::string& k) const { return v_.at(k).get<double>(); }
    int integer(const std::string& k) const { return v_.at(k).get<int>(); }
    std::string str(const std::string& k) const { return v_.at(k).get<std::string>(); }

    std::vector<double> numbers(const std::string& k) const {
        const auto& a = v_.at(k);
        if (a.is_null()) return {};
        std::vector<double> out;
        for (const auto& e : a) {
            if (!e.is_number()) throw ConfigError(k + ": entries must be numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const std::string& k) const {
        std::vector<int> out;
        for (const auto& e : v_.at(k)) {
            if (!e.is_number_integer()) throw ConfigError(k + ": entries must be integers");
            out.push_back(e.get<int>());
        }
        return out;
    }

    void require(bool cond, const std::string& key, const std::string& what) const {
        if (!cond) throw ConfigError(key + ": " + what);
    }

private:
    std::string sub_;
    json v_;
};

Config load_config(const Invocation& inv) {
    const json defaults = defaults_for(inv.subcommand);
    json user = json::object();
    if (inv.config) {
        std::ifstream in(*inv.config);
        if (!in) throw ConfigError("--config: cannot open " + inv.config->string());
        try {
            user = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("--config: malformed JSON: ") + e.what());
        }
        if (!user.is_object()) throw ConfigError("--config: top level must be an object");
    }
    json resolved = defaults;
    for (const auto& [key, value] : user.items()) {
        if (key == "out") {
            if (!value.is_string()) throw ConfigError("out: expected string");
            continue;
        }
        if (!defaults.contains(key))
            throw ConfigError(key + ": unknown key for subcommand '" + inv.subcommand + "'");
        if (!type_matches(defaults[key], value)) throw ConfigError(key + ": expected " + type_name(defaults[key]));
        resolved[key] = value;
    }
    if (inv.seed) resolved["seed"] = *inv.seed;
    if (inv.grid) {
        if (!resolved.contains("grid")) throw ConfigError("--grid: subcommand '" + inv.subcommand + "' has no grid");
        resolved["grid"] = *inv.grid;
    }
    return Config(inv.subcommand, resolved);
}

fs::path output_dir(const Invocation& inv) {
    if (inv.out) return *inv.out;
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    if (inv.config) {
        std::ifstream in(*inv.config);
        const json user = json::parse(in, nullptr, false);
        if (user.is_object() && user.contains("out") && user["out"].is_string()) return user["out"].get<std::string>();
    }
    return ".";
}

// ---------------------------------------------------------------- shared builders

VectorFieldSpec field_from(const Config& c, const std::string& key = "field") {
    try {
        return VectorFieldSpec::from_json(c.at(key));
    } catch (const std::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

PeriodicGrid grid_from(const Config& c, const VectorFieldSpec& spec) {
    const int n = c.integer("grid");
    c.require(is_power_of_two(n) && n >= 16 && n <= 4096, "grid", "must be a power of two in [16, 4096]");
    if (!spec.grid_supported()) throw ConfigError("field: kind " + to_string(spec.kind()) + " has no grid sampling");
    return PeriodicGrid(spec.dim(), n);
}

const std::set<std::string>& initial_names() {
    static const std::set<std::string> s = {"cos_x", "sin_x", "cos_y", "product", "bump", "one", "exp_x", "step_x"};
    return s;
}

ScalarField initial_data(const Config& c, const PeriodicGrid& g) {
    const std::string name = c.str("initial");
    if (!initial_names().count(name)) throw ConfigError("initial: unknown profile '" + name + "'");
    if (g.dim() == 1 && (name == "cos_y" || name == "product"))
        throw ConfigError("initial: profile '" + name + "' needs a 2-D grid");
    return ScalarField::sample(g, [&](double x, double y) -> Complex {
        if (name == "cos_x") return std::cos(kTwoPi * x);
        if (name == "sin_x") return std::sin(kTwoPi * x);
        if (name == "cos_y") return std::cos(kTwoPi * y);
        if (name == "product") return std::cos(kTwoPi * x) * std::cos(kTwoPi * y) + 0.5 * std::sin(kTwoPi * y);
        if (name == "one") return 1.0;
        if (name == "exp_x") return std::polar(1.0, kTwoPi * x);
        if (name == "step_x") return x < 0.5 ? 1.0 : 0.0;
        const double dx = periodic_delta(0.5, x);
        const double dy = g.dim() == 2 ? periodic_delta(0.5, y) : 0.0;
        const double s = std::hypot(dx, dy) / 0.25;
        return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
    });
}

Interp interp_from(const Config& c) {
    try {
        return interp_from_string(c.str("interp"));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("interp: ") + e.what());
    }
}

void check_transport_keys(const Config& c) {
    c.require(c.num("T") > 0.0 && std::isfinite(c.num("T")), "T", "must be a positive finite number");
    c.require(c.is_null("dt") || c.num("dt") > 0.0, "dt", "must be > 0 (omit or null for the default)");
    c.require(c.integer("trace_substeps") >= 0, "trace_substeps", "must be >= 0 (0 picks automatically)");
    interp_from(c);
}

TransportOptions transport_from(const Config& c) {
    TransportOptions o;
    o.T = c.num("T");
    o.dt = c.is_null("dt") ? 0.0 : c.num("dt");
    o.interp = interp_from(c);
    o.trace_substeps = c.integer("trace_substeps");
    return o;
}

void check_schedule(const Config& c, const std::string& key) {
    const auto v = c.numbers(key);
    for (std::size_t i = 0; i < v.size(); ++i) {
        c.require(v[i] > 0.0 && v[i] <= 1.0, key, "entries must lie in (0, 1]");
        if (i > 0) c.require(v[i] < v[i - 1], key, "entries must decrease");
    }
}

CascadeOptions cascade_from(const Config& c) {
    check_transport_keys(c);
    check_schedule(c, "eps_schedule");
    if (c.raw().contains("delta_schedule")) check_schedule(c, "delta_schedule");
    const double r = c.num("mollifier_radius");
    c.require(r > 0.0 && r < 0.5, "mollifier_radius", "must lie in (0, 1/2)");
    c.require(c.is_null("s") || c.num("s") > 0.0, "s", "must be > 0 (null for the default)");
    c.require(c.num("gap_threshold") > 0.0, "gap_threshold", "must be > 0");
    c.require(c.integer("max_snapshots") >= 0, "max_snapshots", "must be >= 0");
    CascadeOptions o;
    o.T = c.num("T");
    o.dt = c.is_null("dt") ? 0.0 : c.num("dt");
    o.interp = interp_from(c);
    o.trace_substeps = c.integer("trace_substeps");
    o.max_snapshots = c.integer("max_snapshots");
    o.eps_schedule = c.numbers("eps_schedule");
    if (c.raw().contains("delta_schedule")) o.delta_schedule = c.numbers("delta_schedule");
    if (!o.delta_schedule.empty() && o.delta_schedule.size() != o.eps_schedule.size())
        throw ConfigError("delta_schedule: must match eps_schedule in length");
    o.mollifier.radius = r;
    o.s = c.is_null("s") ? 0.0 : c.num("s");
    o.gap_threshold = c.num("gap_threshold");
    return o;
}

int stride_for(const DiscreteVectorField& b, const TransportOptions& o, int max_snapshots) {
    const double dt = o.dt > 0.0 ? o.dt : default_dt(b);
    const int steps = static_cast<int>(std::ceil(o.T / dt - 1e-9));
    if (max_snapshots <= 0) return 1;
    return std::max(1, (steps + max_snapshots - 1) / max_snapshots);
}

json to_json_list(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

ValueKind kind_of(const std::vector<ScalarField>& snaps) {
    for (const auto& s : snaps)
        if (!s.is_real(0.0)) return ValueKind::complex;
    return ValueKind::real;
}

void add_trajectory(Outcome& o, const std::string& name, const Trajectory& t) {
    o.artifacts.emplace_back(name, [t](const fs::path& p) {
        write_container(p, pack_snapshots(t.snapshots, t.times, kind_of(t.snapshots)));
    });
}

void add_csv(Outcome& o, const std::string& name, std::vector<std::string> header,
             std::vector<std::vector<double>> rows) {
    o.artifacts.emplace_back(name, [header = std::move(header), rows = std::move(rows)](const fs::path& p) {
        write_csv(p, header, rows);
    });
}

// ---------------------------------------------------------------- subcommands

Outcome cmd_solve(const Config& c) {
    const auto spec = field_from(c);
    const auto g = grid_from(c, spec);
    check_transport_keys(c);
    const std::string mode = c.str("mode");
    c.require(mode == "classical" || mode == "viscous" || mode == "density", "mode",
              "must be classical, viscous or density");
    c.require(c.num("viscosity") >= 0.0, "viscosity", "must be >= 0");
    c.require(mode == "viscous" || c.num("viscosity") == 0.0, "viscosity", "only meaningful with mode viscous");
    c.require(c.integer("max_snapshots") >= 0, "max_snapshots", "must be >= 0");
    const auto u0 = initial_data(c, g);

    std::size_t clamped = 0;
    const auto b = sample_field(spec, g, &clamped);
    auto opt = transport_from(c);
    opt.record_stride = stride_for(b, opt, c.integer("max_snapshots"));
    Trajectory traj(g);
    if (mode == "classical") {
        traj = solve_classical_transport(b, u0, opt);
    } else if (mode == "viscous") {
        traj = solve_viscous(b, u0, c.num("viscosity"), opt);
    } else {
        traj = solve_density(b, u0, opt);
    }

    Outcome o;
    std::vector<std::vector<double>> rows;
    const double sup0 = lp_norm(u0, kInfinity);
    const Complex mass0 = integral(u0);
    double max_violation = 0.0, mass_drift = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& u = traj.snapshots[i];
        const double linf = lp_norm(u, kInfinity);
        const Complex mass = integral(u);
        max_violation = std::max(max_violation, linf - sup0);
        mass_drift = std::max(mass_drift, std::abs(mass - mass0));
        rows.push_back({traj.times[i], lp_norm(u, 1.0), lp_norm(u, 2.0), linf, mass.real(), mass.imag()});
    }
    o.results = {{"mode", mode},
                 {"snapshots", traj.size()},
                 {"record_stride", opt.record_stride},
                 {"clamped_nodes", clamped},
                 {"initial_l1", lp_norm(u0, 1.0)},
                 {"initial_linf", sup0},
                 {"final_l1", lp_norm(traj.final(), 1.0)},
                 {"final_l2", lp_norm(traj.final(), 2.0)},
                 {"final_linf", lp_norm(traj.final(), kInfinity)},
                 {"max_principle_violation", std::max(0.0, max_violation)},
                 {"mass_drift", mass_drift},
                 {"final_time", traj.times.back()}};
    o.verdict = "solved";
    add_csv(o, "norms.csv", {"t", "l1", "l2", "linf", "mass_re", "mass_im"}, rows);
    add_trajectory(o, "trajectory.bin", traj);
    if (g.points_per_axis() <= 128) {
        const ScalarField last = traj.final();
        o.artifacts.emplace_back("final.csv", [last](const fs::path& p) { write_field_csv(p, last); });
    }
    std::ostringstream s;
    s << "solve (" << mode << "): " << traj.size() << " snapshots, final L1 " << format_double(lp_norm(traj.final(), 1.0));
    o.summary = s.str();
    return o;
}

Outcome cmd_characteristics(const Config& c) {
    const auto spec = field_from(c);
    const auto start = c.numbers("start");
    const std::size_t want = static_cast<std::size_t>(spec.dim());
    c.require(start.size() == want, "start", "needs " + std::to_string(want) + " coordinates for this field");
    c.require(c.num("T") > 0.0, "T", "must be > 0");
    c.require(c.num("dt") > 0.0, "dt", "must be > 0");
    c.require(c.num("clamp_radius") > 0.0, "clamp_radius", "must be > 0");
    const auto path = solve_characteristics(spec, start, c.num("T"), c.num("dt"), c.at("reverse").get<bool>(),
                                            c.num("clamp_radius"));
    Outcome o;
    std::vector<std::string> header = {"t"};
    for (std::size_t k = 0; k < want; ++k) header.push_back("x" + std::to_string(k));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        std::vector<double> r = {path.times[i]};
        r.insert(r.end(), path.points[i].begin(), path.points[i].end());
        rows.push_back(std::move(r));
    }
    o.results = {{"steps", path.times.size() - 1},
                 {"final", to_json_list(path.points.back())},
                 {"start", to_json_list(path.start)},
                 {"singular_grazing", path.singular_grazing}};
    o.verdict = path.singular_grazing ? "grazed singular set" : "regular";
    add_csv(o, "path.csv", header, rows);
    o.summary = "characteristics: " + std::to_string(path.times.size() - 1) + " steps, " + o.verdict;
    return o;
}

Outcome cmd_commutator(const Config& c) {
    const auto spec = field_from(c);
    const auto g = grid_from(c, spec);
    check_schedule(c, "eps_schedule");
    const double r = c.num("mollifier_radius");
    c.require(r > 0.0 && r < 0.5, "mollifier_radius", "must lie in (0, 1/2)");
    const auto u = initial_data(c, g);
    Mollifier m;
    m.radius = r;
    auto eps = c.numbers("eps_schedule");
    if (eps.empty()) eps = default_eps_schedule(g, m);
    const auto rows = commutator_sweep(spec, u, eps, m);
    Outcome o;
    std::vector<std::vector<double>> table;
    json jr = json::array();
    for (const auto& row : rows) {
        table.push_back({row.eps, row.l1_norm});
        jr.push_back({{"eps", row.eps}, {"l1_norm", row.l1_norm}});
    }
    const auto b = sample_field(spec, g);
    double tv = 0.0;
    for (int i = 0; i < b.dim(); ++i) tv += discrete_tv(b.component(i));
    bool non_increasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].l1_norm > rows[i - 1].l1_norm * (1.0 + 1e-9)) non_increasing = false;
    o.results = {{"rows", jr},
                 {"field_tv", tv},
                 {"u_linf", lp_norm(u, kInfinity)},
                 {"non_increasing", non_increasing},
                 {"min_admissible_eps", min_admissible_eps(g, m)}};
    o.verdict = non_increasing ? "non-increasing" : "not monotone";
    add_csv(o, "commutator.csv", {"eps", "l1_norm"}, table);
    o.summary = "commutator: " + std::to_string(rows.size()) + " eps values, " + o.verdict;
    return o;
}

json cascade_json(const CascadeResult& r) {
    json stages = json::array();
    for (std::size_t k = 0; k < r.eps_schedule.size(); ++k) {
        double rmax = 0.0;
        if (k < r.remainder_tv.size())
            for (double v : r.remainder_tv[k]) rmax = std::max(rmax, v);
        stages.push_back({{"eps", r.eps_schedule[k]},
                          {"delta", r.delta_schedule[k]},
                          {"delta_resolved", static_cast<bool>(r.delta_resolved[k])},
                          {"hs_lipschitz", k < r.hs_lipschitz.size() ? r.hs_lipschitz[k] : 0.0},
                          {"remainder_tv_max", rmax}});
    }
    return {{"stages", stages},
            {"hs_gaps", to_json_list(r.hs_gaps)},
            {"s", r.s},
            {"gap_threshold", r.gap_threshold},
            {"converged", r.converged},
            {"warnings", r.warnings}};
}

void add_cascade_table(Outcome& o, const CascadeResult& r) {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < r.eps_schedule.size(); ++k) {
        double rmax = 0.0;
        if (k < r.remainder_tv.size())
            for (double v : r.remainder_tv[k]) rmax = std::max(rmax, v);
        const double gap = k > 0 && k - 1 < r.hs_gaps.size() ? r.hs_gaps[k - 1] : std::nan("");
        rows.push_back({static_cast<double>(k), r.eps_schedule[k], r.delta_schedule[k],
                        r.delta_resolved[k] ? 1.0 : 0.0, gap, k < r.hs_lipschitz.size() ? r.hs_lipschitz[k] : 0.0,
                        rmax});
    }
    add_csv(o, "cascade.csv", {"stage", "eps", "delta", "delta_resolved", "hs_gap_to_previous", "hs_lipschitz",
                               "remainder_tv_max"},
            rows);
}

Outcome cmd_cascade(const Config& c) {
    const auto spec = field_from(c);
    const auto g = grid_from(c, spec);
    const auto opt = cascade_from(c);
    const auto u0 = initial_data(c, g);
    const auto r = cascade_solve(spec, u0, opt);
    Outcome o;
    o.results = cascade_json(r);
    o.ok = r.converged;
    o.verdict = r.converged ? "converged" : "not converged";
    add_cascade_table(o, r);
    add_trajectory(o, "solution.bin", r.solution);
    o.summary = "cascade: " + std::to_string(r.eps_schedule.size()) + " stages, " + o.verdict;
    return o;
}

Outcome cmd_renormalize(const Config& c) {
    const auto spec = field_from(c);
    const auto g = grid_from(c, spec);
    const auto opt = cascade_from(c);
    const auto u0 = initial_data(c, g);
    c.require(u0.is_real(0.0), "initial", "renormalization needs real data");
    const auto r = cascade_solve(spec, u0, opt);
    const auto b = sample_field(spec, g);
    const auto battery = test_function_battery(c.at("seed").get<std::uint64_t>());
    const auto rows = renormalization_sweep(r, b, battery);
    Outcome o;
    json jr = json::array();
    std::vector<std::vector<double>> table;
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        jr.push_back({{"beta", rows[i].beta}, {"defect", rows[i].defect}});
        table.push_back({static_cast<double>(i), rows[i].defect});
        worst = std::max(worst, rows[i].defect);
    }
    o.results = cascade_json(r);
    o.results["renormalization"] = jr;
    o.results["max_defect"] = worst;
    o.results["weak_defect"] = weak_defect_max(r.solution, b, battery, &u0);
    o.results["battery_size"] = battery.size();
    o.ok = r.converged;
    o.verdict = r.converged ? "converged" : "not converged";
    add_csv(o, "renormalization.csv", {"beta_index", "defect"}, table);
    add_cascade_table(o, r);
    o.summary = "renormalize: max beta defect " + format_double(worst) + ", cascade " + o.verdict;
    return o;
}

Outcome cmd_uniqueness(const Config& c) {
    const auto spec = field_from(c);
    const auto g = grid_from(c, spec);
    check_transport_keys(c);
    const auto etas = c.numbers("etas");
    c.require(!etas.empty(), "etas", "needs at least one value");
    for (double e : etas) c.require(e > 0.0, "etas", "entries must be > 0");
    c.require(c.num("tolerance") >= 0.0, "tolerance", "must be >= 0");
    auto opt = transport_from(c);
    const auto rep = uniqueness_probe(spec, g, opt.T, etas, c.at("seed").get<std::uint64_t>(), &opt, c.num("tolerance"));
    Outcome o;
    json jr = json::array();
    std::vector<std::vector<double>> table;
    double lo = kInfinity, hi = 0.0;
    for (const auto& row : rep.rows) {
        jr.push_back({{"eta", row.eta}, {"integral", row.integral}, {"bound", row.bound}});
        table.push_back({row.eta, row.integral, row.bound});
        lo = std::min(lo, row.integral / row.eta);
        hi = std::max(hi, row.integral / row.eta);
    }
    o.results = {{"rows", jr},
                 {"m_hat", rep.m_hat},
                 {"T", rep.T},
                 {"tolerance", rep.tolerance},
                 {"within_bound", rep.within_bound},
                 {"linearity_spread", hi > 0.0 ? (hi - lo) / hi : 0.0}};
    o.ok = rep.within_bound;
    o.verdict = rep.within_bound ? "within bound" : "bound exceeded";
    add_csv(o, "uniqueness.csv", {"eta", "integral", "bound"}, table);
    o.summary = "uniqueness: " + o.verdict;
    return o;
}

Outcome cmd_stability(const Config& c) {
    const auto spec = field_from(c);
    const auto g = grid_from(c, spec);
    auto opt = cascade_from(c);
    const auto u0 = initial_data(c, g);
    PlanKind plan;
    try {
        plan = plan_kind_from_string(c.str("plan"));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("plan: ") + e.what());
    }
    const auto n_values = c.integers("n_values");
    c.require(!n_values.empty(), "n_values", "needs at least one value");
    for (int n : n_values) c.require(n >= 1, "n_values", "entries must be >= 1");
    if (opt.eps_schedule.empty()) {
        // two finest admissible stages
        auto full = default_eps_schedule(g, opt.mollifier);
        opt.eps_schedule.assign(full.end() - std::min<std::size_t>(2, full.size()), full.end());
    }
    const auto rep = stability_experiment(spec, u0, plan, n_values, opt);
    Outcome o;
    std::vector<std::vector<double>> table;
    for (std::size_t i = 0; i < rep.n_values.size(); ++i)
        table.push_back({static_cast<double>(rep.n_values[i]), rep.field_l1_gaps[i], rep.div_l1_gaps[i],
                         rep.solution_gaps[i]});
    json ns = json::array();
    for (int n : rep.n_values) ns.push_back(n);
    o.results = {{"n_values", ns},
                 {"field_l1_gaps", to_json_list(rep.field_l1_gaps)},
                 {"div_l1_gaps", to_json_list(rep.div_l1_gaps)},
                 {"solution_gaps", to_json_list(rep.solution_gaps)},
                 {"eps_schedule", to_json_list(opt.eps_schedule)},
                 {"monotone_convergent", rep.monotone_convergent}};
    o.verdict = rep.verdict;
    o.ok = rep.verdict != "not monotone";
    add_csv(o, "stability.csv", {"n", "field_l1_gap", "div_l1_gap", "solution_gap"}, table);
    o.summary = "stability: " + rep.verdict;
    return o;
}

Outcome cmd_flow(const Config& c) {
    const auto spec = field_from(c);
    const auto g = grid_from(c, spec);
    check_transport_keys(c);
    c.require(c.integer("boxes") >= 1, "boxes", "must be >= 1");
    const auto f = initial_data(c, g);
    FlowConfig cfg;
    cfg.transport = transport_from(c);
    const double t = cfg.transport.T;
    const auto b = sample_field(spec, g);
    const auto map = extract_flow_map(b, t, cfg);
    const double mult = multiplicativity_defect(b, f, f, t, cfg);
    const double disc = pushforward_discrepancy(map, c.integer("boxes"));
    Outcome o;
    o.results = {{"multiplicativity_defect", mult},
                 {"max_modulus_defect", map.max_modulus_defect()},
                 {"flagged_nodes", map.flagged_count()},
                 {"pushforward_discrepancy", disc},
                 {"t", t}};
    o.verdict = "extracted";
    const int dim = g.dim();
    std::vector<std::string> header;
    for (int k = 0; k < dim; ++k) header.push_back("x" + std::to_string(k));
    for (int k = 0; k < dim; ++k) header.push_back("phi" + std::to_string(k));
    for (int k = 0; k < dim; ++k) header.push_back("modulus_defect" + std::to_string(k));
    header.push_back("flagged");
    std::vector<std::vector<double>> rows;
    FieldContainer box;
    box.dim = static_cast<std::uint32_t>(dim);
    box.points_per_axis = static_cast<std::uint32_t>(g.points_per_axis());
    box.kind = ValueKind::vector;
    box.components = static_cast<std::uint32_t>(dim);
    box.times = {t};
    box.payload = map.images;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto x = g.coordinate(i);
        std::vector<double> r;
        for (int k = 0; k < dim; ++k) r.push_back(x[k]);
        for (int k = 0; k < dim; ++k) r.push_back(map.images[i * dim + k]);
        for (int k = 0; k < dim; ++k) r.push_back(map.modulus_defect[i * dim + k]);
        r.push_back(map.flagged[i] ? 1.0 : 0.0);
        rows.push_back(std::move(r));
    }
    add_csv(o, "flow_map.csv", header, rows);
    o.artifacts.emplace_back("flow_map.bin", [box](const fs::path& p) { write_container(p, box); });
    o.summary = "flow: multiplicativity defect " + format_double(mult) + ", max modulus defect " +
                format_double(map.max_modulus_defect());
    return o;
}

Outcome cmd_reverse(const Config& c) {
    const auto spec = field_from(c);
    const auto control = field_from(c, "control");
    const auto g = grid_from(c, spec);
    c.require(control.grid_supported() && control.dim() == spec.dim(), "control", "must be a grid field of the same dimension");
    check_transport_keys(c);
    c.require(c.num("factor") > 1.0, "factor", "must be > 1");
    auto eps = c.numbers("eps_list");
    for (double e : eps) c.require(e >= 0.0, "eps_list", "entries must be >= 0");
    if (eps.empty()) eps = default_reversibility_sweep();
    c.require(eps.size() >= 3, "eps_list", "needs at least three values");
    const auto u0 = initial_data(c, g);
    ReversibilityOptions ro;
    ro.interp = interp_from(c);
    ro.dt = c.is_null("dt") ? 0.0 : c.num("dt");
    ro.trace_substeps = c.integer("trace_substeps");
    const double T = c.num("T");
    const auto rows = reversibility_probe(sample_field(spec, g), u0, T, eps, ro);
    const double floor = reversibility_probe(sample_field(control, g), u0, T, {0.0}, ro).front().return_error;
    const auto v = classify_reversibility(rows, floor, c.num("factor"));
    Outcome o;
    json jr = json::array();
    std::vector<std::vector<double>> table;
    for (const auto& r : rows) {
        jr.push_back({{"eps", r.eps}, {"return_error", r.return_error}});
        table.push_back({r.eps, r.return_error});
    }
    o.results = {{"rows", jr},
                 {"control_floor", floor},
                 {"extrapolated", v.extrapolated},
                 {"order", v.order},
                 {"above_floor", v.above_floor},
                 {"extrapolates_to_floor", v.extrapolates_to_floor}};
    o.verdict = v.above_floor ? "irreversible" : (v.extrapolates_to_floor ? "reversible" : "inconclusive");
    add_csv(o, "reverse.csv", {"eps", "return_error"}, table);
    o.summary = "reverse: " + o.verdict + " (control floor " + format_double(floor) + ")";
    return o;
}

ModulusSpec modulus_from(const Config& c) {
    const auto& m = c.at("modulus");
    if (!m.contains("kind") || !m["kind"].is_string()) throw ConfigError("modulus: needs a string 'kind'");
    const std::string kind = m["kind"];
    auto allow = [&](std::set<std::string> keys) {
        keys.insert("kind");
        for (const auto& [k, _] : m.items())
            if (!keys.count(k)) throw ConfigError("modulus: unknown key '" + k + "' for kind " + kind);
    };
    try {
        if (kind == "power") {
            allow({"theta"});
            if (!m.contains("theta") || !m["theta"].is_number()) throw ConfigError("modulus: power needs a numeric theta");
            return ModulusSpec::power(m["theta"].get<double>());
        }
        if (kind == "log_lipschitz") {
            allow({});
            return ModulusSpec::log_lipschitz();
        }
        if (kind == "table") {
            allow({"t", "omega"});
            if (!m.contains("t") || !m.contains("omega")) throw ConfigError("modulus: table needs t and omega");
            return ModulusSpec::table(m["t"].get<std::vector<double>>(), m["omega"].get<std::vector<double>>());
        }
    } catch (const GuardError& e) {
        throw ConfigError(std::string("modulus: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("modulus: ") + e.what());
    }
    throw ConfigError("modulus: unknown kind '" + kind + "'");
}

Outcome cmd_osgood(const Config& c) {
    const auto m = modulus_from(c);
    auto deltas = c.numbers("deltas");
    if (deltas.empty()) deltas = default_osgood_deltas();
    c.require(deltas.size() >= 4, "deltas", "needs at least four values");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        c.require(deltas[i] > 0.0 && deltas[i] < 1.0, "deltas", "entries must lie in (0, 1)");
        if (i > 0) c.require(deltas[i] < deltas[i - 1], "deltas", "entries must decrease");
    }
    c.require(deltas.back() <= 1e-8, "deltas", "last entry must be <= 1e-8");
    const auto r = osgood_classify(m, deltas);
    Outcome o;
    std::vector<std::vector<double>> table;
    json jr = json::array();
    for (const auto& row : r.rows) {
        table.push_back({row.delta, row.integral});
        jr.push_back({{"delta", row.delta}, {"integral", row.integral}});
    }
    o.results = {{"rows", jr},
                 {"modulus", m.name()},
                 {"numeric_verdict", to_string(r.numeric_verdict)},
                 {"decided_by", r.decided_by},
                 {"growth_law", r.growth_law},
                 {"growth_exponent", r.growth_exponent},
                 {"fit_mismatch", r.fit_mismatch}};
    if (m.kind == ModulusSpec::Kind::power) o.results["theta"] = m.theta;
    o.verdict = to_string(r.verdict);
    add_csv(o, "osgood.csv", {"delta", "integral"}, table);
    o.summary = "osgood: " + m.name() + " " + o.verdict;
    return o;
}

Outcome cmd_weierstrass(const Config& c) {
    const int K = c.integer("K");
    c.require(K >= 1 && K <= 22, "K", "must lie in [1, 22]");
    auto h = c.numbers("h_list");
    const double h_min = kTwoPi * std::ldexp(1.0, -K - 1);
    if (h.empty()) {
        for (double v : default_weierstrass_steps())
            if (v >= h_min) h.push_back(v);
    }
    for (double v : h) c.require(v >= h_min, "h_list", "entries must be >= 2 pi 2^(-K-1)");
    c.require(!h.empty(), "h_list", "no admissible step for this K");
    const auto r = weierstrass_modulus(K, h);
    Outcome o;
    std::vector<std::vector<double>> table;
    json jr = json::array();
    for (const auto& row : r.rows) {
        const double x = row.h < 1.0 ? row.h * std::log2(1.0 / row.h) : std::nan("");
        table.push_back({row.h, row.sup_difference, row.sup_difference / x});
        jr.push_back({{"h", row.h}, {"sup_difference", row.sup_difference}});
    }
    o.results = {{"rows", jr}, {"K", K}, {"samples", r.samples}, {"c", r.c}, {"relative_rms_residual", r.residual}};
    o.verdict = r.residual < 0.15 ? "fits h log2(1/h)" : "poor fit";
    add_csv(o, "weierstrass.csv", {"h", "sup_difference", "ratio_to_h_log2_inv_h"}, table);
    o.summary = "weierstrass: c = " + format_double(r.c) + ", residual " + format_double(r.residual);
    return o;
}

Outcome cmd_lacunary(const Config& c) {
    const auto K_list = c.integers("K_list");
    c.require(K_list.size() >= 2, "K_list", "needs at least two values");
    for (int K : K_list) c.require(K >= 1 && K <= 20, "K_list", "entries must lie in [1, 20]");
    const auto r = lacunary_l1_growth(K_list);
    Outcome o;
    std::vector<std::vector<double>> table;
    json jr = json::array();
    double worst_defect = 0.0, worst_gap = 0.0;
    for (const auto& row : r.rows) {
        double defect = 0.0;
        for (int m = 1; m <= 2 && row.K + m <= 22; ++m) defect = std::max(defect, dilation_identity_defect(row.K, m));
        worst_defect = std::max(worst_defect, defect);
        worst_gap = std::max(worst_gap, row.dilation_gap);
        table.push_back({static_cast<double>(row.K), row.l1_norm, row.dilation_gap, defect});
        jr.push_back({{"K", row.K}, {"l1_norm", row.l1_norm}, {"dilation_l1_gap", row.dilation_gap},
                      {"dilation_identity_defect", defect}});
    }
    o.results = {{"rows", jr},
                 {"fit", {{"form", "c log K + d"}, {"c", r.fit.c}, {"d", r.fit.d}, {"relative_residual", r.fit.residual}}},
                 {"bounds_hold", r.bounds_hold},
                 {"max_dilation_identity_defect", worst_defect},
                 {"max_dilation_l1_gap", worst_gap}};
    const bool growth = r.fit.c > 0.0 && r.fit.residual < 0.1;
    o.verdict = growth ? "logarithmic growth" : "growth law not matched";
    add_csv(o, "lacunary.csv", {"K", "l1_norm", "dilation_l1_gap", "dilation_identity_defect"}, table);
    o.summary = "lacunary: c = " + format_double(r.fit.c) + ", residual " + format_double(r.fit.residual);
    return o;
}

Outcome cmd_check_field(const Config& c) {
    const auto spec = field_from(c);
    const int n = c.integer("grid");
    c.require(is_power_of_two(n) && n >= 16 && n <= 4096, "grid", "must be a power of two in [16, 4096]");
    c.require(c.integer("max_grid") >= n, "max_grid", "must be >= grid");
    const PeriodicGrid g(spec.grid_supported() ? spec.dim() : 2, n);
    const auto rep = check_conditions(spec, g, c.integer("max_grid"));
    Outcome o;
    o.results = {{"div_sup_estimate", rep.div_sup_estimate},
                 {"w11_star_estimate", rep.w11_star_estimate},
                 {"div_growth", rep.div_growth},
                 {"w11_growth", rep.w11_growth},
                 {"points_per_axis", rep.points_per_axis},
                 {"declared_class", to_string(spec.declared_class())},
                 {"notes", rep.notes}};
    o.verdict = to_string(rep.verdict);
    o.summary = "check-field: " + to_string(spec.kind()) + " " + o.verdict;
    return o;
}

using Handler = Outcome (*)(const Config&);

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h = {
        {"solve", cmd_solve},           {"characteristics", cmd_characteristics},
        {"commutator", cmd_commutator}, {"cascade", cmd_cascade},
        {"renormalize", cmd_renormalize}, {"uniqueness", cmd_uniqueness},
        {"stability", cmd_stability},   {"flow", cmd_flow},
        {"reverse", cmd_reverse},       {"osgood", cmd_osgood},
        {"weierstrass", cmd_weierstrass}, {"lacunary", cmd_lacunary},
        {"check-field", cmd_check_field},
    };
    return h;
}

}  // namespace

std::vector<std::string> subcommands() {
    std::vector<std::string> out;
    for (const auto& [k, _] : handlers()) out.push_back(k);
    return out;
}

int run(const Invocation& inv, std::ostream& log, std::ostream& err) {
    const auto it = handlers().find(inv.subcommand);
    if (it == handlers().end()) {
        err << "error: unknown subcommand '" << inv.subcommand << "'\n";
        return kInvalidConfig;
    }
    Outcome outcome;
    json config;
    try {
        const Config cfg = load_config(inv);
        config = cfg.raw();
        outcome = it->second(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const std::invalid_argument& e) {
        err << "guard violation: " << e.what() << "\n";
        return kGuardViolation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }

    const fs::path dir = output_dir(inv);
    try {
        fs::create_directories(dir);
        json artifacts = json::array();
        for (const auto& [name, write] : outcome.artifacts) {
            write(dir / name);
            artifacts.push_back(name);
        }
        artifacts.push_back("report.json");
        json report = {{"subcommand", inv.subcommand},
                       {"config", config},
                       {"results", outcome.results},
                       {"verdict", outcome.verdict},
                       {"status", outcome.ok ? "ok" : (inv.allow_partial ? "partial" : "failed")},
                       {"artifacts", artifacts},
                       {"versions", {{"roughflow", ROUGHFLOW_VERSION}, {"container", kContainerVersion}, {"report", 1}}}};
        std::ofstream out(dir / "report.json", std::ios::binary);
        out << report.dump(2) << "\n";
        if (!out) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    if (!inv.quiet) log << outcome.summary << "\n" << "artifacts written to " << dir.string() << "\n";
    if (!outcome.ok && !inv.allow_partial) {
        err << "verdict: " << outcome.verdict << " (use --allow-partial to accept)\n";
        return kNotConverged;
    }
    return kOk;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Transport equations with rough vector fields: experiment runner"};
    app.require_subcommand(1);
    Invocation inv;
    std::string config, out;
    std::uint64_t seed = 0;
    int grid = 0;
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON experiment config");
        sub->add_option("--out", out, "output directory (overrides $" + std::string(kOutputDirEnv) + ")");
        sub->add_option("--seed", seed, "seed for test-function batteries and remainders");
        sub->add_option("--grid", grid, "points per axis");
        sub->add_flag("--allow-partial", inv.allow_partial, "exit 0 on negative numerical verdicts");
        sub->add_flag("--quiet", inv.quiet, "no summary on stdout");
        sub->callback([&inv, name] { inv.subcommand = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidConfig;
    }
    auto* active = app.get_subcommands().front();
    if (active->count("--config")) inv.config = config;
    if (active->count("--out")) inv.out = out;
    if (active->count("--seed")) inv.seed = seed;
    if (active->count("--grid")) inv.grid = grid;
    return run(inv, std::cout, std::cerr);
}

}  // namespace roughflow::cli
