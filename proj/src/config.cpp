#include "stochem/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace stochem {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(key + ": expected a finite number, got '" + v + "'");
    return out;
}

long long to_integer(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

void check(bool ok, const std::string& key, const std::string& constraint) {
    if (!ok) throw ConfigError(key + ": " + constraint);
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

Setter real(double RunConfig::*m) {
    return [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = to_double(k, v); };
}
Setter integer(int RunConfig::*m) {
    return [m](RunConfig& c, const std::string& k, const std::string& v) {
        const long long x = to_integer(k, v);
        check(x >= std::numeric_limits<int>::min() && x <= std::numeric_limits<int>::max(), k, "out of range");
        c.*m = static_cast<int>(x);
    };
}
template <class F>
Setter custom(F f) {
    return Setter(f);
}

Setter scalar_recipe(ScalarRecipe RunConfig::*r, const std::string& field) {
    return [r, field](RunConfig& c, const std::string& k, const std::string& v) {
        ScalarRecipe& rec = c.*r;
        if (field == "kind") rec.kind = v;
        else if (field == "value") rec.value = to_double(k, v);
        else if (field == "amplitude") rec.amplitude = to_double(k, v);
        else if (field == "x0") rec.x0 = to_double(k, v);
        else if (field == "y0") rec.y0 = to_double(k, v);
        else if (field == "width") rec.width = to_double(k, v);
        else if (field == "low") rec.low = to_double(k, v);
        else if (field == "high") rec.high = to_double(k, v);
        else if (field == "axis") {
            check(v == "x" || v == "y", k, "must be x or y");
            rec.axis = v[0];
        } else if (field == "kx") rec.kx = static_cast<int>(to_integer(k, v));
        else if (field == "ky") rec.ky = static_cast<int>(to_integer(k, v));
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["grid.nx"] = integer(&RunConfig::nx);
        t["grid.ny"] = integer(&RunConfig::ny);
        t["grid.lx"] = real(&RunConfig::lx);
        t["grid.ly"] = real(&RunConfig::ly);

        t["physics.eta"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.physics.eta = to_double(k, v); });
        t["physics.mu"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.physics.mu = to_double(k, v); });
        t["physics.delta"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.physics.delta = to_double(k, v); });
        t["physics.chi"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.physics.chi = to_double(k, v); });
        t["physics.gamma"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.physics.gamma = to_double(k, v); });
        t["physics.xi_mode"] = custom([](RunConfig& c, const std::string& k, const std::string& v) {
            try {
                c.physics.xi_mode = parse_xi_mode(v);
            } catch (const InvalidArgument&) {
                throw ConfigError(k + ": must be corrected, literal or uncorrected, got '" + v + "'");
            }
        });
        t["physics.f_name"] = custom([](RunConfig& c, const std::string& k, const std::string& v) {
            check(v == "linear" || v == "michaelis_menten" || v == "quadratic", k,
                  "must be linear, michaelis_menten or quadratic");
            c.f_name = v;
        });
        t["physics.phi_kind"] = custom([](RunConfig& c, const std::string& k, const std::string& v) {
            check(v == "height" || v == "none", k, "must be height or none");
            c.phi_kind = v;
        });
        t["physics.phi_strength"] = real(&RunConfig::phi_strength);
        t["physics.scalar_advection"] = custom([](RunConfig& c, const std::string& k, const std::string& v) {
            check(v == "upwind" || v == "centered", k, "must be upwind or centered");
            c.scalar_advection = v == "upwind" ? AdvectionMode::UpwindFlux : AdvectionMode::CenteredSkew;
        });
        t["physics.cfl_safety"] = real(&RunConfig::cfl_safety);
        t["physics.dt_max"] = real(&RunConfig::dt_max);

        t["noise.k_modes"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.noise.k_modes = static_cast<int>(to_integer(k, v)); });
        t["noise.amplitude"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.noise.amplitude = to_double(k, v); });
        t["noise.mode_decay_exponent"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.noise.mode_decay_exponent = to_double(k, v); });
        t["noise.multiplicative_gain"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.noise.multiplicative_gain = to_double(k, v); });
        t["noise.sigma_cutoff_width"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.noise.sigma_cutoff_width = static_cast<int>(to_integer(k, v)); });

        t["time.t_end"] = real(&RunConfig::t_end);
        t["time.dt"] = real(&RunConfig::dt);
        t["time.sample_every"] = integer(&RunConfig::sample_every);
        t["time.seed"] = custom([](RunConfig& c, const std::string& k, const std::string& v) {
            const long long x = to_integer(k, v);
            check(x >= 0, k, "must be non-negative");
            c.seed = static_cast<std::uint64_t>(x);
        });

        for (const char* f : {"kind", "value", "amplitude", "x0", "y0", "width", "low", "high", "axis", "kx", "ky"}) {
            t[std::string("ic.n_") + f] = scalar_recipe(&RunConfig::ic_n, f);
            t[std::string("ic.c_") + f] = scalar_recipe(&RunConfig::ic_c, f);
        }
        t["ic.u_kind"] = custom([](RunConfig& c, const std::string&, const std::string& v) { c.ic_u.kind = v; });
        t["ic.u_amplitude"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.ic_u.amplitude = to_double(k, v); });
        t["ic.u_width"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.ic_u.width = to_double(k, v); });

        t["output.directory"] = custom([](RunConfig& c, const std::string& k, const std::string& v) {
            check(!v.empty(), k, "must not be empty");
            c.output_directory = v;
        });
        t["output.snapshot_every"] = integer(&RunConfig::snapshot_every);
        t["output.formats"] = custom([](RunConfig& c, const std::string& k, const std::string& v) {
            c.formats.clear();
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                check(item == "csv" || item == "snapshot", k, "entries must be csv or snapshot");
                c.formats.push_back(item);
            }
        });

        t["experiment.replicas"] = integer(&RunConfig::replicas);
        t["experiment.perturbation"] = real(&RunConfig::perturbation);
        t["experiment.levels"] = integer(&RunConfig::levels);
        t["experiment.finest_dt"] = real(&RunConfig::finest_dt);

        t["diagnostics.strict_gate"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.strict_gate = to_bool(k, v); });
        t["diagnostics.k_gn"] = real(&RunConfig::k_gn);
        t["diagnostics.k0"] = custom([](RunConfig& c, const std::string& k, const std::string& v) { c.k0 = to_double(k, v); });
        t["diagnostics.mass_tolerance"] = real(&RunConfig::mass_tolerance);
        t["diagnostics.max_c_tolerance"] = real(&RunConfig::max_c_tolerance);
        t["diagnostics.entropy_bound_factor"] = real(&RunConfig::entropy_bound_factor);
        return t;
    }();
    return table;
}

const std::set<std::string> kScalarKinds{"uniform", "gaussian_blob", "linear_gradient", "cosine_mode"};

void validate_recipe(const ScalarRecipe& r, const std::string& prefix) {
    check(kScalarKinds.contains(r.kind), prefix + "kind",
          "must be uniform, gaussian_blob, linear_gradient or cosine_mode");
    if (r.kind == "gaussian_blob") check(r.width > 0.0, prefix + "width", "must be positive");
    if (r.kind == "cosine_mode") check(r.kx >= 0 && r.ky >= 0, prefix + "kx", "mode numbers must be non-negative");
}

void validate_config(const RunConfig& c) {
    check(c.nx >= 4, "grid.nx", "must be >= 4");
    check(c.ny >= 4, "grid.ny", "must be >= 4");
    check(c.lx > 0.0, "grid.lx", "must be positive");
    check(c.ly > 0.0, "grid.ly", "must be positive");
    check(c.physics.eta > 0.0, "physics.eta", "must be positive");
    check(c.physics.mu > 0.0, "physics.mu", "must be positive");
    check(c.physics.delta > 0.0, "physics.delta", "must be positive");
    check(c.physics.chi >= 0.0, "physics.chi", "must be non-negative");
    check(c.physics.gamma >= 0.0, "physics.gamma", "must be non-negative");
    check(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0, "physics.cfl_safety", "must lie in (0, 1]");
    check(c.dt_max > 0.0, "physics.dt_max", "must be positive");
    check(c.noise.k_modes >= 0, "noise.k_modes", "must be non-negative");
    check(c.noise.amplitude >= 0.0, "noise.amplitude", "must be non-negative");
    check(c.noise.mode_decay_exponent >= 0.0, "noise.mode_decay_exponent", "must be non-negative");
    check(c.noise.multiplicative_gain >= 0.0, "noise.multiplicative_gain", "must be non-negative");
    check(c.noise.sigma_cutoff_width >= 1 && 4 * c.noise.sigma_cutoff_width < std::min(c.nx, c.ny),
          "noise.sigma_cutoff_width", "must be >= 1 and below min(nx, ny) / 4");
    check(c.t_end >= 0.0, "time.t_end", "must be non-negative");
    check(c.dt > 0.0, "time.dt", "must be positive");
    check(c.sample_every >= 1, "time.sample_every", "must be >= 1");
    validate_recipe(c.ic_n, "ic.n_");
    validate_recipe(c.ic_c, "ic.c_");
    check(c.ic_u.kind == "rest" || c.ic_u.kind == "taylor_vortex_pair", "ic.u_kind",
          "must be rest or taylor_vortex_pair");
    check(c.ic_u.width > 0.0, "ic.u_width", "must be positive");
    check(c.snapshot_every >= 0, "output.snapshot_every", "must be non-negative");
    check(c.replicas >= 1, "experiment.replicas", "must be >= 1");
    check(c.perturbation >= 0.0, "experiment.perturbation", "must be non-negative");
    check(c.levels >= 3, "experiment.levels", "must be >= 3");
    check(c.finest_dt >= 0.0, "experiment.finest_dt", "must be non-negative");
    check(c.k_gn > 0.0, "diagnostics.k_gn", "must be positive");
    if (c.k0) check(*c.k0 > 0.0, "diagnostics.k0", "must be positive");
    check(c.mass_tolerance > 0.0, "diagnostics.mass_tolerance", "must be positive");
    check(c.max_c_tolerance >= 0.0, "diagnostics.max_c_tolerance", "must be non-negative");
    check(c.entropy_bound_factor > 0.0, "diagnostics.entropy_bound_factor", "must be positive");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    const auto& table = setters();
    std::set<std::string> sections;
    for (const auto& [key, _] : table) sections.insert(key.substr(0, key.find('.')));

    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::set<std::string> seen;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.contains(section)) throw ConfigError("[" + section + "]: unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key outside of any section");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError(key + ": unknown key");
        if (!seen.insert(key).second) throw ConfigError(key + ": duplicate key");
        it->second(cfg, key, value);
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

SimParams build_params(const RunConfig& cfg) {
    const Grid grid = make_grid(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    ScalarField phi(grid);
    if (cfg.phi_kind == "height") {
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) phi(i, j) = cfg.phi_strength * grid.yc(j);
    }
    SimParams p = make_sim_params(grid, cfg.physics, phi, cfg.f_name, cfg.noise);
    p.scalar_advection = cfg.scalar_advection;
    p.cfl_safety = cfg.cfl_safety;
    p.dt_max = cfg.dt_max;
    p.k_gn = cfg.k_gn;
    p.k0 = cfg.k0;
    validate(p);
    return p;
}

ScalarField make_scalar_ic(const Grid& g, const ScalarRecipe& r) {
    ScalarField f(g, r.value);
    if (r.kind == "uniform") return f;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.xc(i);
            const double y = g.yc(j);
            if (r.kind == "gaussian_blob") {
                const double d2 = (x - r.x0) * (x - r.x0) + (y - r.y0) * (y - r.y0);
                f(i, j) = r.value + r.amplitude * std::exp(-d2 / (2.0 * r.width * r.width));
            } else if (r.kind == "linear_gradient") {
                const double s = r.axis == 'x' ? x / g.lx : y / g.ly;
                f(i, j) = r.low + (r.high - r.low) * s;
            } else if (r.kind == "cosine_mode") {
                f(i, j) = r.value + r.amplitude * std::cos(r.kx * std::numbers::pi * x / g.lx) *
                                        std::cos(r.ky * std::numbers::pi * y / g.ly);
            } else {
                throw InvalidArgument("unknown scalar recipe '" + r.kind + "'");
            }
        }
    }
    return f;
}

VectorField make_velocity_ic(const Grid& g, const VelocityRecipe& r) {
    VectorField u(g);
    if (r.kind == "rest" || r.amplitude == 0.0) return u;
    if (r.kind != "taylor_vortex_pair") throw InvalidArgument("unknown velocity recipe '" + r.kind + "'");
    // Nodal stream function of two opposite Gaussian vortices; its discrete
    // curl is exactly divergence-free, the projection then removes wall flux.
    auto psi = [&](int i, int j) {
        const double x = i * g.dx;
        const double y = j * g.dy;
        const double s2 = 2.0 * r.width * r.width;
        const double a = (x - 0.35 * g.lx) * (x - 0.35 * g.lx) + (y - 0.5 * g.ly) * (y - 0.5 * g.ly);
        const double b = (x - 0.65 * g.lx) * (x - 0.65 * g.lx) + (y - 0.5 * g.ly) * (y - 0.5 * g.ly);
        return std::exp(-a / s2) - std::exp(-b / s2);
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) u.ux(i, j) = (psi(i, j + 1) - psi(i, j)) / g.dy;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.uy(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.dx;
    u = helmholtz_project(u);
    const double peak = norm(u, NormKind::Linf);
    if (peak > 0.0) u *= r.amplitude / peak;
    return u;
}

State build_initial_state(const RunConfig& cfg, const Grid& grid) {
    State s{make_velocity_ic(grid, cfg.ic_u), make_scalar_ic(grid, cfg.ic_c), make_scalar_ic(grid, cfg.ic_n), 0.0};
    for (double v : s.n.values())
        if (v < 0.0) throw ConfigError("ic.n_kind: initial cell density must be non-negative");
    for (double v : s.c.values())
        if (v < 0.0) throw ConfigError("ic.c_kind: initial oxygen must be non-negative");
    return s;
}

}  // namespace stochem
