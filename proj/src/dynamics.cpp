#include "stochem/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochem/spectral.hpp"

namespace stochem {

namespace {

// safety / (max cell outflow rate); +inf when nothing moves.
double advective_limit(const State& s, const SimParams& p) {
    const Grid& g = s.grid();
    const auto& u = s.u;
    const auto& c = s.c;
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double rate = 0.0;
            for (int f = i; f <= i + 1; ++f) {
                double v = std::abs(u.ux(f, j));
                if (f > 0 && f < g.nx) v += p.chi * std::abs(c(f, j) - c(f - 1, j)) / g.dx;
                rate += v / g.dx;
            }
            for (int f = j; f <= j + 1; ++f) {
                double v = std::abs(u.uy(i, f));
                if (f > 0 && f < g.ny) v += p.chi * std::abs(c(i, f) - c(i, f - 1)) / g.dy;
                rate += v / g.dy;
            }
            worst = std::max(worst, rate);
        }
    }
    return worst > 0.0 ? p.cfl_safety / worst : std::numeric_limits<double>::infinity();
}

void require_finite(const ScalarField& f, const char* what) {
    if (!f.all_finite()) throw SolverError(std::string("non-finite values in ") + what);
}

}  // namespace

double stable_dt(const State& state, const SimParams& params) {
    return std::min(params.dt_max, advective_limit(state, params));
}

State step(const State& s, const SimParams& p, const NoiseIncrement& inc, double dt, StepReport* report) {
    require_same_grid(s.grid(), p.grid(), "step");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("step: dt must be positive and finite");
    const double limit = advective_limit(s, p);
    if (dt > limit * (1.0 + 1e-12)) {
        throw CflError("step: dt = " + std::to_string(dt) + " exceeds the advective limit " +
                       std::to_string(limit));
    }

    StepReport rep;
    rep.dt = dt;
    State next;
    next.t = s.t + dt;

    // (1) cells
    ScalarField n_star = s.n;
    n_star.axpy(-dt, scalar_advect(s.u, s.n, p.scalar_advection));
    if (p.chi != 0.0) n_star.axpy(-dt, chemotaxis_div(s.n, s.c, p.chi));
    next.n = spectral::helmholtz_neumann(n_star, dt * p.delta);
    require_finite(next.n, "n");

    // (2) oxygen; consumption uses the fresh n and is limited to the available oxygen
    ScalarField c_star = s.c;
    c_star.axpy(-dt, scalar_advect(s.u, s.c, p.scalar_advection));
    for (std::size_t k = 0; k < c_star.size(); ++k) {
        const double available = std::max(c_star[k], 0.0);
        double uptake = dt * next.n[k] * p.f.eval(s.c[k]);
        if (uptake > available) {
            uptake = available;
            ++rep.clip_count;
        }
        c_star[k] -= uptake;
    }
    if (p.gamma != 0.0) c_star += transport_noise_apply(s.c, p.sigma, p.gamma, inc, p.noise_gradient);
    next.c = spectral::helmholtz_neumann(c_star, dt * p.xi);
    require_finite(next.c, "c");

    // (3) velocity
    VectorField u_star = s.u;
    u_star.axpy(-dt, convect_velocity(s.u, s.u, p.velocity_advection));
    u_star.axpy(dt, buoyancy(next.n, p.phi));
    if (p.vnoise.amplitude != 0.0 && p.vnoise.n_modes > 0) u_star += g_apply(s.u, s.c, p.vnoise, inc);
    next.u = helmholtz_project(spectral::helmholtz_velocity(u_star, dt * p.eta), p.projection);
    if (!next.u.all_finite()) throw SolverError("non-finite values in u");

    rep.projection_residual = norm(divergence(next.u), NormKind::Linf);
    if (report) *report = rep;
    return next;
}

ScalarField recover_pressure(const State& s, const SimParams& p) {
    VectorField forcing = stokes_apply(s.u);
    forcing *= p.eta;
    forcing.axpy(-1.0, convect_velocity(s.u, s.u, p.velocity_advection));
    forcing += buoyancy(s.n, p.phi);
    forcing.enforce_no_slip();
    ScalarField pressure = spectral::poisson_neumann(divergence(forcing));
    // The transform already pins the mean; remove residual round-off.
    double mean = 0.0;
    for (double v : pressure.values()) mean += v;
    mean /= static_cast<double>(pressure.size());
    for (double& v : pressure.values()) v -= mean;
    return pressure;
}

RunResult run(const State& initial, const SimParams& params, double t_end, double dt,
              std::uint64_t seed, int sample_every, const RunOptions& options) {
    validate(params);
    if (!(dt > 0.0)) throw InvalidArgument("run: dt must be positive");
    if (!(t_end >= initial.t)) throw InvalidArgument("run: t_end precedes the initial time");
    if (sample_every < 1) throw InvalidArgument("run: sample_every must be >= 1");
    if (options.nest_factor < 1) throw InvalidArgument("run: nest_factor must be >= 1");

    const double span = t_end - initial.t;
    auto full_steps = static_cast<std::int64_t>(std::floor(span / dt * (1.0 + 1e-12)));
    const double remainder = span - static_cast<double>(full_steps) * dt;
    const bool partial = remainder > 1e-9 * dt;
    if (partial && options.nest_factor > 1) {
        throw InvalidArgument("run: nested increments need t_end - t0 to be a multiple of dt");
    }
    const std::int64_t total = full_steps + (partial ? 1 : 0);

    RunResult result;
    result.final_state = initial;
    std::optional<DiagnosticsRecorder> recorder;
    if (options.record) {
        recorder.emplace(initial, params);
        result.series.push_back(recorder->record(initial, 0));
    }

    const int k_modes = params.vnoise.n_modes;
    for (std::int64_t k = 0; k < total; ++k) {
        const bool last = k + 1 == total;
        const double h = (last && partial) ? remainder : dt;
        StepReport rep;
        try {
            const NoiseIncrement inc =
                options.nest_factor > 1
                    ? nested_increments(seed, options.replica, k, dt / options.nest_factor,
                                        options.nest_factor, k_modes)
                    : sample_increments(seed, options.replica, k, h, k_modes);
            result.final_state = step(result.final_state, params, inc, h, &rep);
        } catch (const std::exception& e) {
            throw StepError(k + 1, e.what());
        }
        // Pin the clock to the lattice so long runs do not accumulate drift.
        result.final_state.t = last ? t_end : initial.t + static_cast<double>(k + 1) * dt;
        result.clip_count += rep.clip_count;
        ++result.steps;
        if (recorder) {
            recorder->advance(result.final_state, rep);
            if ((k + 1) % sample_every == 0 || last) result.series.push_back(recorder->record(result.final_state, k + 1));
        }
        if (options.observer) options.observer(result.final_state, rep, k + 1);
    }
    return result;
}

}  // namespace stochem
