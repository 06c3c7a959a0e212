#include "stochem/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "stochem/spectral.hpp"

namespace stochem {

double twin_separation(const State& a, const State& b) {
    VectorField du = a.u;
    du -= b.u;
    ScalarField dc = a.c;
    dc -= b.c;
    ScalarField dn = a.n;
    dn -= b.n;
    const double gc = norm(dc, NormKind::H1Semi);
    return inner_product(du, du) + inner_product(dc, dc) + gc * gc + inner_product(dn, dn);
}

State perturb_state(const State& s, double amplitude) {
    State out = s;
    if (amplitude == 0.0) return out;
    const Grid& g = s.grid();
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double bump = std::cos(std::numbers::pi * g.xc(i) / g.lx) * std::cos(std::numbers::pi * g.yc(j) / g.ly);
            out.n(i, j) *= 1.0 + amplitude * bump;
            out.c(i, j) *= 1.0 + amplitude * bump;
        }
    }
    return out;
}

namespace {

// States at step 0, every sample_every steps and at the end.
std::vector<State> sampled_states(const State& initial, const SimParams& params, double t_end, double dt,
                                  std::uint64_t seed, int sample_every, RunOptions options) {
    std::vector<State> out{initial};
    options.record = false;
    // run() pins the clock of the last step to t_end exactly.
    options.observer = [&](const State& s, const StepReport&, std::int64_t k) {
        if (k % sample_every == 0 || s.t == t_end) out.push_back(s);
    };
    run(initial, params, t_end, dt, seed, sample_every, options);
    return out;
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need >= 2 matching points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw InvalidArgument("loglog_slope: values must be positive");
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TwinReport twin_run(const SimParams& params, const State& initial, std::uint64_t seed, double perturbation,
                    double t_end, double dt, int sample_every, std::optional<std::uint64_t> second_seed) {
    const State other = perturb_state(initial, perturbation);
    const auto a = sampled_states(initial, params, t_end, dt, seed, sample_every, {});
    const auto b = sampled_states(other, params, t_end, dt, second_seed.value_or(seed), sample_every, {});
    TwinReport rep;
    for (std::size_t k = 0; k < a.size(); ++k) {
        rep.t.push_back(a[k].t - initial.t);
        rep.y.push_back(twin_separation(a[k], b[k]));
    }
    const double y0 = rep.y.front();
    if (y0 > 0.0) {
        double sxx = 0.0, sxy = 0.0;
        rep.growth_envelope = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < rep.t.size(); ++k) {
            const double l = std::log(rep.y[k] / y0);
            rep.growth_envelope = std::max(rep.growth_envelope, l / rep.t[k]);
            sxx += rep.t[k] * rep.t[k];
            sxy += rep.t[k] * l;
        }
        if (rep.t.size() < 2) rep.growth_envelope = 0.0;
        rep.growth_slope = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    return rep;
}

namespace {

void require_nested(const std::vector<double>& levels, double t_end, double t0) {
    if (levels.size() < 3) throw InvalidArgument("dt refinement needs >= 3 levels");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (!(levels[k] > 0.0)) throw InvalidArgument("dt levels must be positive");
        if (k > 0 && std::abs(levels[k] * 2.0 - levels[k - 1]) > 1e-12 * levels[k - 1])
            throw InvalidArgument("dt levels must halve from one level to the next");
    }
    const double steps = (t_end - t0) / levels.front();
    if (!(steps >= 1.0) || std::abs(steps - std::round(steps)) > 1e-9 * steps)
        throw InvalidArgument("t_end - t0 must be a positive multiple of the coarsest dt");
}

int nest_factor(double dt, double finest) { return static_cast<int>(std::lround(dt / finest)); }

double state_distance(const State& a, const State& b) {
    VectorField du = a.u;
    du -= b.u;
    ScalarField dc = a.c;
    dc -= b.c;
    ScalarField dn = a.n;
    dn -= b.n;
    return std::sqrt(inner_product(du, du) + inner_product(dc, dc) + inner_product(dn, dn));
}

}  // namespace

ConvergenceReport convergence_dt(const SimParams& params, const State& initial, std::uint64_t seed,
                                 const std::vector<double>& dt_levels, double t_end, std::uint32_t replica) {
    require_nested(dt_levels, t_end, initial.t);
    const double finest = dt_levels.back();
    auto final_state = [&](double dt) {
        RunOptions opt;
        opt.replica = replica;
        opt.record = false;
        opt.nest_factor = nest_factor(dt, finest);
        return run(initial, params, t_end, dt, seed, 1, opt).final_state;
    };
    const State reference = final_state(finest);
    ConvergenceReport rep;
    rep.finest_dt = finest;
    for (std::size_t k = 0; k + 1 < dt_levels.size(); ++k) {
        rep.dt.push_back(dt_levels[k]);
        rep.error.push_back(state_distance(final_state(dt_levels[k]), reference));
    }
    rep.slope = loglog_slope(rep.dt, rep.error);
    return rep;
}

StratonovichReport stratonovich_consistency(const SimParams& params, const ScalarField& c0, std::uint64_t seed,
                                            const std::vector<double>& dt_levels, double t_end) {
    require_nested(dt_levels, t_end, 0.0);
    const Grid& g = params.grid();
    require_same_grid(g, c0.grid(), "stratonovich_consistency");

    // Pure transport set-up: no cells, no flow, no uptake, no velocity noise.
    SimParams base = params;
    base.chi = 0.0;
    base.f = ConsumptionLaw{"none", [](double) { return 0.0; }, [](double) { return 0.0; }};
    base.vnoise = VelocityNoiseConfig{};
    base.phi = ScalarField(g);

    const int w = base.sigma.cutoff_width;
    auto interior_sq = [&](const ScalarField& f) {
        double s = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (sigma_interior(g, w, i, j)) s += f(i, j) * f(i, j);
        return s * g.cell_area();
    };

    const double finest = dt_levels.back();
    auto drift = [&](const SimParams& p, double dt) {
        const int factor = nest_factor(dt, finest);
        const auto steps = static_cast<std::int64_t>(std::llround(t_end / dt));
        State s{VectorField(g), c0, ScalarField(g), 0.0};
        double total = 0.0;
        for (std::int64_t k = 0; k < steps; ++k) {
            const ScalarField sc = spectral::helmholtz_neumann(s.c, dt * p.xi);
            double expected = interior_sq(sc);
            if (p.gamma != 0.0) {
                for (const VectorField* sk : {&p.sigma.sigma1, &p.sigma.sigma2}) {
                    const ScalarField t = spectral::helmholtz_neumann(sigma_gradient(s.c, *sk, p.noise_gradient), dt * p.xi);
                    expected += p.gamma * p.gamma * dt * interior_sq(t);
                }
            }
            total += expected - interior_sq(s.c);
            const NoiseIncrement inc = nested_increments(seed, 0, k, finest, factor, 0);
            s = step(s, p, inc, dt);
        }
        return total / t_end;
    };

    StratonovichReport rep;
    const SimParams corrected = with_xi_mode(base, XiMode::Corrected);
    const SimParams uncorrected = with_xi_mode(base, XiMode::Uncorrected);
    const SimParams reference = with_gamma(corrected, 0.0);
    for (double dt : dt_levels) {
        rep.dt.push_back(dt);
        rep.drift_corrected.push_back(drift(corrected, dt));
        rep.drift_uncorrected.push_back(drift(uncorrected, dt));
        rep.drift_reference.push_back(drift(reference, dt));
    }
    for (std::size_t k = 0; k + 1 < rep.dt.size(); ++k)
        rep.halving_ratio.push_back((rep.drift_corrected[k + 1] - rep.drift_reference[k + 1]) /
                                    (rep.drift_corrected[k] - rep.drift_reference[k]));
    rep.gap_finest = rep.drift_uncorrected.back() - rep.drift_corrected.back();
    const double grad = norm(c0, NormKind::H1Semi);
    rep.gap_expected = params.gamma * params.gamma * grad * grad;
    return rep;
}

const std::vector<std::string>& ensemble_columns() {
    static const std::vector<std::string> cols{"mass_n", "min_n", "max_c", "l2_u", "h1_c",
                                               "entropy", "energy_residual", "clip_count", "div_residual"};
    return cols;
}

namespace {

std::vector<double> row_values(const DiagnosticsRow& r) {
    return {r.mass_n, r.min_n, r.max_c, r.l2_u, r.h1_c, r.entropy, r.energy_residual,
            static_cast<double>(r.clip_count), r.div_residual};
}

}  // namespace

EnsembleResult ensemble(const EnsembleSpec& spec) {
    if (spec.n_replicas < 1) throw InvalidArgument("ensemble: n_replicas must be >= 1");
    const auto n = static_cast<std::size_t>(spec.n_replicas);
    std::vector<DiagnosticsSeries> series(n);
    std::vector<std::string> failures(n);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < n; r = next++) {
            try {
                RunOptions opt;
                opt.replica = static_cast<std::uint32_t>(r);
                series[r] = run(spec.initial, spec.params, spec.t_end, spec.dt, spec.base_seed, spec.sample_every, opt).series;
            } catch (const std::exception& e) {
                failures[r] = e.what();
            }
        }
    };
    const int threads = std::clamp(spec.threads, 1, spec.n_replicas);
    {
        std::vector<std::jthread> pool;
        for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
        worker();
    }
    std::string failed;
    for (std::size_t r = 0; r < n; ++r)
        if (!failures[r].empty())
            failed += "replica " + std::to_string(r) + " (seed " + std::to_string(spec.base_seed) + "): " + failures[r] + "\n";
    if (!failed.empty()) throw std::runtime_error("ensemble: refusing partial aggregation\n" + failed);

    EnsembleResult res;
    const std::size_t samples = series.front().size();
    const auto& cols = ensemble_columns();
    for (const auto& name : cols) {
        auto& c = res.columns[name];
        c.mean.assign(samples, 0.0);
        c.variance.assign(samples, 0.0);
        c.max.assign(samples, -std::numeric_limits<double>::infinity());
        c.half_width.assign(samples, 0.0);
    }
    for (std::size_t s = 0; s < samples; ++s) {
        res.step.push_back(series.front()[s].step);
        res.t.push_back(series.front()[s].t);
        std::vector<double> mean(cols.size(), 0.0), m2(cols.size(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const auto v = row_values(series[r][s]);
            const auto count = static_cast<double>(r + 1);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const double d = v[c] - mean[c];
                mean[c] += d / count;
                m2[c] += d * (v[c] - mean[c]);
                res.columns[cols[c]].max[s] = std::max(res.columns[cols[c]].max[s], v[c]);
            }
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            auto& col = res.columns[cols[c]];
            col.mean[s] = mean[c];
            col.variance[s] = n > 1 ? m2[c] / static_cast<double>(n - 1) : 0.0;
            col.half_width[s] = 1.96 * std::sqrt(col.variance[s] / static_cast<double>(n));
        }
    }
    for (const auto& ser : series) {
        double sup = -std::numeric_limits<double>::infinity();
        for (const auto& row : ser) sup = std::max(sup, row.entropy);
        res.sup_entropy.push_back(sup);
        res.final_mass.push_back(ser.back().mass_n);
    }
    res.initial_entropy = series.front().front().entropy;
    return res;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("STOCHEM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 4096) return static_cast<int>(v);
    }
    return 1;
}

}  // namespace stochem
