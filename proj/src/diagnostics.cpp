#include "stochem/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stochem/spectral.hpp"

namespace stochem {

double total_mass(const ScalarField& n) {
    double s = 0.0;
    for (double v : n.values()) s += v;
    return s * n.grid().cell_area();
}

// ---------------------------------------------------------------------------
// Consumption-law extremes and K_f

namespace {

constexpr int kLawSamples = 1024;

template <class F>
double refine_extremum(F&& objective, double lo, double hi, bool maximize) {
    // Ternary search on a bracket of two sample spacings; monotone or
    // unimodal laws (f(0) = 0, f nondecreasing) are all we accept.
    for (int it = 0; it < 100; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        const bool left_better = maximize ? objective(m1) > objective(m2) : objective(m1) < objective(m2);
        if (left_better) hi = m2;
        else lo = m1;
    }
    return objective(0.5 * (lo + hi));
}

template <class F>
double sampled_extremum(F&& objective, double c_max, bool maximize) {
    double best = objective(0.0);
    int best_k = 0;
    for (int k = 1; k < kLawSamples; ++k) {
        const double c = k == kLawSamples - 1 ? c_max : c_max * k / (kLawSamples - 1);
        const double v = objective(c);
        if (maximize ? v > best : v < best) {
            best = v;
            best_k = k;
        }
    }
    if (c_max > 0.0) {
        const double h = c_max / (kLawSamples - 1);
        const double lo = std::max(0.0, (best_k - 1) * h);
        const double hi = std::min(c_max, (best_k + 1) * h);
        const double refined = refine_extremum(objective, lo, hi, maximize);
        if (maximize ? refined > best : refined < best) best = refined;
    }
    return best;
}

}  // namespace

LawExtremes law_extremes(const ConsumptionLaw& f, double c_max) {
    if (!(c_max >= 0.0)) throw InvalidArgument("law_extremes: c_max must be non-negative");
    LawExtremes e;
    e.min_fprime = sampled_extremum([&](double c) { return f.deriv(c); }, c_max, false);
    e.max_f_sq = sampled_extremum([&](double c) { const double v = f.eval(c); return v * v; }, c_max, true);
    return e;
}

double compute_kf(const SimParams& params, double c0_linf) {
    const LawExtremes e = law_extremes(params.f, c0_linf);
    if (!(e.min_fprime > 0.0)) {
        throw InvalidArgument("compute_kf: f' is not positive on [0, " + std::to_string(c0_linf) +
                              "] (sampled minimum " + std::to_string(e.min_fprime) + ")");
    }
    return params.chi * params.chi / (2.0 * params.delta * e.min_fprime) + 1.0 / e.min_fprime;
}

// ---------------------------------------------------------------------------
// K0 estimate

namespace {

// Second x-difference with Neumann closure (one-dimensional part of lap_h).
ScalarField second_dx(const ScalarField& p) {
    const Grid& g = p.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double flux = (p(i + 1, j) - p(i, j)) / (g.dx * g.dx);
            out(i, j) += flux;
            out(i + 1, j) -= flux;
        }
    return out;
}

ScalarField second_dy(const ScalarField& p) {
    const Grid& g = p.grid();
    ScalarField out(g);
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double flux = (p(i, j + 1) - p(i, j)) / (g.dy * g.dy);
            out(i, j) += flux;
            out(i, j + 1) -= flux;
        }
    return out;
}

// Mixed difference at interior nodes, stored at node (i, j) for i in [1,nx), j in [1,ny).
std::vector<double> mixed(const ScalarField& p) {
    const Grid& g = p.grid();
    std::vector<double> out(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1), 0.0);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            out[static_cast<std::size_t>(j) * (g.nx + 1) + i] =
                (p(i, j) - p(i - 1, j) - p(i, j - 1) + p(i - 1, j - 1)) / (g.dx * g.dy);
    return out;
}

ScalarField mixed_adjoint(const std::vector<double>& m, const Grid& g) {
    ScalarField out(g);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double v = m[static_cast<std::size_t>(j) * (g.nx + 1) + i] / (g.dx * g.dy);
            out(i, j) += v;
            out(i - 1, j) -= v;
            out(i, j - 1) -= v;
            out(i - 1, j - 1) += v;
        }
    return out;
}

// Numerator operator: I - lap + Dxx^2 + 2 Dxy^T Dxy + Dyy^2 (the H2 Gram operator).
ScalarField h2_gram(const ScalarField& p) {
    ScalarField out = p;
    out -= laplacian_neumann(p);
    out += second_dx(second_dx(p));
    out += second_dy(second_dy(p));
    out.axpy(2.0, mixed_adjoint(mixed(p), p.grid()));
    return out;
}

double h2_norm_sq(const ScalarField& p) {
    const Grid& g = p.grid();
    const ScalarField pxx = second_dx(p);
    const ScalarField pyy = second_dy(p);
    double mixed_sq = 0.0;
    for (double v : mixed(p)) mixed_sq += v * v;
    const double grad = norm(p, NormKind::H1Semi);
    return inner_product(p, p) + grad * grad + inner_product(pxx, pxx) + inner_product(pyy, pyy) +
           2.0 * mixed_sq * g.cell_area();
}

double denominator_sq(const ScalarField& p) {
    const ScalarField lap = laplacian_neumann(p);
    const double grad = norm(p, NormKind::H1Semi);
    return inner_product(lap, lap) + inner_product(p, p) + grad * grad;
}

}  // namespace

double estimate_k0(const Grid& grid, int iterations) {
    // Power iteration on D^{-1} N with N the H2 Gram operator and
    // D = I - lap + lap^2 (denominator Gram operator), D inverted by CG.
    ScalarField x(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            x(i, j) = std::cos(1.3 * i + 0.7 * j) + 0.25 * std::sin(0.37 * i * j + 1.0);
    double quotient = h2_norm_sq(x) / denominator_sq(x);
    for (int it = 0; it < iterations; ++it) {
        ScalarField y = h2_gram(x);
        // D^{-1} y via conjugate gradients on the SPD operator D.
        ScalarField z(grid);
        ScalarField r = y;
        ScalarField p = r;
        double rr = inner_product(r, r);
        const double target = 1e-24 * rr;
        for (int k = 0; k < 500 && rr > target; ++k) {
            ScalarField dp = p;
            const ScalarField lp = laplacian_neumann(p);
            dp -= lp;
            dp += laplacian_neumann(lp);
            const double alpha = rr / inner_product(p, dp);
            z.axpy(alpha, p);
            r.axpy(-alpha, dp);
            const double rr_new = inner_product(r, r);
            for (std::size_t m = 0; m < p.size(); ++m) p[m] = r[m] + (rr_new / rr) * p[m];
            rr = rr_new;
        }
        const double scale = std::sqrt(denominator_sq(z));
        if (!(scale > 0.0)) break;
        z *= 1.0 / scale;
        x = std::move(z);
        const double q = h2_norm_sq(x) / denominator_sq(x);
        const bool converged = std::abs(q - quotient) <= 1e-12 * q;
        quotient = q;
        if (converged) break;
    }
    return quotient;
}

// ---------------------------------------------------------------------------
// Gate

GateReport check_conditions(const SimParams& params, double c0_linf, double k0) {
    GateReport rep;
    rep.c0_linf = c0_linf;
    rep.kf = compute_kf(params, c0_linf);
    const LawExtremes e = law_extremes(params.f, c0_linf);
    const double lhs = 4.0 * rep.kf * e.max_f_sq / e.min_fprime;
    rep.cell_condition_margin = params.delta - lhs;
    rep.cell_condition_ok = rep.cell_condition_margin >= 0.0;

    // Largest admissible |c0|: the left side is nondecreasing in c0 for
    // nondecreasing laws with f(0) = 0, so bisect on it.
    auto violates = [&](double c) {
        const LawExtremes ec = law_extremes(params.f, c);
        if (!(ec.min_fprime > 0.0)) return true;
        const double kf = params.chi * params.chi / (2.0 * params.delta * ec.min_fprime) + 1.0 / ec.min_fprime;
        return 4.0 * kf * ec.max_f_sq / ec.min_fprime > params.delta;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (!violates(hi) && hi < 1e12) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (violates(mid)) hi = mid;
        else lo = mid;
    }
    rep.c0_bound = lo;

    rep.k0_used = k0 > 0.0 ? k0 : (params.k0 ? *params.k0 : estimate_k0(params.grid()));
    rep.sigma_linf = params.sigma.linf_family;
    const double s2 = rep.sigma_linf * rep.sigma_linf;
    const double xi = params.xi;
    const double g2 = params.gamma * params.gamma;
    if (s2 > 0.0) {
        const double bound_a = std::min(xi, xi / (2.0 * rep.k0_used)) / (6.0 * s2);
        constexpr double p = 2.0;
        const double rhs_p = std::pow(3.0, p) * std::pow(xi, p) /
                             (std::pow(2.0, 2.0 * p + 1.0) * std::pow(s2, p) * std::pow(8.0, p));
        const double bound_b = std::pow(rhs_p, 1.0 / p);
        rep.noise_condition_margin = bound_a - g2;
        rep.noise_condition_p_margin = bound_b - g2;
    } else {
        rep.noise_condition_margin = std::numeric_limits<double>::infinity();
        rep.noise_condition_p_margin = std::numeric_limits<double>::infinity();
    }
    rep.noise_condition_ok = rep.noise_condition_margin >= 0.0;
    rep.noise_condition_p_ok = rep.noise_condition_p_margin >= 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Entropy and energy balance

namespace {

double entropy_with_kf(const State& s, const SimParams& params, double kf, double c0_linf, double k_gn) {
    const Grid& g = s.grid();
    double nlogn = 0.0;
    for (double v : s.n.values()) {
        if (v < 0.0) throw InvalidArgument("entropy_functional: negative cell density");
        if (v > 0.0) nlogn += v * std::log(v);
    }
    nlogn *= g.cell_area();
    const double grad_c = norm(s.c, NormKind::H1Semi);
    const double l2u = norm(s.u, NormKind::L2);
    const double weight = 8.0 * kf * k_gn * c0_linf * c0_linf / (3.0 * params.xi * params.eta);
    return nlogn + kf * grad_c * grad_c + weight * l2u * l2u + g.area() / std::numbers::e;
}

}  // namespace

double entropy_functional(const State& state, const SimParams& params, double c0_linf, double k_gn) {
    return entropy_with_kf(state, params, compute_kf(params, c0_linf), c0_linf, k_gn);
}

double energy_integrand(const DiagnosticsRow& row, const SimParams& params) {
    return 2.0 * params.xi * row.grad_c_sq + 2.0 * row.consumption_pairing -
           params.gamma * params.gamma * row.noise_quadratic;
}

double energy_identity_residual(const DiagnosticsSeries& series, const SimParams& params) {
    if (series.empty()) return 0.0;
    const double c0 = series.front().c_l2_sq;
    if (!(c0 > 0.0)) return 0.0;
    double integral = 0.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (k > 0) {
            const double dt = series[k].t - series[k - 1].t;
            integral += 0.5 * dt * (energy_integrand(series[k - 1], params) + energy_integrand(series[k], params));
        }
        worst = std::max(worst, std::abs(series[k].c_l2_sq + integral - c0) / c0);
    }
    return worst;
}

DiagnosticsRecorder::DiagnosticsRecorder(const State& initial, const SimParams& params)
    : params_(&params),
      c0_linf_(norm(initial.c, NormKind::Linf)),
      c0_sq_(inner_product(initial.c, initial.c)) {
    // Laws with f' vanishing somewhere (or f = 0 test set-ups) have no K_f;
    // the entropy column is then reported as NaN instead of aborting the run.
    try {
        kf_ = compute_kf(params, c0_linf_);
    } catch (const InvalidArgument&) {
        kf_ = std::numeric_limits<double>::quiet_NaN();
    }
    last_integrand_ = energy_integrand(measure(initial), params);
    last_div_ = norm(divergence(initial.u), NormKind::Linf);
}

DiagnosticsRow DiagnosticsRecorder::measure(const State& s) const {
    const SimParams& p = *params_;
    DiagnosticsRow row;
    row.t = s.t;
    row.mass_n = total_mass(s.n);
    row.min_n = *std::min_element(s.n.values().begin(), s.n.values().end());
    row.max_c = *std::max_element(s.c.values().begin(), s.c.values().end());
    row.l2_u = norm(s.u, NormKind::L2);
    row.c_l2_sq = inner_product(s.c, s.c);
    const double grad = norm(s.c, NormKind::H1Semi);
    row.grad_c_sq = grad * grad;
    row.h1_c = std::sqrt(row.c_l2_sq + row.grad_c_sq);
    row.consumption_pairing = inner_product(consumption(s.n, s.c, p.f), s.c);
    if (p.gamma != 0.0) {
        for (const VectorField* sk : {&p.sigma.sigma1, &p.sigma.sigma2}) {
            const ScalarField t = sigma_gradient(s.c, *sk, p.noise_gradient);
            row.noise_quadratic += inner_product(t, t);
        }
    }
    return row;
}

void DiagnosticsRecorder::advance(const State& state, const StepReport& report) {
    const double e = energy_integrand(measure(state), *params_);
    integral_ += 0.5 * report.dt * (last_integrand_ + e);
    last_integrand_ = e;
    clip_total_ += report.clip_count;
    last_div_ = report.projection_residual;
}

DiagnosticsRow DiagnosticsRecorder::record(const State& state, std::int64_t step) const {
    DiagnosticsRow row = measure(state);
    row.step = step;
    try {
        row.entropy = entropy_with_kf(state, *params_, kf_, c0_linf_, params_->k_gn);
    } catch (const InvalidArgument&) {
        row.entropy = std::numeric_limits<double>::quiet_NaN();
    }
    row.energy_residual = c0_sq_ > 0.0 ? std::abs(row.c_l2_sq + integral_ - c0_sq_) / c0_sq_ : 0.0;
    row.clip_count = clip_total_;
    row.div_residual = last_div_;
    return row;
}

DiagnosticsRow record(const State& state, const StepReport& report, const SimParams& params) {
    DiagnosticsRecorder recorder(state, params);
    DiagnosticsRow row = recorder.record(state, 0);
    row.clip_count = report.clip_count;
    row.div_residual = report.projection_residual;
    return row;
}

}  // namespace stochem
