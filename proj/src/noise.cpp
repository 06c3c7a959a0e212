#include "stochem/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "stochem/operators.hpp"
#include "stochem/rng.hpp"

namespace stochem {

namespace {

constexpr std::uint32_t kBetaStream = 0x40000000u;

int wall_distance(int index, int count) { return std::min(index, count - index); }

}  // namespace

bool sigma_interior(const Grid& grid, int w, int i, int j) {
    return i >= w + 1 && i <= grid.nx - w - 2 && j >= w + 1 && j <= grid.ny - w - 2;
}

void refresh_sigma_norms(TransportSigma& sigma) {
    double family_linf = 0.0;
    double family_w1 = 0.0;
    double max_linf = 0.0;
    for (const VectorField* s : {&sigma.sigma1, &sigma.sigma2}) {
        const Grid& g = s->grid();
        const double sup = norm(*s, NormKind::Linf);
        double lip = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                lip = std::max(lip, std::abs(s->ux(i + 1, j) - s->ux(i, j)) / g.dx);
        for (int j = 0; j + 1 < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                lip = std::max(lip, std::abs(s->ux(i, j + 1) - s->ux(i, j)) / g.dy);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                lip = std::max(lip, std::abs(s->uy(i, j + 1) - s->uy(i, j)) / g.dy);
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i + 1 < g.nx; ++i)
                lip = std::max(lip, std::abs(s->uy(i + 1, j) - s->uy(i, j)) / g.dx);
        max_linf = std::max(max_linf, sup);
        family_linf += sup * sup;
        family_w1 += (sup + lip) * (sup + lip);
    }
    sigma.linf = max_linf;
    sigma.linf_family = std::sqrt(family_linf);
    sigma.w1inf = std::sqrt(family_w1);
}

TransportSigma make_transport_sigma(const Grid& grid, int cutoff_width) {
    if (cutoff_width < 1 || 4 * cutoff_width >= std::min(grid.nx, grid.ny)) {
        throw InvalidArgument("make_transport_sigma: cutoff_width must satisfy 1 <= w < min(nx,ny)/4, got " +
                              std::to_string(cutoff_width));
    }
    const int w = cutoff_width;
    TransportSigma s;
    s.cutoff_width = w;
    s.sigma1 = VectorField(grid);
    s.sigma2 = VectorField(grid);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i <= grid.nx; ++i) {
            if (wall_distance(i, grid.nx) > w && wall_distance(j, grid.ny - 1) > w) s.sigma1.ux(i, j) = 1.0;
        }
    }
    for (int j = 0; j <= grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            if (wall_distance(j, grid.ny) > w && wall_distance(i, grid.nx - 1) > w) s.sigma2.uy(i, j) = 1.0;
        }
    }
    refresh_sigma_norms(s);
    return s;
}

AssumptionReport check_sigma_assumptions(const TransportSigma& sigma) {
    const Grid& g = sigma.sigma1.grid();
    const int w = sigma.cutoff_width;
    AssumptionReport rep;
    const ScalarField d1 = divergence(sigma.sigma1);
    const ScalarField d2 = divergence(sigma.sigma2);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (!sigma_interior(g, w, i, j)) continue;
            rep.max_interior_divergence =
                std::max({rep.max_interior_divergence, std::abs(d1(i, j)), std::abs(d2(i, j))});
            // q(x,x) from cell-centred averages of the staggered components.
            double q[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
            for (const VectorField* s : {&sigma.sigma1, &sigma.sigma2}) {
                const double a = 0.5 * (s->ux(i, j) + s->ux(i + 1, j));
                const double b = 0.5 * (s->uy(i, j) + s->uy(i, j + 1));
                q[0][0] += a * a;
                q[0][1] += a * b;
                q[1][0] += b * a;
                q[1][1] += b * b;
            }
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    rep.max_q_deviation =
                        std::max(rep.max_q_deviation, std::abs(q[r][c] - (r == c ? 1.0 : 0.0)));
        }
    }
    for (const VectorField* s : {&sigma.sigma1, &sigma.sigma2}) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                if ((wall_distance(i, g.nx) <= w || wall_distance(j, g.ny - 1) <= w) && s->ux(i, j) != 0.0)
                    ++rep.boundary_violations;
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if ((wall_distance(j, g.ny) <= w || wall_distance(i, g.nx - 1) <= w) && s->uy(i, j) != 0.0)
                    ++rep.boundary_violations;
    }
    TransportSigma copy = sigma;
    refresh_sigma_norms(copy);
    rep.linf = copy.linf;
    rep.linf_family = copy.linf_family;
    rep.w1inf = copy.w1inf;
    return rep;
}

// ---------------------------------------------------------------------------
// Increments

NoiseIncrement sample_increments(std::uint64_t seed, std::uint32_t replica, std::int64_t step,
                                 double dt, int k_modes) {
    return nested_increments(seed, replica, step, dt, 1, k_modes);
}

NoiseIncrement nested_increments(std::uint64_t seed, std::uint32_t replica, std::int64_t step,
                                 double fine_dt, int factor, int k_modes) {
    if (!(fine_dt > 0.0)) throw InvalidArgument("sample_increments: dt must be positive");
    if (factor < 1) throw InvalidArgument("nested_increments: factor must be >= 1");
    if (k_modes < 0) throw InvalidArgument("sample_increments: k_modes must be >= 0");
    NoiseIncrement inc;
    inc.dw.assign(static_cast<std::size_t>(k_modes), 0.0);
    inc.dt = fine_dt * factor;
    inc.step_index = step;
    inc.replica_index = replica;
    inc.seed = seed;
    const double scale = std::sqrt(fine_dt);
    for (int f = 0; f < factor; ++f) {
        const auto fine_step = static_cast<std::uint64_t>(step) * factor + f;
        for (int k = 0; k < k_modes; ++k) {
            inc.dw[k] += scale * rng::standard_normal(seed, replica, fine_step, static_cast<std::uint32_t>(k));
        }
        for (int k = 0; k < 2; ++k) {
            inc.dbeta[k] += scale * rng::standard_normal(seed, replica, fine_step, kBetaStream + k);
        }
    }
    return inc;
}

// ---------------------------------------------------------------------------
// Transport noise

ScalarField ito_correction(const ScalarField& c, double gamma) {
    if (gamma < 0.0) throw InvalidArgument("ito_correction: gamma must be non-negative");
    ScalarField out = laplacian_neumann(c);
    out *= 0.5 * gamma * gamma;
    return out;
}

ScalarField sigma_gradient(const ScalarField& c, const VectorField& s, NoiseGradient kind) {
    require_same_grid(c.grid(), s.grid(), "sigma_gradient");
    const Grid& g = c.grid();
    const int nx = g.nx;
    const int ny = g.ny;
    // Mirrored ghosts implement the Neumann condition.
    auto cx = [&](int i, int j) { return c(std::clamp(i, 0, nx - 1), j); };
    auto cy = [&](int i, int j) { return c(i, std::clamp(j, 0, ny - 1)); };
    ScalarField out(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double se = s.ux(i + 1, j);
            const double sw = s.ux(i, j);
            const double sn = s.uy(i, j + 1);
            const double ss = s.uy(i, j);
            double r;
            if (kind == NoiseGradient::Advective) {
                r = 0.5 * (se * (cx(i + 1, j) - c(i, j)) + sw * (c(i, j) - cx(i - 1, j))) / g.dx +
                    0.5 * (sn * (cy(i, j + 1) - c(i, j)) + ss * (c(i, j) - cy(i, j - 1))) / g.dy;
            } else {
                r = 0.5 * (se * cx(i + 1, j) - sw * cx(i - 1, j)) / g.dx +
                    0.5 * (sn * cy(i, j + 1) - ss * cy(i, j - 1)) / g.dy;
            }
            out(i, j) = r;
        }
    }
    return out;
}

ScalarField transport_noise_apply(const ScalarField& c, const TransportSigma& sigma, double gamma,
                                  const NoiseIncrement& inc, NoiseGradient kind) {
    ScalarField out(c.grid());
    if (gamma == 0.0) return out;
    if (inc.dbeta[0] != 0.0) out.axpy(gamma * inc.dbeta[0], sigma_gradient(c, sigma.sigma1, kind));
    if (inc.dbeta[1] != 0.0) out.axpy(gamma * inc.dbeta[1], sigma_gradient(c, sigma.sigma2, kind));
    return out;
}

// ---------------------------------------------------------------------------
// Velocity noise

namespace {

std::vector<std::pair<int, int>> mode_wavenumbers(int count) {
    std::vector<std::pair<int, int>> pairs;
    const int span = count + 1;
    for (int a = 1; a <= span; ++a)
        for (int b = 1; b <= span; ++b) pairs.emplace_back(a, b);
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& p, const auto& q) {
        const int kp = p.first * p.first + p.second * p.second;
        const int kq = q.first * q.first + q.second * q.second;
        return kp != kq ? kp < kq : p.first < q.first;
    });
    pairs.resize(static_cast<std::size_t>(count));
    return pairs;
}

VectorField stream_mode(const Grid& g, int a, int b) {
    auto psi = [&](int i, int j) {
        if (i == 0 || i == g.nx || j == 0 || j == g.ny) return 0.0;
        return std::sin(a * std::numbers::pi * i / g.nx) * std::sin(b * std::numbers::pi * j / g.ny);
    };
    VectorField v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) v.ux(i, j) = (psi(i, j + 1) - psi(i, j)) / g.dy;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.uy(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.dx;
    v.enforce_no_slip();
    v *= 1.0 / norm(v, NormKind::L2);
    return v;
}

}  // namespace

VelocityNoiseConfig make_velocity_noise(const Grid& grid, int n_modes, double amplitude,
                                        double decay_exponent, double multiplicative_gain) {
    if (n_modes < 0) throw InvalidArgument("velocity noise: k_modes must be >= 0");
    if (!(amplitude >= 0.0)) throw InvalidArgument("velocity noise: amplitude must be >= 0");
    if (!(multiplicative_gain >= 0.0)) throw InvalidArgument("velocity noise: multiplicative_gain must be >= 0");
    if (!std::isfinite(decay_exponent)) throw InvalidArgument("velocity noise: mode_decay_exponent must be finite");
    VelocityNoiseConfig cfg;
    cfg.n_modes = n_modes;
    cfg.amplitude = amplitude;
    cfg.decay_exponent = decay_exponent;
    cfg.multiplicative_gain = multiplicative_gain;
    double sum_sq = 0.0;
    for (const auto& [a, b] : mode_wavenumbers(n_modes)) {
        const double k = static_cast<double>(cfg.modes.size() + 1);
        cfg.lambda.push_back(std::pow(k, -decay_exponent));
        cfg.modes.push_back(stream_mode(grid, a, b));
        sum_sq += cfg.lambda.back() * cfg.lambda.back();
    }
    // |g|_HS = eps (1 + gain tanh|u|) sqrt(sum lambda_k^2) and |d tanh| <= 1.
    cfg.l_g = amplitude * (1.0 + multiplicative_gain) * std::sqrt(sum_sq);
    cfg.l_lip = amplitude * multiplicative_gain * std::sqrt(sum_sq);
    return cfg;
}

namespace {

double noise_scale(const VectorField& u, const VelocityNoiseConfig& cfg) {
    return cfg.amplitude * (1.0 + cfg.multiplicative_gain * std::tanh(norm(u, NormKind::L2)));
}

}  // namespace

VectorField g_apply(const VectorField& u, const ScalarField& c, const VelocityNoiseConfig& cfg,
                    const NoiseIncrement& inc) {
    require_same_grid(u.grid(), c.grid(), "g_apply");
    VectorField out(u.grid());
    if (cfg.amplitude == 0.0 || cfg.n_modes == 0) return out;
    if (inc.dw.size() < cfg.modes.size()) {
        throw InvalidArgument("g_apply: increment carries fewer modes than the noise configuration");
    }
    const double scale = noise_scale(u, cfg);
    for (std::size_t k = 0; k < cfg.modes.size(); ++k) {
        out.axpy(scale * cfg.lambda[k] * inc.dw[k], cfg.modes[k]);
    }
    return out;
}

double g_hilbert_schmidt(const VectorField& u, const ScalarField& c, const VelocityNoiseConfig& cfg) {
    require_same_grid(u.grid(), c.grid(), "g_hilbert_schmidt");
    double s = 0.0;
    for (std::size_t k = 0; k < cfg.modes.size(); ++k) {
        const double m = cfg.lambda[k] * norm(cfg.modes[k], NormKind::L2);
        s += m * m;
    }
    return noise_scale(u, cfg) * std::sqrt(s);
}

}  // namespace stochem
