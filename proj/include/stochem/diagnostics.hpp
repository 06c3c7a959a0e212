#pragma once

#include <cstdint>
#include <vector>

#include "stochem/model.hpp"

namespace stochem {

/// One sampling instant. The CSV columns are the first eleven members; the
/// remaining members feed the energy-identity bookkeeping.
struct DiagnosticsRow {
    std::int64_t step = 0;
    double t = 0.0;
    double mass_n = 0.0;
    double min_n = 0.0;
    double max_c = 0.0;
    double l2_u = 0.0;
    double h1_c = 0.0;
    double entropy = 0.0;
    double energy_residual = 0.0;
    std::int64_t clip_count = 0;
    double div_residual = 0.0;

    double c_l2_sq = 0.0;            // |c|^2
    double grad_c_sq = 0.0;          // |grad c|^2
    double consumption_pairing = 0.0;  // (n f(c), c)
    double noise_quadratic = 0.0;    // sum_k |sigma_k . grad c|^2
};

using DiagnosticsSeries = std::vector<DiagnosticsRow>;

double total_mass(const ScalarField& n);

/// Extremes of f and f' over [0, c_max]: 1024 samples plus a ternary-search
/// refinement around the extremal sample.
struct LawExtremes {
    double min_fprime = 0.0;
    double max_f_sq = 0.0;
};
LawExtremes law_extremes(const ConsumptionLaw& f, double c_max);

/// K_f = chi^2 / (2 delta min f') + 1 / min f' over [0, c0_linf].
/// Throws InvalidArgument when a sampled f' is not positive.
double compute_kf(const SimParams& params, double c0_linf);

struct GateReport {
    double kf = 0.0;
    /// 4 K_f max f^2 / min f' <= delta
    bool cell_condition_ok = false;
    double cell_condition_margin = 0.0;
    /// gamma^2 <= min(xi, xi / (2 K0)) / (6 |sigma|^2)
    bool noise_condition_ok = false;
    double noise_condition_margin = 0.0;
    /// gamma^4 <= 3^2 xi^2 / (2^5 |sigma|^4 8^2), reported in gamma^2 units
    bool noise_condition_p_ok = false;
    double noise_condition_p_margin = 0.0;
    /// Largest |c0|_Linf for which the cell-term condition holds.
    double c0_bound = 0.0;
    double sigma_linf = 0.0;
    double k0_used = 0.0;
    double c0_linf = 0.0;

    [[nodiscard]] bool all_ok() const {
        return cell_condition_ok && noise_condition_ok && noise_condition_p_ok;
    }
};

/// Evaluates the admissibility conditions. When k0 <= 0 the estimate from
/// estimate_k0 (or params.k0 when set) is used.
GateReport check_conditions(const SimParams& params, double c0_linf, double k0 = 0.0);

/// Largest generalised Rayleigh quotient |psi|_{H2}^2 / (|lap psi|^2 + |psi|_{H1}^2)
/// over the discrete Neumann fields, by power iteration.
double estimate_k0(const Grid& grid, int iterations = 50);

/// E = int n ln n + K_f |grad c|^2 + 8 K_f K_GN c0^2 / (3 xi eta) |u|^2 + |O| / e.
double entropy_functional(const State& state, const SimParams& params, double c0_linf, double k_gn);

/// Integrand of the oxygen energy balance:
/// 2 xi |grad c|^2 + 2 (n f(c), c) - gamma^2 sum_k |sigma_k . grad c|^2.
double energy_integrand(const DiagnosticsRow& row, const SimParams& params);

/// max_t ||c(t)|^2 + int_0^t integrand - |c0|^2| / |c0|^2 with trapezoid
/// quadrature. The series must be sampled every step.
double energy_identity_residual(const DiagnosticsSeries& series, const SimParams& params);

/// Stateful recorder used by run(): integrates the energy balance every step
/// and assembles rows on demand.
class DiagnosticsRecorder {
public:
    DiagnosticsRecorder(const State& initial, const SimParams& params);

    /// Accounts for one completed step ending in `state`.
    void advance(const State& state, const StepReport& report);

    [[nodiscard]] DiagnosticsRow record(const State& state, std::int64_t step) const;

    [[nodiscard]] double c0_linf() const { return c0_linf_; }

private:
    DiagnosticsRow measure(const State& state) const;

    const SimParams* params_;
    double c0_linf_ = 0.0;
    double kf_ = 0.0;
    double c0_sq_ = 0.0;
    double integral_ = 0.0;
    double last_integrand_ = 0.0;
    std::int64_t clip_total_ = 0;
    double last_div_ = 0.0;
};

/// Single-shot row for `state`, treating it as its own initial condition.
DiagnosticsRow record(const State& state, const StepReport& report, const SimParams& params);

}  // namespace stochem
