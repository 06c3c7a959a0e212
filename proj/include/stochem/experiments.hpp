#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stochem/dynamics.hpp"

namespace stochem {

/// Separation functional |du|^2 + |dc|_{H1}^2 + |dn|^2 between two states.
double twin_separation(const State& a, const State& b);

/// n and c multiplied by 1 + amplitude cos(pi x / lx) cos(pi y / ly).
State perturb_state(const State& s, double amplitude);

struct TwinReport {
    std::vector<double> t;
    std::vector<double> y;
    /// Smallest G with Y(t) <= Y(0) exp(G t) on every sample (0 when Y(0) = 0).
    double growth_envelope = 0.0;
    /// Least-squares slope of log(Y / Y(0)) against t.
    double growth_slope = 0.0;
};

/// Runs the unperturbed and the perturbed state on the same increment stream
/// (or on `second_seed` for the perturbed copy when given).
TwinReport twin_run(const SimParams& params, const State& initial, std::uint64_t seed,
                    double perturbation, double t_end, double dt, int sample_every = 1,
                    std::optional<std::uint64_t> second_seed = std::nullopt);

struct ConvergenceReport {
    std::vector<double> dt;     // coarse levels, finest excluded
    std::vector<double> error;  // L2 distance of the final state to the finest level
    double finest_dt = 0.0;
    double slope = 0.0;
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// dt-refinement on one shared Brownian path. dt_levels must halve from one
/// entry to the next and hold at least three levels.
ConvergenceReport convergence_dt(const SimParams& params, const State& initial, std::uint64_t seed,
                                 const std::vector<double>& dt_levels, double t_end,
                                 std::uint32_t replica = 0);

struct StratonovichReport {
    std::vector<double> dt;
    /// Mean per-unit-time drift of the interior |c|^2 (predictable part).
    std::vector<double> drift_corrected;
    std::vector<double> drift_uncorrected;
    std::vector<double> drift_reference;  // gamma = 0, diffusivity mu
    /// Ratio of successive corrected-minus-reference drifts (0.5 for O(dt) bias).
    std::vector<double> halving_ratio;
    double gap_finest = 0.0;     // uncorrected minus corrected, finest level
    double gap_expected = 0.0;   // gamma^2 |grad c0|^2
};

/// Pure transport-noise test with u = 0, n = 0, f = 0. Each step's drift is
/// the conditional expectation of the interior |c|^2 increment,
/// |S c|^2 + gamma^2 dt sum_k |S T_k c|^2 - |c|^2 with S = (I - dt xi lap)^{-1},
/// accumulated along the path of the actual scheme.
StratonovichReport stratonovich_consistency(const SimParams& params, const ScalarField& c0,
                                            std::uint64_t seed, const std::vector<double>& dt_levels,
                                            double t_end);

struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> max;
    std::vector<double> half_width;  // 95% normal-approximation half-width of the mean
};

struct EnsembleSpec {
    int n_replicas = 16;
    std::uint64_t base_seed = 1;
    SimParams params;
    State initial;
    double t_end = 1.0;
    double dt = 1e-3;
    int sample_every = 10;
    int threads = 1;
};

struct EnsembleResult {
    std::vector<std::int64_t> step;
    std::vector<double> t;
    std::map<std::string, ColumnStats> columns;
    /// sup_t E per replica
    std::vector<double> sup_entropy;
    std::vector<double> final_mass;
    double initial_entropy = 0.0;
};

/// Names of the aggregated columns, in CSV order.
const std::vector<std::string>& ensemble_columns();

/// Replicas r = 0..n-1 share base_seed and use r as the replica counter
/// word. Results are folded in replica order, independent of scheduling.
EnsembleResult ensemble(const EnsembleSpec& spec);

/// Resolves a worker count: explicit value if > 0, else STOCHEM_THREADS, else 1.
int resolve_threads(int requested);

}  // namespace stochem
