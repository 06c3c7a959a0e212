#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stochem/config.hpp"
#include "stochem/experiments.hpp"
#include "support.hpp"

using namespace stochem;
using stochem::testing::deterministic_config;
using stochem::testing::reference_config;
using stochem::testing::sampled;

namespace {

struct Setup {
    RunConfig cfg;
    SimParams params;
    State initial;
};

Setup setup(const std::string& text) {
    Setup s;
    s.cfg = parse_config(text);
    s.params = build_params(s.cfg);
    s.initial = build_initial_state(s.cfg, s.params.grid());
    return s;
}

}  // namespace

TEST_CASE("twin runs") {
    const Setup s = setup(reference_config(16, 0.05, 1e-3));
    const TwinReport zero = twin_run(s.params, s.initial, 3, 0.0, 0.05, 1e-3, 5);
    for (double y : zero.y) CHECK(y == 0.0);

    const TwinReport other_path = twin_run(s.params, s.initial, 3, 0.0, 0.05, 1e-3, 5, 4);
    CHECK(other_path.y.front() == 0.0);
    for (std::size_t k = 1; k < other_path.y.size(); ++k) CHECK(other_path.y[k] > 0.0);

    const TwinReport bumped = twin_run(s.params, s.initial, 3, 1e-6, 0.05, 1e-3, 5);
    CHECK(bumped.y.front() > 0.0);
    CHECK(std::isfinite(bumped.growth_envelope));
    for (std::size_t k = 0; k < bumped.t.size(); ++k)
        CHECK(bumped.y[k] <= bumped.y[0] * std::exp(bumped.growth_envelope * bumped.t[k]) * (1 + 1e-12));
}

TEST_CASE("separation functional") {
    const Setup s = setup(reference_config(16, 0.05, 1e-3));
    CHECK(twin_separation(s.initial, s.initial) == 0.0);
    const State p = perturb_state(s.initial, 1e-3);
    CHECK(twin_separation(s.initial, p) > 0.0);
    CHECK(twin_separation(s.initial, p) == twin_separation(p, s.initial));
}

TEST_CASE("log-log slope") {
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 6, 12, 24}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(loglog_slope({1, 2, 4}, {1, 4, 16}) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("dt-refinement") {
    const Setup s = setup(deterministic_config(16, 0.04, 4e-3));
    const ConvergenceReport r = convergence_dt(s.params, s.initial, 1, {4e-3, 2e-3, 1e-3, 5e-4}, 0.04);
    CHECK(r.dt.size() == 3u);
    CHECK(r.finest_dt == 5e-4);
    CHECK(r.slope >= 0.9);

    CHECK_THROWS_AS(convergence_dt(s.params, s.initial, 1, {4e-3}, 0.04), InvalidArgument);
    CHECK_THROWS_AS(convergence_dt(s.params, s.initial, 1, {4e-3, 2e-3, 5e-4}, 0.04), InvalidArgument);
}

TEST_CASE("Stratonovich check without noise") {
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    PhysicalCoefficients pc;
    pc.mu = 0.1;
    NoiseSettings ns;
    ns.k_modes = 0;
    const SimParams p = make_sim_params(g, pc, ScalarField(g), "linear", ns);
    const ScalarField c0 = sampled(g, [](double x, double y) { return std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y); });
    const StratonovichReport r = stratonovich_consistency(p, c0, 1, {4e-3, 2e-3, 1e-3}, 0.008);
    REQUIRE(r.drift_corrected.size() == 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(r.drift_corrected[k] == r.drift_uncorrected[k]);
        CHECK(r.drift_corrected[k] == r.drift_reference[k]);
    }
    CHECK(r.gap_finest == 0.0);
}

TEST_CASE("ensembles") {
    const Setup s = setup(reference_config(16, 0.02, 1e-3));
    EnsembleSpec spec;
    spec.n_replicas = 1;
    spec.base_seed = 5;
    spec.params = s.params;
    spec.initial = s.initial;
    spec.t_end = 0.02;
    spec.dt = 1e-3;
    spec.sample_every = 5;
    const EnsembleResult one = ensemble(spec);
    const RunResult single = run(s.initial, s.params, 0.02, 1e-3, 5, 5);
    REQUIRE(one.t.size() == single.series.size());
    for (std::size_t k = 0; k < one.t.size(); ++k) {
        CHECK(one.columns.at("mass_n").mean[k] == single.series[k].mass_n);
        CHECK(one.columns.at("entropy").mean[k] == single.series[k].entropy);
        CHECK(one.columns.at("max_c").max[k] == single.series[k].max_c);
        CHECK(one.columns.at("entropy").variance[k] == 0.0);
    }

    spec.n_replicas = 4;
    spec.threads = 2;
    const EnsembleResult four = ensemble(spec);
    spec.threads = 1;
    const EnsembleResult serial = ensemble(spec);
    const double m0 = total_mass(s.initial.n);
    for (std::size_t k = 0; k < four.t.size(); ++k) {
        CHECK(std::abs(four.columns.at("mass_n").mean[k] - m0) <= 1e-12 * m0);
        CHECK(four.columns.at("l2_u").mean[k] == serial.columns.at("l2_u").mean[k]);
        CHECK(four.columns.at("l2_u").variance[k] == serial.columns.at("l2_u").variance[k]);
    }
    CHECK(four.sup_entropy.size() == 4u);
    CHECK(four.columns.size() == ensemble_columns().size());
}

TEST_CASE("thread count resolution") {
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
}
