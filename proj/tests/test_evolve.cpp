#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "semiheat/errors.hpp"
#include "semiheat/estimates.hpp"
#include "semiheat/evolve.hpp"
#include "semiheat/reaction_ode.hpp"

using namespace semiheat;

namespace {

constexpr double kPi = std::numbers::pi;

double oscillation(const ScalarField& u) {
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    return *hi - *lo;
}

}  // namespace

TEST_CASE("controls validation") {
    EvolveControls c;
    CHECK_NOTHROW(c.validate());
    c.dt_max = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.blow_threshold = 1e5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("constant data follows the scalar ODE") {
    const auto m = make_manifold(ManifoldKind::sphere_zonal, 2, 1.0, 64);
    const auto traj = evolve(m, constant_field(*m, 1.0), 0.0, 0.9, 2.0);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double ex = 1.0 / (1.0 - traj.times[k]);
        for (double v : traj.snapshots[k]) CHECK(std::abs(v - ex) <= 1e-6);
    }
    for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
    CHECK_FALSE(traj.blowup);
}

TEST_CASE("constant data blows up at the ODE time") {
    const auto m = make_manifold(ManifoldKind::sphere_zonal, 2, 1.0, 32);
    const auto traj = evolve(m, constant_field(*m, 1.0), 0.0, 2.0, 2.0);
    REQUIRE(traj.blowup);
    CHECK(traj.max_at(traj.size() - 1) > 1e8);
    CHECK(std::abs(traj.blowup->detected_time - 1.0) <= 1e-3);
    CHECK(std::abs(detect_blowup(traj, 2.0) - 1.0) <= 1e-3);
}

TEST_CASE("cubic blow-up outruns the time resolution") {
    // Near T = 0.5 the admissible step falls below one ulp of t before max u reaches 1e8.
    const auto m = make_manifold(ManifoldKind::circle, 1, 1.0, 16);
    const auto traj = evolve(m, constant_field(*m, 1.0), 0.0, 1.0, 3.0);
    REQUIRE(traj.blowup);
    CHECK(traj.blowup->method == BlowupMethod::extrapolation);
    CHECK(std::abs(traj.blowup->detected_time - 0.5) <= 1e-6);
    CHECK(std::abs(detect_blowup(traj, 3.0) - 0.5) <= 1e-3);
    for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
}

TEST_CASE("step log matches snapshots") {
    const auto m = make_manifold(ManifoldKind::circle, 1, 2 * kPi, 64);
    ScalarField u0(m->node_count());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = 0.5 + 0.2 * std::sin(m->nodes()[i]);
    const auto traj = evolve(m, u0, 0.0, 0.5, 2.0);
    REQUIRE(traj.steps.size() + 1 == traj.size());
    for (std::size_t k = 0; k < traj.steps.size(); ++k) {
        CHECK(traj.steps[k].t == traj.times[k + 1]);
        CHECK(traj.steps[k].max_u == traj.max_at(k + 1));
        CHECK(traj.steps[k].min_u == traj.min_at(k + 1));
    }
}

TEST_CASE("linear heat eigenmode decays at rate one") {
    const auto m = make_manifold(ManifoldKind::circle, 1, 2 * kPi, 128);
    ScalarField u0(m->node_count());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = std::sin(m->nodes()[i]);
    EvolveControls c;
    c.reaction_on = false;
    c.dt_max = 1e-3;
    const auto traj = evolve(m, u0, 0.0, 1.0, 2.0, c);
    const double h = m->spacing();
    const auto& u = traj.snapshots.back();
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(std::abs(u[i] - std::exp(-1.0) * u0[i]) <= h * h + 1e-3);
}

TEST_CASE("Talenti profile is nearly static") {
    // The split scheme is first order in time, so the static state drifts by O(dt + h²).
    const auto m = make_manifold(ManifoldKind::euclidean_radial, 4, 80.0, 8000);
    ScalarField u0(m->node_count());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = talenti_profile(4, m->nodes()[i]);
    EvolveControls c;
    c.dt_max = 5e-5;
    c.snapshot_every = 200;
    const auto traj = evolve(m, u0, 0.0, 1.0, 3.0, c);
    double drift = 0.0;
    for (const auto& s : traj.snapshots)
        for (std::size_t i = 0; i < s.size(); ++i) drift = std::max(drift, std::abs(s[i] - u0[i]));
    CHECK(drift <= 1e-4);
}

TEST_CASE("blow-up extrapolated from the trivial ancient solution") {
    Trajectory traj;
    traj.manifold = make_manifold(ManifoldKind::circle, 1, 1.0, 16);
    traj.p = 2.0;
    double t_prev = -3.0;
    traj.times.push_back(t_prev);
    traj.snapshots.push_back(ScalarField(16, trivial_ancient(2.0, 0.0, t_prev)));
    for (int k = 1; k <= 100; ++k) {
        const double t = -3.0 + (2.99 * k) / 100;
        const double v = trivial_ancient(2.0, 0.0, t);
        traj.times.push_back(t);
        traj.snapshots.push_back(ScalarField(16, v));
        traj.steps.push_back({t, t - t_prev, v, v});
        t_prev = t;
    }
    // Sampling stops short of T = 0; mark the run as terminated there.
    traj.blowup = BlowupInfo{traj.times.back(), BlowupMethod::extrapolation};
    CHECK(std::abs(detect_blowup(traj, 2.0)) <= 1e-3);
}

TEST_CASE("perturbed positive data blows up no later than its minimum") {
    const auto m = make_manifold(ManifoldKind::sphere_zonal, 2, 1.0, 64);
    ScalarField u0(m->node_count());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = 1.0 + 0.3 * (1 + std::cos(m->nodes()[i]));
    const auto traj = evolve(m, u0, 0.0, 2.0, 2.0);
    REQUIRE(traj.blowup);
    CHECK(traj.blowup->detected_time <= 1.0 + 1e-3);
    for (std::size_t k = 0; k < traj.size(); ++k) CHECK(traj.min_at(k) >= -1e-10);
}

TEST_CASE("ancient approximation") {
    const auto m = make_manifold(ManifoldKind::sphere_zonal, 2, 1.0, 64);
    SUBCASE("eps = 0 stays trivial") {
        const auto traj = ancient_approximation(m, 2.0, 0.0, -10.0, 0.0, 1);
        for (std::size_t k = 0; k < traj.size(); k += 10) {
            const double ex = trivial_ancient(2.0, 0.0, traj.times[k]);
            for (double v : traj.snapshots[k]) CHECK(std::abs(v - ex) <= 1e-6 * ex);
        }
        CHECK(traj.times.back() == doctest::Approx(-1e-2));
    }
    SUBCASE("perturbation decays at first and stays positive") {
        const auto traj = ancient_approximation(m, 2.0, 0.0, -10.0, 0.05, 1, {}, -8.0);
        std::size_t k1 = 0;
        while (traj.times[k1] < -9.0) ++k1;
        CHECK(oscillation(traj.snapshots[k1]) < oscillation(traj.snapshots[0]));
        for (std::size_t k = 0; k < traj.size(); ++k) CHECK(traj.min_at(k) > 0.0);
    }
    CHECK_THROWS_AS(ancient_approximation(m, 2.0, 0.0, -5.0, 0.05, 1), std::invalid_argument);
    CHECK_THROWS_AS(ancient_approximation(m, 2.0, 0.0, -10.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("non-finite data aborts") {
    const auto m = make_manifold(ManifoldKind::circle, 1, 1.0, 16);
    ScalarField bad(16, 1.0);
    bad[3] = std::nan("");
    CHECK_THROWS(evolve(m, bad, 0.0, 1.0, 2.0));
    // |u|^3 overflows within the first step.
    EvolveControls c;
    c.blow_threshold = 1e300;
    CHECK_THROWS_AS(evolve(m, ScalarField(16, 1e150), 0.0, 1.0, 3.0, c), SolverAbort);
}

TEST_CASE("refinement moves the blow-up time by a scheme-order amount") {
    const auto coarse = make_manifold(ManifoldKind::sphere_zonal, 2, 1.0, 32);
    const auto fine = make_manifold(ManifoldKind::sphere_zonal, 2, 1.0, 63);
    EvolveControls c1, c2;
    c2.dt_max = c1.dt_max / 2;
    c2.step_factor = c1.step_factor / 2;
    const auto a = evolve(coarse, constant_field(*coarse, 1.0), 0.0, 2.0, 2.0, c1);
    const auto b = evolve(fine, constant_field(*fine, 1.0), 0.0, 2.0, 2.0, c2);
    REQUIRE(a.blowup);
    REQUIRE(b.blowup);
    const double predicted = c1.dt_max + coarse->chart_spacing() * coarse->chart_spacing();
    CHECK(std::abs(a.blowup->detected_time - b.blowup->detected_time) <= 4 * predicted);
}
