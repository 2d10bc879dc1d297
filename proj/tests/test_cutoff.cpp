#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "semiheat/cutoff.hpp"

using namespace semiheat;

TEST_CASE("profile values") {
    const CutoffProfile prof(3, 4);
    CHECK(prof.value(0.5) == 1.0);
    CHECK(prof.value(0.75) == 1.0);
    CHECK(prof.value(1.0) == 0.0);
    CHECK(prof.value(2.0) == 0.0);
    CHECK(prof.value(0.9) > 0.0);
    CHECK(prof.value(0.9) < 1.0);
    CHECK(prof.first(0.9) < 0.0);
    CHECK(prof.first(0.5) == 0.0);
    CHECK(prof.first(1.5) == 0.0);
    CHECK_THROWS_AS(CutoffProfile(1, 2), std::invalid_argument);
    CHECK_THROWS_AS(CutoffProfile(3, 0), std::invalid_argument);
}

TEST_CASE("closed-form derivatives match finite differences") {
    for (int k : {2, 3, 4})
        for (int q : {1, 2, 5}) {
            const CutoffProfile prof(k, q);
            const double h = 1e-6;
            for (double s : {0.8, 0.85, 0.9, 0.97}) {
                const double fd1 = (prof.value(s + h) - prof.value(s - h)) / (2 * h);
                const double fd2 = (prof.first(s + h) - prof.first(s - h)) / (2 * h);
                CHECK(prof.first(s) == doctest::Approx(fd1).epsilon(1e-6));
                CHECK(prof.second(s) == doctest::Approx(fd2).epsilon(1e-5));
                const double phi = prof.value(s);
                const double expect = 2 * prof.first(s) * prof.first(s) / phi - prof.second(s);
                CHECK(prof.log_defect(s) == doctest::Approx(expect).epsilon(1e-9));
            }
        }
}

TEST_CASE("sampled cutoff invariants") {
    const auto c = build_phi(2.0, 3, 4, 512);
    REQUIRE(c.grid.size() == 512);
    CHECK(c.grid.back() == doctest::Approx(kCutoffGridEnd));
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        CHECK(c.phi[i] >= 0.0);
        CHECK(c.phi[i] <= 1.0);
        CHECK(c.dphi[i] <= 0.0);
        if (c.grid[i] <= 0.75) CHECK(c.phi[i] == 1.0);
        if (c.grid[i] >= 1.0) CHECK(c.phi[i] == 0.0);
        if (i > 0) CHECK(c.phi[i] <= c.phi[i - 1]);
    }
    CHECK_THROWS_AS(build_phi(2.0, 3, 4, 255), std::invalid_argument);
    CHECK_THROWS(build_phi(1.0, 3, 4, 512));
}

TEST_CASE("power counting") {
    CHECK(default_power(2.0) == 4);
    CHECK(default_power(3.0) == 3);
    CHECK(default_power(1.5) == 6);
    CHECK(minimal_power(2.0, 2) == 2);
    CHECK(minimal_power(3.0, 3) == 1);
}

TEST_CASE("phi inequality certification") {
    SUBCASE("kq at the critical value is bounded") {
        const auto cert = verify_phi_inequality(build_phi(2.0, 2, 2, 512), 2.0, 4);
        CHECK(cert.bounded);
        CHECK(std::isfinite(cert.constant));
        CHECK(cert.level_maxima.size() == 4);
        CHECK(cert.level_counts[1] == 1023);
    }
    SUBCASE("deficient power diverges") {
        const auto cert = verify_phi_inequality(build_phi(2.0, 2, 1, 512), 2.0, 4);
        CHECK_FALSE(cert.bounded);
        CHECK(cert.level_maxima[3] > cert.level_maxima[0]);
    }
    SUBCASE("p = 3 with k = 3, q = 1") {
        CHECK(verify_phi_inequality(build_phi(3.0, 3, 1, 512), 3.0, 4).bounded);
    }
    SUBCASE("defaults") {
        for (double p : {1.5, 2.0, 3.0}) {
            const auto cert = verify_phi_inequality(build_phi(p, 3, default_power(p), 512), p, 4);
            CHECK(cert.bounded);
            for (std::size_t j = 1; j < cert.level_maxima.size(); ++j)
                CHECK(cert.level_maxima[j] <= 1.05 * cert.level_maxima[j - 1]);
        }
    }
    CHECK_THROWS_AS(verify_phi_inequality(build_phi(2.0, 3, 4, 512), 2.0, 1), std::invalid_argument);
}

TEST_CASE("Li-Yau cutoff") {
    const auto psi = build_liyau_psi(2.0, 3.0, {0.5, 0.75}, 3, 8, 512, 1.0);
    CHECK(psi.psi(0.9, 1.0) == 1.0);
    CHECK(psi.psi(1.0, 1.0 - 0.75) == 1.0);
    CHECK(psi.psi(2.0, 1.0) == 0.0);
    CHECK(psi.psi(0.5, 1.0 - 3.0) == 0.0);
    CHECK(psi.psi_r(0.5, 0.5) == 0.0);
    CHECK(psi.c_a_stable.at(0.5));
    CHECK(std::isfinite(psi.c_a.at(0.5)));
    CHECK(psi.c_time_stable);

    const double h = 1e-6;
    const double r = 1.8, t = 1.0 - 2.6;
    CHECK(psi.psi_r(r, t) == doctest::Approx((psi.psi(r + h, t) - psi.psi(r - h, t)) / (2 * h)).epsilon(1e-5));
    CHECK(psi.psi_t(r, t) == doctest::Approx((psi.psi(r, t + h) - psi.psi(r, t - h)) / (2 * h)).epsilon(1e-5));

    CHECK_THROWS_AS(build_liyau_psi(1.0, 1.0, {1.0}, 3, 4, 512), std::invalid_argument);
    CHECK_THROWS_AS(build_liyau_psi(1.0, 1.0, {0.0}, 3, 4, 512), std::invalid_argument);
}
