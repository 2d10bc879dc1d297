#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "semiheat/reaction_ode.hpp"

using namespace semiheat;

TEST_CASE("trivial ancient solution") {
    CHECK(trivial_ancient(2.0, 0.0, -1.0) == doctest::Approx(1.0));
    CHECK(trivial_ancient(3.0, 0.0, -2.0) == doctest::Approx(0.5));
    const double h = 1e-5;
    const double fd = (trivial_ancient(2.0, 0.0, -1.0 + h) - trivial_ancient(2.0, 0.0, -1.0 - h)) / (2 * h);
    CHECK(std::abs(fd - 1.0) <= 1e-6);
    for (double p : {1.3, 2.0, 3.5})
        for (double t : {-5.0, -1.0, -0.01}) {
            const double id = trivial_ancient(p, 0.5, t) * std::pow((p - 1) * (0.5 - t), 1 / (p - 1));
            CHECK(std::abs(id - 1.0) <= 1e-14);
        }
    CHECK_THROWS_AS(trivial_ancient(2.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(trivial_ancient(1.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("blow-up time from the minimum") {
    CHECK(blowup_time_from_min(2.0, 1.0) == doctest::Approx(1.0));
    CHECK(blowup_time_from_min(2.0, 2.0) == doctest::Approx(0.5));
    CHECK(blowup_time_from_min(3.0, 1.0) == doctest::Approx(0.5));
    CHECK_THROWS(blowup_time_from_min(2.0, 0.0));
}

TEST_CASE("lower envelope") {
    CHECK(ode_lower_envelope(2.0, 0.5, 1.0, 1.0) == doctest::Approx(-2.0 / 3.0));
    CHECK(ode_lower_envelope(2.0, 0.5, 1.0, 0.0) == doctest::Approx(-1.0));
    CHECK(ode_lower_envelope(2.0, 0.5, 1.0, 2.0) > ode_lower_envelope(2.0, 0.5, 1.0, 1.0));
    // Larger delta slows the rise toward zero.
    CHECK(ode_lower_envelope(2.0, 0.9, 1.0, 1.0) < ode_lower_envelope(2.0, 0.1, 1.0, 1.0));
    for (double t : {0.0, 1.0, 1e3, 1e9}) CHECK(ode_lower_envelope(3.0, 0.3, 2.0, t) < 0.0);
    CHECK_THROWS(ode_lower_envelope(2.0, 0.0, 1.0, 1.0));
    CHECK_THROWS(ode_lower_envelope(2.0, 1.0, 1.0, 1.0));
    CHECK_THROWS(ode_lower_envelope(2.0, 0.5, 0.0, 1.0));
    CHECK_THROWS(ode_lower_envelope(2.0, 0.5, 1.0, -1.0));
}

TEST_CASE("scalar integration against closed forms") {
    auto a = integrate_scalar_ode(2.0, 1.0, 0.0, 0.9, 1e-2);
    CHECK(std::abs(a.values.back() - 10.0) <= 1e-6);
    CHECK(a.times.back() == 0.9);
    CHECK_FALSE(a.blowup_time);

    auto b = integrate_scalar_ode(2.0, -1.0, 0.0, 1.0, 1e-2);
    CHECK(std::abs(b.values.back() + 0.5) <= 1e-6);

    auto c = integrate_scalar_ode(2.0, -1.0, 0.0, -0.9, 1e-2);
    CHECK(std::abs(c.values.back() + 10.0) <= 1e-4);
    for (std::size_t i = 1; i < c.times.size(); ++i) CHECK(c.times[i] < c.times[i - 1]);
}

TEST_CASE("scalar integration reports blow-up") {
    auto tr = integrate_scalar_ode(2.0, 1.0, 0.0, 5.0, 1e-2);
    REQUIRE(tr.blowup_time);
    CHECK(std::abs(*tr.blowup_time - 1.0) <= 1e-6);
    CHECK(*tr.blowup_time > tr.times.back());
    for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
}

TEST_CASE("scalar integration reproduces the trivial ancient solution") {
    const double p = 2.5, T = 0.0, t0 = -4.0;
    auto tr = integrate_scalar_ode(p, trivial_ancient(p, T, t0), t0, -0.05, 1e-2);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double ex = trivial_ancient(p, T, tr.times[i]);
        CHECK(std::abs(tr.values[i] - ex) <= 1e-7 * ex);
    }
}
