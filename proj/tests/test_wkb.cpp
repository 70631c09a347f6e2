#include <chrono>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stokes/error.hpp"
#include "stokes/oracle.hpp"
#include "stokes/wkb.hpp"

using namespace stokes;
using std::numbers::pi;

namespace {
ModelSpec signed_spec(double a, int parity = +1) { return ModelSpec{3.0, std::abs(a), a < 0.0 ? -1 : 1, parity}; }
}  // namespace

TEST_CASE("turning points") {
    CHECK(turning_point(2.0, signed_spec(0.0)).x0 == doctest::Approx(std::pow(2.0, 1.0 / 6.0)).epsilon(1e-14));
    auto t = turning_point(0.0, signed_spec(-2.0));
    CHECK(t.degenerate);
    CHECK(t.x0 == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-14));
    auto s = signed_spec(1.0);
    auto r = turning_point(2.0, s);
    CHECK(std::abs(potential(r.x0, s) - 2.0) < 1e-12);
    CHECK(r.x0 == r.x0_neg);
    CHECK_THROWS_AS(turning_point(-1.0, s), Error);
    CHECK_THROWS_AS(turning_point(0.0, s), Error);
}

TEST_CASE("alpha = 0 action has the closed form") {
    const auto c = compute_constants(3.0);
    for (double E : {0.5, 1.0, 10.0, 100.0}) CHECK(std::abs(wkb_action(E, signed_spec(0.0)) - 0.5 * c.b0 * std::pow(E, c.mu)) < 1e-9 * std::max(1.0, E));
    for (int j : {0, 1, 5}) CHECK(std::abs(wkb_energy(j, signed_spec(0.0)).E - wkb_asymptotic_energy(j, c)) < 1e-6);
    CHECK(wkb_asymptotic_energy(0, c) == doctest::Approx(0.8008).epsilon(1e-4));
    CHECK(wkb_asymptotic_energy(1, c) == doctest::Approx(4.16123).epsilon(1e-5));
}

TEST_CASE("action is increasing") {
    double prev = 0.0;
    for (double E = 0.05; E < 20.0; E *= 1.3) {
        const double a = wkb_action(E, signed_spec(-1.5));
        CHECK(a > prev);
        prev = a;
    }
    CHECK(std::abs(wkb_action(0.0, signed_spec(-2.0)) - pi / 2) < 1e-10);
}

TEST_CASE("table WKB column") {
    struct Cell { double a; int j; double E; };
    const Cell cells[] = {{-2.5, 1, 2.36641}, {-2.0, 1, 2.73228}, {-1.5, 0, 0.17736}, {-1.5, 1, 3.09594},
                          {-1.0, 0, 0.38490}, {-1.0, 1, 3.45603}, {-0.5, 0, 0.59582}, {-0.5, 1, 3.81142},
                          {0.0, 0, 0.8008},   {0.0, 1, 4.16123},  {0.5, 0, 0.99516},  {0.5, 1, 4.50476},
                          {1.0, 0, 1.1768},   {1.0, 1, 4.84147},  {1.5, 0, 1.3456},   {1.5, 1, 5.17101},
                          {2.0, 0, 1.5024},   {2.0, 1, 5.49313},  {2.5, 0, 1.6487},   {2.5, 1, 5.80773}};
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& c : cells) {
        CAPTURE(c.a);
        CAPTURE(c.j);
        auto lv = wkb_energy(c.j, signed_spec(c.a));
        CHECK(lv.status == WkbStatus::ok);
        CHECK(std::abs(lv.E - c.E) <= 2e-4);
    }
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
}

TEST_CASE("degenerate cells") {
    auto z = wkb_energy(0, signed_spec(-2.0));
    CHECK(z.status == WkbStatus::formal_zero);
    CHECK(z.E == 0.0);
    CHECK(z.marker() == "0*");
    auto d = wkb_energy(0, signed_spec(-2.5));
    CHECK(d.status == WkbStatus::no_root);
    CHECK(std::isnan(d.E));
    CHECK(d.marker() == "◇");
}

TEST_CASE("monotone in j and alpha") {
    double prev = -1.0;
    for (double a = 0.0; a <= 3.0; a += 0.25) {
        const double e = wkb_energy(0, signed_spec(a)).E;
        CHECK(e > prev);
        prev = e;
    }
    prev = -1.0;
    for (int j = 0; j < 8; ++j) {
        const double e = wkb_energy(j, signed_spec(1.0)).E;
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("WKB is within 45% of the oracle") {
    // deep double wells (a <= -1) miss the ground state by more than half, as the printed column does
    for (double a : {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
        CAPTURE(a);
        const double e0 = parity_levels(3.0, a, +1, 1)[0];
        const double e1 = parity_levels(3.0, a, -1, 1)[0];
        auto w0 = wkb_energy(0, signed_spec(a));
        if (w0.status == WkbStatus::ok && a > -1.0) CHECK(std::abs(w0.E - e0) / e0 <= 0.45);
        CHECK(std::abs(wkb_energy(1, signed_spec(a)).E - e1) / e1 <= 0.45);
    }
}
