#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbc/brownian.hpp"

using namespace fbc;

TEST_CASE("tail diagnostics spot concentration") {
    std::vector<double> spiky(1000, 1e-6);
    spiky[500] = 50.0;
    auto d = tail_diagnostics(spiky);
    CHECK(d.top1_share > 0.9);
    CHECK(d.heavy);

    std::vector<double> flat(1000);
    for (int i = 0; i < 1000; ++i) flat[i] = 1.0 + 0.001 * i;
    auto f = tail_diagnostics(flat);
    CHECK(f.top1_share < 0.05);
    CHECK_FALSE(f.heavy);
}

TEST_CASE("theta = 1 collapses to a deterministic constant") {
    BesselMomentCase c;
    c.theta = 1.0;
    c.q = 2.0;
    c.T = 1.0;
    c.x = {1.0, 0.0, 0.0};
    c.n_paths = 64;
    c.n_steps = 128;
    c.seed = 55;
    auto r = bessel_moment_estimates(c);
    CHECK(r.lhs.mean == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.lhs.sd < 1e-12);

    c.q = 3.0;
    c.T = 0.5;
    auto r2 = bessel_moment_estimates(c);
    CHECK(r2.lhs.mean == doctest::Approx(std::pow(0.5, 1.5)).epsilon(1e-13));
}

TEST_CASE("distant starting points follow the power-law expansion") {
    // lhs ~ T^{q/2} |x|^{(theta-1) q} once |x| dwarfs the path spread
    BesselMomentCase c;
    c.theta = 0.5;
    c.q = 2.0;
    c.n_paths = 2000;
    c.n_steps = 256;
    c.seed = 17;

    c.x = {6.0, 0.0, 0.0};
    auto near6 = bessel_moment_estimates(c);
    CHECK(near6.rhs_start == doctest::Approx(6.0).epsilon(1e-12)); // |x|^{theta q}

    c.x = {12.0, 0.0, 0.0};
    auto near12 = bessel_moment_estimates(c);

    double ratio = near6.lhs.mean / near12.lhs.mean;
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.1)); // exponent -1
    CHECK(near6.ratio > 0);
    CHECK(std::isfinite(near12.ratio));
}

TEST_CASE("bessel moment input validation") {
    BesselMomentCase c;
    c.x = {1.0}; // wrong length for d = 3
    CHECK_THROWS(bessel_moment_estimates(c));
    c.x = {1.0, 0.0, 0.0};
    c.q = 0.5; // q must exceed 1
    CHECK_THROWS(bessel_moment_estimates(c));
}

TEST_CASE("occupation integral: condition arithmetic and flags") {
    auto ok = occupation_integral_estimate(2, 1.8, 1.5, 1.0, 500, 7);
    CHECK(ok.condition_holds); // (2 - 1.8 + 1) * 1.5 = 1.8 < 2
    CHECK(ok.stats.mean > 0);
    CHECK(ok.note.empty());

    auto bad = occupation_integral_estimate(3, 1.2, 4.0, 1.0, 200, 7);
    CHECK_FALSE(bad.condition_holds); // (3 - 1.2 + 1) * 4 = 11.2 >= 3
    CHECK(!bad.note.empty());

    CHECK_THROWS(occupation_integral_estimate(1, 1.8, 1.5, 1.0, 100, 1));
    CHECK_THROWS(occupation_integral_estimate(2, 0.9, 1.5, 1.0, 100, 1));
    CHECK_THROWS(occupation_integral_estimate(2, 1.8, 0.5, 1.0, 100, 1));
}

TEST_CASE("occupation integral: determinism and replica-doubling stability") {
    auto a = occupation_integral_estimate(2, 1.8, 1.5, 1.0, 800, 21, 1);
    auto b = occupation_integral_estimate(2, 1.8, 1.5, 1.0, 800, 21, 4);
    CHECK(a.stats.mean == b.stats.mean);

    auto dbl = occupation_integral_estimate(2, 1.8, 1.5, 1.0, 1600, 22);
    double gap = std::fabs(a.stats.mean - dbl.stats.mean);
    CHECK(gap <= 3 * std::hypot(a.stats.stderror, dbl.stats.stderror));
}

TEST_CASE("running-maximum exceedance stays under the exponential bound") {
    auto rows = max_exceedance_check(1, 1.0, {1.0, 3.0, 6.0}, 4000, 256, 66);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.bound == doctest::Approx(2 * std::exp(-r.radius / 4)).epsilon(1e-14));
        CHECK(r.empirical >= 0);
        CHECK(r.empirical <= 1);
        CHECK(r.within);
    }
    CHECK(rows[0].empirical > rows[1].empirical);
    CHECK(rows[1].empirical > rows[2].empirical);
}
