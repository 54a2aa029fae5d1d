#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "fbc/vortex.hpp"

using namespace fbc;

namespace {
const double kPi = 3.14159265358979323846;

// straight filament along the z axis: X_t = (0, 0, t)
CurrentPath straight_path(double eps) {
    auto grid = CurrentGridSpec::make(0.5, 3, eps, 1.0, 4);
    CurrentPath cp;
    cp.grid = grid;
    cp.path.params.H = 0.5;
    cp.path.params.d = 3;
    cp.path.params.T = 1.0 + eps;
    cp.path.params.n_steps = grid.synth_steps();
    cp.path.dt = 0.5 * grid.h();
    cp.path.values.assign(size_t(grid.synth_steps() + 1) * 3, 0.0);
    for (int k = 0; k <= grid.synth_steps(); ++k)
        cp.path.values[size_t(k) * 3 + 2] = k * cp.path.dt;
    return cp;
}
} // namespace

TEST_CASE("spectral profiles and their validation") {
    auto g = SpectralMeasure::gaussian_measure(1.0, 2.0);
    CHECK(g.rho_hat(0.0) == doctest::Approx(2.0));
    CHECK(g.rho_hat(1.3) == doctest::Approx(2 * std::exp(-1.3 * 1.3 / 2)).epsilon(1e-14));
    CHECK(g.rho_hat_sq(1.3) == doctest::Approx(g.rho_hat(1.3) * g.rho_hat(1.3)));

    auto d = SpectralMeasure::dipole_measure(1.0, 2.0);
    CHECK(d.mass == 0.0);
    CHECK(d.rho_hat(0.0) == doctest::Approx(0.0));
    CHECK(d.rho_hat(0.9) ==
          doctest::Approx(std::exp(-0.81 / 2) - std::exp(-4 * 0.81 / 2)).epsilon(1e-14));

    auto t = SpectralMeasure::tabulated_measure({0.0, 1.0, 2.0}, {1.0, 0.5, 0.2});
    CHECK(t.rho_hat(0.5) == doctest::Approx(0.75));
    CHECK(t.rho_hat(5.0) == 0.0);
    CHECK(t.mass == doctest::Approx(1.0));

    CHECK_THROWS(SpectralMeasure::gaussian_measure(-1.0));
    CHECK_THROWS(SpectralMeasure::dipole_measure(1.0, 1.0));
    CHECK_THROWS(SpectralMeasure::tabulated_measure({1.0, 0.5}, {1.0, 1.0}));
    CHECK_THROWS(SpectralMeasure::tabulated_measure({0.0}, {1.0}));
}

TEST_CASE("fourier kernel annihilates q and carries the right trace") {
    auto sm = SpectralMeasure::gaussian_measure(1.0);
    for (auto q : {std::array<double, 3>{0.4, -1.1, 0.3},
                   std::array<double, 3>{1e-3, 2e-3, -5e-4},
                   std::array<double, 3>{3.0, 0.0, 0.0}}) {
        auto m = fourier_kernel_matrix(sm, q);
        double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
        double frob = 0;
        for (double v : m) frob += v * v;
        frob = std::sqrt(frob);
        for (int i = 0; i < 3; ++i) {
            double dot = m[i * 3 + 0] * q[0] + m[i * 3 + 1] * q[1] + m[i * 3 + 2] * q[2];
            CHECK(std::fabs(dot) <= 1e-14 * frob * qn);
        }
        double tr = m[0] + m[4] + m[8];
        CHECK(tr == doctest::Approx(fourier_kernel_trace(sm, qn)).epsilon(1e-12));
        CHECK(tr == doctest::Approx(2 * sm.rho_hat_sq(qn) / (qn * qn)).epsilon(1e-12));
        CHECK(m[1] == doctest::Approx(m[3]).epsilon(1e-12));
    }
    CHECK_THROWS(fourier_kernel_matrix(sm, {0.0, 0.0, 0.0}));
}

TEST_CASE("biot-savart kernel") {
    auto k = biot_savart({2.0, 0.0, 0.0});
    CHECK(k[0] == doctest::Approx(1.0 / (16 * kPi)).epsilon(1e-14));
    CHECK(k[1] == 0.0);
    CHECK(k[2] == 0.0);
    CHECK_THROWS(biot_savart({0.0, 0.0, 0.0}));
}

TEST_CASE("finiteness conditions for the three measure families") {
    auto g = SpectralMeasure::gaussian_measure(1.0);
    auto r = check_conditions(g, 0.5, 2.0);
    CHECK(r.decidable);
    CHECK_FALSE(r.sobolev_holds); // rho_hat(0) = 1 != 0 kills the |q|^{-1} weight
    CHECK(!r.sobolev_witness.empty());
    CHECK(r.spectral_finite);
    CHECK(r.spectral_value == doctest::Approx(11.136655993663416).epsilon(1e-6));

    // H = 0.4 gives the weight |q|^{1/2}: integral is 4 pi * Gamma(3/4) / 2
    auto r2 = check_conditions(g, 0.4, 2.0);
    CHECK(r2.spectral_value == doctest::Approx(2 * kPi * std::tgamma(0.75)).epsilon(1e-6));

    auto d = SpectralMeasure::dipole_measure(1.0, 2.0);
    auto rd = check_conditions(d, 0.5, 2.0);
    CHECK(rd.sobolev_holds);
    CHECK(rd.spectral_finite);

    auto t = SpectralMeasure::tabulated_measure({0.0, 1.0, 2.0}, {1.0, 0.5, 0.2});
    CHECK_FALSE(check_conditions(t, 0.5, 2.0).decidable);

    auto t2 = t;
    t2.has_asymptotes = true;
    t2.origin_exponent = 2.0;
    t2.decays_fast = false; // compact samples say nothing past the last node
    auto rt = check_conditions(t2, 0.5, 2.0);
    CHECK(rt.decidable);
    CHECK_FALSE(rt.spectral_finite);
    CHECK(std::isinf(rt.spectral_value));

    CHECK_THROWS(check_conditions(g, 0.2, 2.0));
    CHECK_THROWS(check_conditions(g, 1.0, 2.0));
}

TEST_CASE("mollified rotation profile: far field, series seam, superposition") {
    auto g1 = SpectralMeasure::gaussian_measure(1.0);
    CHECK(coulomb_field_profile(g1, 8.0) ==
          doctest::Approx(1.0 / (4 * kPi * 64)).epsilon(1e-8));

    // series/closed-form seam at u = r / (sqrt(2) sigma) = 1e-2
    double r_seam = std::sqrt(2.0) * 1e-2;
    double below = coulomb_field_profile(g1, r_seam * 0.999);
    double above = coulomb_field_profile(g1, r_seam * 1.001);
    CHECK(below == doctest::Approx(above).epsilon(1e-2 * 0.003));
    CHECK(below > 0);

    auto g2 = SpectralMeasure::gaussian_measure(2.0);
    auto d = SpectralMeasure::dipole_measure(1.0, 2.0);
    for (double r : {0.3, 1.0, 5.0})
        CHECK(coulomb_field_profile(d, r) ==
              doctest::Approx(coulomb_field_profile(g1, r) - coulomb_field_profile(g2, r))
                  .epsilon(1e-10));

    auto t = SpectralMeasure::tabulated_measure({0.0, 1.0}, {1.0, 0.5});
    CHECK_THROWS(coulomb_field_profile(t, 1.0));
}

TEST_CASE("velocity of a straight filament is azimuthal and mirror symmetric") {
    auto cp = straight_path(0.25);
    auto sm = SpectralMeasure::gaussian_measure(0.5);
    double zm = 0.5; // source nodes span [0, T], symmetric about T/2

    auto u = velocity_at(cp, sm, Scheme::forward, {0.7, 0.0, zm});
    CHECK(u[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(u[2] == 0.0);
    CHECK(u[1] < 0); // right-hand rule for circulation along +z

    auto up = velocity_at(cp, sm, Scheme::forward, {0.7, 0.0, zm + 0.2});
    auto dn = velocity_at(cp, sm, Scheme::forward, {0.7, 0.0, zm - 0.2});
    CHECK(up[1] == doctest::Approx(dn[1]).epsilon(1e-12));

    // quarter turn about z maps the evaluation point and rotates u with it
    auto v = velocity_at(cp, sm, Scheme::forward, {0.0, 0.7, zm});
    CHECK(v[0] == doctest::Approx(-u[1]).epsilon(1e-12));
    CHECK(std::fabs(v[1]) < 1e-15);
}

TEST_CASE("pair kernel: trace oracle, origin, far field") {
    auto sm = SpectralMeasure::gaussian_measure(1.0);
    GKernel gk(sm);

    // Tr g(r) = erf(r/2) / (2 pi r) for the unit gaussian profile
    for (double r : {0.05, 0.5, 2.0, 10.0}) {
        double want = std::erf(r / 2) / (2 * kPi * r);
        CHECK(3 * gk.gI(r) + gk.gX(r) == doctest::Approx(want).epsilon(1e-3));
    }

    CHECK(gk.g0() == doctest::Approx(trace_g_expectation(sm, 0.0) / 3).epsilon(1e-6));
    CHECK(gk.g0() == doctest::Approx(std::sqrt(kPi) / (6 * kPi * kPi)).epsilon(1e-6));
    CHECK(std::fabs(gk.gX(1e-3)) < 1e-5 * gk.gI(1e-3));

    // Oseen-type far field: gI ~ gX ~ mass^2 / (8 pi r), continued as c / r
    // beyond the table
    for (double r : {40.0, 80.0}) {
        CHECK(gk.gI(r) == doctest::Approx(1.0 / (8 * kPi * r)).epsilon(0.03));
        CHECK(gk.gX(r) == doctest::Approx(1.0 / (8 * kPi * r)).epsilon(0.03));
    }
}

TEST_CASE("trace expectation: closed forms and tabulated quadrature agree") {
    double v = 0.7;
    auto g1 = SpectralMeasure::gaussian_measure(1.0);
    double want_g = std::sqrt(kPi) / (2 * kPi * kPi) / std::sqrt(1.0 + v / 2);
    CHECK(trace_g_expectation(g1, v) == doctest::Approx(want_g).epsilon(1e-12));

    auto d = SpectralMeasure::dipole_measure(1.0, 2.0);
    double s1 = 1.0, s2 = 4.0, sm2 = (1.0 + 4.0) / 2;
    double want_d = std::sqrt(kPi) / (2 * kPi * kPi) *
                    (1 / std::sqrt(s1 + v / 2) - 2 / std::sqrt(sm2 + v / 2) +
                     1 / std::sqrt(s2 + v / 2));
    CHECK(trace_g_expectation(d, v) == doctest::Approx(want_d).epsilon(1e-12));

    // same gaussian pushed through the tabulated branch
    std::vector<double> qs, prof;
    for (int i = 0; i <= 4000; ++i) {
        double q = 12.0 * i / 4000;
        qs.push_back(q);
        prof.push_back(std::exp(-q * q / 2));
    }
    auto tab = SpectralMeasure::tabulated_measure(qs, prof);
    CHECK(trace_g_expectation(tab, v) == doctest::Approx(want_g).epsilon(1e-4));
}

TEST_CASE("expected energy: mass scaling, eps continuity, monte carlo route") {
    auto grid = CurrentGridSpec::make(0.5, 3, 0.125);
    auto m1 = SpectralMeasure::gaussian_measure(1.0, 1.0);
    auto m2 = SpectralMeasure::gaussian_measure(1.0, 2.0);

    auto e1 = expected_energy_exact(grid, m1, Scheme::symmetric);
    auto e2 = expected_energy_exact(grid, m2, Scheme::symmetric);
    CHECK(e2.value == doctest::Approx(4 * e1.value).epsilon(1e-12));
    CHECK(e1.value > 0);
    CHECK(e1.boundary_share >= 0);

    auto finer = CurrentGridSpec::make(0.5, 3, 0.0625);
    auto ef = expected_energy_exact(finer, m1, Scheme::symmetric);
    CHECK(ef.value == doctest::Approx(e1.value).epsilon(0.10));

    GKernel gk(m1);
    auto mc = mc_energy(grid, m1, Scheme::symmetric, gk, 300, 123);
    CHECK(std::fabs(mc.stats.mean - e1.value) < 4 * mc.stats.stderror);

    auto mc_a = mc_energy(grid, m1, Scheme::symmetric, gk, 60, 9, 1);
    auto mc_b = mc_energy(grid, m1, Scheme::symmetric, gk, 60, 9, 4);
    CHECK(mc_a.values == mc_b.values);
}

TEST_CASE("grid-quadrature energy agrees with the fourier-side route") {
    auto grid = CurrentGridSpec::make(0.5, 3, 0.25);
    auto cp = sample_current_path(grid, 3);
    auto sm = SpectralMeasure::gaussian_measure(1.0);
    GKernel gk(sm);

    double fourier = gk.energy_double_sum(cp, Scheme::symmetric);
    auto box = grid_around(cp, 6.0, 0.25);
    auto field = velocity_field(cp, sm, Scheme::symmetric, box);
    CHECK(field.energy + field.tail_estimate == doctest::Approx(fourier).epsilon(0.05));
    CHECK(field.tail_estimate < 0.2 * field.energy);

    SpatialGrid tiny;
    tiny.lo = {-1, -1, -1};
    tiny.hi = {1, 1, 1};
    tiny.n = {9, 9, 9};
    CHECK_THROWS(velocity_field(cp, sm, Scheme::symmetric, tiny));
}
