#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbc/kernel.hpp"

using namespace fbc;

namespace {
const double kPi = 3.14159265358979323846;

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}
} // namespace

TEST_CASE("quadrature matches frozen high-precision values") {
    struct Row {
        double alpha;
        int d;
        double r, want;
    };
    // 17-digit references computed with arbitrary-precision quadrature
    const Row rows[] = {
        {1.0, 3, 1.0, 0.02927491576215958},
        {1.0, 1, 2.0, 0.067667641618306346},
        {2.0, 3, 0.7, 0.019758501441298336},
        {0.5, 1, 1.0, 0.13401624101699427},
    };
    for (const auto& row : rows) {
        auto ks = KernelSpec::make(row.alpha, row.d);
        CHECK(eval_K(ks, row.r) == doctest::Approx(row.want).epsilon(1e-9));
    }
}

TEST_CASE("closed forms in one and three dimensions") {
    auto k13 = KernelSpec::make(1.0, 3);
    auto k11 = KernelSpec::make(1.0, 1);
    auto k23 = KernelSpec::make(2.0, 3);
    auto k21 = KernelSpec::make(2.0, 1);
    for (double r : log_grid(0.05, 8.0, 15)) {
        CHECK(eval_K(k13, r) ==
              doctest::Approx(std::exp(-r) / (4 * kPi * r)).epsilon(1e-8));
        CHECK(eval_K(k11, r) == doctest::Approx(0.5 * std::exp(-r)).epsilon(1e-8));
        CHECK(eval_K(k23, r) == doctest::Approx(std::exp(-r) / (8 * kPi)).epsilon(1e-8));
        CHECK(eval_K(k21, r) ==
              doctest::Approx(0.25 * (1 + r) * std::exp(-r)).epsilon(1e-8));
    }
}

TEST_CASE("critical one-dimensional case is a modified Bessel function") {
    // alpha = 1/2, d = 1 collapses to K_0(r) / pi
    auto ks = KernelSpec::make(0.5, 1);
    for (double r : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        double want = std::cyl_bessel_k(0.0, r) / kPi;
        CHECK(eval_K(ks, r) == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("value at zero: closed form and finiteness boundary") {
    CHECK(eval_K_zero(KernelSpec::make(1.0, 1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eval_K_zero(KernelSpec::make(2.0, 3)) ==
          doctest::Approx(0.039788735772973834).epsilon(1e-12));
    CHECK(eval_K_zero(KernelSpec::make(2.0, 2)) ==
          doctest::Approx(0.079577471545947668).epsilon(1e-12));

    CHECK(K_zero_finite(KernelSpec::make(1.0, 1)));
    CHECK_FALSE(K_zero_finite(KernelSpec::make(1.0, 3)));
    CHECK_FALSE(K_zero_finite(KernelSpec::make(0.5, 1))); // critical: log blowup
    CHECK_THROWS(eval_K_zero(KernelSpec::make(1.0, 3)));
}

TEST_CASE("regime classification follows alpha vs d/2") {
    CHECK(KernelSpec::make(1.0, 3).regime == KernelRegime::subcritical);
    CHECK(KernelSpec::make(1.0, 2).regime == KernelRegime::critical);
    CHECK(KernelSpec::make(2.0, 1).regime == KernelRegime::supercritical);
}

TEST_CASE("kernel is positive and strictly decreasing in r") {
    auto ks = KernelSpec::make(1.3, 2);
    double prev = eval_K(ks, 0.01);
    CHECK(prev > 0);
    for (double r : log_grid(0.02, 30.0, 20)) {
        double v = eval_K(ks, r);
        CHECK(v > 0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("total mass is one for any index") {
    CHECK(kernel_mass(KernelSpec::make(1.0, 1)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(kernel_mass(KernelSpec::make(2.0, 3)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(kernel_mass(KernelSpec::make(0.7, 2)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("resolvent difference identity against closed forms") {
    // K_{alpha-1} - K_alpha, with both sides known exactly for d = 3, alpha = 2
    auto ks = KernelSpec::make(2.0, 3);
    CHECK(laplacian_K(ks, 0.9) == doctest::Approx(0.019771757823554702).epsilon(1e-9));
    for (double r : {0.3, 1.0, 2.5}) {
        double want = std::exp(-r) / (4 * kPi * r) - std::exp(-r) / (8 * kPi);
        CHECK(laplacian_K(ks, r) == doctest::Approx(want).epsilon(1e-8));
    }
    CHECK_THROWS(laplacian_K(KernelSpec::make(0.9, 3), 1.0));
}

TEST_CASE("semigroup identity, direct convolution route (d = 1)") {
    // half * half = full, checked by a quadrature that owes nothing to eval_K's
    // integral representation beyond pointwise values
    for (double r : {0.3, 1.0}) {
        double resid = semigroup_residual_1d(1.0, r);
        CHECK(resid < 1e-6);
    }
}

TEST_CASE("semigroup identity, box midpoint route") {
    auto one_d = check_semigroup(1.0, 1, 0.5, 12.0, 1 << 19);
    CHECK(one_d.residual < 1e-3);
    CHECK(one_d.tail_estimate < 1e-4);

    auto two_d = check_semigroup(3.0, 2, 1.0, 8.0, 1024);
    CHECK(two_d.residual < 5e-3);
}

TEST_CASE("envelope brackets the kernel in all three regimes") {
    for (auto [alpha, d] : {std::pair<double, int>{1.0, 3},
                            std::pair<double, int>{1.0, 2},
                            std::pair<double, int>{2.0, 1}}) {
        BesselKernel k(alpha, d);
        for (double r : log_grid(1e-3, 20.0, 25)) {
            auto env = k.envelope(r);
            double v = k.exact(r);
            CHECK(env.lower >= 0);
            CHECK(env.lower <= v);
            CHECK(v <= env.upper);
        }
    }
}

TEST_CASE("memoised kernel tracks the direct quadrature") {
    BesselKernel k(1.5, 2);
    for (double r : log_grid(2e-6, 60.0, 30))
        CHECK(k(r) == doctest::Approx(k.exact(r)).epsilon(1e-6));
}

TEST_CASE("below the table the small-r regime form takes over") {
    BesselKernel k(0.8, 3); // subcritical: K ~ c r^{2 alpha - d}
    double r1 = 0.25 * k.table_r_min(), r2 = 0.5 * k.table_r_min();
    double got = k(r1) / k(r2);
    double want = std::pow(r1 / r2, 2 * 0.8 - 3);
    CHECK(got == doctest::Approx(want).epsilon(0.05));
}

TEST_CASE("monotone cubic slopes flatten at interior extrema") {
    auto s = pchip_slopes({0, 1, 2, 3}, {0, 1, 1, 0});
    REQUIRE(s.size() == 4);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == 0.0);
    CHECK(s[0] >= 0.0);
    CHECK(s[3] <= 0.0);
    CHECK_THROWS(pchip_slopes({0, 1}, {0, 1}));
}

TEST_CASE("log-log interpolation reproduces power laws exactly") {
    std::vector<double> lx, ly;
    for (double x : log_grid(0.1, 10.0, 9)) {
        lx.push_back(std::log(x));
        ly.push_back(std::log(3.0 * std::pow(x, -2.0)));
    }
    PchipLogLog p(lx, ly);
    for (double x : {0.17, 0.9, 4.3})
        CHECK(p(x) == doctest::Approx(3.0 * std::pow(x, -2.0)).epsilon(1e-12));
}

TEST_CASE("gaussian kernel moments match frozen references") {
    GaussMoments g11(1.0, 1);
    CHECK(g11.exact_m(1.0) == doctest::Approx(0.26157829186512337).epsilon(1e-8));
    CHECK(g11.exact_w(1.0) == doctest::Approx(-0.13736398853630931).epsilon(1e-8));

    GaussMoments g23(2.0, 3);
    CHECK(g23.exact_m(0.8) == doctest::Approx(0.012678233110139297).epsilon(1e-8));
    CHECK(g23.exact_w(0.8) == doctest::Approx(-0.020255046583472052).epsilon(1e-8));

    GaussMoments g151(1.5, 1);
    CHECK(g151.exact_m(0.435) == doctest::Approx(0.28232342360878047).epsilon(1e-8));
}

TEST_CASE("moment memo stays close to direct quadrature") {
    GaussMoments g(2.0, 3);
    for (double s : {0.02, 0.435, 1.0, 3.0, 10.0}) {
        CHECK(g.m(s) == doctest::Approx(g.exact_m(s)).epsilon(1e-5));
        CHECK(g.w(s) == doctest::Approx(g.exact_w(s)).epsilon(1e-5));
    }
}

TEST_CASE("moment identities: sign, monotonicity, resolvent difference") {
    GaussMoments g2(2.0, 3), g1(1.0, 3);
    double sigma = 0.8;
    CHECK(g2.exact_w(sigma) < 0);
    CHECK(g2.exact_m(0.5) > g2.exact_m(1.0));
    // E[Lap K (sigma N)] = m_alpha - m_{alpha-1}
    double diff = g2.exact_m(sigma) - g1.exact_m(sigma);
    CHECK(g2.exact_w(sigma) == doctest::Approx(diff).epsilon(1e-8));
}
