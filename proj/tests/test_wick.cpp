#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbc/wick.hpp"

using namespace fbc;

TEST_CASE("covariance validation") {
    CHECK_THROWS(GaussianVectorSpec::make(2, {1.0, 0.3, 0.2, 1.0})); // asymmetric
    CHECK_THROWS(GaussianVectorSpec::make(2, {1.0, 2.0, 2.0, 1.0})); // eigenvalue -1
    auto ok = GaussianVectorSpec::make(2, {2.0, 0.5, 0.5, 1.0});
    CHECK(ok.at(0, 1) == 0.5);
}

TEST_CASE("jacobi eigenvalues") {
    auto ev = symmetric_eigenvalues({3, 0, 0, 0, 1, 0, 0, 0, 2}, 3);
    REQUIRE(ev.size() == 3);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ev[2] == doctest::Approx(3.0).epsilon(1e-12));

    auto ev2 = symmetric_eigenvalues({2, 1, 1, 2}, 2);
    CHECK(ev2[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev2[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("psd-tolerant cholesky") {
    auto spec = GaussianVectorSpec::make(3, {4, 2, 0, 2, 5, 1, 0, 1, 3});
    auto L = cholesky_psd(spec);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double dot = 0;
            for (int k = 0; k < 3; ++k) dot += L[i * 3 + k] * L[j * 3 + k];
            CHECK(dot == doctest::Approx(spec.at(i, j)).epsilon(1e-12));
        }

    // rank deficient: perfectly correlated pair
    auto rank1 = GaussianVectorSpec::make(2, {1, 1, 1, 1});
    auto L1 = cholesky_psd(rank1);
    CHECK(L1[0] == doctest::Approx(1.0));
    CHECK(L1[1] == 0.0);
    CHECK(L1[2] == doctest::Approx(1.0));
    CHECK(L1[3] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("integration by parts for a cubic, against moments known in closed form") {
    auto spec = GaussianVectorSpec::make(2, {1.0, 0.6, 0.6, 1.0});
    ScalarFn f = [](const std::vector<double>& z) { return z[0] * z[0] * z[0]; };
    GradientFn grad = [](const std::vector<double>& z) {
        return std::vector<double>{3 * z[0] * z[0], 0.0};
    };

    auto r0 = verify_wick(spec, f, grad, 0, 200000, 11);
    CHECK(std::fabs(r0.z_score) < 3.5);
    CHECK(r0.rhs == doctest::Approx(3.0).epsilon(0.05)); // Gamma_00 E[3 z0^2] = 3

    auto r1 = verify_wick(spec, f, grad, 1, 200000, 12);
    CHECK(std::fabs(r1.z_score) < 3.5);
    CHECK(r1.rhs == doctest::Approx(1.8).epsilon(0.05)); // Gamma_10 E[3 z0^2]
}

TEST_CASE("integration by parts for a bounded oscillatory functional") {
    auto spec = GaussianVectorSpec::make(2, {1.5, -0.4, -0.4, 0.8});
    ScalarFn f = [](const std::vector<double>& z) { return std::sin(z[0] + 2 * z[1]); };
    GradientFn grad = [](const std::vector<double>& z) {
        double c = std::cos(z[0] + 2 * z[1]);
        return std::vector<double>{c, 2 * c};
    };
    auto r = verify_wick(spec, f, grad, 0, 200000, 21);
    CHECK(std::fabs(r.z_score) < 3.5);
    CHECK(r.diff_stderr > 0);
}

TEST_CASE("a wrong gradient is rejected before sampling") {
    auto spec = GaussianVectorSpec::make(1, {1.0});
    ScalarFn f = [](const std::vector<double>& z) { return z[0] * z[0]; };
    GradientFn bad = [](const std::vector<double>& z) {
        return std::vector<double>{3 * z[0]};
    };
    CHECK_THROWS(verify_wick(spec, f, bad, 0, 1000, 5));
}

TEST_CASE("runs are deterministic and thread-count invariant") {
    auto spec = GaussianVectorSpec::make(2, {1.0, 0.3, 0.3, 1.0});
    ScalarFn f = [](const std::vector<double>& z) { return z[0] * z[1]; };
    GradientFn grad = [](const std::vector<double>& z) {
        return std::vector<double>{z[1], z[0]};
    };
    auto a = verify_wick(spec, f, grad, 0, 65536, 77, 1);
    auto b = verify_wick(spec, f, grad, 0, 65536, 77, 4);
    CHECK(a.lhs == b.lhs);
    CHECK(a.rhs == b.rhs);
    CHECK(a.z_score == b.z_score);
}

TEST_CASE("characteristic function against its gaussian closed form") {
    std::vector<double> cov = {1.0, 0.5, 0.0, 0.5, 2.0, 0.3, 0.0, 0.3, 1.0};
    auto spec = GaussianVectorSpec::make(3, cov);
    std::vector<double> t = {0.6, -0.8, 0.25};
    double q = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) q += t[i] * cov[size_t(i) * 3 + j] * t[j];

    auto r = characteristic_check(spec, t, 200000, 31);
    CHECK(r.re_exact == doctest::Approx(std::exp(-q / 2)).epsilon(1e-14));
    CHECK(std::fabs(r.re_mc - r.re_exact) < 4 * r.re_stderr);
    CHECK(std::fabs(r.im_mc) < 4 * r.im_stderr);
    CHECK(r.n_samples == 200000);
}

TEST_CASE("built-in regression suite passes") {
    auto cases = wick_builtin_suite(2025);
    REQUIRE(cases.size() >= 3);
    for (const auto& c : cases) {
        INFO(c.name);
        CHECK(c.pass);
        CHECK(std::fabs(c.z_score) < c.tolerance);
    }
}
