#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "fbc/fbm.hpp"

using namespace fbc;

TEST_CASE("covariance function basics") {
    for (double H : {0.3, 0.5, 0.7}) {
        CHECK(fbm_R(2.0, 2.0, H) == doctest::Approx(std::pow(2.0, 2 * H)).epsilon(1e-14));
        CHECK(fbm_R(0.7, 1.9, H) == doctest::Approx(fbm_R(1.9, 0.7, H)).epsilon(1e-14));
        CHECK(fbm_R(0.0, 1.0, H) == 0.0);
        // stationary increments
        CHECK(fbm_cov_increments(1.3, 0.4, 1.3, 0.4, H) ==
              doctest::Approx(std::pow(0.9, 2 * H)).epsilon(1e-12));
        // lag-1 increment correlation has the classic sign flip at H = 1/2
        double rho = fbm_cov_increments(1, 0, 2, 1, H);
        CHECK(rho == doctest::Approx((std::pow(2.0, 2 * H) - 2) / 2).epsilon(1e-12));
    }
}

TEST_CASE("sampler shape, determinism, component independence") {
    FbmParams p;
    p.H = 0.7;
    p.d = 2;
    p.T = 2.0;
    p.n_steps = 100; // deliberately not a power of two
    p.seed = 42;

    auto a = sample_fbm(p);
    auto b = sample_fbm(p);
    CHECK(a.values == b.values);
    CHECK(a.n_nodes() == 101);
    CHECK(a.dt == doctest::Approx(0.02));
    CHECK(a.at(0, 0) == 0.0);
    CHECK(a.at(0, 1) == 0.0);
    CHECK(a.at(50, 0) != a.at(50, 1));

    p.seed = 43;
    auto c = sample_fbm(p);
    CHECK(a.values != c.values);
}

TEST_CASE("brownian special case uses the circulant route and is white") {
    FbmParams p;
    p.H = 0.5;
    p.d = 1;
    p.n_steps = 256;
    p.seed = 7;
    auto path = sample_fbm(p);
    CHECK(path.method == SynthMethod::circulant);

    // lag-1 increment correlation over replicas: zero for Brownian motion
    int reps = 2000;
    double sum = 0, sum2 = 0;
    for (int r = 0; r < reps; ++r) {
        p.seed = derive_seed(99, uint64_t(r));
        auto w = sample_fbm(p);
        double di = w.at(100, 0) - w.at(99, 0);
        double dj = w.at(101, 0) - w.at(100, 0);
        sum += di * dj;
        sum2 += di * dj * di * dj;
    }
    double mean = sum / reps;
    double se = std::sqrt((sum2 / reps - mean * mean) / reps);
    CHECK(std::fabs(mean) < 4 * se);
}

TEST_CASE("sampled covariance matches the exact kernel") {
    FbmParams p;
    p.d = 1;
    p.n_steps = 256;
    p.seed = 1234;
    struct Probe {
        double H;
        int a, b;
    };
    for (auto pr : {Probe{0.3, 64, 192}, Probe{0.7, 128, 256}, Probe{0.9, 256, 256}}) {
        p.H = pr.H;
        auto st = empirical_covariance(p, pr.a, pr.b, 0, 4000);
        double want = fbm_R(p.T * pr.a / p.n_steps, p.T * pr.b / p.n_steps, pr.H);
        CHECK(std::fabs(st.mean - want) < 4 * st.stderror);
    }
}

TEST_CASE("difference quotients on a hand-built linear path") {
    FbmPath path;
    path.params.H = 0.5;
    path.params.d = 1;
    path.params.T = 1.0;
    path.params.n_steps = 8;
    path.dt = 0.125;
    path.values.resize(9);
    for (int k = 0; k <= 8; ++k) path.values[k] = k * 0.125; // X_t = t

    DerivScheme sym{Scheme::symmetric, 0.25};
    double v = 0;
    discrete_derivative(path, sym, 4, &v);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    // left clamp: (X_{eps} - X_0) / (2 eps) at t = 0
    discrete_derivative(path, sym, 0, &v);
    CHECK(v == doctest::Approx(0.5).epsilon(1e-14));

    DerivScheme fwd{Scheme::forward, 0.25};
    discrete_derivative(path, fwd, 2, &v);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    auto series = derivative_series(path, sym, {2, 3, 4});
    REQUIRE(series.size() == 3);
    CHECK(series[2] == doctest::Approx(1.0));
}

TEST_CASE("binary path file round trip is exact") {
    FbmParams p;
    p.H = 0.62;
    p.d = 2;
    p.T = 1.5;
    p.n_steps = 37;
    p.seed = 2024;
    auto path = sample_fbm(p);

    std::string file = "fbm_roundtrip_test.bin";
    write_path_binary(path, file);
    auto back = read_path_binary(file);
    std::remove(file.c_str());

    CHECK(back.params.H == path.params.H);
    CHECK(back.params.d == path.params.d);
    CHECK(back.params.T == path.params.T);
    CHECK(back.params.n_steps == path.params.n_steps);
    CHECK(back.params.seed == path.params.seed);
    CHECK(back.values == path.values);
}

TEST_CASE("csv export uses the documented column layout") {
    FbmParams p;
    p.d = 2;
    p.n_steps = 4;
    auto path = sample_fbm(p);
    std::string file = "fbm_csv_test.csv";
    write_path_csv(path, file);

    FILE* f = std::fopen(file.c_str(), "rb");
    REQUIRE(f != nullptr);
    char line[64] = {0};
    REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
    std::fclose(f);
    std::remove(file.c_str());
    CHECK(std::string(line) == "t,x1,x2\n");
}

TEST_CASE("radix-2 fft: delta spectrum, inversion, parseval") {
    using C = std::complex<double>;
    std::vector<C> a(8, C(0, 0));
    a[0] = C(1, 0);
    fft_pow2(a, -1);
    for (auto& v : a) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-14));
    }

    std::vector<C> x = {C(0.3, 0), C(-1.2, 0.4), C(2.0, -1), C(0, 0.9),
                        C(1, 1),   C(-0.5, 0),   C(0.25, 2), C(-3, -1)};
    auto y = x;
    fft_pow2(y, -1);
    double px = 0, py = 0;
    for (auto& v : x) px += std::norm(v);
    for (auto& v : y) py += std::norm(v);
    CHECK(py == doctest::Approx(8 * px).epsilon(1e-12));

    fft_pow2(y, +1);
    for (int i = 0; i < 8; ++i) {
        CHECK(y[i].real() / 8 == doctest::Approx(x[i].real()).epsilon(1e-12));
        CHECK(y[i].imag() / 8 == doctest::Approx(x[i].imag()).epsilon(1e-12));
    }
}
