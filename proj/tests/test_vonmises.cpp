#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "wakelab/bessel.hpp"
#include "wakelab/rng.hpp"
#include "wakelab/vonmises.hpp"

using namespace wakelab;

TEST_CASE("bessel values match the integral definition") {
    for (double k : {0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 35.0, 39.9, 40.1, 50.0, 100.0, 500.0}) {
        const double i0 = oracle::bessel_i0_quadrature(k);
        CHECK(bessel_i0(k) == Catch::Approx(i0).epsilon(1e-11));
        CHECK(log_bessel_i0(k) ==
              Catch::Approx(oracle::log_bessel_i0_quadrature(k)).margin(1e-11));
        const double i1 = oracle::bessel_i1_quadrature(k);
        CHECK(bessel_i1(k) == Catch::Approx(i1).epsilon(1e-10));
        CHECK(bessel_i1_over_i0(k) == Catch::Approx(i1 / i0).epsilon(1e-10));
    }
    // Overflow-safe log for very large arguments.
    CHECK(std::isfinite(log_bessel_i0(1e4)));
    CHECK(std::isfinite(log_bessel_i0(1e6)));
    CHECK(log_bessel_i0(1e4) ==
          Catch::Approx(oracle::log_bessel_i0_quadrature(1e4)).margin(1e-9));
}

TEST_CASE("bessel ratio derivative matches finite differences") {
    for (double k : {0.3, 1.0, 7.0, 30.0, 80.0}) {
        const double h = 1e-6;
        const double fd = (bessel_i1_over_i0(k + h) - bessel_i1_over_i0(k - h)) / (2.0 * h);
        CHECK(bessel_ratio_derivative(k) == Catch::Approx(fd).margin(1e-7));
    }
}

TEST_CASE("log-density: uniform limit, mode value, normalization") {
    // kappa -> 0 approaches the circular uniform density.
    CHECK(vonmises_logpdf(1.3, 0.2, 1e-8) ==
          Catch::Approx(-std::log(2.0 * M_PI)).margin(1e-7));

    // Mode value at kappa = 1 against the quadrature oracle.
    const double expected = 1.0 - std::log(2.0 * M_PI) - oracle::log_bessel_i0_quadrature(1.0);
    CHECK(vonmises_logpdf(0.7, 0.7, 1.0) == Catch::Approx(expected).margin(1e-10));

    // Density integrates to one.
    for (double kappa : {0.5, 5.0, 50.0}) {
        const double integral = oracle::density_integral(
            [kappa](double x) { return vonmises_logpdf(x, 0.3, kappa); });
        CHECK(integral == Catch::Approx(1.0).margin(1e-8));
    }

    // Overflow-safe far into the concentrated regime.
    CHECK(std::isfinite(vonmises_logpdf(0.0, 0.0, 1e4)));
    CHECK(vonmises_logpdf(0.0, 0.0, 1e4) > 0.0);

    CHECK_THROWS_AS(vonmises_logpdf(0.0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(vonmises_logpdf(0.0, 0.0, -1.0), std::domain_error);
}

TEST_CASE("entropy: closed form equals direct integration") {
    for (double kappa : {0.1, 1.0, 10.0, 100.0}) {
        CHECK(vonmises_entropy(kappa) ==
              Catch::Approx(oracle::vonmises_entropy_quadrature(kappa)).margin(1e-6));
    }
    // Uniform limit log(2 pi).
    CHECK(vonmises_entropy(1e-8) == Catch::Approx(std::log(2.0 * M_PI)).margin(1e-7));
    // Strictly decreasing in kappa.
    double prev = 1e30;
    for (double kappa = 0.1; kappa <= 100.0; kappa *= 1.3) {
        const double h = vonmises_entropy(kappa);
        CHECK(h < prev);
        prev = h;
    }
    CHECK_THROWS_AS(vonmises_entropy(0.0), std::domain_error);
}

TEST_CASE("sampling: reproducible, in range, concentrated at high kappa") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(vonmises_sample(0.5, 2.0, a) == vonmises_sample(0.5, 2.0, b));
    }

    Rng rng(7);
    double sum_sin = 0.0, sum_cos = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double x = vonmises_sample(0.0, 1e4, rng);
        CHECK(x >= -M_PI);
        CHECK(x < M_PI);
        sum_sin += std::sin(x);
        sum_cos += std::cos(x);
    }
    const double resultant = std::sqrt(sum_sin * sum_sin + sum_cos * sum_cos) / n;
    const double circular_std = std::sqrt(-2.0 * std::log(resultant));
    CHECK(circular_std < 0.02);
}

TEST_CASE("sampling: near-zero kappa is uniform (chi-squared, 36 bins)") {
    Rng rng(123);
    const int n = 100000;
    const int bins = 36;
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < n; ++i) {
        const double x = vonmises_sample(0.0, 1e-6, rng);
        int b = static_cast<int>((x + M_PI) / (2.0 * M_PI) * bins);
        b = std::min(bins - 1, std::max(0, b));
        ++counts[b];
    }
    const double expected = static_cast<double>(n) / bins;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 99.9th percentile of chi-squared with 35 dof.
    CHECK(chi2 < 66.62);
}

TEST_CASE("sampling: location parameter is respected") {
    Rng rng(9);
    double sum_sin = 0.0, sum_cos = 0.0;
    const int n = 20000;
    const double mu = 2.5;
    for (int i = 0; i < n; ++i) {
        const double x = vonmises_sample(mu, 2.0, rng);
        sum_sin += std::sin(x);
        sum_cos += std::cos(x);
    }
    const double mean_angle = std::atan2(sum_sin, sum_cos);
    CHECK(std::abs(wrap_radians(mean_angle - mu)) < 0.05);
}

TEST_CASE("action mapping between radians and degrees") {
    CHECK(action_denormalize(M_PI) == Catch::Approx(20.0));
    CHECK(action_denormalize(0.0) == 0.0);
    CHECK(action_denormalize(-M_PI / 2.0) == Catch::Approx(-10.0));
    CHECK(action_normalize(action_denormalize(0.71)) == Catch::Approx(0.71));
    CHECK(action_normalize(20.0) == Catch::Approx(M_PI));
}

TEST_CASE("wrap_radians") {
    CHECK(wrap_radians(M_PI) == -M_PI);  // half-open
    CHECK(wrap_radians(0.0) == 0.0);
    CHECK(wrap_radians(3.0 * M_PI) == Catch::Approx(-M_PI));
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform(-30.0, 30.0);
        const double w = wrap_radians(x);
        CHECK(w >= -M_PI);
        CHECK(w < M_PI);
        CHECK(std::abs(std::sin(w) - std::sin(x)) < 1e-9);
        CHECK(std::abs(std::cos(w) - std::cos(x)) < 1e-9);
    }
}
