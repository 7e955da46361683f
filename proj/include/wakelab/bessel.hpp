// Modified Bessel functions of the first kind, orders 0 and 1, in the
// forms the von Mises head needs: values, the overflow-safe logarithm of
// I0 and the ratio I1/I0. Power series below the crossover, asymptotic
// expansions above.
#pragma once

#include <cmath>
#include <stdexcept>

namespace wakelab {

namespace detail {
inline constexpr double kBesselSeriesCrossover = 40.0;

inline double bessel_i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

inline double bessel_i1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x, sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

/// Asymptotic series sum for I_nu(x) * sqrt(2 pi x) * exp(-x), nu in {0, 1}.
inline double bessel_asymptotic_sum(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * x);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum;
}
}  // namespace detail

inline double bessel_i0(double x) {
    x = std::abs(x);
    if (x < detail::kBesselSeriesCrossover) return detail::bessel_i0_series(x);
    return std::exp(x) / std::sqrt(2.0 * M_PI * x) * detail::bessel_asymptotic_sum(0, x);
}

inline double bessel_i1(double x) {
    const double ax = std::abs(x);
    double v;
    if (ax < detail::kBesselSeriesCrossover) {
        v = detail::bessel_i1_series(ax);
    } else {
        v = std::exp(ax) / std::sqrt(2.0 * M_PI * ax) * detail::bessel_asymptotic_sum(1, ax);
    }
    return x < 0 ? -v : v;
}

/// log I0(x), finite for x up to well beyond 1e4.
inline double log_bessel_i0(double x) {
    x = std::abs(x);
    if (x < detail::kBesselSeriesCrossover) return std::log(detail::bessel_i0_series(x));
    return x - 0.5 * std::log(2.0 * M_PI * x) + std::log(detail::bessel_asymptotic_sum(0, x));
}

/// I1(x) / I0(x) for x > 0; approaches 1 as x grows.
inline double bessel_i1_over_i0(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_i1_over_i0: requires x > 0");
    if (x < detail::kBesselSeriesCrossover) {
        return detail::bessel_i1_series(x) / detail::bessel_i0_series(x);
    }
    return detail::bessel_asymptotic_sum(1, x) / detail::bessel_asymptotic_sum(0, x);
}

/// d/dx of I1(x)/I0(x); used by the entropy gradient.
inline double bessel_ratio_derivative(double x) {
    const double r = bessel_i1_over_i0(x);
    return 1.0 - r / x - r * r;
}

}  // namespace wakelab
