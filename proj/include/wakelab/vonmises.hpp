// Von Mises circular distribution: log-density, exact rejection sampling,
// closed-form entropy and the mapping between policy radians and yaw
// degrees.
#pragma once

#include <cmath>
#include <stdexcept>

#include "wakelab/bessel.hpp"
#include "wakelab/rng.hpp"

namespace wakelab {

/// Wraps a radian angle into [-pi, pi).
inline double wrap_radians(double x) {
    double m = std::fmod(x + M_PI, 2.0 * M_PI);
    if (m < 0.0) m += 2.0 * M_PI;
    if (m >= 2.0 * M_PI) m = 0.0;
    return m - M_PI;
}

/// log f(x | mu, kappa) = kappa cos(x - mu) - log(2 pi I0(kappa)),
/// overflow-safe for kappa up to 1e4 and beyond.
inline double vonmises_logpdf(double x, double mu, double kappa) {
    if (!(kappa > 0.0)) throw std::domain_error("vonmises_logpdf: kappa must be > 0");
    return kappa * std::cos(x - mu) - std::log(2.0 * M_PI) - log_bessel_i0(kappa);
}

/// Differential entropy in nats: -kappa I1/I0 + log(2 pi I0).
inline double vonmises_entropy(double kappa) {
    if (!(kappa > 0.0)) throw std::domain_error("vonmises_entropy: kappa must be > 0");
    return -kappa * bessel_i1_over_i0(kappa) + std::log(2.0 * M_PI) + log_bessel_i0(kappa);
}

/// Exact draw via the Best-Fisher wrapped-Cauchy rejection scheme,
/// returned in [-pi, pi).
inline double vonmises_sample(double mu, double kappa, Rng& rng) {
    if (!(kappa > 0.0)) throw std::domain_error("vonmises_sample: kappa must be > 0");

    const double root = std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double tau = 1.0 + root;
    // Algebraically (tau - sqrt(2 tau)) / (2 kappa), rearranged to avoid
    // the cancellation that form suffers at small kappa.
    const double rho = 2.0 * kappa * tau / ((root + 1.0) * (tau + std::sqrt(2.0 * tau)));
    const double s = (1.0 + rho * rho) / (2.0 * rho);
    if (s <= 1.0) return wrap_radians(mu);  // numerically a point mass

    double w = 0.0;
    for (;;) {
        const double z = std::cos(M_PI * rng.uniform());
        w = (1.0 + s * z) / (s + z);
        const double y = kappa * (s - w);
        const double u2 = rng.uniform();
        if (y * (2.0 - y) - u2 > 0.0) break;
        if (u2 > 0.0 && std::log(y / u2) + 1.0 - y >= 0.0) break;
    }
    w = std::min(1.0, std::max(-1.0, w));
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return wrap_radians(mu + sign * std::acos(w));
}

/// Maps a policy-space angle in [-pi, pi] onto the yaw action range
/// [-20, 20] degrees.
inline double action_denormalize(double radians) { return radians * (20.0 / M_PI); }

/// Inverse of action_denormalize.
inline double action_normalize(double degrees) { return degrees * (M_PI / 20.0); }

}  // namespace wakelab
