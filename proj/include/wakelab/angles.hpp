// Circular-angle arithmetic and the global wind-direction convention.
//
// All directions are compass degrees: 0 = north, 90 = east, and a wind
// direction K is where the wind comes FROM (meteorological convention).
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace wakelab {

inline constexpr double kDegToRad = M_PI / 180.0;
inline constexpr double kRadToDeg = 180.0 / M_PI;

/// Reduces x into [0, 360).
inline double positive_mod_360(double x) {
    double m = std::fmod(x, 360.0);
    if (m < 0.0) m += 360.0;
    if (m >= 360.0) m = 0.0;  // fmod rounding can land exactly on 360
    return m;
}

/// Wraps an angle into the half-open interval [-180, 180).
///
/// Computed as (x + 180) mod 360 - 180. Throws std::domain_error for
/// non-finite input.
inline double wrap_angle(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("wrap_angle: non-finite input");
    }
    return positive_mod_360(x + 180.0) - 180.0;
}

/// Yaw angle of a turbine: offset between wind direction K and nacelle
/// orientation beta, wrapped to [-180, 180).
inline double yaw_angle(double wind_dir_deg, double orientation_deg) {
    return wrap_angle(wind_dir_deg - orientation_deg);
}

/// Unit vector pointing where the wind travels TOWARD.
///
/// K = 0 (wind from north) gives (0, -1); K = 270 (wind from west)
/// gives (1, 0). x is east, y is north. Components below 1e-12 snap to
/// zero so the cardinal directions are exact and perpendicular layouts
/// tie exactly in upstream comparisons.
inline Eigen::Vector2d flow_vector(double wind_dir_deg) {
    const double r = wind_dir_deg * kDegToRad;
    double x = -std::sin(r);
    double y = -std::cos(r);
    if (std::abs(x) < 1e-12) x = 0.0;
    if (std::abs(y) < 1e-12) y = 0.0;
    return {x, y};
}

/// Unit vector perpendicular to the flow (flow rotated 90deg
/// counterclockwise). Used as the positive crosswind axis.
inline Eigen::Vector2d crosswind_vector(double wind_dir_deg) {
    const Eigen::Vector2d f = flow_vector(wind_dir_deg);
    return {-f.y(), f.x()};
}

/// Compass bearing from point a to point b in [0, 360).
inline double bearing_deg(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d delta = b - a;
    return positive_mod_360(std::atan2(delta.x(), delta.y()) * kRadToDeg);
}

/// Smallest circular difference |a - b| in degrees, in [0, 180].
inline double circular_distance_deg(double a, double b) {
    return std::abs(wrap_angle(a - b));
}

}  // namespace wakelab
