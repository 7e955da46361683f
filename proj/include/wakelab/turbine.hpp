// Parametric turbine model and its power curve.
#pragma once

#include <cmath>
#include <stdexcept>

namespace wakelab {

/// Turbine parameters. Defaults approximate a 15 MW class offshore machine
/// with a 240 m rotor; every field is config-overridable.
struct TurbineModel {
    double rotor_diameter = 240.0;   // m
    double rated_power = 15.0e6;     // W
    double cut_in = 3.0;             // m/s
    double air_density = 1.225;      // kg/m^3
    double cp = 0.43;                // power coefficient
    double ct = 0.8;                 // thrust coefficient
    double yaw_exponent = 1.88;      // cosine-loss exponent
    double wake_expansion = 0.05;    // Gaussian wake growth rate k_w
    double deflection_rate = 0.05;   // wake deflection rate k_d

    void validate() const {
        if (!(rotor_diameter > 0 && rated_power > 0 && cut_in > 0 && air_density > 0 &&
              cp > 0 && ct > 0 && yaw_exponent > 0 && wake_expansion > 0 &&
              deflection_rate > 0)) {
            throw std::invalid_argument("TurbineModel: all parameters must be positive");
        }
        if (!(cp < 16.0 / 27.0)) {
            throw std::invalid_argument("TurbineModel: cp must respect the Betz limit");
        }
        if (!(ct < 1.0)) {
            throw std::invalid_argument("TurbineModel: ct must be < 1");
        }
    }

    double rotor_area() const {
        return M_PI * rotor_diameter * rotor_diameter / 4.0;
    }
};

/// Power produced at an effective hub wind speed and yaw angle.
///
/// Outside the [-20, 20] degree yaw range the turbine is shut down and
/// produces nothing; the same applies below cut-in speed. Otherwise
/// power follows the cubic curve with a cos^pp yaw loss, capped at rated
/// power. Negative speeds are a caller error.
inline double turbine_power(double v_eff, double yaw_deg, const TurbineModel& m) {
    if (!(v_eff >= 0.0)) {
        throw std::domain_error("turbine_power: effective wind speed must be >= 0");
    }
    if (std::abs(yaw_deg) > 20.0 || v_eff < m.cut_in) return 0.0;
    const double cos_yaw = std::cos(yaw_deg * M_PI / 180.0);
    const double p = 0.5 * m.air_density * m.rotor_area() * m.cp * v_eff * v_eff * v_eff *
                     std::pow(cos_yaw, m.yaw_exponent);
    return std::min(m.rated_power, p);
}

}  // namespace wakelab
