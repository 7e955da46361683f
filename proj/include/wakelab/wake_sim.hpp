// Steady-state Gaussian wake and farm power model.
//
// Velocity deficits follow a Gaussian-profile engineering wake: for a
// downstream distance x > 0 and a crosswind offset r from the (deflected)
// wake centerline,
//
//   sigma   = k_w * x + d / sqrt(8)
//   deficit = (1 - sqrt(max(0, 1 - ct_eff / (8 (sigma/d)^2)))) * exp(-r^2 / (2 sigma^2))
//
// with ct_eff = ct * max(0, cos(yaw)) so a rotor never accelerates the
// flow behind it. Yawing deflects the wake centerline laterally with an
// initial skew xi0 = (ct/2) sin(yaw) cos^2(yaw) that decays as the wake
// expands:
//
//   offset(x) = xi0 * (d / (2 k_d)) * (1 - 1 / (1 + 2 k_d x / d))
//
// Positive yaw deflects toward the positive crosswind axis (flow rotated
// 90deg counterclockwise). Deficits from several upstream turbines combine
// by root-sum-square, sampled at the downstream hub point only, and wakes
// act on strictly-downstream turbines.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "wakelab/angles.hpp"
#include "wakelab/layout.hpp"
#include "wakelab/turbine.hpp"

namespace wakelab {

struct FlowResult {
    Eigen::VectorXd effective_speeds;  // m/s per turbine
    Eigen::VectorXd powers;            // W per turbine
    double farm_power = 0.0;           // W
};

/// One evaluation request for the batched entry point.
struct FlowCase {
    double wind_dir_deg = 0.0;
    double wind_speed = 0.0;
    Eigen::VectorXd yaws_deg;
};

namespace detail {
inline double wake_deficit_at(double dx, double crosswind_offset, double source_yaw_deg,
                              const TurbineModel& m) {
    const double d = m.rotor_diameter;
    const double sigma = m.wake_expansion * dx + d / std::sqrt(8.0);
    const double yaw_rad = source_yaw_deg * kDegToRad;
    const double ct_eff = m.ct * std::max(0.0, std::cos(yaw_rad));
    const double sigma_d = sigma / d;
    const double amplitude =
        1.0 - std::sqrt(std::max(0.0, 1.0 - ct_eff / (8.0 * sigma_d * sigma_d)));

    const double xi0 =
        0.5 * m.ct * std::sin(yaw_rad) * std::cos(yaw_rad) * std::cos(yaw_rad);
    const double deflection = xi0 * (d / (2.0 * m.deflection_rate)) *
                              (1.0 - 1.0 / (1.0 + 2.0 * m.deflection_rate * dx / d));

    const double r = crosswind_offset - deflection;
    return amplitude * std::exp(-r * r / (2.0 * sigma * sigma));
}
}  // namespace detail

/// Per-turbine effective speeds and powers for one wind condition and one
/// set of instantaneous yaw angles.
inline FlowResult compute_flow(const FarmLayout& layout, const TurbineModel& model,
                               double wind_dir_deg, double wind_speed,
                               const Eigen::VectorXd& yaws_deg) {
    const int n = layout.n_turbines();
    if (yaws_deg.size() != n) {
        throw std::invalid_argument("compute_flow: yaw count != turbine count");
    }
    if (!(wind_speed >= 0.0)) {
        throw std::invalid_argument("compute_flow: wind speed must be >= 0");
    }
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(yaws_deg[i])) {
            throw std::invalid_argument("compute_flow: non-finite yaw");
        }
    }

    const Eigen::Vector2d flow = flow_vector(wind_dir_deg);
    const Eigen::Vector2d cross = crosswind_vector(wind_dir_deg);

    FlowResult out;
    out.effective_speeds.resize(n);
    out.powers.resize(n);
    for (int i = 0; i < n; ++i) {
        double deficit_sq = 0.0;
        for (int u = 0; u < n; ++u) {
            if (u == i) continue;
            const Eigen::Vector2d delta = layout.positions[i] - layout.positions[u];
            const double dx = delta.dot(flow);
            if (!(dx > 0.0)) continue;  // wake reaches strictly-downstream hubs only
            const double dy = delta.dot(cross);
            const double deficit = detail::wake_deficit_at(dx, dy, yaws_deg[u], model);
            deficit_sq += deficit * deficit;
        }
        const double combined = std::min(1.0, std::sqrt(deficit_sq));
        out.effective_speeds[i] = wind_speed * (1.0 - combined);
        out.powers[i] = turbine_power(out.effective_speeds[i], yaws_deg[i], model);
    }
    out.farm_power = out.powers.sum();
    return out;
}

/// Batched evaluation of many (direction, speed, yaws) tuples; the grid
/// searches in the optimizing controllers go through this.
inline std::vector<FlowResult> compute_flow_batch(const FarmLayout& layout,
                                                  const TurbineModel& model,
                                                  std::span<const FlowCase> cases) {
    std::vector<FlowResult> results;
    results.reserve(cases.size());
    for (const auto& c : cases) {
        results.push_back(compute_flow(layout, model, c.wind_dir_deg, c.wind_speed, c.yaws_deg));
    }
    return results;
}

/// Farm power with no wake interaction and all turbines aligned.
inline double ideal_power(const FarmLayout& layout, const TurbineModel& model,
                          double wind_speed) {
    if (!(wind_speed >= 0.0)) {
        throw std::invalid_argument("ideal_power: wind speed must be >= 0");
    }
    return layout.n_turbines() * turbine_power(wind_speed, 0.0, model);
}

}  // namespace wakelab
