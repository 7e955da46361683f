// Non-learning controllers: wind tracking, serial-refine yaw optimization
// and its forecast-weighted variant. All of them act on measured (noisy)
// wind only.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "wakelab/angles.hpp"
#include "wakelab/env.hpp"
#include "wakelab/wake_sim.hpp"

namespace wakelab {

struct ControllerDecision {
    Eigen::VectorXd actions_deg;        // clamped to [-20, 20]
    Eigen::VectorXd intended_yaws_deg;  // yaw set-points relative to measured wind
    double objective_value = 0.0;       // optimizer objective (W), 0 for standard
};

inline double clamp_action(double a) {
    return std::min(kYawLimitDeg, std::max(-kYawLimitDeg, a));
}

/// Keeps every turbine as aligned as possible with the measured wind
/// direction; no optimization, no forecast.
inline ControllerDecision standard_controller(const ControlView& v) {
    const int n = v.layout->n_turbines();
    ControllerDecision d;
    d.actions_deg.resize(n);
    d.intended_yaws_deg = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        d.actions_deg[i] = clamp_action(wrap_angle(v.wind_dir_meas - (*v.orientations)[i]));
    }
    return d;
}

namespace detail {
/// 40 evenly spaced yaw candidates spanning [-20, 20], plus 0 (absent from
/// the even grid) so the aligned solution is always searchable. The grid
/// is built sign-symmetric so mirrored optima tie bit-exactly.
inline std::vector<double> yaw_candidate_grid(int points = 40) {
    std::vector<double> grid(points);
    for (int k = 0; k < points / 2; ++k) {
        const double y = -kYawLimitDeg + k * (2.0 * kYawLimitDeg) / (points - 1);
        grid[k] = y;
        grid[points - 1 - k] = -y;
    }
    if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) grid.push_back(0.0);
    return grid;
}

/// Acceptance threshold for grid-search improvements; sub-noise gains do
/// not displace an earlier candidate, which keeps tie-breaking stable
/// across algebraically equivalent objectives.
inline constexpr double kRefineTolerance = 1e-12;

/// One serial-refine pass: traverses turbines from upstream to downstream,
/// grid-searching each turbine's set-point while the others stay fixed.
/// `objective` maps a full intended-yaw vector to the value to maximize.
template <typename Objective>
ControllerDecision serial_refine(const ControlView& v, const Objective& objective) {
    const int n = v.layout->n_turbines();
    const std::vector<double> grid = yaw_candidate_grid();
    Eigen::VectorXd intended = Eigen::VectorXd::Zero(n);
    double best = objective(intended);
    for (int i : upstream_order(*v.layout, v.wind_dir_meas)) {
        double best_yaw = intended[i];
        for (double candidate : grid) {
            intended[i] = candidate;
            const double value = objective(intended);
            if (value > best + std::abs(best) * kRefineTolerance) {
                best = value;
                best_yaw = candidate;
            }
        }
        intended[i] = best_yaw;
    }

    ControllerDecision d;
    d.intended_yaws_deg = intended;
    d.objective_value = best;
    d.actions_deg.resize(n);
    for (int i = 0; i < n; ++i) {
        const double target_orientation = v.wind_dir_meas - intended[i];
        d.actions_deg[i] = clamp_action(wrap_angle(target_orientation - (*v.orientations)[i]));
    }
    return d;
}
}  // namespace detail

/// Serial-refine grid search of the current-step farm power, upstream to
/// downstream, starting from the aligned (standard) solution.
inline ControllerDecision gauss_seidel_controller(const ControlView& v) {
    return detail::serial_refine(v, [&](const Eigen::VectorXd& intended) {
        return compute_flow(*v.layout, *v.turbine, v.wind_dir_meas, v.wind_speed_meas, intended)
            .farm_power;
    });
}

inline constexpr std::array<double, 4> kDefaultHorizonWeights = {1.0, 0.5, 0.25, 0.125};

/// Forecast-weighted serial refine: orientations are held across the
/// forecast horizon, so each candidate is scored on the discounted farm
/// power over the current step plus the next three.
inline ControllerDecision heuristic_controller(
    const ControlView& v, const std::array<double, 4>& weights = kDefaultHorizonWeights) {
    const int n = v.layout->n_turbines();
    std::array<double, 4> dirs{};
    std::array<double, 4> speeds{};
    dirs[0] = v.wind_dir_meas;
    speeds[0] = v.wind_speed_meas;
    for (int l = 0; l < WindSeries::kForecastHorizon; ++l) {
        dirs[l + 1] = v.forecast.direction[l];
        speeds[l + 1] = v.forecast.speed[l];
    }

    Eigen::VectorXd horizon_yaws(n);
    return detail::serial_refine(v, [&](const Eigen::VectorXd& intended) {
        double value = 0.0;
        for (int l = 0; l < 4; ++l) {
            if (weights[l] == 0.0) continue;
            for (int i = 0; i < n; ++i) {
                // Orientation implied at l = 0 drifts out of alignment as
                // the forecast direction moves.
                horizon_yaws[i] = wrap_angle(intended[i] + dirs[l] - dirs[0]);
            }
            value += weights[l] *
                     compute_flow(*v.layout, *v.turbine, dirs[l], speeds[l], horizon_yaws)
                         .farm_power;
        }
        return value;
    });
}

/// Controller selected by name on the CLI.
enum class BaselineKind { kStandard, kGaussSeidel, kHeuristic };

inline ControllerDecision run_baseline(BaselineKind kind, const ControlView& v) {
    switch (kind) {
        case BaselineKind::kStandard: return standard_controller(v);
        case BaselineKind::kGaussSeidel: return gauss_seidel_controller(v);
        case BaselineKind::kHeuristic: return heuristic_controller(v);
    }
    throw std::logic_error("run_baseline: unknown controller");
}

}  // namespace wakelab
