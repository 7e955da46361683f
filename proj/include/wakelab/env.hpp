// The wake-steering MDP: episode lifecycle, transition, reward terms and
// observation assembly.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "wakelab/angles.hpp"
#include "wakelab/layout.hpp"
#include "wakelab/rng.hpp"
#include "wakelab/turbine.hpp"
#include "wakelab/wake_graph.hpp"
#include "wakelab/wake_sim.hpp"
#include "wakelab/wind_process.hpp"

namespace wakelab {

inline constexpr double kYawLimitDeg = 20.0;

struct EnvParams {
    int horizon = 18;            // control steps per episode
    double step_minutes = 10.0;  // duration of one step
    double w0 = 1.0;             // invalid-yaw penalty weight
    double w1 = 100.0;           // power-ratio reward weight
    double p = 3.0;              // exponential wake-loss scaling
    WindParams wind;

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("EnvParams: horizon must be >= 1");
        if (!(step_minutes > 0)) throw std::invalid_argument("EnvParams: step_minutes must be > 0");
        wind.validate();
    }
};

/// Full episode state. The noisy fields are what controllers observe; the
/// series also carries the true wind driving power and rewards.
struct EnvState {
    WindSeries series;
    int t = 0;
    Eigen::VectorXd orientations;  // beta per turbine, [0, 360)
    Eigen::VectorXd yaws;          // alpha_t = yaw_angle(K_t, beta) per turbine
    std::uint64_t episode_seed = 0;

    double wind_dir_true() const { return series.direction[t]; }
    double wind_speed_true() const { return series.speed[t]; }
    double wind_dir_meas() const { return series.direction_noisy[t]; }
    double wind_speed_meas() const { return series.speed_noisy[t]; }
};

struct StepOutcome {
    double reward = 0.0;
    double farm_power = 0.0;      // W, at the post-rotation yaws
    double baseline_power = 0.0;  // W, perfect-tracking baseline
    double wake_losses = 0.0;     // baseline losses vs the wake-free farm
    double power_ratio = 0.0;     // (P - Pbar) / Pbar
    Eigen::VectorXd updated_yaws; // alpha-tilde, the yaws power was computed at
    bool done = false;
};

/// Penalty for yaws outside the operating range: -(1/N) * sum of
/// (|a|/180)^3 over the offending turbines.
inline double reward_invalid(const Eigen::VectorXd& yaws_deg) {
    double acc = 0.0;
    for (int i = 0; i < yaws_deg.size(); ++i) {
        const double a = std::abs(yaws_deg[i]);
        if (a > kYawLimitDeg) {
            const double u = a / 180.0;
            acc += u * u * u;
        }
    }
    return -acc / static_cast<double>(yaws_deg.size());
}

/// Power term: the raw ratio when below baseline, exponentially shrunk by
/// the baseline wake losses when above.
inline double reward_power(double power_ratio, double wake_losses, double p) {
    if (power_ratio < 0.0) return power_ratio;
    return std::exp(-p * wake_losses) * power_ratio;
}

inline double reward_total(const Eigen::VectorXd& yaws_deg, double farm_power,
                           double baseline_power, double wake_losses, double w0, double w1,
                           double p) {
    if (!(baseline_power > 0.0)) {
        throw std::domain_error("reward_total: baseline power must be positive");
    }
    const double ratio = (farm_power - baseline_power) / baseline_power;
    return w0 * reward_invalid(yaws_deg) + w1 * reward_power(ratio, wake_losses, p);
}

/// Normalized views of the state for the three model families. Speeds map
/// linearly onto [-1, 1]; every angle appears as (sin, cos).
struct Observation {
    int n_turbines = 0;
    Eigen::VectorXd flat;                      // 3 + 9 + 2N: wind, forecast, orientations
    Eigen::MatrixXd node_features;             // N x 14: wind + forecast + own orientation
    Eigen::Vector3d wind_features;             // (sin K', cos K', Vn')
    Eigen::VectorXd forecast_features;         // 9
    Eigen::MatrixXd orientation_features;      // N x 2
    Eigen::MatrixXd positional_node_features;  // N x 4: direction + own orientation
    GroupedWakeGraph graph;                    // built from the measured direction
};

/// What the non-learning controllers see: noisy wind, forecast and the
/// current orientations.
struct ControlView {
    const FarmLayout* layout = nullptr;
    const TurbineModel* turbine = nullptr;
    double wind_dir_meas = 0.0;
    double wind_speed_meas = 0.0;
    Forecast forecast;
    const Eigen::VectorXd* orientations = nullptr;
};

class WffcEnv {
public:
    WffcEnv(FarmLayout layout, TurbineModel turbine, EnvParams params)
        : layout_(std::move(layout)), turbine_(std::move(turbine)), params_(params) {
        turbine_.validate();
        params_.validate();
    }

    const FarmLayout& layout() const { return layout_; }
    const TurbineModel& turbine() const { return turbine_; }
    const EnvParams& params() const { return params_; }
    double step_seconds() const { return params_.step_minutes * 60.0; }

    /// Starts an episode: K0 uniform over [k0_lo, k0_hi) (wrapped into
    /// [0, 360)), V0 uniform over the speed bounds, per-turbine initial
    /// yaws uniform in [-20, 20], orientations derived from K0.
    EnvState reset(std::uint64_t episode_seed, double k0_lo = 0.0, double k0_hi = 360.0) const {
        if (!(k0_lo < k0_hi)) throw std::invalid_argument("reset: need k0_lo < k0_hi");
        const Rng base(episode_seed);
        Rng init = base.substream(StreamPurpose::kEpisodeInit);

        const int n = layout_.n_turbines();
        EnvState s;
        s.episode_seed = episode_seed;
        s.t = 0;
        const double k0 = positive_mod_360(init.uniform(k0_lo, k0_hi));
        const double v0 = init.uniform(params_.wind.v_min, params_.wind.v_max);
        s.yaws.resize(n);
        s.orientations.resize(n);
        for (int i = 0; i < n; ++i) {
            s.yaws[i] = init.uniform(-kYawLimitDeg, kYawLimitDeg);
            s.orientations[i] = positive_mod_360(k0 - s.yaws[i]);
        }
        s.series = generate_series(base, params_.horizon, k0, v0, params_.wind);
        add_noise(s.series, base, params_.wind);
        // K0 noise shifts the measured initial direction, never the truth.
        return s;
    }

    /// Applies one action vector (degrees, each within [-20, 20]): rotates
    /// nacelles, accrues power for the full step at the post-rotation yaws,
    /// computes the reward, then advances the wind.
    StepOutcome step(EnvState& s, const Eigen::VectorXd& actions_deg) const {
        const int n = layout_.n_turbines();
        if (actions_deg.size() != n) {
            throw std::invalid_argument("step: action count != turbine count");
        }
        for (int i = 0; i < n; ++i) {
            if (!(actions_deg[i] >= -kYawLimitDeg && actions_deg[i] <= kYawLimitDeg)) {
                throw std::invalid_argument("step: action outside [-20, 20] degrees");
            }
        }
        if (s.t >= params_.horizon) {
            throw std::logic_error("step: episode already finished");
        }

        const double k_true = s.wind_dir_true();
        const double v_true = s.wind_speed_true();

        StepOutcome out;
        out.updated_yaws.resize(n);
        for (int i = 0; i < n; ++i) {
            s.orientations[i] = positive_mod_360(s.orientations[i] + actions_deg[i]);
            out.updated_yaws[i] = yaw_angle(k_true, s.orientations[i]);
        }

        out.farm_power =
            compute_flow(layout_, turbine_, k_true, v_true, out.updated_yaws).farm_power;
        out.baseline_power = baseline_power(k_true, v_true);
        out.wake_losses = wake_losses(k_true, v_true);
        out.power_ratio = (out.farm_power - out.baseline_power) / out.baseline_power;
        out.reward = reward_total(out.updated_yaws, out.farm_power, out.baseline_power,
                                  out.wake_losses, params_.w0, params_.w1, params_.p);

        ++s.t;
        const double k_next = s.wind_dir_true();
        for (int i = 0; i < n; ++i) {
            s.yaws[i] = yaw_angle(k_next, s.orientations[i]);
        }
        out.done = (s.t == params_.horizon);
        return out;
    }

    /// Farm power of the perfect wind-tracking controller: every turbine
    /// aligned with the true direction, no rotation constraints.
    double baseline_power(double wind_dir_deg, double wind_speed) const {
        const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(layout_.n_turbines());
        return compute_flow(layout_, turbine_, wind_dir_deg, wind_speed, zeros).farm_power;
    }

    /// Fraction of wake-free power the tracking baseline loses to wakes.
    double wake_losses(double wind_dir_deg, double wind_speed) const {
        const double ideal = ideal_power(layout_, turbine_, wind_speed);
        if (!(ideal > 0.0)) {
            throw std::domain_error("wake_losses: undefined below cut-in speed");
        }
        return 1.0 - baseline_power(wind_dir_deg, wind_speed) / ideal;
    }

    ControlView control_view(const EnvState& s) const {
        ControlView v;
        v.layout = &layout_;
        v.turbine = &turbine_;
        v.wind_dir_meas = s.wind_dir_meas();
        v.wind_speed_meas = s.wind_speed_meas();
        v.forecast = forecast(s.series, s.t);
        v.orientations = &s.orientations;
        return v;
    }

    Observation observe(const EnvState& s) const {
        const int n = layout_.n_turbines();
        Observation o;
        o.n_turbines = n;

        const double kp = s.wind_dir_meas();
        o.wind_features = {std::sin(kp * kDegToRad), std::cos(kp * kDegToRad),
                           normalize_speed(s.wind_speed_meas())};

        const Forecast f = forecast(s.series, s.t);
        o.forecast_features.resize(3 * WindSeries::kForecastHorizon);
        for (int l = 0; l < WindSeries::kForecastHorizon; ++l) {
            o.forecast_features[3 * l + 0] = std::sin(f.direction[l] * kDegToRad);
            o.forecast_features[3 * l + 1] = std::cos(f.direction[l] * kDegToRad);
            o.forecast_features[3 * l + 2] = normalize_speed(f.speed[l]);
        }

        o.orientation_features.resize(n, 2);
        for (int i = 0; i < n; ++i) {
            o.orientation_features(i, 0) = std::sin(s.orientations[i] * kDegToRad);
            o.orientation_features(i, 1) = std::cos(s.orientations[i] * kDegToRad);
        }

        o.flat.resize(3 + 9 + 2 * n);
        o.flat.head<3>() = o.wind_features;
        o.flat.segment(3, 9) = o.forecast_features;
        for (int i = 0; i < n; ++i) {
            o.flat[12 + 2 * i] = o.orientation_features(i, 0);
            o.flat[12 + 2 * i + 1] = o.orientation_features(i, 1);
        }

        o.node_features.resize(n, 14);
        for (int i = 0; i < n; ++i) {
            o.node_features.block<1, 3>(i, 0) = o.wind_features.transpose();
            o.node_features.block<1, 9>(i, 3) = o.forecast_features.transpose();
            o.node_features(i, 12) = o.orientation_features(i, 0);
            o.node_features(i, 13) = o.orientation_features(i, 1);
        }

        o.positional_node_features.resize(n, 4);
        for (int i = 0; i < n; ++i) {
            o.positional_node_features(i, 0) = o.wind_features[0];
            o.positional_node_features(i, 1) = o.wind_features[1];
            o.positional_node_features(i, 2) = o.orientation_features(i, 0);
            o.positional_node_features(i, 3) = o.orientation_features(i, 1);
        }

        o.graph = group_by_destination(build_wake_graph(layout_, kp));
        return o;
    }

    double normalize_speed(double v) const {
        return 2.0 * (v - params_.wind.v_min) / (params_.wind.v_max - params_.wind.v_min) - 1.0;
    }

private:
    FarmLayout layout_;
    TurbineModel turbine_;
    EnvParams params_;
};

}  // namespace wakelab
