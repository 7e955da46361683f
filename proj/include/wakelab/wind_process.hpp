// Episode wind generator: ARMA(1,1)-style direction and speed recursions
// plus uniform measurement noise, with a forecast tail.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wakelab/angles.hpp"
#include "wakelab/rng.hpp"

namespace wakelab {

struct WindParams {
    double v_min = 3.0;            // m/s
    double v_max = 10.0;           // m/s
    double dir_step_var = 9.0;     // variance of the per-step direction innovation (deg^2)
    double speed_step_var = 0.01;  // variance of the per-step speed innovation ((m/s)^2)
    double arma_ma_coeff = 0.1;    // weight of the previous innovation
    double dir_noise_deg = 3.0;    // measurement noise bound, uniform(-b, b)
    double speed_noise_ms = 0.1;   // measurement noise bound, uniform(-b, b)

    void validate() const {
        if (!(v_min < v_max)) {
            throw std::invalid_argument("WindParams: need v_min < v_max");
        }
        if (dir_step_var < 0 || speed_step_var < 0 || dir_noise_deg < 0 ||
            speed_noise_ms < 0) {
            throw std::invalid_argument("WindParams: negative variance or noise bound");
        }
    }
};

/// True and noisy wind trajectories over T control steps plus a forecast
/// tail of kForecastHorizon further entries.
struct WindSeries {
    static constexpr int kForecastHorizon = 3;

    std::vector<double> direction;        // deg, [0, 360)
    std::vector<double> speed;            // m/s, within [v_min, v_max]
    std::vector<double> direction_noisy;  // deg, [0, 360)
    std::vector<double> speed_noisy;      // m/s, clamped to bounds

    int length() const { return static_cast<int>(direction.size()); }
};

namespace detail {
/// Reflects v into [lo, hi], repeating for multi-bound overshoots.
inline double mirror_into(double v, double lo, double hi) {
    while (v < lo || v > hi) {
        if (v > hi) v = 2.0 * hi - v;
        if (v < lo) v = 2.0 * lo - v;
    }
    return v;
}
}  // namespace detail

/// Generates T + 3 true wind entries. Step t >= 1 follows
///   K_t = (eps_t + K_{t-1} + c * eps_{t-1}) mod 360
///   V_t = mirror(eps'_t + V_{t-1} + c * eps'_{t-1})
/// with eps ~ N(0, dir_step_var), eps' ~ N(0, speed_step_var) and
/// eps_0 = eps'_0 = 0. Deterministic given the seed.
inline WindSeries generate_series(const Rng& seed, int n_steps, double k0, double v0,
                                  const WindParams& p) {
    p.validate();
    if (n_steps < 1) throw std::invalid_argument("generate_series: need n_steps >= 1");
    if (!(k0 >= 0.0 && k0 < 360.0)) {
        throw std::invalid_argument("generate_series: K0 outside [0, 360)");
    }
    if (!(v0 >= p.v_min && v0 <= p.v_max)) {
        throw std::invalid_argument("generate_series: V0 outside speed bounds");
    }

    const int len = n_steps + WindSeries::kForecastHorizon;
    const double dir_sd = std::sqrt(p.dir_step_var);
    const double speed_sd = std::sqrt(p.speed_step_var);

    WindSeries s;
    s.direction.resize(len);
    s.speed.resize(len);
    s.direction[0] = k0;
    s.speed[0] = v0;

    double prev_dir_eps = 0.0;
    double prev_speed_eps = 0.0;
    for (int t = 1; t < len; ++t) {
        const double dir_eps =
            seed.substream(StreamPurpose::kWindDirection, static_cast<std::uint64_t>(t)).normal() *
            dir_sd;
        const double speed_eps =
            seed.substream(StreamPurpose::kWindSpeed, static_cast<std::uint64_t>(t)).normal() *
            speed_sd;
        s.direction[t] =
            positive_mod_360(dir_eps + s.direction[t - 1] + p.arma_ma_coeff * prev_dir_eps);
        s.speed[t] = detail::mirror_into(
            speed_eps + s.speed[t - 1] + p.arma_ma_coeff * prev_speed_eps, p.v_min, p.v_max);
        prev_dir_eps = dir_eps;
        prev_speed_eps = speed_eps;
    }
    return s;
}

/// Fills the noisy fields: direction perturbed by U(-b, b) then wrapped,
/// speed perturbed by U(-b, b) then clamped to the bounds. Independent
/// draws per step, deterministic given the seed.
inline void add_noise(WindSeries& s, const Rng& seed, const WindParams& p) {
    const int len = s.length();
    s.direction_noisy.resize(len);
    s.speed_noisy.resize(len);
    for (int t = 0; t < len; ++t) {
        const double ek =
            seed.substream(StreamPurpose::kDirectionNoise, static_cast<std::uint64_t>(t))
                .uniform(-p.dir_noise_deg, p.dir_noise_deg);
        const double ev =
            seed.substream(StreamPurpose::kSpeedNoise, static_cast<std::uint64_t>(t))
                .uniform(-p.speed_noise_ms, p.speed_noise_ms);
        s.direction_noisy[t] = positive_mod_360(s.direction[t] + ek);
        s.speed_noisy[t] = std::min(p.v_max, std::max(p.v_min, s.speed[t] + ev));
    }
}

struct Forecast {
    double direction[WindSeries::kForecastHorizon];
    double speed[WindSeries::kForecastHorizon];
};

/// Noisy wind at offsets t+1 .. t+3. The forecast is the future of the
/// single noisy series, i.e. forecast error equals measurement noise.
inline Forecast forecast(const WindSeries& s, int t) {
    if (t < 0 || t + WindSeries::kForecastHorizon >= s.length()) {
        throw std::out_of_range("forecast: step outside series");
    }
    Forecast f{};
    for (int l = 0; l < WindSeries::kForecastHorizon; ++l) {
        f.direction[l] = s.direction_noisy[t + 1 + l];
        f.speed[l] = s.speed_noisy[t + 1 + l];
    }
    return f;
}

}  // namespace wakelab
