#include "driftcast/synth.hpp"

#include <cmath>

#include "driftcast/errors.hpp"

namespace driftcast {

UniformSeries simulate_gbm(const GbmSpec& spec, SeededRng rng) {
    if (!(spec.s0 > 0.0)) throw ConfigError("gbm s0 must be > 0");
    if (spec.b < 0.0) throw ConfigError("gbm b must be >= 0");
    if (!(spec.dt > 0.0)) throw ConfigError("gbm dt must be > 0");
    if (spec.n_steps < 1) throw ConfigError("gbm n_steps must be >= 1");

    UniformSeries s;
    s.dt = spec.dt;
    s.name = "gbm";
    s.values.reserve(spec.n_steps + 1);
    s.values.push_back(spec.s0);
    const double drift_term = (spec.a - 0.5 * spec.b * spec.b) * spec.dt;
    const double vol_term = spec.b * std::sqrt(spec.dt);
    double value = spec.s0;
    for (std::size_t i = 0; i < spec.n_steps; ++i) {
        value *= std::exp(drift_term + vol_term * rng.standard_normal());
        s.values.push_back(value);
    }
    return s;
}

MultiSeries simulate_linear_sde(const LinearSdeSpec& spec, SeededRng rng) {
    const std::size_t n = spec.x0.size();
    if (n < 1) throw DimensionMismatch("linear sde needs n >= 1");
    if (spec.drift.size() != n || spec.diffusion.rows() != n || spec.diffusion.cols() != n)
        throw DimensionMismatch("linear sde drift/diffusion dimensions");
    if (!(spec.dt > 0.0)) throw ConfigError("linear sde dt must be > 0");
    if (spec.n_steps < 1) throw ConfigError("linear sde n_steps must be >= 1");
    for (std::size_t k = 1; k < spec.schedule.size(); ++k)
        if (spec.schedule[k].start_index <= spec.schedule[k - 1].start_index)
            throw ConfigError("regime schedule indices must be strictly increasing");

    std::vector<std::string> names = spec.feature_names;
    if (names.empty())
        for (std::size_t j = 0; j < n; ++j) names.push_back("x" + std::to_string(j));
    if (names.size() != n) throw DimensionMismatch("feature name count");

    MultiSeries series(spec.n_steps + 1, n, spec.dt, names);
    for (std::size_t j = 0; j < n; ++j) series(0, j) = spec.x0[j];

    const Vec* drift = &spec.drift;
    const Mat* diffusion = &spec.diffusion;
    std::size_t next_regime = 0;
    for (std::size_t i = 0; i < spec.n_steps; ++i) {
        if (next_regime < spec.schedule.size() && i >= spec.schedule[next_regime].start_index) {
            const RegimeOverride& r = spec.schedule[next_regime];
            if (r.drift.size() != n || r.diffusion.rows() != n || r.diffusion.cols() != n)
                throw DimensionMismatch("regime override dimensions");
            drift = &r.drift;
            diffusion = &r.diffusion;
            ++next_regime;
        }
        SeededRng sub = rng.substream(i, 0);
        const Vec dw = sub.wiener_increment(n, spec.dt);
        for (std::size_t j = 0; j < n; ++j) {
            double noise = 0.0;
            for (std::size_t k = 0; k < n; ++k) noise += (*diffusion)(j, k) * dw[k];
            series(i + 1, j) = series(i, j) + (*drift)[j] * spec.dt + noise;
        }
    }
    return series;
}

LinearSdeSpec engine_preset(std::size_t n_steps, double dt) {
    const std::size_t n = 8;
    LinearSdeSpec spec;
    spec.n_steps = n_steps;
    spec.dt = dt;
    spec.feature_names = {"lube_oil_temp", "freshwater_temp", "exhaust_temp_a", "exhaust_temp_b",
                          "lube_oil_pres", "fuel_oil_pres",   "seawater_pres",  "shaft_rpm"};
    spec.x0 = {60.0, 35.0, 350.0, 352.0, 4.0, 7.0, 2.0, 900.0};
    // slow thermal drifts, volatile exhaust channels, quiet pressures,
    // rpm ramps then switches regime mid-series
    spec.drift = {0.002, 0.001, 0.01, -0.008, 0.0, 0.0, 0.0, 0.05};
    spec.diffusion = Mat(n, n);
    const double diag[n] = {0.02, 0.015, 0.6, 0.65, 0.005, 0.01, 0.004, 0.3};
    for (std::size_t j = 0; j < n; ++j) spec.diffusion(j, j) = diag[j];
    // mild thermal coupling
    spec.diffusion(0, 1) = spec.diffusion(1, 0) = 0.004;
    spec.diffusion(2, 3) = spec.diffusion(3, 2) = 0.2;

    if (n_steps > 3) {
        RegimeOverride accel;
        accel.start_index = n_steps / 2;
        accel.drift = spec.drift;
        accel.drift[7] = 1.5; // throttle-up transient
        accel.drift[2] = 0.15;
        accel.drift[3] = 0.12;
        accel.diffusion = spec.diffusion;
        spec.schedule.push_back(std::move(accel));
    }
    return spec;
}

} // namespace driftcast
