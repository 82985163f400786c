#include "driftcast/spm.hpp"

#include <cmath>

#include "driftcast/errors.hpp"

namespace driftcast {

GbmParams estimate_gbm(const ScalarWindow& win, double dt) {
    if (!(dt > 0.0)) throw ConfigError("estimate_gbm needs dt > 0");
    const std::size_t samples = win.size();
    if (samples < 3) throw WindowTooSmall("estimate_gbm needs N+1 >= 3 samples, got " + std::to_string(samples));
    const std::size_t n = samples - 1; // increments

    Vec increments(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = win.at(i);
        increments[i] = s != 0.0 ? (win.at(i + 1) - s) / (s * dt) : 0.0;
    }

    const double a = pairwise_sum(increments) / static_cast<double>(n);
    double ss = 0.0;
    for (double ai : increments) {
        const double r = ai - a;
        ss += r * r;
    }
    GbmParams params;
    params.a = a;
    params.b = std::sqrt(ss * dt / static_cast<double>(n - 1));
    params.window_size = n;
    return params;
}

SpmForecast forecast_spm(double s_now, const GbmParams& params, double dt, SeededRng& rng,
                         SpmBoundsMode bounds_mode, double confidence) {
    if (!(s_now > 0.0)) throw NonPositiveState(s_now);
    if (!(dt > 0.0)) throw ConfigError("forecast_spm needs dt > 0");

    const double a = params.a;
    const double b = params.b;
    const double z = rng.standard_normal();

    SpmForecast f;
    f.from_value = s_now;
    f.sample = s_now * std::exp((a - 0.5 * b * b) * dt + b * std::sqrt(dt) * z);
    f.mean = s_now * std::exp(a * dt);
    f.median = s_now * std::exp((a - 0.5 * b * b) * dt);
    f.mode = s_now * std::exp((a - 1.5 * b * b) * dt);

    if (bounds_mode == SpmBoundsMode::PaperVariance) {
        const double var_term = s_now * (std::exp(b * b * dt) - 1.0) * std::exp(2.0 * a * dt);
        f.upper = f.mean + var_term;
        f.lower = f.mean - var_term;
    } else {
        if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must be in (0,1)");
        const double zq = normal_quantile(0.5 * (1.0 + confidence));
        const double mu = (a - 0.5 * b * b) * dt;
        const double sd = b * std::sqrt(dt);
        f.upper = s_now * std::exp(mu + zq * sd);
        f.lower = s_now * std::exp(mu - zq * sd);
    }
    if (b == 0.0) {
        // degenerate log-normal: everything collapses onto the mean
        f.sample = f.median = f.mode = f.upper = f.lower = f.mean;
    }
    return f;
}

std::vector<SpmForecast> forecast_spm_multistep(double s_last, const GbmParams& params,
                                                std::size_t horizon, double dt, SeededRng& rng,
                                                SpmBoundsMode bounds_mode, double confidence) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    std::vector<SpmForecast> steps;
    steps.reserve(horizon);
    double s = s_last;
    for (std::size_t k = 0; k < horizon; ++k) {
        SpmForecast f = forecast_spm(s, params, dt, rng, bounds_mode, confidence);
        s = f.sample;
        steps.push_back(f);
    }
    return steps;
}

} // namespace driftcast
