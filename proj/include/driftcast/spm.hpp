#pragma once

#include <vector>

#include "driftcast/rng.hpp"
#include "driftcast/series.hpp"

namespace driftcast {

struct GbmParams {
    double a = 0.0;          // relative drift, 1/time
    double b = 0.0;          // diffusion, 1/sqrt(time), >= 0
    std::size_t window_size = 0; // number of increments N used
};

enum class SpmBoundsMode {
    PaperVariance,    // mean +/- S_now (exp(b^2 dt) - 1) exp(2 a dt), verbatim
    LogNormalQuantile // exact log-normal quantiles at `confidence`
};

struct SpmForecast {
    double sample = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double mode = 0.0;
    double upper = 0.0;
    double lower = 0.0;
    double from_value = 0.0;
};

// Sliding-window GBM parameter estimation. The window holds N+1 samples
// (N >= 2 increments); increments starting from a zero value contribute
// a_i = 0.
GbmParams estimate_gbm(const ScalarWindow& window, double dt);

SpmForecast forecast_spm(double s_now, const GbmParams& params, double dt, SeededRng& rng,
                         SpmBoundsMode bounds_mode = SpmBoundsMode::PaperVariance,
                         double confidence = 0.9);

// Recursive multi-step forecast feeding each step's sample forward.
// Parameters stay frozen at their forecast-origin estimate.
std::vector<SpmForecast> forecast_spm_multistep(double s_last, const GbmParams& params,
                                                std::size_t horizon, double dt, SeededRng& rng,
                                                SpmBoundsMode bounds_mode = SpmBoundsMode::PaperVariance,
                                                double confidence = 0.9);

} // namespace driftcast
