#pragma once

#include <cstddef>
#include <vector>

#include "driftcast/series.hpp"

namespace driftcast {

// Differenced autoregressive baselines fit by ordinary least squares.
// Moving-average terms are deliberately absent; reports label the
// baseline as "ARI/VAR-OLS, MA terms omitted".

struct ArOrder {
    std::size_t p = 0; // AR lags
    std::size_t d = 0; // differencing, <= 2
};

struct ArModel {
    ArOrder order;
    Vec coefficients; // p lag coefficients
    double intercept = 0.0;
    double residual_variance = 0.0; // unbiased: SSR / (N_eff - p - 1)
    double aic = 0.0;               // N_eff ln(residual_variance) + 2 (p + 1)
};

struct VarModel {
    std::size_t p = 0;
    std::size_t d = 0;
    std::vector<Mat> coefficient_matrices; // p matrices, n x n
    Vec intercept;                         // n
    Mat residual_covariance;               // n x n
};

Vec difference(const Vec& values, std::size_t d);

// Reintegrate forecasts made on the d-differenced scale back to the
// original scale; `original` is the undifferenced history.
Vec undifference(const Vec& forecasts, const Vec& original, std::size_t d);

ArModel fit_ar(const UniformSeries& series, const ArOrder& order);

// Grid search minimizing AIC over p <= p_max, d <= d_max. All candidates
// are scored on a common target set (the last T - d_max - p_max points)
// so AIC values are comparable across (p, d). Ties break to smaller d,
// then smaller p.
ArOrder select_order(const UniformSeries& series, std::size_t p_max, std::size_t d_max);

std::vector<double> forecast_ar(const ArModel& model, const UniformSeries& history, std::size_t horizon);

VarModel fit_var(const MultiSeries& series, std::size_t p, std::size_t d = 0);

// AIC over p in [1, p_max] at fixed d, multivariate form
// N ln det(Sigma) + 2 (n^2 p + n), common target set as select_order.
std::size_t select_var_order(const MultiSeries& series, std::size_t p_max, std::size_t d);

std::vector<Vec> forecast_var(const VarModel& model, const MultiSeries& history, std::size_t horizon);

} // namespace driftcast
