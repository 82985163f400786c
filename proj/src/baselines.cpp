#include "driftcast/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftcast/errors.hpp"

namespace driftcast {

namespace {

constexpr double kVarianceFloor = 1e-300; // keeps ln() finite for perfect fits

double clamped_log(double v) { return std::log(std::max(v, kVarianceFloor)); }

bool all_equal(const Vec& z) {
    for (double v : z)
        if (v != z.front()) return false;
    return true;
}

struct OlsFit {
    Vec coefficients; // p lags
    double intercept = 0.0;
    double ssr = 0.0;
    std::size_t n_eff = 0;
};

// OLS of z_t on [1, z_{t-1}, ..., z_{t-p}] via normal equations.
OlsFit fit_lags(const Vec& z, std::size_t p) {
    const std::size_t t = z.size();
    if (t < p + 2) throw InsufficientData("need >= p + 2 samples after differencing");
    const std::size_t n_eff = t - p;
    const std::size_t k = p + 1;

    OlsFit fit;
    fit.n_eff = n_eff;
    if (p == 0) {
        double mean = 0.0;
        for (double v : z) mean += v;
        mean /= static_cast<double>(t);
        fit.intercept = mean;
        for (double v : z) fit.ssr += (v - mean) * (v - mean);
        fit.n_eff = t;
        return fit;
    }

    Mat xtx(k, k);
    Vec xty(k, 0.0);
    for (std::size_t row = p; row < t; ++row) {
        Vec x(k);
        x[0] = 1.0;
        for (std::size_t i = 1; i <= p; ++i) x[i] = z[row - i];
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += x[a] * z[row];
            for (std::size_t b = a; b < k; ++b) xtx(a, b) += x[a] * x[b];
        }
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);

    const Vec beta = solve_spd(xtx, xty, 1e-12);
    fit.intercept = beta[0];
    fit.coefficients.assign(beta.begin() + 1, beta.end());
    for (std::size_t row = p; row < t; ++row) {
        double pred = fit.intercept;
        for (std::size_t i = 1; i <= p; ++i) pred += beta[i] * z[row - i];
        const double e = z[row] - pred;
        fit.ssr += e * e;
    }
    return fit;
}

ArModel model_from_fit(const OlsFit& fit, const ArOrder& order) {
    ArModel model;
    model.order = order;
    model.coefficients = fit.coefficients;
    model.coefficients.resize(order.p, 0.0);
    model.intercept = fit.intercept;
    const std::size_t dof = fit.n_eff > order.p + 1 ? fit.n_eff - order.p - 1 : 1;
    model.residual_variance = fit.ssr / static_cast<double>(dof);
    model.aic = static_cast<double>(fit.n_eff) * clamped_log(model.residual_variance) +
                2.0 * static_cast<double>(order.p + 1);
    return model;
}

} // namespace

Vec difference(const Vec& values, std::size_t d) {
    Vec z = values;
    for (std::size_t k = 0; k < d; ++k) {
        if (z.size() < 2) throw InsufficientData("cannot difference a series of length < 2");
        Vec next(z.size() - 1);
        for (std::size_t i = 0; i + 1 < z.size(); ++i) next[i] = z[i + 1] - z[i];
        z = std::move(next);
    }
    return z;
}

Vec undifference(const Vec& forecasts, const Vec& original, std::size_t d) {
    if (original.size() < d + 1) throw InsufficientData("undifference needs >= d + 1 history values");
    Vec out = forecasts;
    for (std::size_t k = d; k >= 1; --k) {
        const Vec lower = difference(original, k - 1);
        double running = lower.back();
        for (double& f : out) {
            running += f;
            f = running;
        }
    }
    return out;
}

ArModel fit_ar(const UniformSeries& series, const ArOrder& order) {
    if (order.d > 2) throw ConfigError("differencing order must be <= 2");
    const Vec z = difference(series.values, order.d);
    if (z.size() < order.p + 2) throw InsufficientData("series too short for AR(" + std::to_string(order.p) + ")");

    if (all_equal(z)) {
        // degenerate but well-defined: a constant differenced series
        OlsFit fit;
        fit.intercept = z.front();
        fit.n_eff = z.size() - order.p;
        if (order.p == 0) fit.n_eff = z.size();
        return model_from_fit(fit, order);
    }
    return model_from_fit(fit_lags(z, order.p), order);
}

ArOrder select_order(const UniformSeries& series, std::size_t p_max, std::size_t d_max) {
    if (d_max > 2) throw ConfigError("d_max must be <= 2");
    const std::size_t t = series.size();
    if (t < p_max + d_max + 4) throw InsufficientData("series too short for the order grid");
    const std::size_t n_common = t - d_max - p_max;

    ArOrder best;
    double best_aic = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (std::size_t d = 0; d <= d_max; ++d) {
        const Vec z_full = difference(series.values, d);
        for (std::size_t p = 0; p <= p_max; ++p) {
            // score every candidate on the same n_common trailing targets
            const std::size_t need = n_common + p;
            if (z_full.size() < need) continue;
            const Vec z(z_full.end() - static_cast<std::ptrdiff_t>(need), z_full.end());
            double aic;
            if (all_equal(z)) {
                aic = static_cast<double>(n_common) * clamped_log(0.0) +
                      2.0 * static_cast<double>(p + 1);
            } else {
                OlsFit fit;
                try {
                    fit = fit_lags(z, p);
                } catch (const SingularDesign&) {
                    continue;
                }
                const std::size_t dof = fit.n_eff > p + 1 ? fit.n_eff - p - 1 : 1;
                const double rv = fit.ssr / static_cast<double>(dof);
                aic = static_cast<double>(n_common) * clamped_log(rv) + 2.0 * static_cast<double>(p + 1);
            }
            if (!have_best || aic < best_aic) {
                best_aic = aic;
                best = ArOrder{p, d};
                have_best = true;
            }
        }
    }
    if (!have_best) throw InsufficientData("no admissible (p, d) candidate");
    return best;
}

std::vector<double> forecast_ar(const ArModel& model, const UniformSeries& history, std::size_t horizon) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    const Vec z = difference(history.values, model.order.d);
    if (z.size() < model.order.p) throw InsufficientData("history too short for the AR order");

    Vec extended = z;
    Vec diff_forecasts;
    diff_forecasts.reserve(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
        double pred = model.intercept;
        for (std::size_t i = 1; i <= model.order.p; ++i) pred += model.coefficients[i - 1] * extended[extended.size() - i];
        extended.push_back(pred);
        diff_forecasts.push_back(pred);
    }
    return undifference(diff_forecasts, history.values, model.order.d);
}

VarModel fit_var(const MultiSeries& series, std::size_t p, std::size_t d) {
    if (p < 1) throw ConfigError("VAR lag order must be >= 1");
    const std::size_t n = series.dimension();

    // difference each column jointly
    std::vector<Vec> cols(n);
    for (std::size_t j = 0; j < n; ++j) cols[j] = difference(series.column(j).values, d);
    const std::size_t t = cols[0].size();
    if (t < p + n + 1) throw InsufficientData("series too short for VAR(" + std::to_string(p) + ")");

    bool degenerate = true;
    for (const Vec& c : cols)
        if (!all_equal(c)) degenerate = false;
    if (degenerate) {
        // every differenced channel is constant (e.g. exact linear trends
        // under d = 1); the design is collinear but the model is well
        // defined: intercept-only with zero residuals
        VarModel model;
        model.p = p;
        model.d = d;
        model.coefficient_matrices.assign(p, Mat(n, n));
        model.residual_covariance = Mat(n, n);
        for (std::size_t j = 0; j < n; ++j) model.intercept.push_back(cols[j].front());
        return model;
    }

    const std::size_t k = n * p + 1;
    const std::size_t n_eff = t - p;
    Mat xtx(k, k);
    Mat xty(k, n);
    Vec x(k);
    for (std::size_t row = p; row < t; ++row) {
        x[0] = 1.0;
        std::size_t idx = 1;
        for (std::size_t lag = 1; lag <= p; ++lag)
            for (std::size_t j = 0; j < n; ++j) x[idx++] = cols[j][row - lag];
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a; b < k; ++b) xtx(a, b) += x[a] * x[b];
            for (std::size_t j = 0; j < n; ++j) xty(a, j) += x[a] * cols[j][row];
        }
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);

    VarModel model;
    model.p = p;
    model.d = d;
    model.intercept.resize(n);
    model.coefficient_matrices.assign(p, Mat(n, n));
    Mat beta(k, n); // per-equation coefficients in columns
    for (std::size_t j = 0; j < n; ++j) {
        Vec rhs(k);
        for (std::size_t a = 0; a < k; ++a) rhs[a] = xty(a, j);
        const Vec bj = solve_spd(xtx, rhs, 1e-12);
        for (std::size_t a = 0; a < k; ++a) beta(a, j) = bj[a];
        model.intercept[j] = bj[0];
        std::size_t idx = 1;
        for (std::size_t lag = 0; lag < p; ++lag)
            for (std::size_t jj = 0; jj < n; ++jj) model.coefficient_matrices[lag](j, jj) = bj[idx++];
    }

    // residual covariance, unbiased by regression dof
    model.residual_covariance = Mat(n, n);
    Vec resid(n);
    const std::size_t dof = n_eff > k ? n_eff - k : 1;
    for (std::size_t row = p; row < t; ++row) {
        x[0] = 1.0;
        std::size_t idx = 1;
        for (std::size_t lag = 1; lag <= p; ++lag)
            for (std::size_t j = 0; j < n; ++j) x[idx++] = cols[j][row - lag];
        for (std::size_t j = 0; j < n; ++j) {
            double pred = 0.0;
            for (std::size_t a = 0; a < k; ++a) pred += x[a] * beta(a, j);
            resid[j] = cols[j][row] - pred;
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) model.residual_covariance(a, b) += resid[a] * resid[b];
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            model.residual_covariance(a, b) /= static_cast<double>(dof);
            model.residual_covariance(b, a) = model.residual_covariance(a, b);
        }
    return model;
}

std::size_t select_var_order(const MultiSeries& series, std::size_t p_max, std::size_t d) {
    if (p_max < 1) throw ConfigError("p_max must be >= 1");
    const std::size_t n = series.dimension();
    std::size_t best_p = 1;
    double best_aic = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (std::size_t p = 1; p <= p_max; ++p) {
        VarModel model;
        try {
            model = fit_var(series, p, d);
        } catch (const Error&) {
            continue;
        }
        const EigenDecomposition ed = jacobi_eigen(model.residual_covariance);
        double log_det = 0.0;
        for (double w : ed.eigenvalues) log_det += clamped_log(w);
        const std::size_t t = series.size() - d;
        const double n_eff = static_cast<double>(t - p);
        const double aic = n_eff * log_det + 2.0 * static_cast<double>(n * n * p + n);
        if (!have_best || aic < best_aic) {
            best_aic = aic;
            best_p = p;
            have_best = true;
        }
    }
    if (!have_best) throw InsufficientData("no admissible VAR order");
    return best_p;
}

std::vector<Vec> forecast_var(const VarModel& model, const MultiSeries& history, std::size_t horizon) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    const std::size_t n = history.dimension();
    if (model.intercept.size() != n) throw DimensionMismatch("VAR model vs history dimension");

    std::vector<Vec> cols(n);
    for (std::size_t j = 0; j < n; ++j) cols[j] = difference(history.column(j).values, model.d);
    const std::size_t t = cols[0].size();
    if (t < model.p) throw InsufficientData("history too short for the VAR order");

    std::vector<Vec> extended(n);
    for (std::size_t j = 0; j < n; ++j) extended[j] = cols[j];
    std::vector<Vec> diff_forecasts(horizon, Vec(n));
    for (std::size_t k = 0; k < horizon; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            double pred = model.intercept[j];
            for (std::size_t lag = 1; lag <= model.p; ++lag)
                for (std::size_t jj = 0; jj < n; ++jj)
                    pred += model.coefficient_matrices[lag - 1](j, jj) * extended[jj][extended[jj].size() - lag];
            diff_forecasts[k][j] = pred;
        }
        for (std::size_t j = 0; j < n; ++j) extended[j].push_back(diff_forecasts[k][j]);
    }

    // reintegrate per column
    std::vector<Vec> out(horizon, Vec(n));
    for (std::size_t j = 0; j < n; ++j) {
        Vec col_fc(horizon);
        for (std::size_t k = 0; k < horizon; ++k) col_fc[k] = diff_forecasts[k][j];
        const Vec levels = undifference(col_fc, history.column(j).values, model.d);
        for (std::size_t k = 0; k < horizon; ++k) out[k][j] = levels[k];
    }
    return out;
}

} // namespace driftcast
