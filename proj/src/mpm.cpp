#include "driftcast/mpm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "driftcast/errors.hpp"

namespace driftcast {

void WindowPolicy::validate() const {
    if (w_min < 5) throw ConfigError("window.min must be >= 5 (the stencil needs an interior point)");
    if (!(w_min <= w_base && w_base <= w_max)) throw ConfigError("need window.min <= window.base <= window.max");
    if (lookback < 1) throw ConfigError("window.lookback must be >= 1");
    if (!(threshold > 0.0)) throw ConfigError("window.threshold must be > 0");
}

DriftSamples estimate_drift(const WindowView& win, double dt) {
    if (!(dt > 0.0)) throw ConfigError("estimate_drift needs dt > 0");
    const std::size_t w = win.size();
    if (w < 5) throw WindowTooSmall("estimate_drift needs >= 5 rows, got " + std::to_string(w));
    const std::size_t n = win.parent->dimension();

    DriftSamples out;
    out.samples = Mat(w, n);
    for (std::size_t k = 0; k < w; ++k) {
        auto dst = out.samples.row(k);
        if (k >= 2 && k + 2 < w) {
            // fourth-order central stencil
            auto xp1 = win.row(k + 1);
            auto xm1 = win.row(k - 1);
            auto xm2 = win.row(k - 2);
            auto xp2 = win.row(k + 2);
            for (std::size_t j = 0; j < n; ++j)
                dst[j] = ((2.0 / 3.0) * (xp1[j] - xm1[j]) + (1.0 / 12.0) * (xm2[j] - xp2[j])) / dt;
        } else if (k + 1 < w) {
            auto x0 = win.row(k);
            auto x1 = win.row(k + 1);
            for (std::size_t j = 0; j < n; ++j) dst[j] = (x1[j] - x0[j]) / dt;
        } else {
            // final index: backward difference, mirror of the forward rule
            auto x0 = win.row(k - 1);
            auto x1 = win.row(k);
            for (std::size_t j = 0; j < n; ++j) dst[j] = (x1[j] - x0[j]) / dt;
        }
    }

    out.mean.assign(n, 0.0);
    Vec column(w);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < w; ++k) column[k] = out.samples(k, j);
        out.mean[j] = pairwise_sum(column) / static_cast<double>(w);
    }
    return out;
}

SdeParams estimate_diffusion(const DriftSamples& drift, double dt) {
    if (!(dt > 0.0)) throw ConfigError("estimate_diffusion needs dt > 0");
    const std::size_t w = drift.samples.rows();
    const std::size_t n = drift.samples.cols();
    if (w < 2) throw DegenerateWindow("estimate_diffusion needs >= 2 drift samples");

    SdeParams params;
    params.drift = drift.mean;
    params.window_used = w;
    params.covariance = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < w; ++i)
                s += (drift.samples(i, j) - drift.mean[j]) * (drift.samples(i, k) - drift.mean[k]);
            const double c = s * dt / static_cast<double>(w - 1);
            params.covariance(j, k) = c;
            params.covariance(k, j) = c;
        }
    params.diffusion = symmetric_sqrt(params.covariance, &params.clamped_mass);
    return params;
}

WindowDecision select_window(const MultiSeries& series, std::size_t end_index,
                             const WindowPolicy& policy, double dt) {
    policy.validate();
    if (!(dt > 0.0)) throw ConfigError("select_window needs dt > 0");
    if (end_index < policy.w_max + policy.lookback || end_index > series.size())
        throw OutOfBounds("select_window needs end_index in [w_max + L, T], got " + std::to_string(end_index));

    const std::size_t i = end_index - 1;
    const std::size_t l = policy.lookback;
    auto now = series.row(i);
    auto past = series.row(i - l);
    double s = 0.0;
    for (std::size_t j = 0; j < series.dimension(); ++j) {
        const double dx = now[j] - past[j];
        s += dx * dx;
    }
    WindowDecision d;
    d.drift_magnitude = std::sqrt(s) / (static_cast<double>(l) * dt);
    if (d.drift_magnitude > policy.threshold) {
        d.chosen_width = policy.w_min;
        d.regime = Regime::Transient;
    } else if (d.drift_magnitude < policy.threshold / 5.0) {
        d.chosen_width = policy.w_max;
        d.regime = Regime::Steady;
    } else {
        d.chosen_width = policy.w_base;
        d.regime = Regime::Nominal;
    }
    return d;
}

double default_threshold(const MultiSeries& series, const WindowPolicy& policy, double dt) {
    const std::size_t l = policy.lookback;
    const std::size_t warmup = policy.w_max + l;
    if (series.size() < warmup)
        throw InsufficientData("default_threshold needs at least w_max + L = " + std::to_string(warmup) +
                               " samples, got " + std::to_string(series.size()));

    Vec ds;
    for (std::size_t i = l; i < warmup; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < series.dimension(); ++j) {
            const double dx = series(i, j) - series(i - l, j);
            s += dx * dx;
        }
        ds.push_back(std::sqrt(s) / (static_cast<double>(l) * dt));
    }
    std::sort(ds.begin(), ds.end());
    const std::size_t m = ds.size();
    const double median = m % 2 ? ds[m / 2] : 0.5 * (ds[m / 2 - 1] + ds[m / 2]);
    double threshold = 2.0 * median;
    if (!(threshold > 0.0)) threshold = 2.0 * ds.back(); // all-zero median, try the max
    if (!(threshold > 0.0)) threshold = 1.0;             // exactly constant warmup; any positive value keeps D=0 steady
    return threshold;
}

namespace {

void evolve_range(Mat& particles, const Vec& base, const SdeParams& params, double dt,
                  const SeededRng& rng, std::size_t first, std::size_t last) {
    const std::size_t n = base.size();
    for (std::size_t p = first; p < last; ++p) {
        SeededRng sub = rng.substream(0, p);
        const Vec dw = sub.wiener_increment(n, dt);
        auto row = particles.row(p);
        for (std::size_t j = 0; j < n; ++j) {
            double diffusion_term = 0.0;
            for (std::size_t k = 0; k < n; ++k) diffusion_term += params.diffusion(j, k) * dw[k];
            row[j] = base[j] + params.drift[j] * dt + diffusion_term;
        }
    }
}

// Pairwise column reduction of an M x n matrix with optional weights.
Vec reduce_columns(const Mat& m, const Vec* weights) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    Vec buffer(rows);
    Vec out(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        if (weights)
            for (std::size_t i = 0; i < rows; ++i) buffer[i] = (*weights)[i] * m(i, j);
        else
            for (std::size_t i = 0; i < rows; ++i) buffer[i] = m(i, j);
        out[j] = pairwise_sum(buffer);
        if (!weights) out[j] /= static_cast<double>(rows);
    }
    return out;
}

} // namespace

Ensemble evolve_ensemble(const Vec& base_state, const SdeParams& params, double dt, std::size_t m,
                         const SeededRng& rng, std::size_t threads) {
    if (m < 1) throw ConfigError("particle count must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("evolve_ensemble needs dt > 0");
    const std::size_t n = base_state.size();
    if (params.drift.size() != n || params.diffusion.rows() != n || params.diffusion.cols() != n)
        throw DimensionMismatch("ensemble parameters vs base state");

    Ensemble ens;
    ens.particles = Mat(m, n);
    ens.base_state = base_state;
    ens.params = params;
    ens.dt = dt;

    if (threads <= 1 || m < 256) {
        evolve_range(ens.particles, base_state, params, dt, rng, 0, m);
    } else {
        const std::size_t workers = std::min<std::size_t>(threads, m);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (m + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t first = w * chunk;
            const std::size_t last = std::min(m, first + chunk);
            if (first >= last) break;
            pool.emplace_back([&, first, last] {
                evolve_range(ens.particles, base_state, params, dt, rng, first, last);
            });
        }
        for (auto& t : pool) t.join();
    }
    return ens;
}

Vec standard_estimator(const Ensemble& ensemble) {
    return reduce_columns(ensemble.particles, nullptr);
}

SigmaMode SigmaMode::parse(const std::string& text) {
    SigmaMode mode;
    if (text == "diffusion_trace") {
        mode.kind = SigmaKind::DiffusionTrace;
    } else if (text == "mean_distance") {
        mode.kind = SigmaKind::MeanDistance;
    } else if (text.rfind("fixed:", 0) == 0) {
        mode.kind = SigmaKind::Fixed;
        try {
            mode.fixed_value = std::stod(text.substr(6));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse sigma value in '" + text + "'");
        }
        if (!(mode.fixed_value > 0.0)) throw ConfigError("fixed sigma must be > 0");
    } else {
        throw ConfigError("unknown sigma mode '" + text + "' (diffusion_trace | fixed:<v> | mean_distance)");
    }
    return mode;
}

std::string SigmaMode::to_string() const {
    switch (kind) {
        case SigmaKind::DiffusionTrace: return "diffusion_trace";
        case SigmaKind::MeanDistance: return "mean_distance";
        case SigmaKind::Fixed: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "fixed:%.17g", fixed_value);
            return buf;
        }
    }
    return "diffusion_trace";
}

WeightedEnsemble weight_and_correct(const Ensemble& ensemble, const SigmaMode& sigma_mode) {
    const std::size_t m = ensemble.particles.rows();
    const std::size_t n = ensemble.particles.cols();

    WeightedEnsemble we;
    we.residuals = Mat(m, n);
    we.distances.resize(m);

    Vec drift_point(n);
    for (std::size_t j = 0; j < n; ++j)
        drift_point[j] = ensemble.base_state[j] + ensemble.params.drift[j] * ensemble.dt;

    for (std::size_t p = 0; p < m; ++p) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double r = ensemble.particles(p, j) - drift_point[j];
            we.residuals(p, j) = r;
            d += r * r;
        }
        we.distances[p] = d;
    }

    double sigma2 = 0.0;
    switch (sigma_mode.kind) {
        case SigmaKind::DiffusionTrace: {
            double trace = 0.0;
            for (double v : ensemble.params.diffusion.data()) trace += v * v;
            sigma2 = trace * ensemble.dt / static_cast<double>(n);
            break;
        }
        case SigmaKind::Fixed:
            sigma2 = sigma_mode.fixed_value * sigma_mode.fixed_value;
            break;
        case SigmaKind::MeanDistance:
            sigma2 = pairwise_sum(we.distances) / static_cast<double>(m);
            break;
    }
    we.sigma = std::sqrt(std::max(sigma2, 0.0));

    // log-sum-exp normalization; a degenerate kernel (sigma^2 = 0 happens
    // only when all distances are 0) falls back to uniform weights
    we.weights.resize(m);
    if (sigma2 > 0.0) {
        Vec logw(m);
        double max_logw = -std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < m; ++p) {
            logw[p] = -we.distances[p] / (2.0 * sigma2);
            max_logw = std::max(max_logw, logw[p]);
        }
        Vec shifted(m);
        for (std::size_t p = 0; p < m; ++p) shifted[p] = std::exp(logw[p] - max_logw);
        const double total = pairwise_sum(shifted);
        for (std::size_t p = 0; p < m; ++p) we.weights[p] = shifted[p] / total;
    } else {
        std::fill(we.weights.begin(), we.weights.end(), 1.0 / static_cast<double>(m));
    }

    we.standard = reduce_columns(ensemble.particles, nullptr);
    we.corrected = reduce_columns(ensemble.particles, &we.weights);
    return we;
}

std::vector<MpmStep> forecast_mpm_multistep(const MultiSeries& series, const WindowPolicy& policy,
                                            std::size_t horizon, double dt, const SeededRng& rng,
                                            const MpmOptions& options) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    policy.validate();

    MultiSeries work = series;
    std::vector<MpmStep> steps;
    steps.reserve(horizon);

    SdeParams params;
    for (std::size_t j = 0; j < horizon; ++j) {
        const std::size_t end = work.size();
        WindowDecision decision = select_window(work, end, policy, dt);
        if (j == 0 || !options.freeze_params) {
            const WindowView win = window(work, end, decision.chosen_width);
            params = estimate_diffusion(estimate_drift(win, dt), dt);
        }
        Vec base(work.row(end - 1).begin(), work.row(end - 1).end());
        const Ensemble ens =
            evolve_ensemble(base, params, dt, options.particles, rng.substream(j, 0), options.threads);
        WeightedEnsemble we = weight_and_correct(ens, options.sigma_mode);

        MpmStep step;
        step.corrected = we.corrected;
        step.standard = we.standard;
        step.decision = decision;
        work.append_row(step.corrected);
        steps.push_back(std::move(step));
    }
    return steps;
}

} // namespace driftcast
