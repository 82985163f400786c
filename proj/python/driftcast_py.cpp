#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "driftcast/backtest.hpp"
#include "driftcast/baselines.hpp"
#include "driftcast/errors.hpp"
#include "driftcast/metrics.hpp"
#include "driftcast/mpm.hpp"
#include "driftcast/rng.hpp"
#include "driftcast/series.hpp"
#include "driftcast/spm.hpp"
#include "driftcast/synth.hpp"

namespace py = pybind11;
using namespace driftcast;

namespace {

std::vector<Vec> mat_to_rows(const Mat& m) {
    std::vector<Vec> rows(m.rows(), Vec(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
    return rows;
}

Mat rows_to_mat(const std::vector<Vec>& rows) {
    if (rows.empty()) throw DimensionMismatch("matrix needs at least one row");
    Mat m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw DimensionMismatch("ragged matrix rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

MultiSeries make_multiseries(const std::vector<Vec>& rows, double dt,
                             std::vector<std::string> names) {
    if (rows.empty()) throw EmptyInput("series needs at least one row");
    const std::size_t n = rows.front().size();
    if (names.empty())
        for (std::size_t j = 0; j < n; ++j) names.push_back("x" + std::to_string(j));
    MultiSeries series(rows.size(), n, dt, std::move(names));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != n) throw DimensionMismatch("ragged series rows");
        for (std::size_t j = 0; j < n; ++j) series(i, j) = rows[i][j];
    }
    return series;
}

UniformSeries make_uniform(const Vec& values, double dt) {
    UniformSeries s;
    s.values = values;
    s.dt = dt;
    return s;
}

} // namespace

PYBIND11_MODULE(driftcast, m) {
    m.doc() = "Stochastic forecasting: GBM single-particle, adaptive multi-particle SDE "
              "ensembles, AR/VAR baselines and a rolling-origin backtest harness.";

    py::register_exception<Error>(m, "DriftcastError", PyExc_RuntimeError);

    py::class_<SeededRng>(m, "SeededRng")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
        .def("next_uniform", &SeededRng::next_uniform)
        .def("standard_normal", &SeededRng::standard_normal)
        .def("wiener_increment", &SeededRng::wiener_increment, py::arg("n"), py::arg("dt"))
        .def("substream", &SeededRng::substream, py::arg("step_index"), py::arg("particle_index"));

    m.def("normal_quantile", &normal_quantile, py::arg("p"));

    py::class_<MultiSeries>(m, "MultiSeries")
        .def(py::init(&make_multiseries), py::arg("rows"), py::arg("dt"),
             py::arg("feature_names") = std::vector<std::string>{})
        .def_property_readonly("size", &MultiSeries::size)
        .def_property_readonly("dimension", &MultiSeries::dimension)
        .def_property_readonly("dt", &MultiSeries::dt)
        .def_property_readonly("feature_names", &MultiSeries::feature_names)
        .def("row", [](const MultiSeries& s, std::size_t i) {
            if (i >= s.size()) throw OutOfBounds("row index");
            return Vec(s.row(i).begin(), s.row(i).end());
        })
        .def("column", [](const MultiSeries& s, std::size_t j) {
            if (j >= s.dimension()) throw OutOfBounds("column index");
            return s.column(j).values;
        });

    m.def("load_csv", &load_csv, py::arg("path"), py::arg("dt"),
          py::arg("has_timestamp_column") = false);
    m.def("write_csv", &write_csv, py::arg("series"), py::arg("path"));

    // ---- single particle -------------------------------------------------

    py::class_<GbmParams>(m, "GbmParams")
        .def_readonly("a", &GbmParams::a)
        .def_readonly("b", &GbmParams::b)
        .def_readonly("window_size", &GbmParams::window_size);

    py::class_<SpmForecast>(m, "SpmForecast")
        .def_readonly("sample", &SpmForecast::sample)
        .def_readonly("mean", &SpmForecast::mean)
        .def_readonly("median", &SpmForecast::median)
        .def_readonly("mode", &SpmForecast::mode)
        .def_readonly("upper", &SpmForecast::upper)
        .def_readonly("lower", &SpmForecast::lower);

    m.def(
        "estimate_gbm",
        [](const Vec& values, double dt, std::size_t window_size) {
            const UniformSeries s = make_uniform(values, dt);
            const std::size_t w = window_size == 0 ? s.size() : window_size;
            return estimate_gbm(window(s, s.size(), w), dt);
        },
        py::arg("values"), py::arg("dt"), py::arg("window") = 0);

    m.def(
        "forecast_spm",
        [](const Vec& values, double dt, std::size_t horizon, std::size_t window_size,
           std::uint64_t seed, const std::string& bounds, double confidence) {
            const UniformSeries s = make_uniform(values, dt);
            const std::size_t w = window_size == 0 ? s.size() : window_size;
            const GbmParams params = estimate_gbm(window(s, s.size(), w), dt);
            const SpmBoundsMode mode =
                bounds == "quantile" ? SpmBoundsMode::LogNormalQuantile : SpmBoundsMode::PaperVariance;
            SeededRng rng(seed);
            return forecast_spm_multistep(values.back(), params, horizon, dt, rng, mode, confidence);
        },
        py::arg("values"), py::arg("dt"), py::arg("horizon"), py::arg("window") = 0,
        py::arg("seed") = 42, py::arg("bounds") = "paper", py::arg("confidence") = 0.9);

    // ---- multi particle ---------------------------------------------------

    py::class_<WindowPolicy>(m, "WindowPolicy")
        .def(py::init([](std::size_t w_base, std::size_t w_min, std::size_t w_max, double threshold,
                         std::size_t lookback) {
                 WindowPolicy p;
                 p.w_base = w_base;
                 p.w_min = w_min;
                 p.w_max = w_max;
                 p.threshold = threshold;
                 p.lookback = lookback == 0 ? w_min : lookback;
                 return p;
             }),
             py::arg("w_base") = 100, py::arg("w_min") = 50, py::arg("w_max") = 200,
             py::arg("threshold") = 0.0, py::arg("lookback") = 0)
        .def_readwrite("w_base", &WindowPolicy::w_base)
        .def_readwrite("w_min", &WindowPolicy::w_min)
        .def_readwrite("w_max", &WindowPolicy::w_max)
        .def_readwrite("threshold", &WindowPolicy::threshold)
        .def_readwrite("lookback", &WindowPolicy::lookback);

    py::class_<SdeParams>(m, "SdeParams")
        .def_readonly("drift", &SdeParams::drift)
        .def_property_readonly("covariance",
                               [](const SdeParams& p) { return mat_to_rows(p.covariance); })
        .def_property_readonly("diffusion",
                               [](const SdeParams& p) { return mat_to_rows(p.diffusion); })
        .def_readonly("window_used", &SdeParams::window_used)
        .def_readonly("clamped_mass", &SdeParams::clamped_mass);

    m.def(
        "estimate_sde",
        [](const MultiSeries& series, std::size_t window_width) {
            const std::size_t w = window_width == 0 ? series.size() : window_width;
            return estimate_diffusion(estimate_drift(window(series, series.size(), w), series.dt()),
                                      series.dt());
        },
        py::arg("series"), py::arg("window") = 0);

    m.def("default_threshold", &default_threshold, py::arg("series"), py::arg("policy"),
          py::arg("dt"));

    py::class_<MpmStep>(m, "MpmStep")
        .def_readonly("corrected", &MpmStep::corrected)
        .def_readonly("standard", &MpmStep::standard)
        .def_property_readonly("window",
                               [](const MpmStep& s) { return s.decision.chosen_width; })
        .def_property_readonly("drift_magnitude",
                               [](const MpmStep& s) { return s.decision.drift_magnitude; });

    m.def(
        "forecast_mpm",
        [](const MultiSeries& series, std::size_t horizon, WindowPolicy policy,
           std::size_t particles, const std::string& sigma_mode, bool freeze_params,
           std::uint64_t seed, std::size_t threads) {
            if (!(policy.threshold > 0.0))
                policy.threshold = default_threshold(series, policy, series.dt());
            MpmOptions options;
            options.particles = particles;
            options.sigma_mode = SigmaMode::parse(sigma_mode);
            options.freeze_params = freeze_params;
            options.threads = threads;
            return forecast_mpm_multistep(series, policy, horizon, series.dt(), SeededRng(seed),
                                          options);
        },
        py::arg("series"), py::arg("horizon") = 20, py::arg("policy") = WindowPolicy{},
        py::arg("particles") = 1000, py::arg("sigma_mode") = "diffusion_trace",
        py::arg("freeze_params") = false, py::arg("seed") = 42, py::arg("threads") = 1);

    // ---- baselines ---------------------------------------------------------

    py::class_<ArOrder>(m, "ArOrder")
        .def(py::init([](std::size_t p, std::size_t d) { return ArOrder{p, d}; }), py::arg("p"),
             py::arg("d") = 0)
        .def_readonly("p", &ArOrder::p)
        .def_readonly("d", &ArOrder::d);

    py::class_<ArModel>(m, "ArModel")
        .def_readonly("order", &ArModel::order)
        .def_readonly("coefficients", &ArModel::coefficients)
        .def_readonly("intercept", &ArModel::intercept)
        .def_readonly("residual_variance", &ArModel::residual_variance)
        .def_readonly("aic", &ArModel::aic);

    m.def(
        "fit_ar",
        [](const Vec& values, double dt, std::size_t p, std::size_t d) {
            return fit_ar(make_uniform(values, dt), ArOrder{p, d});
        },
        py::arg("values"), py::arg("dt"), py::arg("p"), py::arg("d") = 0);

    m.def(
        "select_order",
        [](const Vec& values, double dt, std::size_t p_max, std::size_t d_max) {
            return select_order(make_uniform(values, dt), p_max, d_max);
        },
        py::arg("values"), py::arg("dt"), py::arg("p_max") = 5, py::arg("d_max") = 2);

    m.def(
        "forecast_ar",
        [](const Vec& values, double dt, std::size_t horizon, std::size_t p_max, std::size_t d_max) {
            const UniformSeries s = make_uniform(values, dt);
            const ArModel model = fit_ar(s, select_order(s, p_max, d_max));
            return forecast_ar(model, s, horizon);
        },
        py::arg("values"), py::arg("dt"), py::arg("horizon"), py::arg("p_max") = 5,
        py::arg("d_max") = 2);

    m.def(
        "forecast_var",
        [](const MultiSeries& series, std::size_t horizon, std::size_t p_max, std::size_t d) {
            const std::size_t p = select_var_order(series, p_max, d);
            return forecast_var(fit_var(series, p, d), series, horizon);
        },
        py::arg("series"), py::arg("horizon"), py::arg("p_max") = 5, py::arg("d") = 1);

    // ---- synthesis, metrics, backtest ---------------------------------------

    m.def(
        "simulate_gbm",
        [](double s0, double a, double b, std::size_t n_steps, double dt, std::uint64_t seed) {
            GbmSpec spec{s0, a, b, n_steps, dt};
            return simulate_gbm(spec, SeededRng(seed)).values;
        },
        py::arg("s0"), py::arg("a"), py::arg("b"), py::arg("n_steps"), py::arg("dt"),
        py::arg("seed") = 42);

    m.def(
        "simulate_linear_sde",
        [](const Vec& x0, const Vec& drift, const std::vector<Vec>& diffusion, std::size_t n_steps,
           double dt, std::uint64_t seed, std::vector<std::string> names) {
            LinearSdeSpec spec;
            spec.x0 = x0;
            spec.drift = drift;
            spec.diffusion = rows_to_mat(diffusion);
            spec.n_steps = n_steps;
            spec.dt = dt;
            spec.feature_names = std::move(names);
            return simulate_linear_sde(spec, SeededRng(seed));
        },
        py::arg("x0"), py::arg("drift"), py::arg("diffusion"), py::arg("n_steps"), py::arg("dt"),
        py::arg("seed") = 42, py::arg("feature_names") = std::vector<std::string>{});

    m.def(
        "simulate_engine_preset",
        [](std::size_t n_steps, double dt, std::uint64_t seed) {
            return simulate_linear_sde(engine_preset(n_steps, dt), SeededRng(seed));
        },
        py::arg("n_steps"), py::arg("dt") = 10.0, py::arg("seed") = 42);

    m.def(
        "mae_rmse",
        [](const std::vector<Vec>& actual, const std::vector<Vec>& predicted) {
            const MaeRmseResult r = mae_rmse(actual, predicted);
            py::dict out;
            py::list per_feature;
            for (const ErrorPair& ep : r.per_feature)
                per_feature.append(py::make_tuple(ep.mae, ep.rmse, ep.count));
            out["per_feature"] = per_feature;
            out["aggregate"] =
                py::make_tuple(r.aggregate_norm.mae, r.aggregate_norm.rmse, r.aggregate_norm.count);
            return out;
        },
        py::arg("actual"), py::arg("predicted"));

    m.def(
        "run_backtest",
        [](const MultiSeries& series, const std::string& method, std::size_t horizon,
           std::size_t stride, std::uint64_t seed, std::size_t particles) {
            BacktestConfig cfg;
            cfg.method = method;
            cfg.horizon = horizon;
            cfg.stride = stride;
            cfg.seed = seed;
            cfg.particles = particles;
            std::vector<std::string> out;
            for (const BacktestReport& r : run_backtest(series, cfg)) out.push_back(report_to_json(r));
            return out;
        },
        py::arg("series"), py::arg("method") = "mpm", py::arg("horizon") = 20, py::arg("stride") = 1,
        py::arg("seed") = 42, py::arg("particles") = 1000,
        "Returns one JSON report string per method variant.");
}
