#include "driftcast/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "driftcast/errors.hpp"
#include "driftcast/spm.hpp"

namespace driftcast {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::string kBaselineNote = "baseline: ARI/VAR-OLS, MA terms omitted";

ordered_json config_to_json(const BacktestConfig& cfg, double dt, double effective_threshold) {
    ordered_json j;
    j["method"] = cfg.method;
    j["dt"] = dt;
    j["backtest.horizon"] = cfg.horizon;
    j["backtest.stride"] = cfg.stride;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["spm.window"] = cfg.spm_window;
    j["window.base"] = cfg.policy.w_base;
    j["window.min"] = cfg.policy.w_min;
    j["window.max"] = cfg.policy.w_max;
    j["window.threshold"] = effective_threshold;
    j["window.lookback"] = cfg.policy.lookback;
    j["mpm.particles"] = cfg.particles;
    j["mpm.sigma_mode"] = cfg.sigma_mode.to_string();
    j["mpm.freeze_params"] = cfg.freeze_params;
    j["baseline.p_max"] = cfg.p_max;
    j["baseline.d_max"] = cfg.d_max;
    j["baseline.var_d"] = cfg.var_d;
    j["baseline.train_fraction"] = cfg.train_fraction;
    return j;
}

std::vector<std::size_t> origin_list(std::size_t first, std::size_t t, std::size_t horizon, std::size_t stride) {
    std::vector<std::size_t> origins;
    for (std::size_t o = first; o + horizon <= t; o += stride) origins.push_back(o);
    if (origins.empty())
        throw InsufficientData("no backtest origin fits: first=" + std::to_string(first) + ", T=" +
                               std::to_string(t) + ", horizon=" + std::to_string(horizon));
    return origins;
}

MultiSeries prefix_copy(const MultiSeries& series, std::size_t t) {
    MultiSeries out(t, series.dimension(), series.dt(), series.feature_names());
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < series.dimension(); ++j) out(i, j) = series(i, j);
    return out;
}

UniformSeries prefix_column(const MultiSeries& series, std::size_t j, std::size_t t) {
    UniformSeries col;
    col.dt = series.dt();
    col.name = series.feature_names()[j];
    col.values.reserve(t);
    for (std::size_t i = 0; i < t; ++i) col.values.push_back(series(i, j));
    return col;
}

BacktestReport score(const MultiSeries& series, const std::vector<std::size_t>& origins,
                     const std::vector<std::vector<Vec>>& forecasts, std::size_t horizon,
                     const std::string& label, const BacktestConfig& cfg, double effective_threshold,
                     const std::string& note) {
    BacktestReport report;
    report.method = label;
    report.feature_names = series.feature_names();
    report.horizon = horizon;
    report.origins = origins.size();
    report.seed = cfg.seed;
    report.note = note;
    report.config_echo = config_to_json(cfg, series.dt(), effective_threshold).dump();

    const std::size_t n = series.dimension();
    report.per_feature.assign(n, std::vector<ErrorPair>(horizon));
    report.aggregate_norm.resize(horizon);
    for (std::size_t step = 0; step < horizon; ++step) {
        std::vector<Vec> actual;
        std::vector<Vec> predicted;
        actual.reserve(origins.size());
        predicted.reserve(origins.size());
        for (std::size_t oi = 0; oi < origins.size(); ++oi) {
            const std::size_t row = origins[oi] + step;
            actual.emplace_back(series.row(row).begin(), series.row(row).end());
            predicted.push_back(forecasts[oi][step]);
        }
        const MaeRmseResult r = mae_rmse(actual, predicted);
        for (std::size_t j = 0; j < n; ++j) report.per_feature[j][step] = r.per_feature[j];
        report.aggregate_norm[step] = r.aggregate_norm;
    }
    return report;
}

} // namespace

std::string method_label(Method m) {
    switch (m) {
        case Method::Spm: return "SPM";
        case Method::MpmStandard: return "MPM-standard";
        case Method::MpmCorrected: return "MPM-corrected";
        case Method::Ari: return "ARI";
        case Method::Var: return "VAR";
    }
    return "?";
}

std::vector<BacktestReport> run_backtest(const MultiSeries& series, const BacktestConfig& cfg) {
    if (cfg.horizon < 1) throw ConfigError("backtest.horizon must be >= 1");
    if (cfg.stride < 1) throw ConfigError("backtest.stride must be >= 1");
    const std::size_t t = series.size();
    const std::size_t n = series.dimension();
    const double dt = series.dt();
    const SeededRng base(cfg.seed);

    std::vector<BacktestReport> reports;

    if (cfg.method == "spm") {
        const std::vector<std::size_t> origins = origin_list(cfg.spm_window, t, cfg.horizon, cfg.stride);
        std::vector<std::vector<Vec>> forecasts(origins.size(), std::vector<Vec>(cfg.horizon, Vec(n)));
        for (std::size_t oi = 0; oi < origins.size(); ++oi) {
            const std::size_t origin = origins[oi];
            for (std::size_t j = 0; j < n; ++j) {
                const UniformSeries col = prefix_column(series, j, origin);
                const GbmParams params = estimate_gbm(window(col, origin, cfg.spm_window), dt);
                SeededRng rng = base.substream(origin, j);
                const auto steps = forecast_spm_multistep(col.values.back(), params, cfg.horizon, dt, rng);
                for (std::size_t k = 0; k < cfg.horizon; ++k) forecasts[oi][k][j] = steps[k].sample;
            }
        }
        reports.push_back(score(series, origins, forecasts, cfg.horizon, method_label(Method::Spm), cfg, 0.0,
                                "prediction: sampled path (per-step mean also available via the spm subcommand)"));
    } else if (cfg.method == "mpm") {
        WindowPolicy policy = cfg.policy;
        if (!(policy.threshold > 0.0)) policy.threshold = default_threshold(series, policy, dt);
        policy.validate();
        const std::size_t first = policy.w_max + policy.lookback;
        const std::vector<std::size_t> origins = origin_list(first, t, cfg.horizon, cfg.stride);

        MpmOptions options;
        options.particles = cfg.particles;
        options.sigma_mode = cfg.sigma_mode;
        options.freeze_params = cfg.freeze_params;
        options.threads = cfg.threads;

        std::vector<std::vector<Vec>> corrected(origins.size());
        std::vector<std::vector<Vec>> standard(origins.size());
        for (std::size_t oi = 0; oi < origins.size(); ++oi) {
            const MultiSeries history = prefix_copy(series, origins[oi]);
            const auto steps =
                forecast_mpm_multistep(history, policy, cfg.horizon, dt, base.substream(origins[oi], 0), options);
            for (const MpmStep& step : steps) {
                corrected[oi].push_back(step.corrected);
                standard[oi].push_back(step.standard);
            }
        }
        reports.push_back(score(series, origins, standard, cfg.horizon, method_label(Method::MpmStandard), cfg,
                                policy.threshold, ""));
        reports.push_back(score(series, origins, corrected, cfg.horizon, method_label(Method::MpmCorrected), cfg,
                                policy.threshold, ""));
    } else if (cfg.method == "ari") {
        const std::size_t min_train = cfg.p_max + cfg.d_max + 4;
        const std::size_t train_end =
            std::max<std::size_t>(static_cast<std::size_t>(cfg.train_fraction * static_cast<double>(t)), min_train);
        if (train_end >= t) throw InsufficientData("training prefix leaves no backtest origins");

        std::vector<ArOrder> orders(n);
        for (std::size_t j = 0; j < n; ++j)
            orders[j] = select_order(prefix_column(series, j, train_end), cfg.p_max, cfg.d_max);

        const std::vector<std::size_t> origins = origin_list(train_end, t, cfg.horizon, cfg.stride);
        std::vector<std::vector<Vec>> forecasts(origins.size(), std::vector<Vec>(cfg.horizon, Vec(n)));
        for (std::size_t oi = 0; oi < origins.size(); ++oi) {
            for (std::size_t j = 0; j < n; ++j) {
                const UniformSeries col = prefix_column(series, j, origins[oi]);
                const ArModel model = fit_ar(col, orders[j]);
                const auto path = forecast_ar(model, col, cfg.horizon);
                for (std::size_t k = 0; k < cfg.horizon; ++k) forecasts[oi][k][j] = path[k];
            }
        }
        reports.push_back(
            score(series, origins, forecasts, cfg.horizon, method_label(Method::Ari), cfg, 0.0, kBaselineNote));
    } else if (cfg.method == "var") {
        const std::size_t min_train = cfg.p_max * n + cfg.var_d + n + 4;
        const std::size_t train_end =
            std::max<std::size_t>(static_cast<std::size_t>(cfg.train_fraction * static_cast<double>(t)), min_train);
        if (train_end >= t) throw InsufficientData("training prefix leaves no backtest origins");

        const std::size_t p = select_var_order(prefix_copy(series, train_end), cfg.p_max, cfg.var_d);
        const std::vector<std::size_t> origins = origin_list(train_end, t, cfg.horizon, cfg.stride);
        std::vector<std::vector<Vec>> forecasts(origins.size());
        for (std::size_t oi = 0; oi < origins.size(); ++oi) {
            const MultiSeries history = prefix_copy(series, origins[oi]);
            const VarModel model = fit_var(history, p, cfg.var_d);
            forecasts[oi] = forecast_var(model, history, cfg.horizon);
        }
        reports.push_back(
            score(series, origins, forecasts, cfg.horizon, method_label(Method::Var), cfg, 0.0, kBaselineNote));
    } else {
        throw ConfigError("unknown backtest method '" + cfg.method + "' (spm | mpm | ari | var)");
    }
    return reports;
}

namespace {

ordered_json error_pair_json(const ErrorPair& ep) {
    return ordered_json{{"mae", ep.mae}, {"rmse", ep.rmse}, {"count", ep.count}};
}

ErrorPair error_pair_from(const ordered_json& j) {
    return ErrorPair{j.at("mae").get<double>(), j.at("rmse").get<double>(), j.at("count").get<std::size_t>()};
}

} // namespace

std::string report_to_json(const BacktestReport& report) {
    ordered_json j;
    j["method"] = report.method;
    j["feature_names"] = report.feature_names;
    j["horizon"] = report.horizon;
    j["origins"] = report.origins;
    j["seed"] = report.seed;
    j["note"] = report.note;
    ordered_json pf = ordered_json::object();
    for (std::size_t f = 0; f < report.feature_names.size(); ++f) {
        ordered_json steps = ordered_json::array();
        for (const ErrorPair& ep : report.per_feature[f]) steps.push_back(error_pair_json(ep));
        pf[report.feature_names[f]] = std::move(steps);
    }
    j["per_feature"] = std::move(pf);
    ordered_json agg = ordered_json::array();
    for (const ErrorPair& ep : report.aggregate_norm) agg.push_back(error_pair_json(ep));
    j["aggregate_norm"] = std::move(agg);
    j["config_echo"] = ordered_json::parse(report.config_echo.empty() ? "{}" : report.config_echo);
    return j.dump(2) + "\n";
}

BacktestReport report_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    BacktestReport report;
    report.method = j.at("method").get<std::string>();
    report.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    report.horizon = j.at("horizon").get<std::size_t>();
    report.origins = j.at("origins").get<std::size_t>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.note = j.value("note", "");
    for (const std::string& name : report.feature_names) {
        std::vector<ErrorPair> steps;
        for (const auto& ep : j.at("per_feature").at(name)) steps.push_back(error_pair_from(ep));
        report.per_feature.push_back(std::move(steps));
    }
    for (const auto& ep : j.at("aggregate_norm")) report.aggregate_norm.push_back(error_pair_from(ep));
    report.config_echo = j.at("config_echo").dump();
    return report;
}

std::string horizon_curves_csv(const std::vector<BacktestReport>& reports) {
    std::ostringstream out;
    out << "method,feature,horizon,mae,rmse\n";
    for (const BacktestReport& r : reports) {
        for (std::size_t f = 0; f < r.feature_names.size(); ++f)
            for (std::size_t k = 0; k < r.horizon; ++k)
                out << r.method << ',' << r.feature_names[f] << ',' << k + 1 << ','
                    << fmt17(r.per_feature[f][k].mae) << ',' << fmt17(r.per_feature[f][k].rmse) << '\n';
        for (std::size_t k = 0; k < r.horizon; ++k) {
            double mae = 0.0, rmse = 0.0;
            for (std::size_t f = 0; f < r.feature_names.size(); ++f) {
                mae += r.per_feature[f][k].mae;
                rmse += r.per_feature[f][k].rmse;
            }
            const double nf = static_cast<double>(r.feature_names.size());
            out << r.method << ",__average__," << k + 1 << ',' << fmt17(mae / nf) << ',' << fmt17(rmse / nf)
                << '\n';
        }
    }
    return out.str();
}

ComparisonTable compare_methods(const std::vector<BacktestReport>& reports) {
    if (reports.empty()) throw ProtocolMismatch("no reports to compare");
    ComparisonTable table;
    table.features = reports.front().feature_names;
    table.horizon = reports.front().horizon;
    for (const BacktestReport& r : reports) {
        if (r.feature_names != table.features) throw ProtocolMismatch("feature sets differ across reports");
        if (r.horizon != table.horizon) throw ProtocolMismatch("horizons differ across reports");
        table.methods.push_back(r.method);
    }
    table.values.assign(table.features.size(),
                        std::vector<std::vector<ErrorPair>>(table.methods.size(),
                                                            std::vector<ErrorPair>(table.horizon)));
    for (std::size_t m = 0; m < reports.size(); ++m)
        for (std::size_t f = 0; f < table.features.size(); ++f)
            for (std::size_t k = 0; k < table.horizon; ++k)
                table.values[f][m][k] = reports[m].per_feature[f][k];
    return table;
}

namespace {

std::string best_methods(const ComparisonTable& table, std::size_t f, std::size_t k, bool use_rmse) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
        const ErrorPair& ep = table.values[f][m][k];
        best = std::min(best, use_rmse ? ep.rmse : ep.mae);
    }
    std::string names;
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
        const ErrorPair& ep = table.values[f][m][k];
        if ((use_rmse ? ep.rmse : ep.mae) == best) {
            if (!names.empty()) names += '|';
            names += table.methods[m];
        }
    }
    return names;
}

} // namespace

std::string comparison_to_csv(const ComparisonTable& table) {
    std::ostringstream out;
    out << "feature,horizon";
    for (const std::string& m : table.methods) out << ',' << m << "_mae";
    out << ",best_mae";
    for (const std::string& m : table.methods) out << ',' << m << "_rmse";
    out << ",best_rmse\n";
    for (std::size_t f = 0; f < table.features.size(); ++f)
        for (std::size_t k = 0; k < table.horizon; ++k) {
            out << table.features[f] << ',' << k + 1;
            for (std::size_t m = 0; m < table.methods.size(); ++m)
                out << ',' << fmt17(table.values[f][m][k].mae);
            out << ',' << best_methods(table, f, k, false);
            for (std::size_t m = 0; m < table.methods.size(); ++m)
                out << ',' << fmt17(table.values[f][m][k].rmse);
            out << ',' << best_methods(table, f, k, true) << '\n';
        }
    return out.str();
}

std::string comparison_to_json(const ComparisonTable& table) {
    ordered_json j;
    j["methods"] = table.methods;
    j["horizon"] = table.horizon;
    ordered_json features = ordered_json::object();
    for (std::size_t f = 0; f < table.features.size(); ++f) {
        ordered_json per_method = ordered_json::object();
        for (std::size_t m = 0; m < table.methods.size(); ++m) {
            ordered_json steps = ordered_json::array();
            for (std::size_t k = 0; k < table.horizon; ++k) steps.push_back(error_pair_json(table.values[f][m][k]));
            per_method[table.methods[m]] = std::move(steps);
        }
        ordered_json entry;
        entry["per_method"] = std::move(per_method);
        ordered_json best_mae = ordered_json::array();
        ordered_json best_rmse = ordered_json::array();
        for (std::size_t k = 0; k < table.horizon; ++k) {
            best_mae.push_back(best_methods(table, f, k, false));
            best_rmse.push_back(best_methods(table, f, k, true));
        }
        entry["best_mae"] = std::move(best_mae);
        entry["best_rmse"] = std::move(best_rmse);
        features[table.features[f]] = std::move(entry);
    }
    j["features"] = std::move(features);
    return j.dump(2) + "\n";
}

} // namespace driftcast
