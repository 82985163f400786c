#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftcast/baselines.hpp"
#include "driftcast/metrics.hpp"
#include "driftcast/mpm.hpp"
#include "driftcast/series.hpp"

namespace driftcast {

enum class Method { Spm, MpmStandard, MpmCorrected, Ari, Var };

std::string method_label(Method m);

struct BacktestConfig {
    std::string method = "mpm"; // spm | mpm | ari | var
    std::size_t horizon = 20;
    std::size_t stride = 1;
    std::uint64_t seed = 42;
    std::size_t threads = 1;

    // spm
    std::size_t spm_window = 200; // samples in the estimation window

    // mpm
    WindowPolicy policy;          // threshold <= 0 means: compute default per run
    std::size_t particles = 1000;
    SigmaMode sigma_mode;
    bool freeze_params = false;

    // baselines
    std::size_t p_max = 5;
    std::size_t d_max = 2;
    std::size_t var_d = 1;
    double train_fraction = 0.85;
};

struct BacktestReport {
    std::string method;
    std::vector<std::string> feature_names;
    std::size_t horizon = 0;
    std::size_t origins = 0; // scored forecast origins
    std::uint64_t seed = 0;
    // per_feature[f][j]: errors of step j+1 forecasts for feature f
    std::vector<std::vector<ErrorPair>> per_feature;
    // aggregate_norm[j]: vector-norm errors of step j+1 forecasts
    std::vector<ErrorPair> aggregate_norm;
    std::string config_echo; // JSON text, sufficient to reproduce the run
    std::string note;        // e.g. baseline simplification disclosure
};

// Rolling-origin evaluation. Forecasts made at origin t use rows [0, t)
// only; step j is scored against row t + j - 1... see README for the
// exact alignment. Origins whose horizon passes the series end are
// dropped. MPM produces two reports (standard and corrected estimator),
// every other method one.
std::vector<BacktestReport> run_backtest(const MultiSeries& series, const BacktestConfig& config);

// Deterministic JSON bytes: identical (series, config, seed) give
// identical text.
std::string report_to_json(const BacktestReport& report);
BacktestReport report_from_json(const std::string& text);

// Long-format plot data: method, feature, horizon, mae, rmse. Includes an
// across-feature average row per horizon labeled "__average__".
std::string horizon_curves_csv(const std::vector<BacktestReport>& reports);

struct ComparisonTable {
    std::vector<std::string> methods;
    std::vector<std::string> features;
    std::size_t horizon = 0;
    // values[f][m][j] for feature f, method m, horizon step j+1
    std::vector<std::vector<std::vector<ErrorPair>>> values;
};

// Requires identical feature sets and horizons across reports.
ComparisonTable compare_methods(const std::vector<BacktestReport>& reports);

// CSV with one row per (feature, horizon); best method per metric is
// named in trailing columns, ties joined with '|'.
std::string comparison_to_csv(const ComparisonTable& table);
std::string comparison_to_json(const ComparisonTable& table);

} // namespace driftcast
