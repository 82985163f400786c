// driftcast: forecast uniformly sampled sensor series with stochastic
// models (GBM single-particle, adaptive multi-particle SDE ensembles)
// and AR/VAR baselines, plus a rolling-origin backtest harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "driftcast/backtest.hpp"
#include "driftcast/baselines.hpp"
#include "driftcast/errors.hpp"
#include "driftcast/mpm.hpp"
#include "driftcast/series.hpp"
#include "driftcast/spm.hpp"
#include "driftcast/synth.hpp"

namespace {

using namespace driftcast;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- key=value config files -------------------------------------------

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> load_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
    }
    return kv;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    T out;
    in >> out;
    if (in.fail()) throw ConfigError("bad value '" + text + "' for key '" + key + "'");
    return out;
}

template <>
std::string parse_value<std::string>(const std::string&, const std::string& text) {
    return text;
}

template <>
bool parse_value<bool>(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("bad boolean '" + text + "' for key '" + key + "'");
}

// Precedence: CLI flag > config file > built-in default.
template <typename T>
void merge_key(const std::map<std::string, std::string>& kv, const std::string& key,
               const CLI::Option* opt, T& target) {
    if (opt != nullptr && opt->count() > 0) return;
    const auto it = kv.find(key);
    if (it != kv.end()) target = parse_value<T>(key, it->second);
}

Vec parse_list(const std::string& key, const std::string& text) {
    Vec out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(parse_value<double>(key, trim(cell)));
    if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
    return out;
}

std::vector<std::string> parse_names(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(trim(cell));
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

std::string report_filename(const std::string& method_label) {
    std::string slug;
    for (char c : method_label) slug += c == '-' ? '_' : static_cast<char>(std::tolower(c));
    return "report_" + slug + ".json";
}

std::size_t resolve_column(const MultiSeries& series, const std::string& column) {
    const auto& names = series.feature_names();
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == column) return j;
    try {
        const std::size_t idx = parse_value<std::size_t>("column", column);
        if (idx < series.dimension()) return idx;
    } catch (const ConfigError&) {
    }
    throw ConfigError("column '" + column + "' not found (names: use header, indices: 0.." +
                      std::to_string(series.dimension() - 1) + ")");
}

Mat parse_diffusion(std::size_t n, const std::map<std::string, std::string>& kv,
                    const std::string& full_key, const std::string& diag_key) {
    Mat b(n, n);
    if (kv.count(full_key)) {
        const Vec flat = parse_list(full_key, kv.at(full_key));
        if (flat.size() != n * n)
            throw ConfigError(full_key + " needs " + std::to_string(n * n) + " row-major entries");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) b(i, j) = flat[i * n + j];
    } else if (kv.count(diag_key)) {
        const Vec diag = parse_list(diag_key, kv.at(diag_key));
        if (diag.size() != n) throw ConfigError(diag_key + " needs " + std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j) b(j, j) = diag[j];
    } else {
        throw ConfigError("spec needs " + full_key + " or " + diag_key);
    }
    return b;
}

constexpr const char* kConfigKeyDoc =
    "Config file: one key=value per line, '#' comments. Keys (defaults in\n"
    "parentheses): seed (42), threads (hardware), dt (1), spm.window (200),\n"
    "spm.horizon (10), spm.bounds (paper|quantile, paper), spm.confidence (0.9),\n"
    "window.base (100), window.min (50), window.max (200), window.threshold\n"
    "(auto: 2 x median drift magnitude), window.lookback (= window.min),\n"
    "mpm.particles (1000), mpm.sigma_mode (diffusion_trace|fixed:<v>|\n"
    "mean_distance), mpm.horizon (20), mpm.freeze_params (false),\n"
    "baseline.p_max (5), baseline.d_max (2), baseline.var_d (1),\n"
    "baseline.train_fraction (0.85), backtest.method (mpm), backtest.horizon\n"
    "(20), backtest.stride (1). CLI flags override file values.";

// ---- subcommand state ---------------------------------------------------

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 42;
    std::size_t threads = 0; // 0: hardware concurrency
    double dt = 1.0;
    std::string out_dir = ".";
    std::string input;
    bool timestamp_column = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_input) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--seed", args.seed, "random seed (config key: seed)")->capture_default_str();
    cmd->add_option("--threads", args.threads, "worker threads, 0 = hardware (config key: threads)");
    cmd->add_option("--dt", args.dt, "sampling interval (config key: dt)")->capture_default_str();
    cmd->add_option("--out-dir", args.out_dir, "artifact directory")->capture_default_str();
    auto* input = cmd->add_option("--input", args.input, "input CSV (header row required)");
    if (needs_input) input->required();
    cmd->add_flag("--timestamp-column", args.timestamp_column,
                  "treat the first CSV column as a timestamp and skip it");
}

void merge_common(CLI::App* cmd, CommonArgs& args, const std::map<std::string, std::string>& kv) {
    merge_key(kv, "seed", cmd->get_option("--seed"), args.seed);
    merge_key(kv, "threads", cmd->get_option("--threads"), args.threads);
    merge_key(kv, "dt", cmd->get_option("--dt"), args.dt);
}

std::size_t effective_threads(std::size_t requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

WindowPolicy merge_policy(CLI::App* cmd, WindowPolicy policy, bool lookback_set,
                          const std::map<std::string, std::string>& kv) {
    merge_key(kv, "window.base", cmd->get_option("--window-base"), policy.w_base);
    merge_key(kv, "window.min", cmd->get_option("--window-min"), policy.w_min);
    merge_key(kv, "window.max", cmd->get_option("--window-max"), policy.w_max);
    merge_key(kv, "window.threshold", cmd->get_option("--window-threshold"), policy.threshold);
    merge_key(kv, "window.lookback", cmd->get_option("--window-lookback"), policy.lookback);
    if (!lookback_set && !kv.count("window.lookback")) policy.lookback = policy.w_min;
    return policy;
}

// ---- simulate -----------------------------------------------------------

int run_simulate(const CommonArgs& common, const std::string& model, const std::string& spec_path,
                 const std::string& out_path) {
    const std::map<std::string, std::string> spec = load_kv(spec_path);
    const SeededRng rng(common.seed);

    auto num = [&](const std::string& key, double fallback) {
        return spec.count(key) ? parse_value<double>(key, spec.at(key)) : fallback;
    };
    const double dt = spec.count("dt") ? parse_value<double>("dt", spec.at("dt")) : common.dt;
    const std::size_t n_steps =
        spec.count("n_steps") ? parse_value<std::size_t>("n_steps", spec.at("n_steps")) : 1000;

    MultiSeries series;
    if (model == "gbm") {
        GbmSpec g;
        g.s0 = num("s0", 1.0);
        g.a = num("a", 0.0);
        g.b = num("b", 0.0);
        g.dt = dt;
        g.n_steps = n_steps;
        const UniformSeries path = simulate_gbm(g, rng);
        series = MultiSeries(path.size(), 1, dt, {"gbm"});
        for (std::size_t i = 0; i < path.size(); ++i) series(i, 0) = path.values[i];
    } else if (model == "linear") {
        LinearSdeSpec s;
        if (spec.count("preset")) {
            const std::string preset = spec.at("preset");
            if (preset != "engine") throw ConfigError("unknown preset '" + preset + "'");
            s = engine_preset(n_steps, dt);
        } else {
            s.x0 = parse_list("x0", spec.count("x0") ? spec.at("x0") : "");
            s.drift = parse_list("drift", spec.count("drift") ? spec.at("drift") : "");
            s.diffusion = parse_diffusion(s.x0.size(), spec, "diffusion", "diffusion_diag");
            s.dt = dt;
            s.n_steps = n_steps;
            if (spec.count("names")) s.feature_names = parse_names(spec.at("names"));
            if (spec.count("regime_start")) {
                RegimeOverride r;
                r.start_index = parse_value<std::size_t>("regime_start", spec.at("regime_start"));
                r.drift = spec.count("regime_drift") ? parse_list("regime_drift", spec.at("regime_drift"))
                                                     : s.drift;
                r.diffusion = spec.count("regime_diffusion") || spec.count("regime_diffusion_diag")
                                  ? parse_diffusion(s.x0.size(), spec, "regime_diffusion",
                                                    "regime_diffusion_diag")
                                  : s.diffusion;
                s.schedule.push_back(std::move(r));
            }
        }
        series = simulate_linear_sde(s, rng);
    } else {
        throw ConfigError("unknown model '" + model + "' (gbm | linear)");
    }

    write_csv(series, out_path);
    std::cerr << "simulate: wrote " << series.size() << " rows x " << series.dimension()
              << " columns to " << out_path << "\n";
    return 0;
}

// ---- spm ----------------------------------------------------------------

int run_spm(const CommonArgs& common, std::size_t window_size, std::size_t horizon,
            const std::string& column, const std::string& bounds, double confidence) {
    const MultiSeries series = load_csv(common.input, common.dt, common.timestamp_column);
    const std::size_t col = resolve_column(series, column);
    const UniformSeries values = series.column(col);

    SpmBoundsMode mode;
    if (bounds == "paper")
        mode = SpmBoundsMode::PaperVariance;
    else if (bounds == "quantile")
        mode = SpmBoundsMode::LogNormalQuantile;
    else
        throw ConfigError("unknown bounds mode '" + bounds + "' (paper | quantile)");

    const GbmParams params = estimate_gbm(window(values, values.size(), window_size), common.dt);
    SeededRng rng(common.seed);
    const auto steps =
        forecast_spm_multistep(values.values.back(), params, horizon, common.dt, rng, mode, confidence);

    std::ostringstream csv;
    csv << "step,sample,mean,median,mode,upper,lower\n";
    for (std::size_t k = 0; k < steps.size(); ++k)
        csv << k + 1 << ',' << fmt17(steps[k].sample) << ',' << fmt17(steps[k].mean) << ','
            << fmt17(steps[k].median) << ',' << fmt17(steps[k].mode) << ',' << fmt17(steps[k].upper)
            << ',' << fmt17(steps[k].lower) << '\n';
    const std::string out_path = join_path(common.out_dir, "forecast_spm.csv");
    write_text(out_path, csv.str());
    std::cerr << "spm: a=" << params.a << " b=" << params.b << " window=" << params.window_size
              << ", wrote " << out_path << "\n";
    return 0;
}

// ---- mpm ----------------------------------------------------------------

int run_mpm(const CommonArgs& common, const WindowPolicy& policy_in, const MpmOptions& options_in,
            std::size_t horizon) {
    const MultiSeries series = load_csv(common.input, common.dt, common.timestamp_column);

    WindowPolicy policy = policy_in;
    if (!(policy.threshold > 0.0)) policy.threshold = default_threshold(series, policy, common.dt);
    policy.validate();

    MpmOptions options = options_in;
    options.threads = effective_threads(options.threads);

    const SeededRng rng(common.seed);
    const auto steps = forecast_mpm_multistep(series, policy, horizon, common.dt, rng, options);

    std::ostringstream csv;
    csv << "step";
    for (const std::string& name : series.feature_names()) csv << ",corrected_" << name;
    for (const std::string& name : series.feature_names()) csv << ",standard_" << name;
    csv << ",window,drift_magnitude\n";
    for (std::size_t k = 0; k < steps.size(); ++k) {
        csv << k + 1;
        for (double v : steps[k].corrected) csv << ',' << fmt17(v);
        for (double v : steps[k].standard) csv << ',' << fmt17(v);
        csv << ',' << steps[k].decision.chosen_width << ','
            << fmt17(steps[k].decision.drift_magnitude) << '\n';
    }
    const std::string out_path = join_path(common.out_dir, "forecast_mpm.csv");
    write_text(out_path, csv.str());
    std::cerr << "mpm: threshold=" << policy.threshold << " first-window="
              << steps.front().decision.chosen_width << ", wrote " << out_path << "\n";
    return 0;
}

// ---- backtest / compare ---------------------------------------------------

int run_backtest_cmd(const CommonArgs& common, BacktestConfig cfg, const std::string& method) {
    const MultiSeries series = load_csv(common.input, common.dt, common.timestamp_column);
    cfg.seed = common.seed;
    cfg.threads = effective_threads(common.threads);

    std::vector<std::string> methods;
    if (method == "all")
        methods = {"spm", "mpm", "ari", "var"};
    else
        methods = {method};

    std::vector<BacktestReport> reports;
    for (const std::string& m : methods) {
        cfg.method = m;
        std::cerr << "backtest: running " << m << "\n";
        for (BacktestReport& r : run_backtest(series, cfg)) reports.push_back(std::move(r));
    }
    for (const BacktestReport& r : reports) {
        const std::string path = join_path(common.out_dir, report_filename(r.method));
        write_text(path, report_to_json(r));
        std::cerr << "backtest: wrote " << path << " (" << r.origins << " origins)\n";
    }
    write_text(join_path(common.out_dir, "horizon_curves.csv"), horizon_curves_csv(reports));
    if (reports.size() > 1)
        write_text(join_path(common.out_dir, "comparison.csv"),
                   comparison_to_csv(compare_methods(reports)));
    return 0;
}

int run_compare(const CommonArgs& common, const std::vector<std::string>& report_paths) {
    std::vector<BacktestReport> reports;
    for (const std::string& path : report_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open report '" + path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        reports.push_back(report_from_json(text.str()));
    }
    const ComparisonTable table = compare_methods(reports);
    write_text(join_path(common.out_dir, "comparison.csv"), comparison_to_csv(table));
    write_text(join_path(common.out_dir, "comparison.json"), comparison_to_json(table));
    write_text(join_path(common.out_dir, "horizon_curves.csv"), horizon_curves_csv(reports));
    std::cerr << "compare: " << reports.size() << " reports, wrote comparison.csv, comparison.json, "
              << "horizon_curves.csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"driftcast: stochastic forecasting for uniformly sampled sensor series"};
    app.require_subcommand(1);
    app.footer(kConfigKeyDoc);

    // simulate
    CommonArgs sim_args;
    std::string sim_model, sim_spec, sim_out = "out.csv";
    auto* sim = app.add_subcommand("simulate", "generate a synthetic series with known parameters");
    add_common(sim, sim_args, false);
    sim->add_option("--model", sim_model, "gbm | linear")->required();
    sim->add_option("--spec", sim_spec, "key=value model spec file")->required();
    sim->add_option("--out", sim_out, "output CSV path")->capture_default_str();

    // spm
    CommonArgs spm_args;
    std::size_t spm_window = 200, spm_horizon = 10;
    std::string spm_column = "0", spm_bounds = "paper";
    double spm_confidence = 0.9;
    auto* spm = app.add_subcommand("spm", "single-particle GBM forecast of one column");
    add_common(spm, spm_args, true);
    spm->add_option("--window", spm_window, "estimation window samples (config key: spm.window)")
        ->capture_default_str();
    spm->add_option("--horizon", spm_horizon, "forecast steps (config key: spm.horizon)")
        ->capture_default_str();
    spm->add_option("--column", spm_column, "feature name or 0-based index")->capture_default_str();
    spm->add_option("--bounds", spm_bounds, "paper | quantile (config key: spm.bounds)")
        ->capture_default_str();
    spm->add_option("--confidence", spm_confidence, "quantile-bounds level (config key: spm.confidence)")
        ->capture_default_str();

    // mpm
    CommonArgs mpm_args;
    WindowPolicy mpm_policy;
    std::size_t mpm_horizon = 20, mpm_particles = 1000;
    std::string mpm_sigma = "diffusion_trace";
    bool mpm_freeze = false;
    auto* mpm = app.add_subcommand("mpm", "multi-particle SDE ensemble forecast, all columns");
    add_common(mpm, mpm_args, true);
    mpm->add_option("--horizon", mpm_horizon, "forecast steps (config key: mpm.horizon)")
        ->capture_default_str();
    mpm->add_option("--particles", mpm_particles, "ensemble size (config key: mpm.particles)")
        ->capture_default_str();
    mpm->add_option("--sigma-mode", mpm_sigma,
                    "diffusion_trace | fixed:<v> | mean_distance (config key: mpm.sigma_mode)")
        ->capture_default_str();
    mpm->add_flag("--freeze-params", mpm_freeze,
                  "pin step-1 SDE parameters across the horizon (config key: mpm.freeze_params)");
    mpm->add_option("--window-base", mpm_policy.w_base, "nominal window (config key: window.base)")
        ->capture_default_str();
    mpm->add_option("--window-min", mpm_policy.w_min, "transient window (config key: window.min)")
        ->capture_default_str();
    mpm->add_option("--window-max", mpm_policy.w_max, "steady window (config key: window.max)")
        ->capture_default_str();
    mpm->add_option("--window-threshold", mpm_policy.threshold,
                    "drift-magnitude threshold, <= 0 selects the data-relative default "
                    "(config key: window.threshold)");
    auto* mpm_lookback = mpm->add_option("--window-lookback", mpm_policy.lookback,
                                         "drift-magnitude lookback L (config key: window.lookback)");

    // backtest
    CommonArgs bt_args;
    BacktestConfig bt_cfg;
    std::string bt_method = "mpm";
    auto* bt = app.add_subcommand("backtest", "rolling-origin evaluation, one report per method");
    add_common(bt, bt_args, true);
    bt->add_option("--method", bt_method, "spm | mpm | ari | var | all (config key: backtest.method)")
        ->capture_default_str();
    bt->add_option("--horizon", bt_cfg.horizon, "forecast steps per origin (config key: backtest.horizon)")
        ->capture_default_str();
    bt->add_option("--stride", bt_cfg.stride, "origin spacing (config key: backtest.stride)")
        ->capture_default_str();
    bt->add_option("--window", bt_cfg.spm_window, "SPM window (config key: spm.window)")
        ->capture_default_str();
    bt->add_option("--particles", bt_cfg.particles, "MPM ensemble size (config key: mpm.particles)")
        ->capture_default_str();
    std::string bt_sigma = "diffusion_trace";
    bt->add_option("--sigma-mode", bt_sigma, "MPM weighting scale (config key: mpm.sigma_mode)")
        ->capture_default_str();
    bt->add_flag("--freeze-params", bt_cfg.freeze_params,
                 "pin step-1 MPM parameters (config key: mpm.freeze_params)");
    bt->add_option("--window-base", bt_cfg.policy.w_base, "config key: window.base")
        ->capture_default_str();
    bt->add_option("--window-min", bt_cfg.policy.w_min, "config key: window.min")->capture_default_str();
    bt->add_option("--window-max", bt_cfg.policy.w_max, "config key: window.max")->capture_default_str();
    bt->add_option("--window-threshold", bt_cfg.policy.threshold,
                   "config key: window.threshold, <= 0 selects the data-relative default");
    auto* bt_lookback =
        bt->add_option("--window-lookback", bt_cfg.policy.lookback, "config key: window.lookback");
    bt->add_option("--p-max", bt_cfg.p_max, "AR lag search bound (config key: baseline.p_max)")
        ->capture_default_str();
    bt->add_option("--d-max", bt_cfg.d_max, "AR differencing bound (config key: baseline.d_max)")
        ->capture_default_str();
    bt->add_option("--var-d", bt_cfg.var_d, "VAR differencing order (config key: baseline.var_d)")
        ->capture_default_str();
    bt->add_option("--train-fraction", bt_cfg.train_fraction,
                   "baseline training prefix (config key: baseline.train_fraction)")
        ->capture_default_str();

    // compare
    CommonArgs cmp_args;
    std::vector<std::string> cmp_reports;
    auto* cmp = app.add_subcommand("compare", "merge backtest reports into comparison tables");
    add_common(cmp, cmp_args, false);
    cmp->add_option("--reports", cmp_reports, "report_*.json files to merge")
        ->required()
        ->expected(-2);

    try {
        app.parse(argc, argv);

        CLI::App* active = app.get_subcommands().front();
        CommonArgs* common = nullptr;
        if (active == sim) common = &sim_args;
        else if (active == spm) common = &spm_args;
        else if (active == mpm) common = &mpm_args;
        else if (active == bt) common = &bt_args;
        else common = &cmp_args;

        std::map<std::string, std::string> kv;
        if (!common->config_path.empty()) kv = load_kv(common->config_path);
        merge_common(active, *common, kv);

        if (active == sim) return run_simulate(sim_args, sim_model, sim_spec, sim_out);

        if (active == spm) {
            merge_key(kv, "spm.window", spm->get_option("--window"), spm_window);
            merge_key(kv, "spm.horizon", spm->get_option("--horizon"), spm_horizon);
            merge_key(kv, "spm.bounds", spm->get_option("--bounds"), spm_bounds);
            merge_key(kv, "spm.confidence", spm->get_option("--confidence"), spm_confidence);
            return run_spm(spm_args, spm_window, spm_horizon, spm_column, spm_bounds, spm_confidence);
        }

        if (active == mpm) {
            merge_key(kv, "mpm.horizon", mpm->get_option("--horizon"), mpm_horizon);
            merge_key(kv, "mpm.particles", mpm->get_option("--particles"), mpm_particles);
            merge_key(kv, "mpm.sigma_mode", mpm->get_option("--sigma-mode"), mpm_sigma);
            merge_key(kv, "mpm.freeze_params", mpm->get_option("--freeze-params"), mpm_freeze);
            MpmOptions options;
            options.particles = mpm_particles;
            options.sigma_mode = SigmaMode::parse(mpm_sigma);
            options.freeze_params = mpm_freeze;
            options.threads = mpm_args.threads;
            const WindowPolicy policy = merge_policy(mpm, mpm_policy, mpm_lookback->count() > 0, kv);
            return run_mpm(mpm_args, policy, options, mpm_horizon);
        }

        if (active == bt) {
            merge_key(kv, "backtest.method", bt->get_option("--method"), bt_method);
            merge_key(kv, "backtest.horizon", bt->get_option("--horizon"), bt_cfg.horizon);
            merge_key(kv, "backtest.stride", bt->get_option("--stride"), bt_cfg.stride);
            merge_key(kv, "spm.window", bt->get_option("--window"), bt_cfg.spm_window);
            merge_key(kv, "mpm.particles", bt->get_option("--particles"), bt_cfg.particles);
            merge_key(kv, "mpm.sigma_mode", bt->get_option("--sigma-mode"), bt_sigma);
            merge_key(kv, "mpm.freeze_params", bt->get_option("--freeze-params"), bt_cfg.freeze_params);
            merge_key(kv, "baseline.p_max", bt->get_option("--p-max"), bt_cfg.p_max);
            merge_key(kv, "baseline.d_max", bt->get_option("--d-max"), bt_cfg.d_max);
            merge_key(kv, "baseline.var_d", bt->get_option("--var-d"), bt_cfg.var_d);
            merge_key(kv, "baseline.train_fraction", bt->get_option("--train-fraction"),
                      bt_cfg.train_fraction);
            bt_cfg.sigma_mode = SigmaMode::parse(bt_sigma);
            bt_cfg.policy = merge_policy(bt, bt_cfg.policy, bt_lookback->count() > 0, kv);
            return run_backtest_cmd(bt_args, bt_cfg, bt_method);
        }

        return run_compare(cmp_args, cmp_reports);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const driftcast::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Data ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
