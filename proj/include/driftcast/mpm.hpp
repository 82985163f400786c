#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "driftcast/rng.hpp"
#include "driftcast/series.hpp"

namespace driftcast {

// ---- Estimation (drift stencils, diffusion matrix, adaptive window) ----

struct DriftSamples {
    Mat samples; // W x n per-time drift estimates
    Vec mean;    // column averages, the drift vector A
};

struct SdeParams {
    Vec drift;        // A
    Mat covariance;   // C, symmetric PSD (after clamping)
    Mat diffusion;    // B = U sqrt(Sigma) U^T, symmetric PSD
    std::size_t window_used = 0;
    double clamped_mass = 0.0; // magnitude of the most negative eigenvalue of C
};

struct WindowPolicy {
    std::size_t w_base = 100;
    std::size_t w_min = 50;
    std::size_t w_max = 200;
    double threshold = 0.0; // must be > 0 before select_window
    std::size_t lookback = 50; // L; defaults to w_min when built from config

    void validate() const; // 5 <= w_min <= w_base <= w_max, lookback >= 1, threshold > 0
};

enum class Regime { Transient, Steady, Nominal };

struct WindowDecision {
    double drift_magnitude = 0.0; // D(t_i)
    std::size_t chosen_width = 0;
    Regime regime = Regime::Nominal;
};

// Per-time drift estimates over a window of W >= 5 rows: fourth-order
// central stencil on interior indices, first-order forward difference on
// the two leading and the penultimate index, backward difference on the
// final index.
DriftSamples estimate_drift(const WindowView& window, double dt);

SdeParams estimate_diffusion(const DriftSamples& drift, double dt);

// D = ||X(t_i) - X(t_{i-L})|| / (L dt) with t_i the last row before
// end_index; strict inequalities, equality falls to the base window.
WindowDecision select_window(const MultiSeries& series, std::size_t end_index,
                             const WindowPolicy& policy, double dt);

// Data-relative default: 2 x median of D over the first w_max + L samples.
double default_threshold(const MultiSeries& series, const WindowPolicy& policy, double dt);

// ---- Simulation (Euler-Maruyama ensemble, weighting correction) ----

struct Ensemble {
    Mat particles; // M x n next-step states
    Vec base_state;
    SdeParams params;
    double dt = 0.0;
};

enum class SigmaKind { DiffusionTrace, Fixed, MeanDistance };

struct SigmaMode {
    SigmaKind kind = SigmaKind::DiffusionTrace;
    double fixed_value = 0.0; // sigma itself when kind == Fixed

    static SigmaMode parse(const std::string& text); // "diffusion_trace" | "fixed:<v>" | "mean_distance"
    std::string to_string() const;
};

struct WeightedEnsemble {
    Mat residuals;   // M x n, r^(p) = X^(p) - (X + A dt)
    Vec distances;   // d_p = ||r^(p)||^2
    Vec weights;     // normalized, sum to 1
    double sigma = 0.0;
    Vec standard;    // unweighted particle mean
    Vec corrected;   // weight-normalized mean
};

// Each particle uses an independent Wiener increment from
// rng.substream(0, p), so serial and parallel fills agree bit-exactly.
Ensemble evolve_ensemble(const Vec& base_state, const SdeParams& params, double dt, std::size_t m,
                         const SeededRng& rng, std::size_t threads = 1);

Vec standard_estimator(const Ensemble& ensemble);

// Exponential residual kernel w_p = exp(-d_p / 2 sigma^2), normalized in
// log space. A non-positive sigma^2 (B = 0) collapses to uniform weights.
WeightedEnsemble weight_and_correct(const Ensemble& ensemble, const SigmaMode& sigma_mode);

struct MpmStep {
    Vec corrected;
    Vec standard;
    WindowDecision decision;
};

struct MpmOptions {
    std::size_t particles = 1000;
    SigmaMode sigma_mode;
    bool freeze_params = false;
    std::size_t threads = 1;
};

// Steps 2..k append the previous corrected estimate as a pseudo-observation
// and rerun the full select/estimate/evolve/weight loop (unless
// freeze_params pins the step-1 parameters).
std::vector<MpmStep> forecast_mpm_multistep(const MultiSeries& series, const WindowPolicy& policy,
                                            std::size_t horizon, double dt, const SeededRng& rng,
                                            const MpmOptions& options);

} // namespace driftcast
