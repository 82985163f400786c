#pragma once

#include <cstddef>
#include <vector>

#include "driftcast/rng.hpp"
#include "driftcast/series.hpp"

namespace driftcast {

struct GbmSpec {
    double s0 = 1.0;
    double a = 0.0;
    double b = 0.0; // >= 0
    std::size_t n_steps = 1;
    double dt = 1.0;
};

struct RegimeOverride {
    std::size_t start_index = 0;
    Vec drift;
    Mat diffusion;
};

struct LinearSdeSpec {
    Vec x0;
    Vec drift;     // constant A
    Mat diffusion; // constant B, symmetric PSD
    std::size_t n_steps = 1;
    double dt = 1.0;
    std::vector<RegimeOverride> schedule; // strictly increasing start indices
    std::vector<std::string> feature_names; // optional; defaults to x0..x{n-1}
};

// Exact log-normal stepping (not Euler), so estimator tests face no
// discretization bias. n_steps transitions, n_steps + 1 values.
UniformSeries simulate_gbm(const GbmSpec& spec, SeededRng rng);

// Euler-Maruyama stepping with regime overrides applied at scheduled
// indices.
MultiSeries simulate_linear_sde(const LinearSdeSpec& spec, SeededRng rng);

// Invented 8-channel engine-like preset: two slow thermal channels, two
// volatile exhaust-like channels, three small-scale pressure channels and
// one regime-switching rpm-like channel. Values are demo presets, not
// measurements.
LinearSdeSpec engine_preset(std::size_t n_steps, double dt);

} // namespace driftcast
