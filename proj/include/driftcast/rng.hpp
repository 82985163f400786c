#pragma once

#include <cstdint>
#include <vector>

#include "driftcast/linalg.hpp"

namespace driftcast {

// Deterministic splittable random source. The generator is a SplitMix64
// walk whose starting state is a hash of (seed, stream); substreams are
// derived by rehashing with (step, particle) so that parallel consumers
// see the same draws as a serial run.
//
// Normal variates use the inverse-CDF method (Acklam's rational
// approximation with one Halley refinement). The algorithm is frozen:
// changing it invalidates recorded regression values.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64();

    // Uniform draw on (0, 1), 53-bit resolution, never returns 0 or 1.
    double next_uniform();

    double standard_normal();

    // n independent N(0, dt) coordinates.
    Vec wiener_increment(std::size_t n, double dt);

    // Statistically independent substream keyed by (seed, stream, step, particle).
    SeededRng substream(std::uint64_t step_index, std::uint64_t particle_index) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t state_;
};

// Quantile of the standard normal distribution (shared with SPM's
// optional quantile bounds).
double normal_quantile(double p);

} // namespace driftcast
