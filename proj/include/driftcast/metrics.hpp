#pragma once

#include <cstddef>
#include <vector>

#include "driftcast/linalg.hpp"

namespace driftcast {

struct ErrorPair {
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t count = 0;
};

struct MaeRmseResult {
    std::vector<ErrorPair> per_feature; // scalar errors per coordinate
    ErrorPair aggregate_norm;           // vector-norm errors
};

// Per-feature values use scalar absolute/squared errors; the aggregate
// uses Euclidean norms of the error vectors. Both are reported because
// the two conventions differ for n > 1.
MaeRmseResult mae_rmse(const std::vector<Vec>& actual, const std::vector<Vec>& predicted);

} // namespace driftcast
