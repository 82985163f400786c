#include "driftcast/metrics.hpp"

#include <cmath>

#include "driftcast/errors.hpp"

namespace driftcast {

MaeRmseResult mae_rmse(const std::vector<Vec>& actual, const std::vector<Vec>& predicted) {
    if (actual.size() != predicted.size() || actual.empty())
        throw LengthMismatch("mae_rmse needs equal, non-empty forecast lists");
    const std::size_t n = actual.front().size();
    const std::size_t count = actual.size();
    for (std::size_t i = 0; i < count; ++i)
        if (actual[i].size() != n || predicted[i].size() != n)
            throw DimensionMismatch("mae_rmse vector dimensions");

    MaeRmseResult out;
    out.per_feature.assign(n, ErrorPair{0.0, 0.0, count});
    out.aggregate_norm.count = count;
    for (std::size_t i = 0; i < count; ++i) {
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double e = predicted[i][j] - actual[i][j];
            out.per_feature[j].mae += std::abs(e);
            out.per_feature[j].rmse += e * e;
            norm_sq += e * e;
        }
        out.aggregate_norm.mae += std::sqrt(norm_sq);
        out.aggregate_norm.rmse += norm_sq;
    }
    const double inv = 1.0 / static_cast<double>(count);
    for (auto& ep : out.per_feature) {
        ep.mae *= inv;
        ep.rmse = std::sqrt(ep.rmse * inv);
    }
    out.aggregate_norm.mae *= inv;
    out.aggregate_norm.rmse = std::sqrt(out.aggregate_norm.rmse * inv);
    return out;
}

} // namespace driftcast
