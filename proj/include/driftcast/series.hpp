#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "driftcast/linalg.hpp"

namespace driftcast {

// Uniformly sampled scalar series. Values are immutable after
// construction by convention; mutation means building a new series.
struct UniformSeries {
    Vec values;
    double dt = 1.0;
    std::string name;

    std::size_t size() const { return values.size(); }
};

// Uniformly sampled vector series, T rows of dimension n, row-major.
class MultiSeries {
public:
    MultiSeries() = default;
    MultiSeries(std::size_t t, std::size_t n, double dt, std::vector<std::string> feature_names);

    std::size_t size() const { return t_; }      // T
    std::size_t dimension() const { return n_; } // n
    double dt() const { return dt_; }
    const std::vector<std::string>& feature_names() const { return names_; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

    UniformSeries column(std::size_t j) const;

    void append_row(std::span<const double> row);

private:
    std::size_t t_ = 0;
    std::size_t n_ = 0;
    double dt_ = 1.0;
    std::vector<std::string> names_;
    std::vector<double> data_;
};

// Half-open index range [start, end) into a parent series.
struct WindowView {
    const MultiSeries* parent = nullptr;
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    std::span<const double> row(std::size_t k) const { return parent->row(start + k); }
};

struct ScalarWindow {
    const UniformSeries* parent = nullptr;
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    double at(std::size_t k) const { return parent->values[start + k]; }
};

WindowView window(const MultiSeries& series, std::size_t end_index, std::size_t width);
ScalarWindow window(const UniformSeries& series, std::size_t end_index, std::size_t width);

// RFC-4180-style CSV with a mandatory header row. Timestamps, when
// present as the first column, are skipped; dt always comes from the
// caller. Rejects NaN/Inf and ragged rows.
MultiSeries load_csv(const std::string& path, double dt, bool has_timestamp_column = false);

// 17 significant digits, enough to round-trip doubles bit-exactly.
void write_csv(const MultiSeries& series, const std::string& path);

} // namespace driftcast
