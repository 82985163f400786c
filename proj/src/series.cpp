#include "driftcast/series.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "driftcast/errors.hpp"

namespace driftcast {

MultiSeries::MultiSeries(std::size_t t, std::size_t n, double dt, std::vector<std::string> feature_names)
    : t_(t), n_(n), dt_(dt), names_(std::move(feature_names)), data_(t * n, 0.0) {
    if (n_ < 1) throw DimensionMismatch("MultiSeries needs n >= 1");
    if (!(dt_ > 0.0)) throw ConfigError("MultiSeries needs dt > 0");
    if (names_.size() != n_) throw DimensionMismatch("feature name count != n");
}

UniformSeries MultiSeries::column(std::size_t j) const {
    if (j >= n_) throw OutOfBounds("column " + std::to_string(j) + " of " + std::to_string(n_));
    UniformSeries s;
    s.dt = dt_;
    s.name = names_[j];
    s.values.resize(t_);
    for (std::size_t i = 0; i < t_; ++i) s.values[i] = data_[i * n_ + j];
    return s;
}

void MultiSeries::append_row(std::span<const double> row) {
    if (row.size() != n_) throw DimensionMismatch("append_row dimension");
    data_.insert(data_.end(), row.begin(), row.end());
    ++t_;
}

WindowView window(const MultiSeries& series, std::size_t end_index, std::size_t width) {
    if (width < 2) throw WindowTooSmall("width " + std::to_string(width) + " < 2");
    if (end_index < width || end_index > series.size())
        throw OutOfBounds("window [" + std::to_string(end_index) + " - " + std::to_string(width) + ", " +
                          std::to_string(end_index) + ") in series of length " + std::to_string(series.size()));
    return WindowView{&series, end_index - width, end_index};
}

ScalarWindow window(const UniformSeries& series, std::size_t end_index, std::size_t width) {
    if (width < 2) throw WindowTooSmall("width " + std::to_string(width) + " < 2");
    if (end_index < width || end_index > series.size())
        throw OutOfBounds("window [" + std::to_string(end_index) + " - " + std::to_string(width) + ", " +
                          std::to_string(end_index) + ") in series of length " + std::to_string(series.size()));
    return ScalarWindow{&series, end_index - width, end_index};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    fields.push_back(field);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
    const std::string cell = trim(raw);
    if (cell.empty())
        throw MalformedCsv("empty cell at row " + std::to_string(row) + ", col " + std::to_string(col));
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        // from_chars accepts "nan"/"inf" spellings; anything else it
        // rejects is a malformed cell.
        std::string lower;
        for (char c : cell) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (lower == "nan" || lower == "inf" || lower == "-inf" || lower == "+inf" ||
            lower == "infinity" || lower == "-infinity")
            throw NonFiniteValue(row, col);
        throw MalformedCsv("non-numeric cell '" + cell + "' at row " + std::to_string(row) + ", col " +
                           std::to_string(col));
    }
    if (!std::isfinite(value)) throw NonFiniteValue(row, col);
    return value;
}

} // namespace

MultiSeries load_csv(const std::string& path, double dt, bool has_timestamp_column) {
    if (!(dt > 0.0)) throw ConfigError("load_csv needs dt > 0");
    std::ifstream in(path);
    if (!in) throw EmptyInput("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw EmptyInput(path + " has no header row");
    std::vector<std::string> header = split_csv_line(line);
    const std::size_t skip = has_timestamp_column ? 1 : 0;
    if (header.size() <= skip) throw MalformedCsv("header has no value columns in " + path);

    std::vector<std::string> names;
    for (std::size_t j = skip; j < header.size(); ++j) names.push_back(trim(header[j]));

    const std::size_t n = names.size();
    std::vector<double> data;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw MalformedCsv("row " + std::to_string(rows + 1) + " has " + std::to_string(fields.size()) +
                               " fields, expected " + std::to_string(header.size()));
        for (std::size_t j = skip; j < fields.size(); ++j)
            data.push_back(parse_cell(fields[j], rows + 1, j + 1));
        ++rows;
    }
    if (rows == 0) throw EmptyInput(path + " has no data rows");

    MultiSeries series(rows, n, dt, names);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < n; ++j) series(i, j) = data[i * n + j];
    return series;
}

void write_csv(const MultiSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw EmptyInput("cannot open " + path + " for writing");
    const auto& names = series.feature_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) out << ',';
        out << names[j];
    }
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t j = 0; j < series.dimension(); ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", series(i, j));
            out << buf;
        }
        out << '\n';
    }
}

} // namespace driftcast
