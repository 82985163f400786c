#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace driftcast {

// Exit-code categories used by the CLI: data problems map to 2,
// numeric failures to 3 (usage errors are handled by the parser, 1).
enum class ErrorKind { Data, Numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct MalformedCsv : Error {
    explicit MalformedCsv(const std::string& what) : Error(ErrorKind::Data, "malformed csv: " + what) {}
};

struct EmptyInput : Error {
    explicit EmptyInput(const std::string& what) : Error(ErrorKind::Data, "empty input: " + what) {}
};

struct NonFiniteValue : Error {
    NonFiniteValue(std::size_t row, std::size_t col)
        : Error(ErrorKind::Data, "non-finite value at row " + std::to_string(row) + ", col " + std::to_string(col)),
          row(row), col(col) {}
    std::size_t row; // 1-based data row
    std::size_t col; // 1-based column
};

struct OutOfBounds : Error {
    explicit OutOfBounds(const std::string& what) : Error(ErrorKind::Data, "out of bounds: " + what) {}
};

struct WindowTooSmall : Error {
    explicit WindowTooSmall(const std::string& what) : Error(ErrorKind::Data, "window too small: " + what) {}
};

struct DegenerateWindow : Error {
    explicit DegenerateWindow(const std::string& what) : Error(ErrorKind::Data, "degenerate window: " + what) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& what) : Error(ErrorKind::Data, "insufficient data: " + what) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& what) : Error(ErrorKind::Data, "length mismatch: " + what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(ErrorKind::Data, "dimension mismatch: " + what) {}
};

struct ProtocolMismatch : Error {
    explicit ProtocolMismatch(const std::string& what) : Error(ErrorKind::Data, "protocol mismatch: " + what) {}
};

struct NonPositiveState : Error {
    explicit NonPositiveState(double value)
        : Error(ErrorKind::Numeric, "non-positive state value " + std::to_string(value) + " outside GBM domain") {}
};

struct SingularDesign : Error {
    explicit SingularDesign(const std::string& what) : Error(ErrorKind::Numeric, "singular design: " + what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Data, "config error: " + what) {}
};

} // namespace driftcast
