#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace loadpat {

// Malformed input data. Carries the 1-based data row number when one applies
// (0 otherwise; the header is not counted).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t row = 0)
        : std::runtime_error(row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// Invalid experiment, suite or generator configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace loadpat
