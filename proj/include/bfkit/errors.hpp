#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace bfkit {

/// Malformed or unsupported image / config file content.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what,
                         std::optional<std::uint64_t> byte_offset = std::nullopt)
        : std::runtime_error(byte_offset ? what + " (at byte " + std::to_string(*byte_offset) + ")"
                                         : what),
          offset_(byte_offset) {}

    std::optional<std::uint64_t> byte_offset() const noexcept { return offset_; }

private:
    std::optional<std::uint64_t> offset_;
};

/// Pixel values that the requested output format cannot represent.
class RangeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain a fitted model was calibrated on.
class OutOfDomainError : public std::domain_error {
    using std::domain_error::domain_error;
};

/// Base for failures of the numerical machinery (exit code 3 in the CLI).
class NumericalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class BracketError : public NumericalError {
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
    using NumericalError::NumericalError;
};

class DegenerateFitError : public NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace bfkit
