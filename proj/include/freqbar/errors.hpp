#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace freqbar {

/// Base class for all library errors. Carries the module that raised it so
/// front ends can emit machine-parsable diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(message), module_(std::move(module)) {}

    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// A value fell outside its representable interval [lo, hi].
class RangeError : public Error {
public:
    RangeError(std::string module, const std::string& message, double lo, double hi)
        : Error(std::move(module), message), lo_(lo), hi_(hi) {}

    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// Malformed input file. `line` is 1-based; 0 means the whole file.
class ParseError : public Error {
public:
    ParseError(std::string module, const std::string& message, std::size_t line = 0)
        : Error(std::move(module), message), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A pulse schedule cannot be realised (frequency below the schedule base,
/// amplitude above the read-disturb ceiling, empty row set).
class ScheduleError : public Error {
public:
    using Error::Error;
};

/// Mismatched vector/matrix dimensions between program, schedule and patch.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Output current could not be decoded back to a dot product.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// Requested operation is outside what this version supports.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (missing file, unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace freqbar
