#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace trait_tuner {

/// Root of every error this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: empty lists, mismatched lengths, zero budgets.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration: unknown names, violated spec invariants.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A required file or directory is missing or unreadable.
class LoadError : public Error {
public:
    using Error::Error;
};

/// An external resource (checkpoint, cache directory) is unavailable.
class ResourceError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    /// 1-based line number, or 0 when not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// A trait has zero range on the training split and cannot be min-max scaled.
class DegenerateLabelError : public ValidationError {
public:
    explicit DegenerateLabelError(std::string trait)
        : ValidationError("degenerate labels: trait '" + trait + "' has zero range on the training split"),
          trait_(std::move(trait)) {}
    const std::string& trait() const noexcept { return trait_; }

private:
    std::string trait_;
};

/// R² is undefined because the labels have zero variance.
class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    explicit DivergenceError(std::size_t epoch)
        : Error("training diverged: non-finite loss in epoch " + std::to_string(epoch)), epoch_(epoch) {}
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

} // namespace trait_tuner
