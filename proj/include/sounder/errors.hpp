#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sounder {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value passed to an operation is outside its documented domain
/// (bad degree, lag, rates, missing parameter, unknown name, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Inputs are individually valid but violate an operation precondition
/// (signal too short, delay beyond duration, nonphysical geometry, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Feedback taps that do not produce a maximal-length sequence.
/// Carries the period the register actually achieved.
class NonMaximalTapsError : public Error {
public:
    NonMaximalTapsError(std::size_t achieved_period, std::size_t full_period)
        : Error("non-maximal feedback taps: sequence period " +
                std::to_string(achieved_period) + " < " + std::to_string(full_period)),
          achieved_period_(achieved_period) {}

    std::size_t achieved_period() const { return achieved_period_; }

private:
    std::size_t achieved_period_;
};

/// Experiment-config parse or validation failure. Carries the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

} // namespace sounder
