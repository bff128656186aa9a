#pragma once

#include <stdexcept>
#include <string>

namespace cocyclelab {

// Configuration / input documents that fail validation.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An operation would exceed the enumeration / horizon budget.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// A window word that is not part of the legal factor language.
class IllegalWindowError : public std::runtime_error {
public:
    explicit IllegalWindowError(const std::string& window)
        : std::runtime_error("illegal window word: \"" + window + "\""), window_(window) {}
    const std::string& window() const { return window_; }

private:
    std::string window_;
};

// The supplied configuration word is too short for the requested product.
class InsufficientConfigurationError : public std::runtime_error {
public:
    InsufficientConfigurationError(long long needed, long long have)
        : std::runtime_error("configuration too short: need " + std::to_string(needed) +
                             " symbols, have " + std::to_string(have)),
          needed_(needed) {}
    long long needed() const { return needed_; }

private:
    long long needed_;
};

// Singular values of a product are too close to call a splitting.
class DegenerateSingularValuesError : public std::runtime_error {
public:
    explicit DegenerateSingularValuesError(double gap)
        : std::runtime_error("singular gap " + std::to_string(gap) +
                             " below tolerance; no splitting at this scale") {}
};

}  // namespace cocyclelab
