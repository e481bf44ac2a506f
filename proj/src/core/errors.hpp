#ifndef CAUSALBENCH_CORE_ERRORS_HPP
#define CAUSALBENCH_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace causalbench {

// Invalid specification or run configuration (bad field values, unknown
// JSON keys, dimension mismatches caught at validation time).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure inside a logistic-regression fit. The kind is stable so callers
// can record it as a per-experiment failure reason.
class GlmError : public std::runtime_error {
public:
    enum class Kind {
        degenerate_outcome,  // only one outcome class present
        singular_design,     // rank-deficient design matrix
        separation,          // coefficients diverging, perfect separation
        dimension,           // shape mismatch between design and data
    };

    GlmError(Kind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Violated precondition in the simulation core (non-finite inputs,
// mismatched vector lengths).
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated precondition in a statistics routine (undefined relative error,
// too few samples, invalid degrees of freedom).
class StatsError : public std::runtime_error {
public:
    explicit StatsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Matching-stage failure (empty matched sample, invalid indices).
class MatchError : public std::runtime_error {
public:
    explicit MatchError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / serialization failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace causalbench

#endif
