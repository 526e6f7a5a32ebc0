#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybridsp {

/// Dense state of a hybrid system. The dimension is fixed per system.
using State = std::vector<double>;

/// Point (t, j) of a hybrid time domain.
struct HybridTime {
    double t = 0.0;
    std::size_t j = 0;

    /// Partial order of hybrid time domains: t <= t' and j <= j'.
    [[nodiscard]] bool precedes(const HybridTime& other) const {
        return t <= other.t && j <= other.j;
    }
    [[nodiscard]] bool operator==(const HybridTime&) const = default;
};

// =============================================================================
// Errors
// =============================================================================

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// State outside the set an operation requires (flow set, jump set).
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ParamError : public Error {
public:
    using Error::Error;
};

/// Jump-regularity classification in x1 needs tagged jump records.
class MissingTags : public Error {
public:
    using Error::Error;
};

/// Agent index out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

/// Two sampling timers of the zeroth-order controller fired together.
class ConcurrentSampling : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

[[nodiscard]] bool all_finite(const State& x);
[[nodiscard]] double norm(const State& x);
[[nodiscard]] double distance(const State& a, const State& b);

}  // namespace hybridsp
