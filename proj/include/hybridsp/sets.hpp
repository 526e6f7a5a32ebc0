#pragma once

#include "hybridsp/types.hpp"

#include <functional>
#include <limits>

namespace hybridsp {

/// A closed set given by a membership test and a Euclidean distance.
///
/// `membership(x)` must imply `distance(x) <= tolerance`. `projection` is
/// optional; manifold distance computations use it to find a feasible start.
struct SetDescriptor {
    std::function<bool(const State&)> membership;
    std::function<double(const State&)> distance;
    double tolerance = 0.0;
    std::function<State(const State&)> projection;

    [[nodiscard]] bool contains(const State& x) const { return membership(x); }
    /// Membership relaxed to `tol` on top of the set's own tolerance.
    [[nodiscard]] bool contains_within(const State& x, double tol) const {
        return membership(x) || distance(x) <= tolerance + tol;
    }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Axis-aligned box, bounds may be infinite. Distance is exact.
SetDescriptor make_box(State lower, State upper, double tolerance = 0.0);

/// Empty set: never a member, infinite distance.
SetDescriptor make_empty_set();

/// Whole space of any dimension.
SetDescriptor make_universe();

}  // namespace hybridsp
