#include "hybridsp/sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hybridsp {

bool all_finite(const State& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

double norm(const State& x) {
    return std::sqrt(std::accumulate(x.begin(), x.end(), 0.0,
                                     [](double acc, double v) { return acc + v * v; }));
}

double distance(const State& a, const State& b) {
    if (a.size() != b.size()) {
        throw DimensionError("distance: dimension mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

SetDescriptor make_box(State lower, State upper, double tolerance) {
    if (lower.size() != upper.size()) {
        throw DimensionError("make_box: bound dimensions differ");
    }
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (lower[i] > upper[i]) {
            throw ParamError("make_box: lower bound above upper bound");
        }
    }
    SetDescriptor set;
    set.tolerance = tolerance;
    set.distance = [lower, upper](const State& x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < lower.size(); ++i) {
            double d = 0.0;
            if (x[i] < lower[i]) {
                d = lower[i] - x[i];
            } else if (x[i] > upper[i]) {
                d = x[i] - upper[i];
            }
            acc += d * d;
        }
        return std::sqrt(acc);
    };
    set.membership = [dist = set.distance, tolerance](const State& x) { return dist(x) <= tolerance; };
    set.projection = [lower, upper](const State& x) {
        State p(x);
        for (std::size_t i = 0; i < lower.size(); ++i) {
            p[i] = std::clamp(x[i], lower[i], upper[i]);
        }
        return p;
    };
    return set;
}

SetDescriptor make_empty_set() {
    SetDescriptor set;
    set.membership = [](const State&) { return false; };
    set.distance = [](const State&) { return kInf; };
    return set;
}

SetDescriptor make_universe() {
    SetDescriptor set;
    set.membership = [](const State&) { return true; };
    set.distance = [](const State&) { return 0.0; };
    set.projection = [](const State& x) { return x; };
    return set;
}

}  // namespace hybridsp
