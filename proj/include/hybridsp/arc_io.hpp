#pragma once

#include "hybridsp/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hybridsp {

/// Trajectory CSV: header `t,j,<labels...>`, one row per recorded sample.
void write_trajectory_csv(std::ostream& os, const HybridArc& arc, const std::vector<std::string>& labels);

/// Jump CSV: header `t,j,pre_<label>...,post_<label>...,tag`. Jumps whose
/// states were dropped by decimation are omitted.
void write_jumps_csv(std::ostream& os, const HybridArc& arc, const std::vector<std::string>& labels);

struct TrajectoryTable {
    std::vector<std::string> labels;
    std::vector<HybridTime> times;
    std::vector<State> states;
};

/// Parses a trajectory CSV written by `write_trajectory_csv`.
TrajectoryTable read_trajectory_csv(std::istream& is);

/// Shortest decimal form that round-trips (17 significant digits).
std::string format_double(double v);

}  // namespace hybridsp
