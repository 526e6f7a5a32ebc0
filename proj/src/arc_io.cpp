#include "hybridsp/arc_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace hybridsp {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_header(std::ostream& os, const std::vector<std::string>& labels, const std::string& prefix) {
    for (const auto& l : labels) {
        os << ',' << prefix << l;
    }
}

void write_state(std::ostream& os, const State& x) {
    for (double v : x) {
        os << ',' << format_double(v);
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const HybridArc& arc, const std::vector<std::string>& labels) {
    os << "t,j";
    write_header(os, labels, "");
    os << '\n';
    arc.for_each_sample([&](HybridTime ht, const State& x) {
        os << format_double(ht.t) << ',' << ht.j;
        write_state(os, x);
        os << '\n';
    });
}

void write_jumps_csv(std::ostream& os, const HybridArc& arc, const std::vector<std::string>& labels) {
    os << "t,j";
    write_header(os, labels, "pre_");
    write_header(os, labels, "post_");
    os << ",tag\n";
    for (const auto& jr : arc.jumps) {
        if (jr.pre.empty()) continue;
        os << format_double(jr.t) << ',' << jr.j;
        write_state(os, jr.pre);
        write_state(os, jr.post);
        os << ',' << jr.tag.value_or("") << '\n';
    }
}

TrajectoryTable read_trajectory_csv(std::istream& is) {
    TrajectoryTable table;
    std::string line;
    if (!std::getline(is, line)) {
        throw ConfigError("trajectory csv: missing header");
    }
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "t" || header[1] != "j") {
        throw ConfigError("trajectory csv: header must start with t,j");
    }
    table.labels.assign(header.begin() + 2, header.end());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ConfigError("trajectory csv: row width does not match header");
        }
        table.times.push_back({std::stod(cells[0]), static_cast<std::size_t>(std::stoull(cells[1]))});
        State x;
        x.reserve(cells.size() - 2);
        for (std::size_t i = 2; i < cells.size(); ++i) {
            x.push_back(std::stod(cells[i]));
        }
        table.states.push_back(std::move(x));
    }
    return table;
}

}  // namespace hybridsp
