#pragma once

#include "hybridsp/sets.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hybridsp {

using FlowMap = std::function<State(const State&)>;
using JumpMap = std::function<State(const State&)>;
using Guard = std::function<double(const State&)>;
using JumpTagger = std::function<std::optional<std::string>(const State&)>;

/// Jumps of one state block with the other block held.
struct BlockJump {
    SetDescriptor set;
    JumpMap map;
    std::vector<Guard> guards;
};

/// Jump structure of a system whose slow and fast blocks jump separately:
/// `slow` updates x1 with x2 held, `fast` updates x2 with x1 held.
struct SplitJumps {
    BlockJump slow;
    BlockJump fast;
};

/// Hybrid system with single-valued flow and jump maps.
///
/// Guards are scalar functions whose zero upcrossing marks entry into the
/// jump set; the solver localizes them by bisection. Values are immutable
/// after construction and may be shared between threads.
struct HybridSystem {
    std::size_t n = 0;
    std::vector<std::string> labels;
    FlowMap flow_map;
    JumpMap jump_map;
    SetDescriptor flow_set;
    SetDescriptor jump_set;
    std::vector<Guard> guards;
    JumpTagger jump_tag;
    std::optional<SplitJumps> split;

    [[nodiscard]] std::optional<std::string> tag_for(const State& pre) const {
        return jump_tag ? jump_tag(pre) : std::nullopt;
    }
};

/// Labels "x0", "x1", ... for systems built without names.
std::vector<std::string> default_labels(std::size_t n);

}  // namespace hybridsp
