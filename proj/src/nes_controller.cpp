#include "hybridsp/nes_controller.hpp"

#include "hybridsp/sets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hybridsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAliasGap = 0.2;

/// Distance of w to the nearest multiple of 2 pi.
double circle_gap(double w) {
    const double r = std::fmod(std::abs(w), kTwoPi);
    return std::min(r, kTwoPi - r);
}

bool compatible(const std::vector<double>& w, std::size_t a, double gap) {
    if (circle_gap(w[a]) < gap || circle_gap(2.0 * w[a]) < 2.0 * gap) return false;
    for (std::size_t b = 0; b < a; ++b) {
        if (circle_gap(w[a] - w[b]) < gap || circle_gap(w[a] + w[b]) < gap) return false;
    }
    return true;
}

bool frequencies_separated(const std::vector<double>& w) {
    for (std::size_t a = 0; a < w.size(); ++a) {
        if (!compatible(w, a, kAliasGap)) return false;
    }
    return true;
}

}  // namespace

void NESControllerParams::validate(std::size_t n_agents) const {
    const std::size_t N = agents();
    if (N == 0 || N != n_agents) {
        throw ParamError("nes: controller and game disagree on the number of agents");
    }
    if (amplitudes.size() != N || t0.size() != N || frequencies.size() != 2 * N) {
        throw ParamError("nes: need N amplitudes, N initial timers and 2N frequencies");
    }
    if (!(alpha > 0.0) || !(beta > 0.0) || !(tau0 > 0.0) || !(filter_bound > 0.0)) {
        throw ParamError("nes: alpha, beta, tau0 and the filter bound must be positive");
    }
    for (std::size_t i = 0; i < N; ++i) {
        if (!(amplitudes[i] > 0.0) || !(tau[i] > 0.0)) {
            throw ParamError("nes: amplitudes and sampling periods must be positive");
        }
        if (!(t0[i] >= 0.0 && t0[i] <= 1.0)) {
            throw ParamError("nes: initial timers must lie in [0, 1]");
        }
        for (std::size_t k = i + 1; k < N; ++k) {
            if (std::abs(t0[i] - t0[k]) <= kTriggerTol) {
                throw ParamError("nes: initial timers must be pairwise distinct");
            }
        }
    }
    for (std::size_t a = 0; a < frequencies.size(); ++a) {
        if (!(frequencies[a] > 0.0) || !std::isfinite(frequencies[a])) {
            throw ParamError("nes: frequencies must be positive");
        }
        for (std::size_t b = a + 1; b < frequencies.size(); ++b) {
            if (frequencies[a] == frequencies[b]) {
                throw ParamError("nes: frequencies must be distinct");
            }
        }
    }
}

std::vector<double> generate_frequencies(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::vector<double> w(count);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        for (std::size_t k = 0; k < count; ++k) {
            w[k] = static_cast<double>(k + 1) + jitter(rng);
        }
        if (frequencies_separated(w)) return w;
    }
    // Large counts: draw one at a time with a gap that leaves half the
    // circle free, moving on to the next natural number when a window is full.
    const double gap = std::min(kAliasGap, std::numbers::pi / (4.0 * static_cast<double>(count + 1)));
    double n = 1.0;
    for (std::size_t k = 0; k < count; ++k) {
        bool placed = false;
        while (!placed) {
            for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
                w[k] = n + jitter(rng);
                placed = compatible(w, k, gap);
            }
            n += 1.0;
        }
    }
    return w;
}

Measurement game_measurement(const GameParams& g) {
    return [g](std::span<const double> positions) {
        return game_costs(g, State(positions.begin(), positions.end()));
    };
}

std::vector<std::string> controller_labels(std::size_t N) {
    std::vector<std::string> labels(9 * N);
    const ControllerLayout L{N};
    for (std::size_t i = 0; i < N; ++i) {
        const std::string k = std::to_string(i + 1);
        labels[L.u(i)] = "u" + k + "_1";
        labels[L.u(i) + 1] = "u" + k + "_2";
        labels[L.xi(i)] = "xi" + k + "_1";
        labels[L.xi(i) + 1] = "xi" + k + "_2";
        labels[L.mu(i)] = "mu" + k + "_1c";
        labels[L.mu(i) + 1] = "mu" + k + "_1s";
        labels[L.mu(i) + 2] = "mu" + k + "_2c";
        labels[L.mu(i) + 3] = "mu" + k + "_2s";
        labels[L.timer(i)] = "t" + k;
    }
    return labels;
}

std::optional<std::size_t> triggered_agent(const ControllerLayout& L, std::span<const double> chi, double tol) {
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < L.N; ++i) {
        if (chi[L.timer(i)] >= 1.0 - tol) {
            if (hit) {
                throw ConcurrentSampling("nes: agents " + std::to_string(*hit + 1) + " and " +
                                         std::to_string(i + 1) + " sample simultaneously");
            }
            hit = i;
        }
    }
    return hit;
}

void controller_jump(const NESControllerParams& p, const ControllerLayout& L, std::span<double> chi,
                     std::span<const double> positions, const Measurement& J, std::size_t i) {
    const std::size_t N = L.N;
    State query(positions.begin(), positions.end());
    if (p.dither_in_measurement) {
        for (std::size_t k = 0; k < N; ++k) {
            query[2 * k] += p.amplitudes[k] * chi[L.mu(k)];
            query[2 * k + 1] += p.amplitudes[k] * chi[L.mu(k) + 2];
        }
    }
    const std::vector<double> costs = J(query);
    if (costs.size() != N) {
        throw DimensionError("nes: measurement must return one value per agent");
    }

    for (std::size_t d = 0; d < 2; ++d) {
        const double xi = chi[L.xi(i) + d];
        chi[L.u(i) + d] -= p.alpha * p.beta * xi;
        const double sample = 2.0 / p.amplitudes[i] * costs[i] * chi[L.mu(i) + 2 * d];
        chi[L.xi(i) + d] = std::clamp(xi + p.alpha * (sample - xi), -p.filter_bound, p.filter_bound);
    }
    for (std::size_t d = 0; d < 2; ++d) {
        const double w = p.frequencies[2 * i + d];
        const double c = chi[L.mu(i) + 2 * d];
        const double s = chi[L.mu(i) + 2 * d + 1];
        double nc = c * std::cos(w) - s * std::sin(w);
        double ns = c * std::sin(w) + s * std::cos(w);
        const double r = std::hypot(nc, ns);
        nc /= r;
        ns /= r;
        chi[L.mu(i) + 2 * d] = nc;
        chi[L.mu(i) + 2 * d + 1] = ns;
    }
    chi[L.timer(i)] = 0.0;
}

State controller_initial_state(const NESControllerParams& p, const State& u0) {
    const ControllerLayout L{p.agents()};
    if (u0.size() != 2 * L.N) {
        throw DimensionError("nes: initial actions must have 2N entries");
    }
    State chi(L.size(), 0.0);
    std::copy(u0.begin(), u0.end(), chi.begin());
    for (std::size_t i = 0; i < L.N; ++i) {
        chi[L.mu(i)] = 1.0;
        chi[L.mu(i) + 2] = 1.0;
        chi[L.timer(i)] = p.t0[i];
    }
    return chi;
}

HybridSystem build_nes_controller(const NESControllerParams& p, const GameParams& g, Measurement J) {
    g.validate();
    p.validate(g.agents());
    if (!J) J = game_measurement(g);
    const ControllerLayout L{g.agents()};

    HybridSystem sys;
    sys.n = L.size();
    sys.labels = controller_labels(L.N);
    sys.flow_map = [p, L](const State& chi) {
        State d(chi.size(), 0.0);
        for (std::size_t i = 0; i < L.N; ++i) {
            d[L.timer(i)] = 1.0 / (p.tau0 * p.tau[i]);
        }
        return d;
    };
    sys.jump_map = [p, L, J](const State& chi) {
        State out = chi;
        const auto i = triggered_agent(L, chi, kTriggerTol);
        std::size_t k = 0;
        if (i) {
            k = *i;
        } else {
            for (std::size_t m = 1; m < L.N; ++m) {
                if (chi[L.timer(m)] > chi[L.timer(k)]) k = m;
            }
        }
        const State positions(chi.begin(), chi.begin() + static_cast<std::ptrdiff_t>(2 * L.N));
        controller_jump(p, L, out, positions, J, k);
        return out;
    };

    State lo(L.size(), -kInf);
    State hi(L.size(), kInf);
    for (std::size_t i = 0; i < L.N; ++i) {
        for (std::size_t d = 0; d < 2; ++d) {
            lo[L.xi(i) + d] = -p.filter_bound;
            hi[L.xi(i) + d] = p.filter_bound;
        }
        lo[L.timer(i)] = 0.0;
        hi[L.timer(i)] = 1.0;
    }
    sys.flow_set = make_box(lo, hi);

    SetDescriptor jump;
    jump.membership = [L, flow = sys.flow_set](const State& chi) {
        if (!flow.contains_within(chi, kTriggerTol)) return false;
        for (std::size_t i = 0; i < L.N; ++i) {
            if (chi[L.timer(i)] >= 1.0) return true;
        }
        return false;
    };
    jump.distance = [L, flow = sys.flow_set](const State& chi) {
        double d = kInf;
        for (std::size_t i = 0; i < L.N; ++i) {
            d = std::min(d, std::abs(chi[L.timer(i)] - 1.0));
        }
        return std::max(d, flow.distance(chi));
    };
    sys.jump_set = jump;
    for (std::size_t i = 0; i < L.N; ++i) {
        sys.guards.push_back([idx = L.timer(i)](const State& chi) { return chi[idx] - 1.0; });
    }
    sys.jump_tag = [](const State&) { return std::string("controller"); };
    return sys;
}

}  // namespace hybridsp
