#pragma once

#include "hybridsp/game.hpp"
#include "hybridsp/hybrid_system.hpp"

#include <span>

namespace hybridsp {

/// Sampled tracking controller of one unicycle. The reference is a unicycle
/// parked at (u^1, u^2) that spins with constant rate omega_r.
struct UnicycleParams {
    double sigma = 2e-3;        ///< sampling period
    double omega_r = 2.0 / 9.0; ///< reference angular rate [rad/s]
    double c1 = 1.0 / 3.0;
    double c2 = 2e-3;
    double c3 = 1.5;

    /// Gains c2 = sigma, c3 = 1/(3 omega_r), c1 = 1/(2 c3).
    static UnicycleParams wired(double sigma, double omega_r);

    void validate() const;
};

/// Agent state layout (x, y, theta_e, timer, theta, v_hat, omega_hat).
namespace uni {
inline constexpr std::size_t kX = 0;
inline constexpr std::size_t kY = 1;
inline constexpr std::size_t kThetaE = 2;
inline constexpr std::size_t kTimer = 3;
inline constexpr std::size_t kTheta = 4;
inline constexpr std::size_t kVHat = 5;
inline constexpr std::size_t kOmegaHat = 6;
inline constexpr std::size_t kSize = 7;
}  // namespace uni

struct TrackingErrors {
    double xe = 0.0;
    double ye = 0.0;
    double theta_e = 0.0;
    double omega = 0.0;  ///< omega_r + c2 theta_e
    double v = 0.0;      ///< sampled forward-speed command
};

TrackingErrors tracking_errors(const UnicycleParams& p, const Point2& ref, std::span<const double> q);

/// Writes the 7 flow components into dq.
void unicycle_flow(const UnicycleParams& p, std::span<const double> q, std::span<double> dq);

/// Resamples (v_hat, omega_hat) and resets the timer, in place.
void unicycle_jump(const UnicycleParams& p, const Point2& ref, std::span<double> q);

/// V = (xe - c3 omega ye)^2/2 + ye^2/2 + theta_e^2/2.
double unicycle_lyapunov(const UnicycleParams& p, const Point2& ref, std::span<const double> q);

/// |r|^2 = (x - u^1)^2 + (y - u^2)^2 + theta_e^2.
double tracking_error_sq(const Point2& ref, std::span<const double> q);

/// Standalone 7-state agent tracking a fixed reference point.
HybridSystem build_unicycle_agent(const UnicycleParams& p, const Point2& ref);

}  // namespace hybridsp
