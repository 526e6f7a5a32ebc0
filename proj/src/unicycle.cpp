#include "hybridsp/unicycle.hpp"

#include "hybridsp/sets.hpp"

#include <cmath>

namespace hybridsp {

UnicycleParams UnicycleParams::wired(double sigma, double omega_r) {
    UnicycleParams p;
    p.sigma = sigma;
    p.omega_r = omega_r;
    p.c2 = sigma;
    p.c3 = 1.0 / (3.0 * omega_r);
    p.c1 = 1.0 / (2.0 * p.c3);
    p.validate();
    return p;
}

void UnicycleParams::validate() const {
    const bool ok = sigma > 0.0 && omega_r > 0.0 && c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && std::isfinite(sigma) &&
                    std::isfinite(omega_r) && std::isfinite(c1) && std::isfinite(c2) && std::isfinite(c3);
    if (!ok) {
        throw ParamError("unicycle: sigma, omega_r, c1, c2, c3 must be positive and finite");
    }
}

TrackingErrors tracking_errors(const UnicycleParams& p, const Point2& ref, std::span<const double> q) {
    const double dx = ref[0] - q[uni::kX];
    const double dy = ref[1] - q[uni::kY];
    const double c = std::cos(q[uni::kTheta]);
    const double s = std::sin(q[uni::kTheta]);
    TrackingErrors e;
    e.xe = c * dx + s * dy;
    e.ye = -s * dx + c * dy;
    e.theta_e = q[uni::kThetaE];
    e.omega = p.omega_r + p.c2 * e.theta_e;
    e.v = p.c1 * (e.xe - p.c3 * e.omega * e.ye) - p.c3 * p.c2 * (p.omega_r - e.omega) * e.ye +
          p.c3 * e.omega * e.omega * e.xe;
    return e;
}

void unicycle_flow(const UnicycleParams& p, std::span<const double> q, std::span<double> dq) {
    const double v = q[uni::kVHat];
    const double w = q[uni::kOmegaHat];
    dq[uni::kX] = v * std::cos(q[uni::kTheta]);
    dq[uni::kY] = v * std::sin(q[uni::kTheta]);
    dq[uni::kThetaE] = p.omega_r - w;
    dq[uni::kTimer] = 1.0 / p.sigma;
    dq[uni::kTheta] = w;
    dq[uni::kVHat] = 0.0;
    dq[uni::kOmegaHat] = 0.0;
}

void unicycle_jump(const UnicycleParams& p, const Point2& ref, std::span<double> q) {
    const TrackingErrors e = tracking_errors(p, ref, q);
    q[uni::kTimer] = 0.0;
    q[uni::kVHat] = e.v;
    q[uni::kOmegaHat] = e.omega;
}

double unicycle_lyapunov(const UnicycleParams& p, const Point2& ref, std::span<const double> q) {
    const TrackingErrors e = tracking_errors(p, ref, q);
    const double a = e.xe - p.c3 * e.omega * e.ye;
    return 0.5 * (a * a + e.ye * e.ye + e.theta_e * e.theta_e);
}

double tracking_error_sq(const Point2& ref, std::span<const double> q) {
    const double dx = q[uni::kX] - ref[0];
    const double dy = q[uni::kY] - ref[1];
    return dx * dx + dy * dy + q[uni::kThetaE] * q[uni::kThetaE];
}

HybridSystem build_unicycle_agent(const UnicycleParams& p, const Point2& ref) {
    p.validate();
    HybridSystem sys;
    sys.n = uni::kSize;
    sys.labels = {"x", "y", "theta_e", "timer", "theta", "v_hat", "omega_hat"};
    sys.flow_map = [p](const State& q) {
        State dq(uni::kSize);
        unicycle_flow(p, q, dq);
        return dq;
    };
    sys.jump_map = [p, ref](const State& q) {
        State out = q;
        unicycle_jump(p, ref, out);
        return out;
    };
    State lo(uni::kSize, -kInf);
    State hi(uni::kSize, kInf);
    lo[uni::kTimer] = 0.0;
    hi[uni::kTimer] = 1.0;
    sys.flow_set = make_box(lo, hi);
    lo[uni::kTimer] = 1.0;
    sys.jump_set = make_box(lo, hi);
    sys.guards = {[](const State& q) { return q[uni::kTimer] - 1.0; }};
    return sys;
}

}  // namespace hybridsp
