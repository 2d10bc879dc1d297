#include "semiheat/reaction_ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semiheat {

void require_exponent(double p) {
    if (!(p > 1.0 + kMinExponentGap) || !std::isfinite(p))
        throw std::invalid_argument("exponent p must satisfy p > 1");
}

double reaction(double v, double p) {
    const double a = std::abs(v);
    if (p == 2.0) return a * a;
    if (p == 3.0) return a * a * a;
    return std::pow(a, p);
}

double trivial_ancient(double p, double t_blow, double t) {
    require_exponent(p);
    if (!(t < t_blow)) throw std::invalid_argument("trivial_ancient: t must precede the blow-up time");
    return std::pow((p - 1.0) * (t_blow - t), -1.0 / (p - 1.0));
}

double blowup_time_from_min(double p, double v0) {
    require_exponent(p);
    if (!(v0 > 0.0)) throw std::invalid_argument("blowup_time_from_min: v0 must be positive");
    return std::pow(v0, 1.0 - p) / (p - 1.0);
}

double ode_lower_envelope(double p, double delta, double lower_bound_l, double t) {
    require_exponent(p);
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("ode_lower_envelope: delta must lie in (0,1)");
    if (!(lower_bound_l > 0.0)) throw std::invalid_argument("ode_lower_envelope: L must be positive");
    if (!(t >= 0.0)) throw std::invalid_argument("ode_lower_envelope: t must be nonnegative");
    const double x = (1.0 - delta) * (p - 1.0) * t + std::pow(lower_bound_l, 1.0 - p);
    return -std::pow(x, 1.0 / (1.0 - p));
}

double rk4_reaction_step(double v, double p, double dt) {
    const double k1 = reaction(v, p);
    const double k2 = reaction(v + 0.5 * dt * k1, p);
    const double k3 = reaction(v + 0.5 * dt * k2, p);
    const double k4 = reaction(v + dt * k3, p);
    return v + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

ScalarTrajectory integrate_scalar_ode(double p, double v0, double t_start, double t_end, double dt_max) {
    require_exponent(p);
    if (!std::isfinite(v0) || !std::isfinite(t_start) || !std::isfinite(t_end))
        throw std::invalid_argument("integrate_scalar_ode: non-finite input");
    if (!(dt_max > 0.0)) throw std::invalid_argument("integrate_scalar_ode: dt_max must be positive");

    ScalarTrajectory out;
    out.times.push_back(t_start);
    out.values.push_back(v0);
    const double dir = (t_end >= t_start) ? 1.0 : -1.0;
    double t = t_start;
    double v = v0;
    while (dir * (t_end - t) > 0.0) {
        double dt = dt_max;
        if (v != 0.0) dt = std::min(dt, kReactionStepFactor * std::pow(std::abs(v), 1.0 - p));
        const double remaining = dir * (t_end - t);
        const bool last = dt >= remaining * (1.0 - 1e-9);
        if (last) dt = remaining;
        if (!last && !(dir * (t + dir * dt - t) > 0.0)) {
            out.blowup_time = t + dir * std::pow(std::abs(v), 1.0 - p) / (p - 1.0);
            break;
        }
        v = rk4_reaction_step(v, p, dir * dt);
        t = last ? t_end : t + dir * dt;
        if (!std::isfinite(v)) throw std::runtime_error("integrate_scalar_ode: non-finite value");
        if (std::abs(v) > kScalarBlowThreshold) {
            // Local trivial-solution extrapolation: remaining time is |v|^{1-p}/(p-1).
            out.blowup_time = t + dir * std::pow(std::abs(v), 1.0 - p) / (p - 1.0);
            break;
        }
        out.times.push_back(t);
        out.values.push_back(v);
    }
    return out;
}

}  // namespace semiheat
