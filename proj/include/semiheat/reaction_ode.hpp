#pragma once

#include <optional>
#include <vector>

namespace semiheat {

/// Exponents must exceed 1 by at least this margin; every 1/(p-1) degenerates at p = 1.
inline constexpr double kMinExponentGap = 1e-9;

/// Scalar blow-up threshold |v| > 1e8.
inline constexpr double kScalarBlowThreshold = 1e8;

/// Step cap factor: dt ≤ c·|v|^{1-p}.
inline constexpr double kReactionStepFactor = 0.01;

/// Throws std::invalid_argument unless p > 1 + kMinExponentGap.
void require_exponent(double p);

/// Right-hand side |v|^p.
double reaction(double v, double p);

/// [(p-1)(T_blow - t)]^{-1/(p-1)}: the positive spatially constant solution
/// that exists for all t < T_blow and blows up at T_blow.
double trivial_ancient(double p, double t_blow, double t);

/// v0^{1-p}/(p-1): blow-up time of v' = v^p, v(0) = v0 > 0.
double blowup_time_from_min(double p, double v0);

/// -((1-δ)(p-1)t + L^{1-p})^{1/(1-p)}, the time-dependent branch of the
/// lower bound for solutions that start above -L on a large ball.
double ode_lower_envelope(double p, double delta, double lower_bound_l, double t);

struct ScalarTrajectory {
    std::vector<double> times;
    std::vector<double> values;
    /// Set when |v| crossed kScalarBlowThreshold; extrapolated from the last state.
    std::optional<double> blowup_time;
};

/// One classical RK4 step of v' = |v|^p (dt may be negative).
double rk4_reaction_step(double v, double p, double dt);

/// Adaptive RK4 integration of v' = |v|^p from t_start to t_end (either
/// direction) with |dt| = min(dt_max, 0.01·|v|^{1-p}). Every step is stored.
ScalarTrajectory integrate_scalar_ode(double p, double v0, double t_start, double t_end, double dt_max);

}  // namespace semiheat
