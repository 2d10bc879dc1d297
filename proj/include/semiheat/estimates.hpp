#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semiheat/evolve.hpp"
#include "semiheat/geometry.hpp"

namespace semiheat {

/// Parameters shared by the inequality checkers. Unused fields are ignored
/// by checkers that do not need them.
struct EstimateParams {
    double D = 1.0;      ///< upper bound of u on the window
    double K = 0.0;      ///< Ric ≥ K(n-1)
    double R = 1.0;      ///< spatial window radius
    double T = 1.0;      ///< temporal window length
    std::optional<double> T0;  ///< window end; defaults to the last snapshot time
    double delta = 0.5;
    double L = 1.0;
    double A = 8.0;
    double r0 = 1.0;
    /// Floor inside log(D/u); defaults to 1e-12·D.
    std::optional<double> u_floor;

    double floor_value() const { return u_floor.value_or(1e-12 * D); }
};

/// One evaluated snapshot: largest LHS, structural right-hand factor at the
/// maximising node, and the largest pointwise ratio.
struct SnapshotRow {
    std::size_t snapshot;
    double t;
    double lhs;
    double rhs;
    double ratio;
};

/// f = log(u/D) and w = |∇f|²/(1-f)² at the snapshot holding the largest ratio.
struct GradientFields {
    std::size_t snapshot;
    ScalarField f;
    ScalarField w;
};

struct EstimateReport {
    std::string id;
    std::vector<SnapshotRow> rows;
    double c_fit = 0.0;
    double c_cap = std::numeric_limits<double>::infinity();
    bool pass = true;
    std::optional<std::size_t> argmax_snapshot;
    std::optional<std::size_t> argmax_node;
    double argmax_time = 0.0;
    std::string verdict;
    std::map<std::string, double> diagnostics;
    std::optional<GradientFields> fields;
};

enum class GradientVariant { local, global, ancient };

std::string_view to_string(GradientVariant v);
GradientVariant parse_gradient_variant(std::string_view name);

enum class ExponentRegime { below_threshold, open_gap, sobolev_critical_or_above, low_dimension_all_subcritical };

std::string_view to_string(ExponentRegime r);

/// n(n+2)/(n-1)²; +∞ for n = 1.
double gradient_exponent_threshold(int n);
/// (n+2)/(n-2); +∞ for n ≤ 2.
double sobolev_exponent(int n);

/// Classifies p against n(n+2)/(n-1)² and (n+2)/(n-2). For n ∈ {1,2} every
/// p > 1 is reported as low_dimension_all_subcritical.
ExponentRegime exponent_regime(int n, double p);

/// Triviality threshold [(n-1)K/p]^{1/(p-1)}.
double triviality_threshold(int n, double K, double p);

/// 4 + 2(n-1)T/r0² + 2(n-1)T√K/r0.
double admissible_a_min(int n, double T, double r0, double K);

/// c₁·dt + c₂·h² with c₁ = c₂ = 10·(max|u|)^p over the trajectory.
double scheme_tolerance(const Trajectory& traj, double p, double dt);

/// min over time of min_x u and the discrete inequality Δv/Δt ≥ |v|^p - tol
/// for v(t) = min_x u. c_fit is the worst violation in units of tol (or of
/// 1e-10 for a negative excursion of nonnegative data); pass ⇔ c_fit ≤ 1.
EstimateReport check_positivity_min_ode(const Trajectory& traj, double p);

/// Li-Yau type ratio [|∇u|/u] ÷ [S·(1 + log(D/u))]. For the ancient variant
/// with pD^{p-1} ≤ (n-1)K the structural factor vanishes and the check becomes
/// max|∇u| ≤ grad_tol.
EstimateReport check_gradient_estimate(const Trajectory& traj, const EstimateParams& params, GradientVariant variant,
                                       double c_cap = std::numeric_limits<double>::infinity(),
                                       double grad_tol = 1e-6);

/// C_fit = max over snapshots of (max_x u)·(T_blow - t)^{1/(p-1)}.
EstimateReport check_decay(const Trajectory& traj, double t_blow, double p,
                           double c_cap = std::numeric_limits<double>::infinity());

/// C_fit = max of [u + |∇u|^{2/(p+1)}] ÷ [|t-T0|^{-1/(p-1)} + |T-t|^{-1/(p-1)}].
EstimateReport check_universal(const Trajectory& traj, double t0, double t_end, double p,
                               double c_cap = std::numeric_limits<double>::infinity());

/// Checks u ≥ min{envelope(t - t_start), -C/(A r0)^{2/(p-1)}} - tol on
/// B_{A r0/4}(x0). c_fit is the smallest C for which the inequality holds.
EstimateReport check_lower_bound_lemma(const Trajectory& traj, const EstimateParams& params, double c_delta_cap);

/// Oscillation decay against the linearized rate λ₁ - p(max u)^{p-1} over
/// consecutive intervals while max u stays below the triviality threshold.
/// c_fit = max over intervals of osc(t₂)/(osc(t₁)·e^{-∫rate}); verdict
/// "trivial-limit" iff c_fit ≤ 1 + rate_tol.
EstimateReport check_triviality(const Trajectory& traj, double p, double rate_tol = 0.2, double interval = 1.0);

/// Talenti profile (n(n-2)/(n(n-2)+r²))^{(n-2)/2}.
double talenti_profile(int n, double r);

/// max over interior nodes of |Δu + u^{(n+2)/(n-2)}| for the Talenti profile.
double talenti_residual(int n, std::size_t grid_count, double r_max);

}  // namespace semiheat
