#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "semiheat/geometry.hpp"

namespace semiheat {

struct EvolveControls {
    double dt_max = 1e-2;
    double blow_threshold = 1e8;
    /// c_dt in dt ≤ c_dt·(max|u|)^{1-p}.
    double step_factor = 0.01;
    /// Store a snapshot every this many accepted steps (the final state is always stored).
    std::size_t snapshot_every = 1;
    /// Test hook: false solves the plain heat equation.
    bool reaction_on = true;

    /// Throws std::invalid_argument on dt_max ≤ 0, blow_threshold < 1e6, step_factor ≤ 0, snapshot_every = 0.
    void validate() const;
};

enum class BlowupMethod { threshold_crossing, extrapolation };

struct BlowupInfo {
    double detected_time;
    BlowupMethod method;
};

struct StepRecord {
    double t;   ///< time after the step
    double dt;
    double max_u;
    double min_u;
};

/// Time-ordered snapshots of one run. Step records cover every accepted step,
/// snapshots only those selected by the cadence.
struct Trajectory {
    ManifoldPtr manifold;
    double p = 2.0;
    std::vector<double> times;
    std::vector<ScalarField> snapshots;
    std::vector<StepRecord> steps;
    std::optional<BlowupInfo> blowup;
    /// Initial data took negative values; only forward windows are meaningful.
    bool negative_data = false;

    std::size_t size() const noexcept { return times.size(); }
    double max_at(std::size_t k) const;
    double min_at(std::size_t k) const;
    /// Snapshots with t_lo ≤ t ≤ t_hi; step records restricted to the same range.
    Trajectory window(double t_lo, double t_hi) const;
};

/// IMEX integration of u_t = Δu + |u|^p: exact-to-RK4 pointwise reaction
/// substep followed by one backward-Euler diffusion solve per step.
/// Throws SolverAbort if a non-finite value appears.
Trajectory evolve(const ManifoldPtr& m, std::span<const double> u0, double t0, double t1, double p,
                  const EvolveControls& controls = {});

/// Least-squares zero crossing of (max u)^{1-p} over the last `window`
/// accepted steps. Throws std::logic_error when the run did not blow up.
double detect_blowup(const Trajectory& traj, double p, std::size_t window = 20);

/// Approximate ancient solution: starts at t_start from
/// trivial_ancient(p, T_blow, t_start)·(1 + eps·mode) and runs forward to t_end
/// (default T_blow - 0.01). Requires T_blow - t_start ≥ 10 and 0 ≤ eps < 1.
Trajectory ancient_approximation(const ManifoldPtr& m, double p, double t_blow, double t_start, double eps,
                                 std::size_t mode_index, const EvolveControls& controls = {},
                                 std::optional<double> t_end = std::nullopt);

/// Spatially constant field.
ScalarField constant_field(const DiscreteManifold& m, double value);

}  // namespace semiheat
