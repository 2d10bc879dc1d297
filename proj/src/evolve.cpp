#include "semiheat/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "semiheat/errors.hpp"
#include "semiheat/reaction_ode.hpp"
#include "tridiagonal.hpp"

namespace semiheat {

void EvolveControls::validate() const {
    if (!(dt_max > 0.0)) throw std::invalid_argument("controls: dt_max must be positive");
    if (!(blow_threshold >= 1e6)) throw std::invalid_argument("controls: blow_threshold must be at least 1e6");
    if (!(step_factor > 0.0)) throw std::invalid_argument("controls: step_factor must be positive");
    if (snapshot_every == 0) throw std::invalid_argument("controls: snapshot_every must be positive");
}

double Trajectory::max_at(std::size_t k) const {
    const auto& s = snapshots.at(k);
    return *std::max_element(s.begin(), s.end());
}

double Trajectory::min_at(std::size_t k) const {
    const auto& s = snapshots.at(k);
    return *std::min_element(s.begin(), s.end());
}

Trajectory Trajectory::window(double t_lo, double t_hi) const {
    Trajectory out;
    out.manifold = manifold;
    out.p = p;
    out.negative_data = negative_data;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= t_lo && times[k] <= t_hi) {
            out.times.push_back(times[k]);
            out.snapshots.push_back(snapshots[k]);
        }
    }
    for (const auto& s : steps)
        if (s.t >= t_lo && s.t <= t_hi) out.steps.push_back(s);
    if (blowup && !times.empty() && !out.times.empty() && out.times.back() == times.back()) out.blowup = blowup;
    return out;
}

ScalarField constant_field(const DiscreteManifold& m, double value) {
    return ScalarField(m.node_count(), value);
}

namespace {

void implicit_diffusion(const DiscreteManifold& m, double dt, std::span<double> rhs,
                        std::vector<double>& lo, std::vector<double>& di, std::vector<double>& up) {
    const auto L_lo = m.lower();
    const auto L_di = m.diagonal();
    const auto L_up = m.upper();
    const std::size_t n = rhs.size();
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = -dt * L_lo[i];
        di[i] = 1.0 - dt * L_di[i];
        up[i] = -dt * L_up[i];
    }
    if (m.is_periodic())
        detail::solve_cyclic_tridiagonal(lo, di, up, rhs);
    else
        detail::solve_tridiagonal(lo, di, up, rhs);
}

}  // namespace

Trajectory evolve(const ManifoldPtr& m, std::span<const double> u0, double t0, double t1, double p,
                  const EvolveControls& controls) {
    if (!m) throw std::invalid_argument("evolve: null manifold");
    require_aligned(*m, u0, "evolve");
    require_exponent(p);
    controls.validate();
    if (!(t0 < t1)) throw std::invalid_argument("evolve: t0 must precede t1");

    Trajectory traj;
    traj.manifold = m;
    traj.p = p;
    ScalarField u(u0.begin(), u0.end());
    traj.negative_data = *std::min_element(u.begin(), u.end()) < 0.0;
    traj.times.push_back(t0);
    traj.snapshots.push_back(u);

    const std::size_t n = u.size();
    std::vector<double> lo(n), di(n), up(n);
    double t = t0;
    std::size_t step = 0;
    while (t < t1) {
        double sup_abs = 0.0;
        for (double v : u) sup_abs = std::max(sup_abs, std::abs(v));
        double dt = controls.dt_max;
        if (controls.reaction_on && sup_abs > 0.0)
            dt = std::min(dt, controls.step_factor * std::pow(sup_abs, 1.0 - p));
        // Absorb a sliver of remaining time into this step rather than leave a roundoff-sized step.
        const bool last = dt >= (t1 - t) * (1.0 - 1e-9);
        if (last) dt = t1 - t;
        if (!last && !(t + dt > t)) {
            // The step no longer advances t: extrapolate the remaining time from the trivial profile.
            if (traj.times.back() != t) {
                traj.times.push_back(t);
                traj.snapshots.push_back(u);
            }
            traj.blowup = BlowupInfo{t + std::pow(sup_abs, 1.0 - p) / (p - 1.0), BlowupMethod::extrapolation};
            break;
        }

        // Strang splitting: half reaction, full implicit diffusion, half reaction.
        if (controls.reaction_on)
            for (double& v : u) v = rk4_reaction_step(v, p, 0.5 * dt);
        implicit_diffusion(*m, dt, u, lo, di, up);
        if (controls.reaction_on)
            for (double& v : u) v = rk4_reaction_step(v, p, 0.5 * dt);

        const double t_next = last ? t1 : t + dt;
        if (!(t_next > t)) throw SolverAbort("evolve: time step underflow at t = " + std::to_string(t));
        t = t_next;
        ++step;

        double umax = -INFINITY;
        double umin = INFINITY;
        for (double v : u) {
            if (!std::isfinite(v)) throw SolverAbort("evolve: non-finite value at t = " + std::to_string(t));
            umax = std::max(umax, v);
            umin = std::min(umin, v);
        }
        traj.steps.push_back({t, dt, umax, umin});

        const bool blown = umax > controls.blow_threshold;
        if (blown || last || step % controls.snapshot_every == 0) {
            traj.times.push_back(t);
            traj.snapshots.push_back(u);
        }
        if (blown) {
            traj.blowup = BlowupInfo{t, BlowupMethod::threshold_crossing};
            break;
        }
    }
    return traj;
}

double detect_blowup(const Trajectory& traj, double p, std::size_t window) {
    require_exponent(p);
    if (!traj.blowup) throw std::logic_error("detect_blowup: trajectory did not blow up");
    if (window < 2 || traj.steps.size() < window) throw std::logic_error("detect_blowup: too few steps to extrapolate");

    // Fit y = a + b t with y = (max u)^{1-p}; centre t for conditioning.
    const auto first = traj.steps.end() - static_cast<std::ptrdiff_t>(window);
    double t_mean = 0.0;
    for (auto it = first; it != traj.steps.end(); ++it) t_mean += it->t;
    t_mean /= static_cast<double>(window);
    double sy = 0.0, stt = 0.0, sty = 0.0;
    for (auto it = first; it != traj.steps.end(); ++it) {
        const double x = it->t - t_mean;
        const double y = std::pow(it->max_u, 1.0 - p);
        sy += y;
        stt += x * x;
        sty += x * y;
    }
    const double a = sy / static_cast<double>(window);
    const double b = sty / stt;
    if (!(b < 0.0)) throw std::logic_error("detect_blowup: (max u)^{1-p} is not decreasing");
    return t_mean - a / b;
}

Trajectory ancient_approximation(const ManifoldPtr& m, double p, double t_blow, double t_start, double eps,
                                 std::size_t mode_index, const EvolveControls& controls,
                                 std::optional<double> t_end) {
    if (!m) throw std::invalid_argument("ancient_approximation: null manifold");
    require_exponent(p);
    if (!(t_blow - t_start >= 10.0))
        throw std::invalid_argument("ancient_approximation: need T_blow - t_start >= 10");
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::invalid_argument("ancient_approximation: eps must lie in [0, 1)");
    const double stop = t_end.value_or(t_blow - 1e-2);
    if (!(stop > t_start && stop < t_blow))
        throw std::invalid_argument("ancient_approximation: end time must lie in (t_start, T_blow)");

    const double background = trivial_ancient(p, t_blow, t_start);
    ScalarField u0(m->node_count(), background);
    if (eps > 0.0) {
        const auto mode = laplacian_eigenmode(*m, mode_index);
        for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = background * (1.0 + eps * mode.mode[i]);
    } else if (mode_index >= m->node_count()) {
        throw std::invalid_argument("ancient_approximation: eigenmode index out of range");
    }
    return evolve(m, u0, t_start, stop, p, controls);
}

}  // namespace semiheat
