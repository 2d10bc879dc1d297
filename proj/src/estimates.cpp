#include "semiheat/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "semiheat/errors.hpp"
#include "semiheat/reaction_ode.hpp"

namespace semiheat {

namespace {

const DiscreteManifold& manifold_of(const Trajectory& traj) {
    if (!traj.manifold) throw std::invalid_argument("trajectory has no manifold");
    return *traj.manifold;
}

void require_snapshots(const Trajectory& traj, std::size_t count, std::string_view who) {
    if (traj.size() < count)
        throw std::invalid_argument(std::string(who) + ": needs at least " + std::to_string(count) + " snapshots");
}

void require_proved_range(int n, double p, std::string_view who) {
    const double bound = gradient_exponent_threshold(n);
    if (p >= bound)
        throw RegimeError(std::string(who) + ": p = " + std::to_string(p) + " is outside 1 < p < n(n+2)/(n-1)^2 = " +
                          std::to_string(bound));
}

// Largest accepted step within (t_lo, t_hi]; falls back to the interval length.
double largest_step(const Trajectory& traj, double t_lo, double t_hi) {
    double dt = 0.0;
    for (const auto& s : traj.steps)
        if (s.t > t_lo && s.t <= t_hi) dt = std::max(dt, s.dt);
    return dt > 0.0 ? dt : (t_hi - t_lo);
}

double sup_abs(const Trajectory& traj) {
    double m = 0.0;
    for (const auto& s : traj.snapshots)
        for (double v : s) m = std::max(m, std::abs(v));
    return m;
}

void finalize(EstimateReport& r) { r.pass = r.c_fit <= r.c_cap; }

}  // namespace

std::string_view to_string(GradientVariant v) {
    switch (v) {
        case GradientVariant::local: return "local";
        case GradientVariant::global: return "global";
        case GradientVariant::ancient: return "ancient";
    }
    return "unknown";
}

GradientVariant parse_gradient_variant(std::string_view name) {
    for (auto v : {GradientVariant::local, GradientVariant::global, GradientVariant::ancient})
        if (to_string(v) == name) return v;
    throw std::invalid_argument("unknown gradient variant '" + std::string(name) + "'");
}

std::string_view to_string(ExponentRegime r) {
    switch (r) {
        case ExponentRegime::below_threshold: return "below_threshold";
        case ExponentRegime::open_gap: return "open_gap";
        case ExponentRegime::sobolev_critical_or_above: return "sobolev_critical_or_above";
        case ExponentRegime::low_dimension_all_subcritical: return "low_dimension_all_subcritical";
    }
    return "unknown";
}

double gradient_exponent_threshold(int n) {
    if (n < 1) throw std::invalid_argument("dimension must be at least 1");
    if (n == 1) return std::numeric_limits<double>::infinity();
    const double nd = n;
    return nd * (nd + 2.0) / ((nd - 1.0) * (nd - 1.0));
}

double sobolev_exponent(int n) {
    if (n < 1) throw std::invalid_argument("dimension must be at least 1");
    if (n <= 2) return std::numeric_limits<double>::infinity();
    return (n + 2.0) / (n - 2.0);
}

ExponentRegime exponent_regime(int n, double p) {
    if (n < 1) throw std::invalid_argument("exponent_regime: dimension must be at least 1");
    require_exponent(p);
    if (n <= 2) return ExponentRegime::low_dimension_all_subcritical;
    if (p < gradient_exponent_threshold(n)) return ExponentRegime::below_threshold;
    if (p < sobolev_exponent(n)) return ExponentRegime::open_gap;
    return ExponentRegime::sobolev_critical_or_above;
}

double triviality_threshold(int n, double K, double p) {
    require_exponent(p);
    return std::pow((n - 1) * K / p, 1.0 / (p - 1.0));
}

double admissible_a_min(int n, double T, double r0, double K) {
    if (!(r0 > 0.0)) throw std::invalid_argument("admissible_a_min: r0 must be positive");
    if (!(K >= 0.0)) throw std::invalid_argument("admissible_a_min: K must be nonnegative");
    return 4.0 + 2.0 * (n - 1) * T / (r0 * r0) + 2.0 * (n - 1) * T * std::sqrt(K) / r0;
}

double scheme_tolerance(const Trajectory& traj, double p, double dt) {
    const double h = manifold_of(traj).spacing();
    const double c = 10.0 * std::pow(sup_abs(traj), p);
    return c * dt + c * h * h;
}

EstimateReport check_positivity_min_ode(const Trajectory& traj, double p) {
    require_exponent(p);
    require_snapshots(traj, 3, "check_positivity_min_ode");
    manifold_of(traj);

    EstimateReport rep;
    rep.id = "positivity_min_ode";
    rep.c_cap = 1.0;

    std::vector<double> v(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) v[k] = traj.min_at(k);
    const bool nonneg = v.front() >= 0.0;
    const auto min_it = std::min_element(v.begin(), v.end());

    double worst = 0.0;
    double worst_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const double dt = traj.times[k + 1] - traj.times[k];
        // Rounding in the difference quotient is added so that very short steps are not misread.
        const double rounding =
            8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(v[k]), std::abs(v[k + 1])) / dt;
        const double tol =
            scheme_tolerance(traj, p, largest_step(traj, traj.times[k], traj.times[k + 1])) + rounding;
        const double lhs = (v[k + 1] - v[k]) / dt;
        // |v|^p bounded below on the interval by its smaller endpoint, or 0 if v changes sign.
        const double rhs = (v[k] * v[k + 1] <= 0.0) ? 0.0 : std::min(reaction(v[k], p), reaction(v[k + 1], p));
        const double violation = rhs - lhs;
        const double normalized = violation / tol;
        rep.rows.push_back({k, traj.times[k], lhs, rhs, normalized});
        worst_violation = std::max(worst_violation, violation);
        if (normalized > worst) {
            worst = normalized;
            rep.argmax_snapshot = k;
            rep.argmax_time = traj.times[k];
        }
    }
    rep.c_fit = worst;
    if (nonneg && *min_it < -1e-10) {
        const double excursion = -*min_it / 1e-10;
        if (excursion > rep.c_fit) {
            rep.c_fit = excursion;
            rep.argmax_snapshot = static_cast<std::size_t>(min_it - v.begin());
            rep.argmax_time = traj.times[*rep.argmax_snapshot];
        }
    }
    rep.diagnostics["min_value"] = *min_it;
    rep.diagnostics["nonnegative_data"] = nonneg ? 1.0 : 0.0;
    rep.diagnostics["worst_violation"] = worst_violation;
    finalize(rep);
    rep.verdict = rep.pass ? "min-ode-holds" : "violated";
    return rep;
}

EstimateReport check_gradient_estimate(const Trajectory& traj, const EstimateParams& params, GradientVariant variant,
                                       double c_cap, double grad_tol) {
    const auto& m = manifold_of(traj);
    const double p = traj.p;
    require_exponent(p);
    require_snapshots(traj, 1, "check_gradient_estimate");
    if (!(params.D > 0.0)) throw std::invalid_argument("check_gradient_estimate: D must be positive");
    if (!(params.K >= 0.0)) throw std::invalid_argument("check_gradient_estimate: K must be nonnegative");

    const int n = m.dimension();
    const double D = params.D;
    const double excess = p * std::pow(D, p - 1.0) - (n - 1) * params.K;
    const double root = std::sqrt(std::max(excess, 0.0));
    const double t_end = params.T0.value_or(traj.times.back());

    double S = root;
    double eval_lo = -std::numeric_limits<double>::infinity();
    double check_lo = eval_lo;
    double eval_radius = std::numeric_limits<double>::infinity();
    double check_radius = eval_radius;
    switch (variant) {
        case GradientVariant::local:
            if (!(params.R > 0.0 && params.T > 0.0))
                throw std::invalid_argument("check_gradient_estimate: local variant needs R > 0 and T > 0");
            S += 1.0 / params.R + 1.0 / std::sqrt(params.T);
            eval_lo = t_end - 0.25 * params.T;
            check_lo = t_end - params.T;
            eval_radius = 0.5 * params.R;
            check_radius = params.R;
            break;
        case GradientVariant::global:
            if (!(params.T > 0.0)) throw std::invalid_argument("check_gradient_estimate: global variant needs T > 0");
            S += 1.0 / std::sqrt(params.T);
            eval_lo = t_end - 0.25 * params.T;
            check_lo = t_end - params.T;
            break;
        case GradientVariant::ancient:
            break;
    }

    const std::size_t N = m.node_count();
    auto in_ball = [&](std::size_t i, double radius) { return m.distance_from_origin(i) <= radius; };

    double window_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        if (t < check_lo || t > t_end) continue;
        for (std::size_t i = 0; i < N; ++i) {
            if (!in_ball(i, check_radius)) continue;
            const double u = traj.snapshots[k][i];
            if (!(u > 0.0)) throw std::invalid_argument("check_gradient_estimate: non-positive value in window");
            window_max = std::max(window_max, u);
        }
    }
    if (window_max > D * (1.0 + 1e-12))
        throw std::invalid_argument("check_gradient_estimate: D = " + std::to_string(D) +
                                    " is below max u = " + std::to_string(window_max));

    EstimateReport rep;
    rep.id = std::string("gradient_") + std::string(to_string(variant));
    rep.c_cap = c_cap;
    rep.diagnostics["structural_factor"] = S;
    rep.diagnostics["curvature_excess"] = excess;
    rep.diagnostics["window_max_u"] = window_max;

    const bool degenerate = variant == GradientVariant::ancient && S == 0.0;
    if (degenerate) rep.c_cap = grad_tol;
    rep.diagnostics["degenerate"] = degenerate ? 1.0 : 0.0;

    const double floor = params.floor_value();
    double best = -1.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        if (t < eval_lo || t > t_end) continue;
        const auto g = gradient_norm(m, traj.snapshots[k]);
        SnapshotRow row{k, t, 0.0, 0.0, -1.0};
        std::size_t row_node = 0;
        for (std::size_t i = 0; i < N; ++i) {
            if (!in_ball(i, eval_radius)) continue;
            const double u = traj.snapshots[k][i];
            double lhs, rhs, ratio;
            if (degenerate) {
                lhs = g[i];
                rhs = 0.0;
                ratio = g[i];
            } else {
                lhs = g[i] / u;
                rhs = S * (1.0 + std::log(D / std::max(u, floor)));
                ratio = lhs / rhs;
            }
            if (ratio > row.ratio) {
                row.ratio = ratio;
                row.lhs = lhs;
                row.rhs = rhs;
                row_node = i;
            }
        }
        if (row.ratio < 0.0) continue;
        rep.rows.push_back(row);
        if (row.ratio > best) {
            best = row.ratio;
            rep.argmax_snapshot = k;
            rep.argmax_node = row_node;
            rep.argmax_time = t;
        }
    }
    rep.c_fit = std::max(best, 0.0);

    if (rep.argmax_snapshot) {
        const auto& u = traj.snapshots[*rep.argmax_snapshot];
        const auto g = gradient_norm(m, u);
        GradientFields fields{*rep.argmax_snapshot, ScalarField(N), ScalarField(N)};
        for (std::size_t i = 0; i < N; ++i) {
            const double f = std::log(std::max(u[i], floor) / D);
            const double grad_f = g[i] / std::max(u[i], floor);
            fields.f[i] = f;
            fields.w[i] = grad_f * grad_f / ((1.0 - f) * (1.0 - f));
        }
        rep.fields = std::move(fields);
    }
    finalize(rep);
    rep.verdict = degenerate ? (rep.pass ? "gradient-vanishes" : "gradient-above-tolerance") : (rep.pass ? "bounded" : "exceeds-cap");
    return rep;
}

EstimateReport check_decay(const Trajectory& traj, double t_blow, double p, double c_cap) {
    const auto& m = manifold_of(traj);
    require_exponent(p);
    require_proved_range(m.dimension(), p, "check_decay");
    require_snapshots(traj, 1, "check_decay");
    for (double t : traj.times)
        if (!(t < t_blow)) throw std::invalid_argument("check_decay: snapshot at or beyond T_blow");

    EstimateReport rep;
    rep.id = "decay";
    rep.c_cap = c_cap;
    double best = -std::numeric_limits<double>::infinity();
    bool monotone = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        const auto& s = traj.snapshots[k];
        const auto it = std::max_element(s.begin(), s.end());
        const double lhs = *it;
        const double rhs = std::pow(t_blow - t, -1.0 / (p - 1.0));
        const double ratio = lhs * std::pow(t_blow - t, 1.0 / (p - 1.0));
        rep.rows.push_back({k, t, lhs, rhs, ratio});
        if (ratio > best) {
            best = ratio;
            rep.argmax_snapshot = k;
            rep.argmax_node = static_cast<std::size_t>(it - s.begin());
            rep.argmax_time = t;
        }
        if (lhs < prev * (1.0 - 1e-12)) monotone = false;
        prev = lhs;
    }
    rep.c_fit = std::max(best, 0.0);
    rep.diagnostics["backward_decay"] = monotone ? 1.0 : 0.0;
    rep.diagnostics["max_u_earliest"] = rep.rows.front().lhs;
    rep.diagnostics["max_u_latest"] = rep.rows.back().lhs;
    finalize(rep);
    rep.verdict = rep.pass ? "decay-bound-holds" : "exceeds-cap";
    return rep;
}

EstimateReport check_universal(const Trajectory& traj, double t0, double t_end, double p, double c_cap) {
    const auto& m = manifold_of(traj);
    require_exponent(p);
    require_proved_range(m.dimension(), p, "check_universal");
    require_snapshots(traj, 1, "check_universal");
    for (double t : traj.times)
        if (!(t > t0 && t < t_end)) throw std::invalid_argument("check_universal: snapshot outside the open window");

    EstimateReport rep;
    rep.id = "universal";
    rep.c_cap = c_cap;
    const double e = -1.0 / (p - 1.0);
    const double ge = 2.0 / (p + 1.0);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        const auto& u = traj.snapshots[k];
        const auto g = gradient_norm(m, u);
        const double rhs = std::pow(std::abs(t - t0), e) + std::pow(std::abs(t_end - t), e);
        double lhs = -std::numeric_limits<double>::infinity();
        std::size_t node = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double val = u[i] + std::pow(g[i], ge);
            if (val > lhs) {
                lhs = val;
                node = i;
            }
        }
        const double ratio = lhs / rhs;
        rep.rows.push_back({k, t, lhs, rhs, ratio});
        if (ratio > best) {
            best = ratio;
            rep.argmax_snapshot = k;
            rep.argmax_node = node;
            rep.argmax_time = t;
        }
    }
    rep.c_fit = std::max(best, 0.0);
    finalize(rep);
    rep.verdict = rep.pass ? "universal-bound-holds" : "exceeds-cap";
    return rep;
}

EstimateReport check_lower_bound_lemma(const Trajectory& traj, const EstimateParams& params, double c_delta_cap) {
    const auto& m = manifold_of(traj);
    const double p = traj.p;
    require_exponent(p);
    require_snapshots(traj, 1, "check_lower_bound_lemma");
    if (!(params.delta > 0.0 && params.delta < 1.0))
        throw PreconditionFailure("check_lower_bound_lemma: delta must lie in (0,1)",
                                  std::numeric_limits<double>::quiet_NaN());
    if (!(params.L > 0.0 && params.r0 > 0.0 && params.A > 0.0))
        throw std::invalid_argument("check_lower_bound_lemma: L, r0 and A must be positive");

    const int n = m.dimension();
    const double a_min = admissible_a_min(n, params.T, params.r0, params.K);
    if (params.A < a_min)
        throw PreconditionFailure("check_lower_bound_lemma: A = " + std::to_string(params.A) +
                                      " is below the admissible minimum " + std::to_string(a_min),
                                  a_min);
    const double big_radius = params.A * params.r0;
    if (big_radius > m.diameter())
        throw std::invalid_argument("check_lower_bound_lemma: ball B_{A r0} exceeds the manifold diameter");
    const double t_start = traj.times.front();
    if (traj.times.back() - t_start > params.T * (1.0 + 1e-12))
        throw std::invalid_argument("check_lower_bound_lemma: trajectory is longer than the window T");

    const auto& first = traj.snapshots.front();
    double start_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < first.size(); ++i)
        if (m.distance_from_origin(i) <= big_radius) start_min = std::min(start_min, first[i]);
    if (start_min < -params.L)
        throw PreconditionFailure("check_lower_bound_lemma: u < -L on B_{A r0} at the window start", -start_min);

    const double scale = std::pow(big_radius, 2.0 / (p - 1.0));
    const double second_branch = -c_delta_cap / scale;
    const double tol = scheme_tolerance(traj, p, largest_step(traj, t_start, traj.times.back()));
    const double small_radius = 0.25 * big_radius;

    EstimateReport rep;
    rep.id = "lower_bound_lemma";
    rep.c_cap = c_delta_cap;
    double worst_margin = std::numeric_limits<double>::infinity();
    double needed = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        const double env = ode_lower_envelope(p, params.delta, params.L, t - t_start);
        const double bound = std::min(env, second_branch);
        double row_min = std::numeric_limits<double>::infinity();
        std::size_t row_node = 0;
        for (std::size_t i = 0; i < m.node_count(); ++i) {
            if (m.distance_from_origin(i) > small_radius) continue;
            const double u = traj.snapshots[k][i];
            if (u < row_min) {
                row_min = u;
                row_node = i;
            }
            if (u + tol < env) needed = std::max(needed, -(u + tol) * scale);
        }
        const double margin = row_min - bound;
        rep.rows.push_back({k, t, row_min, bound, margin});
        if (margin < worst_margin) {
            worst_margin = margin;
            rep.argmax_snapshot = k;
            rep.argmax_node = row_node;
            rep.argmax_time = t;
        }
    }
    rep.c_fit = needed;
    rep.diagnostics["a_min"] = a_min;
    rep.diagnostics["worst_margin"] = worst_margin;
    rep.diagnostics["second_branch"] = second_branch;
    rep.diagnostics["tol_scheme"] = tol;
    finalize(rep);
    rep.verdict = rep.pass ? "envelope-holds" : "envelope-violated";
    return rep;
}

EstimateReport check_triviality(const Trajectory& traj, double p, double rate_tol, double interval) {
    const auto& m = manifold_of(traj);
    require_exponent(p);
    if (!m.is_compact()) throw std::invalid_argument("check_triviality: manifold must be compact");
    if (!(m.ricci_lower() > 0.0) || m.dimension() < 2)
        throw std::invalid_argument("check_triviality: needs positive Ricci lower bound (n >= 2)");
    if (!(interval > 0.0)) throw std::invalid_argument("check_triviality: interval must be positive");
    require_snapshots(traj, 2, "check_triviality");

    const int n = m.dimension();
    const double theta = triviality_threshold(n, m.curvature_k(), p);
    const double lambda1 = first_nonzero_eigenvalue(m);

    const std::size_t S = traj.size();
    std::vector<double> osc(S), umax(S), rate(S);
    double scale = 0.0;
    for (std::size_t k = 0; k < S; ++k) {
        umax[k] = traj.max_at(k);
        osc[k] = umax[k] - traj.min_at(k);
        rate[k] = lambda1 - p * std::pow(std::max(umax[k], 0.0), p - 1.0);
        scale = std::max(scale, std::abs(umax[k]));
    }
    // Below this the oscillation is solver roundoff and its decay rate is meaningless.
    const double osc_floor = 1e-12 * std::max(scale, 1e-300);

    EstimateReport rep;
    rep.id = "triviality";
    rep.c_cap = 1.0 + rate_tol;
    rep.diagnostics["threshold"] = theta;
    rep.diagnostics["lambda1"] = lambda1;

    // Cumulative ∫ rate dt by the trapezoid rule.
    std::vector<double> integral(S, 0.0);
    for (std::size_t k = 1; k < S; ++k)
        integral[k] = integral[k - 1] + 0.5 * (rate[k] + rate[k - 1]) * (traj.times[k] - traj.times[k - 1]);

    std::optional<std::size_t> anchor;
    for (std::size_t k = 0; k < S; ++k) {
        if (umax[k] > theta) continue;
        if (!anchor) anchor = k;
        const double predicted = osc[*anchor] * std::exp(-(integral[k] - integral[*anchor]));
        rep.rows.push_back({k, traj.times[k], osc[k], predicted, predicted > 0.0 ? osc[k] / predicted : 0.0});
    }

    double worst = 0.0;
    double worst_dev = 0.0;
    std::size_t intervals = 0;
    std::size_t a = 0;
    while (a < S) {
        if (umax[a] > theta) {
            ++a;
            continue;
        }
        std::size_t b = a;
        while (b < S && traj.times[b] < traj.times[a] + interval * (1.0 - 1e-9) && umax[b] <= theta) ++b;
        if (b >= S || umax[b] > theta) break;
        ++intervals;
        const double pred = integral[b] - integral[a];
        if (osc[a] > osc_floor && osc[b] > osc_floor) {
            const double ratio = osc[b] / (osc[a] * std::exp(-pred));
            if (ratio > worst) {
                worst = ratio;
                rep.argmax_snapshot = b;
                rep.argmax_time = traj.times[b];
            }
            const double observed = std::log(osc[a] / osc[b]);
            worst_dev = std::max(worst_dev, std::abs(observed - pred) / std::abs(pred));
        }
        a = b;
    }
    rep.c_fit = worst;
    rep.diagnostics["intervals"] = static_cast<double>(intervals);
    rep.diagnostics["rate_deviation"] = worst_dev;
    if (intervals == 0) {
        rep.pass = false;
        rep.verdict = "inconclusive";
        return rep;
    }
    finalize(rep);
    rep.verdict = rep.pass ? "trivial-limit" : "not-trivial";
    return rep;
}

double talenti_profile(int n, double r) {
    const double a = n * (n - 2.0);
    return std::pow(a / (a + r * r), 0.5 * (n - 2.0));
}

double talenti_residual(int n, std::size_t grid_count, double r_max) {
    if (n < 3) throw std::invalid_argument("talenti_residual: needs n >= 3");
    const auto m = build_manifold(ManifoldKind::euclidean_radial, n, r_max, grid_count);
    ScalarField u(m.node_count());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = talenti_profile(n, m.nodes()[i]);
    const auto lap = laplace_beltrami(m, u);
    const double crit = (n + 2.0) / (n - 2.0);
    double res = 0.0;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) res = std::max(res, std::abs(lap[i] + std::pow(u[i], crit)));
    return res;
}

}  // namespace semiheat
