#include "semiheat/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "semiheat/reaction_ode.hpp"

namespace semiheat {

namespace {

double binomial(int n, int r) {
    double out = 1.0;
    for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
    return out;
}

std::size_t level_count(std::size_t base, int level) {
    return (base - 1) * (std::size_t{1} << level) + 1;
}

double grid_point(std::size_t i, std::size_t count) {
    return kCutoffGridEnd * static_cast<double>(i) / static_cast<double>(count - 1);
}

bool within(double a, double b, double rel) { return std::abs(b - a) <= rel * std::abs(a); }

}  // namespace

CutoffProfile::CutoffProfile(int k, int q) : k_(k), q_(q), slope_coeff_(k * binomial(2 * k - 1, k - 1)) {
    if (k < 2) throw std::invalid_argument("cutoff: contact order k must be at least 2");
    if (q < 1) throw std::invalid_argument("cutoff: power q must be at least 1");
}

CutoffProfile::Eta CutoffProfile::eta(double s) const {
    if (s <= 0.75) return {1.0, 0.0, 0.0};
    if (s >= 1.0) return {0.0, 0.0, 0.0};
    const double y = 4.0 * (1.0 - s);
    const double omy = 1.0 - y;
    double poly = 0.0;
    for (int j = 0; j < k_; ++j) poly += binomial(k_ - 1 + j, j) * std::pow(omy, j);
    const double v = std::pow(y, k_) * poly;
    const double s1 = slope_coeff_ * std::pow(y * omy, k_ - 1);
    const double s2 = slope_coeff_ * (k_ - 1) * std::pow(y * omy, k_ - 2) * (1.0 - 2.0 * y);
    return {v, -4.0 * s1, 16.0 * s2};
}

double CutoffProfile::value(double s) const { return std::pow(eta(s).v, q_); }

double CutoffProfile::first(double s) const {
    const auto e = eta(s);
    if (e.v == 0.0) return 0.0;
    return q_ * std::pow(e.v, q_ - 1) * e.d1;
}

double CutoffProfile::second(double s) const {
    const auto e = eta(s);
    if (e.v == 0.0) return 0.0;
    double out = q_ * std::pow(e.v, q_ - 1) * e.d2;
    if (q_ >= 2) out += q_ * (q_ - 1.0) * std::pow(e.v, q_ - 2) * e.d1 * e.d1;
    return out;
}

double CutoffProfile::log_defect(double s) const {
    const auto e = eta(s);
    if (e.v == 0.0) return 0.0;
    return q_ * std::pow(e.v, q_ - 2) * ((q_ + 1.0) * e.d1 * e.d1 - e.v * e.d2);
}

int minimal_power(double p, int k) {
    require_exponent(p);
    const double need = 2.0 * p / (p - 1.0);
    return std::max(1, static_cast<int>(std::ceil(need / k - 1e-12)));
}

int default_power(double p) {
    require_exponent(p);
    return static_cast<int>(std::ceil(2.0 * p / (p - 1.0) - 1e-12));
}

SmoothCutoff build_phi(double p, int k, int q, std::size_t grid_count) {
    require_exponent(p);
    if (grid_count < 256) throw std::invalid_argument("build_phi: grid_count must be at least 256");
    const CutoffProfile prof(k, q);
    SmoothCutoff c;
    c.k = k;
    c.q = q;
    c.grid.resize(grid_count);
    c.phi.resize(grid_count);
    c.dphi.resize(grid_count);
    c.d2phi.resize(grid_count);
    for (std::size_t i = 0; i < grid_count; ++i) {
        const double s = grid_point(i, grid_count);
        c.grid[i] = s;
        c.phi[i] = prof.value(s);
        c.dphi[i] = prof.first(s);
        c.d2phi[i] = prof.second(s);
    }
    return c;
}

PhiCertification verify_phi_inequality(const SmoothCutoff& c, double p, int refinement_levels) {
    require_exponent(p);
    if (refinement_levels < 2) throw std::invalid_argument("verify_phi_inequality: needs at least two levels");
    if (c.grid.size() < 2) throw std::invalid_argument("verify_phi_inequality: empty cutoff");
    const CutoffProfile prof = c.profile();
    PhiCertification out;
    for (int level = 0; level < refinement_levels; ++level) {
        const std::size_t count = level_count(c.grid.size(), level);
        double best = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double s = grid_point(i, count);
            const double phi = prof.value(s);
            if (phi <= 0.0) continue;
            best = std::max(best, std::abs(prof.log_defect(s)) / std::pow(phi, 1.0 / p));
        }
        out.level_maxima.push_back(best);
        out.level_counts.push_back(count);
    }
    // Every doubling must be stable: s = 1 sits at a different fraction of a cell on each
    // level, so a single ratio can hide the growth of a divergent maximum.
    out.bounded = true;
    for (std::size_t j = 1; j < out.level_maxima.size(); ++j)
        out.bounded = out.bounded && out.level_maxima[j] <= 1.05 * out.level_maxima[j - 1];
    out.constant = out.level_maxima.back();
    return out;
}

double LiYauCutoff::psi(double r, double t) const {
    const auto prof = space.profile();
    return prof.value(r / R) * prof.value((T0 - t) / T);
}

double LiYauCutoff::psi_r(double r, double t) const {
    const auto prof = space.profile();
    return prof.first(r / R) / R * prof.value((T0 - t) / T);
}

double LiYauCutoff::psi_rr(double r, double t) const {
    const auto prof = space.profile();
    return prof.second(r / R) / (R * R) * prof.value((T0 - t) / T);
}

double LiYauCutoff::psi_t(double r, double t) const {
    const auto prof = space.profile();
    return -prof.value(r / R) * prof.first((T0 - t) / T) / T;
}

LiYauCutoff build_liyau_psi(double R, double T, const std::vector<double>& a_list, int k, int q,
                            std::size_t grid_count, double T0) {
    if (!(R > 0.0 && T > 0.0)) throw std::invalid_argument("build_liyau_psi: R and T must be positive");
    for (double a : a_list)
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("build_liyau_psi: every a must lie in (0,1)");
    if (grid_count < 256) throw std::invalid_argument("build_liyau_psi: grid_count must be at least 256");

    LiYauCutoff out;
    out.R = R;
    out.T = T;
    out.T0 = T0;
    out.space = build_phi(2.0, k, q, grid_count);
    const CutoffProfile prof(k, q);

    // Ratios are scale free in s; R and T enter only through the 1/R, 1/R², 1/T factors.
    constexpr int kLevels = 3;
    std::map<double, std::vector<double>> a_levels;
    std::vector<double> time_levels;
    for (int level = 0; level < kLevels; ++level) {
        const std::size_t count = level_count(grid_count, level);
        std::map<double, double> best_a;
        double best_t = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double s = grid_point(i, count);
            const double phi = prof.value(s);
            if (phi <= 0.0) continue;
            const double d1 = std::abs(prof.first(s));
            const double d2 = std::abs(prof.second(s));
            for (double a : a_list) {
                const double den = std::pow(phi, a);
                best_a[a] = std::max(best_a[a], std::max(d1, d2) / den);
            }
            best_t = std::max(best_t, d1 / std::sqrt(phi));
        }
        for (double a : a_list) a_levels[a].push_back(best_a[a]);
        time_levels.push_back(best_t);
    }

    auto stable = [](const std::vector<double>& v) {
        for (std::size_t j = 1; j < v.size(); ++j)
            if (!within(v[j - 1], v[j], 0.05)) return false;
        return true;
    };
    for (const auto& [a, levels] : a_levels) {
        out.c_a[a] = levels.back();
        out.c_a_stable[a] = stable(levels);
        out.space.certified["C_a(" + std::to_string(a) + ")"] = levels.back();
    }
    out.c_time = time_levels.back();
    out.c_time_stable = stable(time_levels);
    out.space.certified["C_time"] = out.c_time;
    return out;
}

}  // namespace semiheat
