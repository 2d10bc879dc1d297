#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace semiheat {

/// φ(s) = η(s)^q, where η is the polynomial smoothstep of contact order k
/// on [3/4, 1]: η = 1 for s ≤ 3/4, η = 0 for s ≥ 1, η ≍ (1-s)^k near s = 1.
/// In the variable y = 4(1-s), η = S_k(y) = y^k Σ_{j<k} C(k-1+j, j)(1-y)^j,
/// which keeps the values relatively accurate as s → 1.
class CutoffProfile {
public:
    CutoffProfile(int k, int q);

    int contact_order() const noexcept { return k_; }
    int power() const noexcept { return q_; }

    double value(double s) const;
    double first(double s) const;
    double second(double s) const;
    /// 2φ'²/φ - φ'' evaluated without dividing by φ; zero where φ = 0.
    double log_defect(double s) const;

private:
    struct Eta {
        double v, d1, d2;
    };
    Eta eta(double s) const;

    int k_;
    int q_;
    double slope_coeff_;  // k·C(2k-1, k-1)
};

/// Sampled cutoff with closed-form derivatives and certified constants.
struct SmoothCutoff {
    std::vector<double> grid;
    std::vector<double> phi;
    std::vector<double> dphi;
    std::vector<double> d2phi;
    int k = 3;
    int q = 1;
    std::map<std::string, double> certified;

    CutoffProfile profile() const { return CutoffProfile(k, q); }
};

/// Grid extent for sampled cutoffs: s ∈ [0, kCutoffGridEnd].
inline constexpr double kCutoffGridEnd = 1.25;

/// Samples φ on grid_count uniform points of [0, 1.25].
/// Requires p > 1, k ≥ 2, q ≥ 1, grid_count ≥ 256.
SmoothCutoff build_phi(double p, int k, int q, std::size_t grid_count);

/// Smallest admissible power for contact order k: ⌈(2p/(p-1))/k⌉.
int minimal_power(double p, int k);
/// Default power q = ⌈2p/(p-1)⌉ used with k = 3.
int default_power(double p);

struct PhiCertification {
    bool bounded = false;
    double constant = 0.0;               ///< max at the finest level when bounded
    std::vector<double> level_maxima;    ///< one entry per refinement level
    std::vector<std::size_t> level_counts;
};

/// max over {φ > 0} of |2φ'²/φ - φ''|/φ^{1/p} on nested grids
/// (grid_count-1)·2^j + 1, j = 0..levels-1. Bounded iff every successive
/// ratio is ≤ 1.05. Needs at least two levels.
PhiCertification verify_phi_inequality(const SmoothCutoff& c, double p, int refinement_levels);

/// Space-time cutoff ψ(r,t) = φ(r/R)·φ((T0-t)/T) with certified ratio bounds.
struct LiYauCutoff {
    double R = 1.0;
    double T = 1.0;
    double T0 = 0.0;
    SmoothCutoff space;
    std::map<double, double> c_a;          ///< a → C_a with |∂_rφ|/φ^a ≤ C_a/R, |∂²_rrφ|/φ^a ≤ C_a/R²
    double c_time = 0.0;                   ///< |∂_tψ|/ψ^{1/2} ≤ C/T
    std::map<double, bool> c_a_stable;
    bool c_time_stable = false;

    double psi(double r, double t) const;
    double psi_r(double r, double t) const;
    double psi_rr(double r, double t) const;
    double psi_t(double r, double t) const;
};

/// Builds ψ and certifies |∂_rψ|/ψ^a, |∂²_rrψ|/ψ^a and |∂_tψ|/ψ^{1/2} by grid
/// maximisation over three nested levels; a constant is stable when it moves
/// by ≤ 5% per doubling. Throws std::invalid_argument for a ∉ (0,1).
LiYauCutoff build_liyau_psi(double R, double T, const std::vector<double>& a_list, int k, int q,
                            std::size_t grid_count, double T0 = 0.0);

}  // namespace semiheat
