#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semiheat {

enum class ManifoldKind { sphere_zonal, circle, flat_torus_1d, euclidean_radial };

std::string_view to_string(ManifoldKind kind);
/// Throws std::invalid_argument for unknown names.
ManifoldKind parse_manifold_kind(std::string_view name);

/// Nodal values aligned with a DiscreteManifold.
using ScalarField = std::vector<double>;

/// One-dimensional reduction of a rotationally symmetric (or flat periodic)
/// model manifold.
///
/// The Laplace-Beltrami operator is stored in conservative form
///
///     (Δu)_i = [ c_{i+1/2} (u_{i+1} - u_i) - c_{i-1/2} (u_i - u_{i-1}) ] / V_i
///
/// where V_i is the volume of the dual cell around node i and c_{i+1/2} the
/// edge conductance. This makes Δ symmetric in the V-weighted inner product,
/// gives zero total flux on closed manifolds, and keeps the implicit
/// diffusion matrix an M-matrix.
///
/// Pole handling (θ = 0, π on the sphere, r = 0 in the radial model): the
/// pole cell is the half-cell [0, h/2] and the edge weight sin^{n-1} (resp.
/// r^{n-1}) vanishes at the pole, which reproduces Δu ≈ n·u_θθ with the ghost
/// reflection u_{-1} = u_1. The radial model uses a zero-flux (Neumann)
/// condition at R_max.
class DiscreteManifold {
public:
    ManifoldKind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return n_; }
    /// Geodesic radius (sphere), circumference (circle/torus) or R_max (radial).
    double size() const noexcept { return size_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    /// Chart coordinates: θ for the sphere, x for periodic kinds, r for radial.
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> volume_weights() const noexcept { return volumes_; }
    /// λ with Ric ≥ λ g.
    double ricci_lower() const noexcept { return ricci_lower_; }
    /// K with Ric ≥ K (n-1) g; zero in dimension one.
    double curvature_k() const noexcept;
    /// Chart spacing (Δθ, Δx or Δr).
    double chart_spacing() const noexcept { return chart_h_; }
    /// Geodesic spacing between neighbouring nodes.
    double spacing() const noexcept { return metric_scale_ * chart_h_; }

    bool is_periodic() const noexcept;
    bool is_compact() const noexcept;
    /// Largest possible geodesic distance from the reference point x0.
    double diameter() const noexcept;
    /// Geodesic distance from x0 (north pole, origin, or node 0 on periodic kinds).
    double distance_from_origin(std::size_t i) const;

    /// Tridiagonal coefficients of Δ. On periodic kinds lower()[0] couples
    /// node 0 to node N-1 and upper()[N-1] couples node N-1 to node 0; on
    /// the other kinds those entries are zero.
    std::span<const double> lower() const noexcept { return lower_; }
    std::span<const double> diagonal() const noexcept { return diag_; }
    std::span<const double> upper() const noexcept { return upper_; }

    /// Edge conductances c_{i+1/2}, i = 0..N-1 (last entry wraps on periodic kinds).
    std::span<const double> conductances() const noexcept { return conductance_; }

private:
    friend DiscreteManifold build_manifold(ManifoldKind, int, double, std::size_t);
    DiscreteManifold() = default;

    ManifoldKind kind_{ManifoldKind::circle};
    int n_{1};
    double size_{0.0};
    double ricci_lower_{0.0};
    double chart_h_{0.0};
    double metric_scale_{1.0};
    std::vector<double> nodes_;
    std::vector<double> volumes_;
    std::vector<double> conductance_;
    std::vector<double> lower_;
    std::vector<double> diag_;
    std::vector<double> upper_;
};

using ManifoldPtr = std::shared_ptr<const DiscreteManifold>;

/// Builds a uniform-node model manifold.
/// Requires node_count ≥ 16, size > 0, n ≥ 2 for sphere_zonal/euclidean_radial
/// and n = 1 for circle/flat_torus_1d; throws std::invalid_argument otherwise.
DiscreteManifold build_manifold(ManifoldKind kind, int n, double size, std::size_t node_count);

ManifoldPtr make_manifold(ManifoldKind kind, int n, double size, std::size_t node_count);

ScalarField laplace_beltrami(const DiscreteManifold& m, std::span<const double> u);

/// |∇u| with centered differences; second-order one-sided at non-periodic ends.
ScalarField gradient_norm(const DiscreteManifold& m, std::span<const double> u);

/// ⟨a, b⟩ weighted by the cell volumes.
double weighted_inner(const DiscreteManifold& m, std::span<const double> a, std::span<const double> b);

/// Eigenpair of -Δ (λ ≥ 0), ordered by increasing λ starting from index 0.
struct Eigenmode {
    double lambda;
    ScalarField mode;  ///< sup-norm 1, positive at node 0 (or at the first node where it is nonzero)
};

/// Discrete eigenmode of the Laplacian on a compact manifold.
/// Periodic kinds use the exact discrete Fourier modes, ordered
/// 1, cos(kx), sin(kx), ... Throws std::invalid_argument for an index out of range
/// or a non-compact manifold.
Eigenmode laplacian_eigenmode(const DiscreteManifold& m, std::size_t index);

/// Smallest nonzero eigenvalue of -Δ on a compact manifold.
double first_nonzero_eigenvalue(const DiscreteManifold& m);

/// Throws std::invalid_argument unless u has one finite entry per node.
void require_aligned(const DiscreteManifold& m, std::span<const double> u, std::string_view what);

}  // namespace semiheat
