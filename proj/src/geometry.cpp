#include "semiheat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

namespace semiheat {

namespace {

constexpr double kPi = std::numbers::pi;

// ∫_a^b sin^{n-1}θ dθ; cells are narrow so a fixed Gauss rule is exact to roundoff.
double sine_power_integral(int n, double a, double b) {
    if (b <= a) return 0.0;
    auto f = [n](double th) { return std::pow(std::sin(th), n - 1); };
    return boost::math::quadrature::gauss<double, 15>::integrate(f, a, b);
}

void assemble_stencil(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
                      const std::vector<double>& c, const std::vector<double>& vol, bool periodic) {
    const std::size_t n = vol.size();
    lower.assign(n, 0.0);
    diag.assign(n, 0.0);
    upper.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double c_minus = (i > 0) ? c[i - 1] : (periodic ? c[n - 1] : 0.0);
        const double c_plus = c[i];
        lower[i] = c_minus / vol[i];
        upper[i] = c_plus / vol[i];
        diag[i] = -(lower[i] + upper[i]);
    }
}

}  // namespace

std::string_view to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::sphere_zonal: return "sphere_zonal";
        case ManifoldKind::circle: return "circle";
        case ManifoldKind::flat_torus_1d: return "flat_torus_1d";
        case ManifoldKind::euclidean_radial: return "euclidean_radial";
    }
    return "unknown";
}

ManifoldKind parse_manifold_kind(std::string_view name) {
    for (auto k : {ManifoldKind::sphere_zonal, ManifoldKind::circle, ManifoldKind::flat_torus_1d,
                   ManifoldKind::euclidean_radial}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown manifold kind '" + std::string(name) + "'");
}

double DiscreteManifold::curvature_k() const noexcept {
    return n_ >= 2 ? ricci_lower_ / (n_ - 1) : 0.0;
}

bool DiscreteManifold::is_periodic() const noexcept {
    return kind_ == ManifoldKind::circle || kind_ == ManifoldKind::flat_torus_1d;
}

bool DiscreteManifold::is_compact() const noexcept {
    return kind_ != ManifoldKind::euclidean_radial;
}

double DiscreteManifold::diameter() const noexcept {
    switch (kind_) {
        case ManifoldKind::sphere_zonal: return kPi * size_;
        case ManifoldKind::circle:
        case ManifoldKind::flat_torus_1d: return 0.5 * size_;
        case ManifoldKind::euclidean_radial: return size_;
    }
    return 0.0;
}

double DiscreteManifold::distance_from_origin(std::size_t i) const {
    if (i >= nodes_.size()) throw std::out_of_range("node index out of range");
    if (is_periodic()) return std::min(nodes_[i], size_ - nodes_[i]);
    return metric_scale_ * nodes_[i];
}

DiscreteManifold build_manifold(ManifoldKind kind, int n, double size, std::size_t node_count) {
    if (node_count < 16) throw std::invalid_argument("node_count must be at least 16");
    if (!(size > 0.0) || !std::isfinite(size)) throw std::invalid_argument("manifold size must be positive");
    const bool periodic = kind == ManifoldKind::circle || kind == ManifoldKind::flat_torus_1d;
    if (periodic && n != 1)
        throw std::invalid_argument(std::string(to_string(kind)) + " requires dimension n = 1");
    if (!periodic && n < 2)
        throw std::invalid_argument(std::string(to_string(kind)) + " requires dimension n >= 2");

    DiscreteManifold m;
    m.kind_ = kind;
    m.n_ = n;
    m.size_ = size;
    const std::size_t N = node_count;
    m.nodes_.resize(N);
    m.volumes_.resize(N);
    m.conductance_.assign(N, 0.0);

    switch (kind) {
        case ManifoldKind::sphere_zonal: {
            const double h = kPi / static_cast<double>(N - 1);
            const double rn = std::pow(size, n);
            m.chart_h_ = h;
            m.metric_scale_ = size;
            m.ricci_lower_ = (n - 1) / (size * size);
            for (std::size_t i = 0; i < N; ++i) {
                const double th = h * static_cast<double>(i);
                m.nodes_[i] = th;
                m.volumes_[i] = rn * sine_power_integral(n, std::max(0.0, th - 0.5 * h), std::min(kPi, th + 0.5 * h));
                if (i + 1 < N) m.conductance_[i] = std::pow(size, n - 2) * std::pow(std::sin(th + 0.5 * h), n - 1) / h;
            }
            break;
        }
        case ManifoldKind::circle:
        case ManifoldKind::flat_torus_1d: {
            const double h = size / static_cast<double>(N);
            m.chart_h_ = h;
            m.ricci_lower_ = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                m.nodes_[i] = h * static_cast<double>(i);
                m.volumes_[i] = h;
                m.conductance_[i] = 1.0 / h;
            }
            break;
        }
        case ManifoldKind::euclidean_radial: {
            const double h = size / static_cast<double>(N - 1);
            m.chart_h_ = h;
            m.ricci_lower_ = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double r = h * static_cast<double>(i);
                m.nodes_[i] = r;
                const double a = std::max(0.0, r - 0.5 * h);
                const double b = std::min(size, r + 0.5 * h);
                m.volumes_[i] = (std::pow(b, n) - std::pow(a, n)) / n;
                if (i + 1 < N) m.conductance_[i] = std::pow(r + 0.5 * h, n - 1) / h;
            }
            break;
        }
    }
    assemble_stencil(m.lower_, m.diag_, m.upper_, m.conductance_, m.volumes_, periodic);
    return m;
}

ManifoldPtr make_manifold(ManifoldKind kind, int n, double size, std::size_t node_count) {
    return std::make_shared<const DiscreteManifold>(build_manifold(kind, n, size, node_count));
}

void require_aligned(const DiscreteManifold& m, std::span<const double> u, std::string_view what) {
    if (u.size() != m.node_count())
        throw std::invalid_argument(std::string(what) + ": field has " + std::to_string(u.size()) +
                                    " values, manifold has " + std::to_string(m.node_count()) + " nodes");
    for (double v : u)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": field contains non-finite values");
}

ScalarField laplace_beltrami(const DiscreteManifold& m, std::span<const double> u) {
    require_aligned(m, u, "laplace_beltrami");
    const std::size_t N = u.size();
    const auto lo = m.lower();
    const auto up = m.upper();
    ScalarField out(N);
    // Flux form: the diagonal is -(lower + upper), and differences keep constants exact.
    for (std::size_t i = 0; i < N; ++i) {
        const double left = (i > 0) ? u[i - 1] : u[N - 1];
        const double right = (i + 1 < N) ? u[i + 1] : u[0];
        out[i] = lo[i] * (left - u[i]) + up[i] * (right - u[i]);
    }
    return out;
}

ScalarField gradient_norm(const DiscreteManifold& m, std::span<const double> u) {
    require_aligned(m, u, "gradient_norm");
    const std::size_t N = u.size();
    const double h = m.spacing();
    ScalarField g(N);
    if (m.is_periodic()) {
        for (std::size_t i = 0; i < N; ++i) {
            const double left = u[(i + N - 1) % N];
            const double right = u[(i + 1) % N];
            g[i] = std::abs(right - left) / (2.0 * h);
        }
        return g;
    }
    for (std::size_t i = 1; i + 1 < N; ++i) g[i] = std::abs(u[i + 1] - u[i - 1]) / (2.0 * h);
    g[0] = std::abs(4.0 * (u[1] - u[0]) - (u[2] - u[0])) / (2.0 * h);
    g[N - 1] = std::abs(4.0 * (u[N - 1] - u[N - 2]) - (u[N - 1] - u[N - 3])) / (2.0 * h);
    return g;
}

double weighted_inner(const DiscreteManifold& m, std::span<const double> a, std::span<const double> b) {
    if (a.size() != m.node_count() || b.size() != m.node_count())
        throw std::invalid_argument("weighted_inner: misaligned fields");
    const auto w = m.volume_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

namespace {

void normalize_mode(ScalarField& v) {
    double sup = 0.0;
    for (double x : v) sup = std::max(sup, std::abs(x));
    if (sup == 0.0) return;
    double sign = 1.0;
    for (double x : v) {
        if (std::abs(x) > 1e-8 * sup) {
            sign = x > 0 ? 1.0 : -1.0;
            break;
        }
    }
    for (double& x : v) x *= sign / sup;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> symmetric_reduction(const DiscreteManifold& m, bool vectors) {
    const std::size_t N = m.node_count();
    const auto vol = m.volume_weights();
    const auto c = m.conductances();
    Eigen::VectorXd d(N);
    Eigen::VectorXd e(N - 1);
    for (std::size_t i = 0; i < N; ++i) {
        const double cm = (i > 0) ? c[i - 1] : 0.0;
        d[static_cast<Eigen::Index>(i)] = (cm + c[i]) / vol[i];
        if (i + 1 < N) e[static_cast<Eigen::Index>(i)] = -c[i] / std::sqrt(vol[i] * vol[i + 1]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigen solve failed");
    return es;
}

}  // namespace

Eigenmode laplacian_eigenmode(const DiscreteManifold& m, std::size_t index) {
    if (!m.is_compact()) throw std::invalid_argument("eigenmodes require a compact manifold");
    const std::size_t N = m.node_count();
    if (index >= N) throw std::invalid_argument("eigenmode index out of range");

    Eigenmode out;
    out.mode.resize(N);
    if (m.is_periodic()) {
        const double h = m.spacing();
        if (index == 0) {
            out.lambda = 0.0;
            std::fill(out.mode.begin(), out.mode.end(), 1.0);
            return out;
        }
        const std::size_t j = (index + 1) / 2;
        const bool cosine = (index % 2) == 1;
        const double s = std::sin(kPi * static_cast<double>(j) / static_cast<double>(N));
        out.lambda = 4.0 * s * s / (h * h);
        for (std::size_t i = 0; i < N; ++i) {
            const double arg = 2.0 * kPi * static_cast<double>(j * i % N) / static_cast<double>(N);
            out.mode[i] = cosine ? std::cos(arg) : std::sin(arg);
        }
        normalize_mode(out.mode);
        return out;
    }

    const auto es = symmetric_reduction(m, true);
    const auto vol = m.volume_weights();
    const auto col = static_cast<Eigen::Index>(index);
    out.lambda = es.eigenvalues()[col];
    for (std::size_t i = 0; i < N; ++i)
        out.mode[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), col) / std::sqrt(vol[i]);
    normalize_mode(out.mode);
    return out;
}

double first_nonzero_eigenvalue(const DiscreteManifold& m) {
    if (!m.is_compact()) throw std::invalid_argument("eigenvalues require a compact manifold");
    if (m.is_periodic()) {
        const double h = m.spacing();
        const double s = std::sin(kPi / static_cast<double>(m.node_count()));
        return 4.0 * s * s / (h * h);
    }
    return symmetric_reduction(m, false).eigenvalues()[1];
}

}  // namespace semiheat
