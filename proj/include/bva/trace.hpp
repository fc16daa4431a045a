#pragma once

#include "bva/discrete.hpp"
#include "bva/domain.hpp"
#include "bva/nullspace.hpp"
#include "bva/operator.hpp"
#include "bva/projection.hpp"

#include <array>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace bva {

/// Lattice ball of the level-j cover meeting the boundary strip, with its reflected ball.
struct CoverBall {
    std::array<int, 3> lattice{0, 0, 0};
    Point center;
    Point reflected_center;
};

/// Level-j cover: balls of radius s = 2^-j / 8 centred on the lattice s Z^n,
/// reflected balls of radius s / 2 at depth 2.25 (s / 2) behind the nearest boundary point.
class WhitneyCover {
public:
    /// Throws DomainError below the domain's coarsest level or when a reflected ball
    /// cannot be placed with clearance >= its radius.
    WhitneyCover(const Domain& domain, int level);

    int level() const noexcept { return level_; }
    const Domain& domain() const noexcept { return domain_; }
    double spacing() const noexcept { return spacing_; }
    double radius() const noexcept { return spacing_; }
    double reflected_radius() const noexcept { return 0.5 * spacing_; }
    /// 2^-j: width of the boundary strip U_j.
    double strip_width() const noexcept { return 8.0 * spacing_; }
    const std::vector<CoverBall>& balls() const noexcept { return balls_; }

    /// 1 on U_{j+1} and outside the domain, 0 beyond depth 2^-j, smoothstep in between.
    double cutoff(const Point& x) const;
    /// Partition weights eta_k(x) of the strip balls containing x (normalised over the full lattice).
    void partition(const Point& x, std::vector<std::pair<std::size_t, double>>& out) const;
    /// Number of lattice balls containing x.
    int multiplicity(const Point& x) const;
    /// Smallest d(B#, boundary) / radius(B#) over all reflected balls.
    double min_clearance_ratio() const;

private:
    template <class Visit>
    void visit_lattice(const Point& x, Visit&& visit) const;

    Domain domain_;
    int level_;
    double spacing_;
    std::vector<CoverBall> balls_;
    std::unordered_map<long long, std::size_t> index_;
};

struct TraceOptions {
    std::optional<int> j_min;  ///< default: domain coarsest level
    std::optional<int> j_max;  ///< default: finest level with 2^-j >= h
    int cells_per_radius = 8;  ///< reflected-ball quadrature
    int mesh_points_per_ball = 16;
    bool allow_truncated_kernel = false;
    std::optional<int> kernel_cutoff;
    double tolerance = 1e-3;  ///< relative, on the last level difference
};

/// Kernel basis used by T_j. Throws Error for operators without a finite polynomial
/// kernel unless a truncated basis is explicitly allowed.
KernelBasis trace_kernel(const Operator& op, const TraceOptions& opts = {});

/// T_j u = (1 - rho_j) u + rho_j sum_k eta_k Pi_k u, with per-ball projections cached.
class TjEvaluator {
public:
    TjEvaluator(const WhitneyCover& cover, const KernelProjector& unit_projector, const DiscreteField& u);

    /// T_j u(x).
    void evaluate(const Point& x, std::span<double> out) const;
    /// sum_k eta_k(x) Pi_k u(x), the boundary value of T_j u.
    void smoothed(const Point& x, std::span<double> out) const;
    std::size_t projections_computed() const noexcept { return cache_.size(); }

private:
    const PolynomialVectorField& projection(std::size_t ball) const;

    const WhitneyCover& cover_;
    KernelProjector proj_;
    const DiscreteField& u_;
    mutable std::unordered_map<std::size_t, PolynomialVectorField> cache_;
    mutable std::vector<std::pair<std::size_t, double>> scratch_;
};

/// T_j u at every cell centre of u's grid inside the domain; other cells keep u.
DiscreteField apply_Tj(const Operator& op, const WhitneyCover& cover, const DiscreteField& u,
                       const KernelBasis& basis, int cells_per_radius = 8);

struct TraceResult {
    BoundaryMesh mesh;
    std::vector<int> levels;
    std::vector<Eigen::MatrixXd> level_values;  ///< N x M per level
    Eigen::MatrixXd boundary_values;            ///< finest level
    std::vector<double> per_level_l1_diffs;     ///< || tr T_{j+1} u - tr T_j u ||_{L1}
    std::vector<double> strip_variation;        ///< |A u|(U_{j-2} \ U_{j+2}) per difference
    double trace_l1 = 0.0;                      ///< || tr u ||_{L1} at the finest level
    bool converged = false;
    double tolerance = 0.0;
};

/// Finest level with 2^-j >= h.
int finest_level(const Grid& grid);

TraceResult compute_trace(const Operator& op, const Domain& domain, const DiscreteField& u,
                          const TraceOptions& opts = {});
/// Same with a precomputed kernel basis.
TraceResult compute_trace(const KernelBasis& basis, const Operator& op, const Domain& domain,
                          const DiscreteField& u, const TraceOptions& opts = {});

/// A* phi = sum_alpha A_alpha^T d_alpha phi, derivatives of phi by central differences.
void apply_adjoint(const Operator& op, const FieldFn& phi, const Point& x, std::span<double> out,
                   double step = 1e-5);

struct GaussGreen {
    double residual = 0.0;
    double bulk_derivative = 0.0;  ///< int A u . phi
    double bulk_adjoint = 0.0;     ///< int u . A* phi
    double boundary = 0.0;         ///< int (tr u (x)_A nu) . phi
    TraceResult trace;
};

/// Throws InconsistencyError when the last relative trace difference exceeds `trace_tolerance`.
GaussGreen gauss_green_residual(const Operator& op, const Domain& domain, const DiscreteField& u,
                                const FieldFn& phi, const TraceOptions& opts = {}, double trace_tolerance = 1e-2);

struct GluingResult {
    MeasureField measure;        ///< A w: bulk density plus jump atoms on the inner boundary
    BoundaryMesh mesh;           ///< inner boundary, normals outward from the inner domain
    Eigen::MatrixXd jump;        ///< K x M, (tr v - tr u) (x)_A nu
    double jump_mass = 0.0;      ///< sum |jump| dH
    TraceResult inner_trace;     ///< interior trace of u
    TraceResult outer_trace;     ///< exterior trace of v
    std::vector<double> inner_fraction;
    std::vector<double> outer_fraction;
};

/// w = u on `inner`, v on `outer` \ `inner`; u and v share one grid.
GluingResult gluing_jump(const Operator& op, const Domain& inner, const Domain& outer, const DiscreteField& u,
                         const DiscreteField& v, const TraceOptions& opts = {});

/// |<A w, phi> + int w . A* phi| for a test field phi vanishing near the outer boundary.
double gluing_pairing_defect(const Operator& op, const GluingResult& g, const DiscreteField& u,
                             const DiscreteField& v, const FieldFn& phi);

struct ZeroTrace {
    bool zero = false;
    double trace_l1 = 0.0;
    double jump_mass = 0.0;
    double threshold = 0.0;
};

/// Zero trace iff ||tr u||_{L1} < tolerance * max(1, max|u|) * |boundary|; the jump against
/// the zero extension must give the same verdict (InconsistencyError otherwise).
ZeroTrace zero_trace_check(const Operator& op, const Domain& domain, const DiscreteField& u,
                           double tolerance = 1e-6, const TraceOptions& opts = {});

}  // namespace bva
