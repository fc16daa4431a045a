#pragma once

#include "bva/discrete.hpp"
#include "bva/domain.hpp"
#include "bva/integrand.hpp"
#include "bva/operator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace bva {

struct SolverOptions {
    int max_iterations = 50000;
    double tolerance = 1e-7;  ///< relative energy change over `window` iterations
    int window = 50;
    int ring = 8;             ///< exterior cells around the domain, fixed to u0
    bool hard_boundary = false;
    bool start_from_datum = false;  ///< default start is u = 0 inside the domain
    int power_iterations = 200;
    std::uint64_t seed = 1;
};

/// Minimise F_{u0}[u] over fields on `grid`, equal to u0 outside the domain.
struct DirichletProblem {
    Operator op;
    Domain domain;
    Integrand integrand;
    FieldFn u0;
    Grid grid;
    SolverOptions options;
};

/// Grid with `cells` cells across the longest side of the domain's bounding box and
/// `ring` additional cells on every side.
Grid solver_grid(const Domain& domain, int cells, int ring = 8);

enum class BoundaryMode { Trace, Ring };

struct Energy {
    double bulk = 0.0;            ///< one-sided differences restricted to the domain
    double boundary_trace = 0.0;  ///< int f_inf(x, tr(u - u0) (x)_A nu) dH
    double boundary_ring = 0.0;   ///< discrete objective minus bulk
    double discrete = 0.0;        ///< the objective minimised by `minimize`
    double total = 0.0;           ///< bulk + boundary term of the selected mode
    std::vector<int> trace_levels;
    double trace_relative_diff = 0.0;
    bool trace_converged = true;
};

/// `u` lives on dp.grid. Throws InconsistencyError when the trace of u - u0 does not settle
/// (last relative level difference above 5e-2 with at least two levels).
Energy energy(const DirichletProblem& dp, const DiscreteField& u, BoundaryMode mode = BoundaryMode::Trace);

/// Discrete objective only: h^n [sum_cells f(A_h u) - sum_exterior f(A_h u0)].
double discrete_energy(const DirichletProblem& dp, const DiscreteField& u);

struct MinimizeResult {
    DiscreteField u;
    double energy = 0.0;                 ///< discrete objective at u
    std::vector<double> energy_trace;    ///< best-so-far, nonincreasing
    std::vector<double> raw_energy;      ///< objective at every iterate
    int iterations = 0;
    bool converged = false;
    double operator_norm = 0.0;
    double tau = 0.0;
    double sigma = 0.0;
    double coercivity_constant = 0.0;    ///< max (|u_k|_L1 + |A u_k|) / (1 + E_0)
    double datum_energy = 0.0;           ///< objective at u0
};

/// First-order primal-dual splitting. Throws DomainError for non-convex integrands
/// and Error when the operator norm estimate fails.
MinimizeResult minimize(const DirichletProblem& dp);

struct ConsistencyGap {
    double min_relaxed = 0.0;
    double inf_constrained = 0.0;
    double gap = 0.0;  ///< (inf_constrained - min_relaxed) / |inf_constrained|
    MinimizeResult relaxed;
    MinimizeResult constrained;
};

ConsistencyGap consistency_gap(const DirichletProblem& dp);

struct QuasiconvexityWitness {
    int trial = 0;
    std::vector<std::vector<int>> modes;  ///< per term: component, then frequency per axis
    std::vector<double> coefficients;
    double lhs = 0.0;  ///< g(A)
    double rhs = 0.0;  ///< mean of g(A + A phi)
};

struct QuasiconvexityProbe {
    bool passed = true;
    int trials = 0;
    double worst_margin = 0.0;  ///< min over trials of rhs - lhs
    std::optional<QuasiconvexityWitness> witness;
};

/// g(A) <= int_{(0,1)^n} g(A + A phi) against seeded fields
/// phi_j = sum c prod_i sin(pi k_i x_i), by tensor Gauss-Legendre quadrature.
QuasiconvexityProbe quasiconvexity_probe(const Operator& op, const Integrand& g, const Eigen::VectorXd& A,
                                         int trials, std::uint64_t seed = 1, int quadrature_points = 16);

}  // namespace bva
