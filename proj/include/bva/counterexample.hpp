#pragma once

#include "bva/discrete.hpp"
#include "bva/operator.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bva {

enum class CounterexampleVariant {
    RNotC,  ///< devsymgrad n=2, h_f = sigma(1/tau(x)) with xi = (1, i), eta = (1, -i)
    NotR    ///< d1only n=2, h_f = (|x2| + x1^2)^(-3/4), degenerate direction e2
};

CounterexampleVariant parse_variant(const std::string& name);
std::string variant_name(CounterexampleVariant v);

struct CounterexampleRow {
    double eps = 0.0;
    double interior_l1 = 0.0;    ///< int_{B \ B_eps} |h_f|
    double interior_A_l1 = 0.0;  ///< int_{B \ B_eps} |A h_f|, analytic derivatives
    double line_l1 = 0.0;        ///< int over the hyperplane inside B, outside B_eps
    double line_oracle = 0.0;    ///< closed form of line_l1
};

struct CounterexampleTable {
    CounterexampleVariant variant = CounterexampleVariant::RNotC;
    Operator op;
    Eigen::Vector2d hyperplane_normal;  ///< the plane {<xi_1, x> = 0}
    std::vector<CounterexampleRow> rows;
    int grid_cells = 512;
    double away_radius = 0.1;
    double discrete_A_l1_centered = 0.0;  ///< |A h_f| on (B \ B_away), centred differences
    double discrete_A_l1_forward = 0.0;   ///< same with the forward-difference stencil of apply_discrete
};

/// h_f(x) in R^N.
Eigen::VectorXd counterexample_field(CounterexampleVariant v, const Eigen::Vector2d& x);
/// N x 2 Jacobian of h_f.
Eigen::MatrixXd counterexample_jacobian(CounterexampleVariant v, const Eigen::Vector2d& x);

/// `eps` must be decreasing and in (0, 1).
CounterexampleTable no_trace_counterexample(CounterexampleVariant v, const std::vector<double>& eps,
                                            int grid_cells = 512, double away_radius = 0.1);

}  // namespace bva
