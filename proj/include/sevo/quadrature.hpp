#pragma once

#include <Eigen/Dense>

namespace sevo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Fixed quadrature rule on an interval; every inner product in the
/// library is evaluated with one of these.
struct QuadratureRule {
    Vec nodes;
    Vec weights;
    int points_per_cell = 0;  // per-cell count for composite rules
    int cells = 1;

    int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Legendre rule with `npts` points on [a, b].
QuadratureRule gauss_legendre(int npts, double a = 0.0, double b = 1.0);

/// Composite Gauss-Legendre rule: `pts` points on each of `cells`
/// uniform sub-intervals of [a, b].
QuadratureRule composite_gauss(int pts, int cells, double a = 0.0, double b = 1.0);

}  // namespace sevo
