#include "sevo/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sevo {

QuadratureRule gauss_legendre(int npts, double a, double b) {
    if (npts < 1) throw std::invalid_argument("gauss_legendre: npts must be >= 1");

    // Nodes of P_n on [-1,1] by Newton iteration from the Chebyshev guess.
    Vec x(npts), w(npts);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (npts + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (npts + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            if (npts == 1) { p1 = t; }
            for (int k = 2; k <= npts; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = npts * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[npts - 1 - i] = t;
        double wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[npts - 1 - i] = wi;
    }
    if (npts == 1) { x[0] = 0.0; w[0] = 2.0; }

    QuadratureRule rule;
    rule.nodes.resize(npts);
    rule.weights.resize(npts);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < npts; ++i) {
        rule.nodes[i] = mid + half * x[i];
        rule.weights[i] = half * w[i];
    }
    rule.points_per_cell = npts;
    rule.cells = 1;
    return rule;
}

QuadratureRule composite_gauss(int pts, int cells, double a, double b) {
    if (pts < 1 || cells < 1)
        throw std::invalid_argument("composite_gauss: pts and cells must be >= 1");
    QuadratureRule base = gauss_legendre(pts, 0.0, 1.0);
    QuadratureRule rule;
    rule.nodes.resize(pts * cells);
    rule.weights.resize(pts * cells);
    const double h = (b - a) / cells;
    for (int c = 0; c < cells; ++c) {
        for (int i = 0; i < pts; ++i) {
            rule.nodes[c * pts + i] = a + h * (c + base.nodes[i]);
            rule.weights[c * pts + i] = h * base.weights[i];
        }
    }
    rule.points_per_cell = pts;
    rule.cells = cells;
    return rule;
}

}  // namespace sevo
