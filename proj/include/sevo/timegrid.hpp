#pragma once

#include <cmath>
#include <stdexcept>

namespace sevo {

/// Uniform time mesh t_i = i T / m with the step maps kappa1 (floor to
/// the grid) and kappa2 (ceil, with kappa2(0) = 0).
struct TimeGrid {
    double T = 1.0;
    int m = 1;

    double delta() const { return T / m; }
    double node(int i) const {
        if (i < 0 || i > m) throw std::out_of_range("TimeGrid::node: index out of range");
        return i * T / m;
    }

    double kappa1(double t) const {
        check(t);
        int i = static_cast<int>(std::floor(t * m / T));
        if (i > m) i = m;
        return node(i > m ? m : i);
    }

    double kappa2(double t) const {
        check(t);
        if (t == 0.0) return 0.0;
        int i = static_cast<int>(std::ceil(t * m / T));
        if (i > m) i = m;
        return node(i);
    }

   private:
    void check(double t) const {
        if (t < 0.0 || t > T) throw std::out_of_range("TimeGrid: t outside [0, T]");
    }
};

}  // namespace sevo
