#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "qca/errors.hpp"

namespace qca {

using cplx = std::complex<double>;

// Transition amplitude with explicit modulus/phase accessors.
struct ComplexAmp {
    double re = 0.0;
    double im = 0.0;

    ComplexAmp() = default;
    ComplexAmp(double r, double i) : re(r), im(i) {}
    ComplexAmp(cplx z) : re(z.real()), im(z.imag()) {}

    operator cplx() const { return {re, im}; }
    double modulus() const { return std::hypot(re, im); }
    double phase() const { return std::atan2(im, re); }
};

enum class TimeBoundary { fixed, periodic };
enum class SpaceBoundary { periodic, open };

// Discrete (I, J) grid: I counts time rows, J counts sites.
struct LatticeShape {
    int n_time = 1;
    int m_space = 1;
    TimeBoundary time_boundary = TimeBoundary::fixed;
    SpaceBoundary space_boundary = SpaceBoundary::periodic;

    LatticeShape() = default;
    LatticeShape(int n, int m, TimeBoundary tb = TimeBoundary::fixed,
                 SpaceBoundary sb = SpaceBoundary::periodic)
        : n_time(n), m_space(m), time_boundary(tb), space_boundary(sb) {
        if (n_time < 1 || m_space < 1)
            throw ConfigError("lattice shape requires n_time >= 1 and m_space >= 1");
    }

    // J +/- 1 with wraparound iff the space boundary is periodic.
    int neighbor(int j, int step) const {
        int t = j + step;
        if (space_boundary == SpaceBoundary::periodic) {
            t %= m_space;
            if (t < 0) t += m_space;
            return t;
        }
        if (t < 0 || t >= m_space)
            throw BoundaryError("site index " + std::to_string(t) +
                                " outside open boundary of width " + std::to_string(m_space));
        return t;
    }
};

}  // namespace qca
