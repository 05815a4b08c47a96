#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "qca/lattice.hpp"

namespace qca {

// Spatial Fourier data for one time row: frequencies W_n = 2 sin(pi n / M)
// and the complex mode amplitudes X_n.
struct ModeSpectrum {
    Eigen::VectorXd frequencies;
    Eigen::VectorXcd modes;
};

// Forward transform, adjoint of X(J) = (1/sqrt(M)) sum_n X_n e^{-2 pi i n J / M}.
inline ModeSpectrum dft_modes(const Eigen::VectorXd& row) {
    const int m = static_cast<int>(row.size());
    const double pi = std::numbers::pi;
    ModeSpectrum sp{Eigen::VectorXd::Zero(m), Eigen::VectorXcd::Zero(m)};
    for (int n = 0; n < m; ++n) {
        sp.frequencies(n) = 2.0 * std::sin(pi * n / m);
        cplx acc{0.0, 0.0};
        for (int j = 0; j < m; ++j)
            acc += row(j) * std::polar(1.0, 2.0 * pi * n * j / m);
        sp.modes(n) = acc / std::sqrt(double(m));
    }
    return sp;
}

// Inverse of dft_modes; imaginary residue stays at rounding level for real rows.
inline Eigen::VectorXd inverse_modes(const ModeSpectrum& sp) {
    const int m = static_cast<int>(sp.modes.size());
    const double pi = std::numbers::pi;
    Eigen::VectorXd row(m);
    for (int j = 0; j < m; ++j) {
        cplx acc{0.0, 0.0};
        for (int n = 0; n < m; ++n)
            acc += sp.modes(n) * std::polar(1.0, -2.0 * pi * n * j / m);
        row(j) = (acc / std::sqrt(double(m))).real();
    }
    return row;
}

}  // namespace qca
