#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qca/lattice.hpp"
#include "qca/modes.hpp"
#include "qca/quadratic.hpp"

namespace qca {

// Discrete harmonic oscillator over N time steps with phi the per-step angle;
// the lattice frequency obeys W = 2 sin(phi/2), i.e. W^2/2 = 1 - cos(phi).
struct HOParams {
    int steps = 1;
    double phi = 0.0;

    HOParams(int n, double phi_) : steps(n), phi(phi_) {
        if (steps < 1) throw ConfigError("HOParams: steps must be >= 1");
        if (phi < 0.0 || phi > std::numbers::pi)
            throw ConfigError("HOParams: phi must lie in [0, pi]");
    }
    double w() const { return 2.0 * std::sin(phi / 2.0); }
};

// S = sum_{I=0}^{N-1} ( (X(I+1)-X(I))^2/2 - W^2 X(I)^2/2 ), potential weighted
// on the lower end of each link.
inline double action_1cell(const HOParams& p, const Eigen::VectorXd& traj) {
    if (traj.size() != p.steps + 1)
        throw ConfigError("trajectory must have steps + 1 entries");
    const double w2 = p.w() * p.w();
    double s = 0.0;
    for (int i = 0; i < p.steps; ++i) {
        double d = traj(i + 1) - traj(i);
        s += 0.5 * d * d - 0.5 * w2 * traj(i) * traj(i);
    }
    return s;
}

inline QuadraticForm ho_action_form(const HOParams& p) {
    QuadraticForm f(p.steps + 1);
    const double w2 = p.w() * p.w();
    for (int i = 0; i <= p.steps; ++i) f.labels()[i] = VarLabel{i, 0, "X"};
    for (int i = 0; i < p.steps; ++i) {
        f.add_quadratic(i, i, 0.5);
        f.add_quadratic(i + 1, i + 1, 0.5);
        f.add_quadratic(i, i + 1, -1.0);
        f.add_quadratic(i, i, -0.5 * w2);
    }
    return f;
}

namespace detail {

// Chebyshev data for the kernel: s_k = sin(k phi)/sin(phi) via the recurrence
// s_{k+1} = 2 cos(phi) s_k - s_{k-1}, the Maslov index nu = sign changes of
// (s_1 .. s_N), and c_N = cos(N phi).
struct ChebData {
    double s_n;
    double c_n;
    int nu;
};

inline ChebData cheb_data(int n, double phi) {
    const double c = std::cos(phi);
    double s_prev = 0.0, s_cur = 1.0;       // s_0, s_1
    double c_prev = 1.0, c_cur = c;         // c_0, c_1
    int nu = 0;
    int last_sign = 1;                      // sign of s_1
    for (int k = 1; k < n; ++k) {
        double s_next = 2.0 * c * s_cur - s_prev;
        double c_next = 2.0 * c * c_cur - c_prev;
        s_prev = s_cur;
        s_cur = s_next;
        c_prev = c_cur;
        c_cur = c_next;
        if (s_cur != 0.0) {
            int sg = s_cur > 0.0 ? 1 : -1;
            if (sg != last_sign) ++nu;
            last_sign = sg;
        }
    }
    return ChebData{s_cur, n == 1 ? c : c_cur, nu};
}

inline cplx inv_sqrt_2pi_i_pow(int k) {
    // (2 pi i)^(-k/2) on the principal branch.
    return std::pow(cplx{0.0, 2.0 * std::numbers::pi}, -0.5 * k);
}

}  // namespace detail

// Pieces of the closed-form kernel, exposed for composition checks.
struct HOKernelParts {
    cplx prefactor;  // includes the Maslov phase
    double s_n;      // sin(N phi)/sin(phi)
    double c_n;      // cos(N phi)

    cplx value(double x0, double xn) const {
        double expo = ((x0 * x0 + xn * xn) * c_n - 2.0 * x0 * xn) / (2.0 * s_n);
        return prefactor * std::polar(1.0, expo);
    }
};

inline HOKernelParts kernel_ho_closed_parts(const HOParams& p) {
    auto cd = detail::cheb_data(p.steps, p.phi);
    if (std::abs(cd.s_n) < 1e-9)
        throw CausticError("sin(N phi) vanishes at N=" + std::to_string(p.steps) +
                           ", phi=" + std::to_string(p.phi));
    const double pi = std::numbers::pi;
    cplx pref = std::polar(1.0 / std::sqrt(2.0 * pi * std::abs(cd.s_n)),
                           -(pi / 4.0 + cd.nu * pi / 2.0));
    return HOKernelParts{pref, cd.s_n, cd.c_n};
}

// Exact transition amplitude of the discrete oscillator in closed form.
// phi = 0 gives the free-particle limit, phi = pi the top lattice mode.
inline cplx kernel_ho_closed(const HOParams& p, double x0, double xn) {
    return kernel_ho_closed_parts(p).value(x0, xn);
}

// Same amplitude evaluated the hard way: sequential Fresnel integration of
// e^{iS} over the interior X(1)..X(N-1) with measure (2 pi i)^(-N/2).
inline cplx kernel_ho_oracle(const HOParams& p, double x0, double xn) {
    QuadraticForm form = ho_action_form(p);
    std::vector<int> interior;
    for (int i = 1; i < p.steps; ++i) interior.push_back(i);
    Reduction red = reduce_quadratic(form, interior);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(p.steps + 1);
    x(0) = x0;
    x(p.steps) = xn;
    cplx k = red.prefactor * detail::inv_sqrt_2pi_i_pow(p.steps - 1) *
             detail::inv_sqrt_2pi_i_pow(1);
    return k * std::polar(1.0, red.residual.evaluate(x));
}

// Endpoint phase relating the lower-weighted action to the closed form:
// kernel_ho_oracle = kernel_ho_closed * boundary_gauge_phase.
inline cplx boundary_gauge_phase(double w, double x0, double xn) {
    return std::polar(1.0, w * w * (xn * xn - x0 * x0) / 4.0);
}

// One independent real oscillator produced by the mode split of a real field.
struct ModeOscillator {
    int mode;
    double phi;
    double q0;
    double qn;
};

// Real repackaging of conjugate mode pairs: q_0 = X_0, then sqrt(2) Re/Im of
// each 0 < n < M/2, and X_{M/2} for even M. Orthogonal, Jacobian one.
inline std::vector<ModeOscillator> mcell_mode_oscillators(const Eigen::VectorXd& row0,
                                                          const Eigen::VectorXd& rown) {
    const int m = static_cast<int>(row0.size());
    const double pi = std::numbers::pi;
    ModeSpectrum s0 = dft_modes(row0), sn = dft_modes(rown);
    std::vector<ModeOscillator> out;
    const double r2 = std::sqrt(2.0);
    out.push_back({0, 0.0, s0.modes(0).real(), sn.modes(0).real()});
    for (int n = 1; 2 * n < m; ++n) {
        double phi = 2.0 * pi * n / m;
        out.push_back({n, phi, r2 * s0.modes(n).real(), r2 * sn.modes(n).real()});
        out.push_back({n, phi, r2 * s0.modes(n).imag(), r2 * sn.modes(n).imag()});
    }
    if (m % 2 == 0)
        out.push_back({m / 2, pi, s0.modes(m / 2).real(), sn.modes(m / 2).real()});
    return out;
}

// M-cell kernel as the product of closed-form one-cell kernels over the real
// mode oscillators.
inline cplx kernel_mcell(int n_steps, const Eigen::VectorXd& row0, const Eigen::VectorXd& rown) {
    if (row0.size() != rown.size() || row0.size() < 1)
        throw ConfigError("boundary rows must agree in length");
    cplx k{1.0, 0.0};
    for (const auto& osc : mcell_mode_oscillators(row0, rown)) {
        try {
            k *= kernel_ho_closed(HOParams(n_steps, osc.phi), osc.q0, osc.qn);
        } catch (const CausticError&) {
            throw CausticError("mode n=" + std::to_string(osc.mode) + " of M=" +
                               std::to_string(row0.size()) + " sits on a caustic");
        }
    }
    return k;
}

// Product of the per-mode endpoint phases; multiplying kernel_mcell by this
// reproduces the direct reduction of the lower-weighted lattice action.
inline cplx mcell_gauge_phase(const Eigen::VectorXd& row0, const Eigen::VectorXd& rown) {
    cplx g{1.0, 0.0};
    for (const auto& osc : mcell_mode_oscillators(row0, rown))
        g *= boundary_gauge_phase(2.0 * std::sin(osc.phi / 2.0), osc.q0, osc.qn);
    return g;
}

// S = sum_{I=0}^{N-1} sum_J ((X(I+1,J)-X(I,J))^2 - (X(I,J+1)-X(I,J))^2)/2 on
// a spatially periodic lattice; variables are flattened as I*M + J.
inline QuadraticForm mcell_action_form(int n_steps, int m_sites) {
    QuadraticForm f((n_steps + 1) * m_sites);
    auto idx = [m_sites](int i, int j) { return i * m_sites + j; };
    for (int i = 0; i <= n_steps; ++i)
        for (int j = 0; j < m_sites; ++j) f.labels()[idx(i, j)] = VarLabel{i, j, "X"};
    for (int i = 0; i < n_steps; ++i)
        for (int j = 0; j < m_sites; ++j) {
            int a = idx(i, j), b = idx(i + 1, j), c = idx(i, (j + 1) % m_sites);
            f.add_quadratic(a, a, 0.5);
            f.add_quadratic(b, b, 0.5);
            f.add_quadratic(a, b, -1.0);
            f.add_quadratic(a, a, -0.5);
            f.add_quadratic(c, c, -0.5);
            f.add_quadratic(a, c, 1.0);
        }
    return f;
}

// Direct sequential-Fresnel evaluation of the M-cell path integral with
// measure (2 pi i)^(-NM/2).
inline cplx kernel_mcell_direct(int n_steps, const Eigen::VectorXd& row0,
                                const Eigen::VectorXd& rown) {
    const int m = static_cast<int>(row0.size());
    QuadraticForm form = mcell_action_form(n_steps, m);
    std::vector<int> interior;
    for (int i = 1; i < n_steps; ++i)
        for (int j = 0; j < m; ++j) interior.push_back(i * m + j);
    // the lightcone action has vanishing diagonals, so pivoted reduction
    Reduction red = reduce_quadratic_pivoted(form, interior);
    Eigen::VectorXd x = Eigen::VectorXd::Zero((n_steps + 1) * m);
    for (int j = 0; j < m; ++j) {
        x(j) = row0(j);
        x(n_steps * m + j) = rown(j);
    }
    cplx k = red.prefactor * detail::inv_sqrt_2pi_i_pow((n_steps - 1) * m) *
             detail::inv_sqrt_2pi_i_pow(m);
    return k * std::polar(1.0, red.residual.evaluate(x));
}

// Continuum oscillator amplitude, the N -> infinity reference.
inline cplx kernel_continuum_reference(double omega, double t, double x0, double xn) {
    const double pi = std::numbers::pi;
    if (t <= 0.0) throw ConfigError("elapsed time must be positive");
    if (omega == 0.0) {
        cplx pref = std::polar(1.0 / std::sqrt(2.0 * pi * t), -pi / 4.0);
        double d = xn - x0;
        return pref * std::polar(1.0, d * d / (2.0 * t));
    }
    double s = std::sin(omega * t);
    if (std::abs(s) < 1e-12) throw CausticError("sin(omega T) vanishes");
    int nu = static_cast<int>(std::floor(omega * t / pi));
    cplx pref = std::polar(std::sqrt(omega / (2.0 * pi * std::abs(s))),
                           -(pi / 4.0 + nu * pi / 2.0));
    double expo = omega * ((x0 * x0 + xn * xn) * std::cos(omega * t) - 2.0 * x0 * xn) / (2.0 * s);
    return pref * std::polar(1.0, expo);
}

// Midpoint integral int dX K2(xf, X) K1(X, xi) in closed form via fresnel_1d;
// with_gauge folds in the endpoint phases so the same helper composes the
// oracle-convention kernels.
inline cplx compose_kernels(const HOParams& p1, const HOParams& p2, double xi, double xf,
                            bool oracle_convention) {
    HOKernelParts k1 = kernel_ho_closed_parts(p1);
    HOKernelParts k2 = kernel_ho_closed_parts(p2);
    // K1(X, xi): exponent (c1 (X^2 + xi^2) - 2 X xi) / (2 s1); same shape for K2.
    double alpha = k1.c_n / (2.0 * k1.s_n) + k2.c_n / (2.0 * k2.s_n);
    double beta = -(xi / k1.s_n + xf / k2.s_n);
    double cnst = k1.c_n * xi * xi / (2.0 * k1.s_n) + k2.c_n * xf * xf / (2.0 * k2.s_n);
    cplx amp = k1.prefactor * k2.prefactor * std::polar(1.0, cnst);
    if (oracle_convention) {
        double w = p1.w();
        // gauge factors: e^{i w^2 (X^2 - xi^2)/4} * e^{i w^2 (xf^2 - X^2)/4}
        amp *= boundary_gauge_phase(w, xi, xf);
    }
    return amp * fresnel_1d(alpha, beta);
}

}  // namespace qca
