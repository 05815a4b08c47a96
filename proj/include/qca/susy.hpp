#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qca/bose.hpp"
#include "qca/grassmann.hpp"
#include "qca/quadratic.hpp"

namespace qca {

namespace susy_detail {

// Wilson-regulated centered difference (f(I+1)-f(I-1))/2 - (r/2)(second diff)
// acting on a periodic sequence of polynomials.
inline GrassmannPoly wilson_diff(const std::vector<GrassmannPoly>& f, int i, double r) {
    const int n = static_cast<int>(f.size());
    auto at = [&](int k) -> const GrassmannPoly& { return f[((k % n) + n) % n]; };
    GrassmannPoly d = cplx{0.5, 0.0} * (at(i + 1) - at(i - 1));
    if (r != 0.0)
        d -= cplx{0.5 * r, 0.0} * (at(i + 1) + at(i - 1) - cplx{2.0, 0.0} * at(i));
    return d;
}

inline double wilson_diff(const Eigen::VectorXd& f, int i, double r) {
    const int n = static_cast<int>(f.size());
    auto at = [&](int k) { return f(((k % n) + n) % n); };
    double d = 0.5 * (at(i + 1) - at(i - 1));
    if (r != 0.0) d -= 0.5 * r * (at(i + 1) + at(i - 1) - 2.0 * at(i));
    return d;
}

}  // namespace susy_detail

// ---------------------------------------------------------------------------
// One-cell first-order supersymmetric chain. Generators: xi_bar = 0,
// theta(I) = 1 + I, theta_bar(I) = 1 + N + I (indices mod N, periodic time).
// ---------------------------------------------------------------------------

struct Susy1CellLayout {
    int n;
    int xi() const { return 0; }
    int th(int i) const { return 1 + wrap(i); }
    int thb(int i) const { return 1 + n + wrap(i); }
    int wrap(int i) const { return ((i % n) + n) % n; }
};

struct Susy1CellFields {
    std::vector<GrassmannPoly> x, p, theta, theta_bar;
};

inline Susy1CellFields susy_1cell_base_fields(const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& p) {
    const int n = static_cast<int>(x.size());
    if (p.size() != n) throw ConfigError("X and P configurations must share the time extent");
    if (2 * n + 1 > 62) throw GeneratorBudgetExceeded("chain too long for the generator budget");
    Susy1CellLayout lay{n};
    Susy1CellFields f;
    for (int i = 0; i < n; ++i) {
        f.x.push_back(GrassmannPoly::scalar(x(i)));
        f.p.push_back(GrassmannPoly::scalar(p(i)));
        f.theta.push_back(GrassmannPoly::generator(lay.th(i)));
        f.theta_bar.push_back(GrassmannPoly::generator(lay.thb(i)));
    }
    return f;
}

// S = sum_I i theta_bar D_w theta - W theta_bar theta
//     + P D_w X / ... (P couples through the same Wilson difference),
//     - P^2/2 - W^2 X^2 / 2, periodic time.
inline GrassmannPoly susy_action_1cell_functional(const Susy1CellFields& f, double w, double r) {
    using susy_detail::wilson_diff;
    const int n = static_cast<int>(f.x.size());
    GrassmannPoly s;
    const cplx i{0.0, 1.0};
    const cplx half{0.5, 0.0};
    for (int t = 0; t < n; ++t) {
        s += i * (f.theta_bar[t] * wilson_diff(f.theta, t, r));
        s -= cplx{w, 0.0} * (f.theta_bar[t] * f.theta[t]);
        s += f.p[t] * wilson_diff(f.x, t, r);
        s -= half * (f.p[t] * f.p[t]);
        s -= cplx{0.5 * w * w, 0.0} * (f.x[t] * f.x[t]);
    }
    return s;
}

inline GrassmannPoly susy_action_1cell(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                       double w, double r) {
    return susy_action_1cell_functional(susy_1cell_base_fields(x, p), w, r);
}

// delta S to first order in xi_bar for the transformations
//   dP = xi_bar D_w theta,  dX = xi_bar theta,
//   d theta_bar = i xi_bar D_w X - W xi_bar X,  d theta = 0,
// evaluated exactly (xi_bar^2 = 0 truncates by itself). fix_boundary freezes
// the fields at I = 0 and I = N-1 and restricts the sum to the interior.
inline GrassmannPoly susy_variation_1cell(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                          double w, double r, bool fix_boundary = false) {
    using susy_detail::wilson_diff;
    const int n = static_cast<int>(x.size());
    Susy1CellLayout lay{n};
    Susy1CellFields base = susy_1cell_base_fields(x, p);
    Susy1CellFields tr = base;
    GrassmannPoly xi = GrassmannPoly::generator(lay.xi());
    for (int t = 0; t < n; ++t) {
        if (fix_boundary && (t == 0 || t == n - 1)) continue;
        tr.x[t] += xi * base.theta[t];
        tr.p[t] += xi * wilson_diff(base.theta, t, r);
        cplx coef = cplx{0.0, 1.0} * wilson_diff(x, t, r) - w * x(t);
        tr.theta_bar[t] += coef * xi;
    }
    if (!fix_boundary)
        return susy_action_1cell_functional(tr, w, r) - susy_action_1cell_functional(base, w, r);
    // fixed boundary: sum only over interior sites
    GrassmannPoly s_tr, s_base;
    const cplx i{0.0, 1.0};
    const cplx half{0.5, 0.0};
    for (int t = 1; t < n - 1; ++t) {
        for (const Susy1CellFields* fp : {&tr, &base}) {
            GrassmannPoly part;
            part += i * (fp->theta_bar[t] * wilson_diff(fp->theta, t, r));
            part -= cplx{w, 0.0} * (fp->theta_bar[t] * fp->theta[t]);
            part += fp->p[t] * wilson_diff(fp->x, t, r);
            part -= half * (fp->p[t] * fp->p[t]);
            part -= cplx{0.5 * w * w, 0.0} * (fp->x[t] * fp->x[t]);
            if (fp == &tr)
                s_tr += part;
            else
                s_base += part;
        }
    }
    return s_tr - s_base;
}

// Exact residual of the one-cell variation on periodic chains:
// i r W xi_bar sum_I X(I) (theta(I+1) + theta(I-1) - 2 theta(I)).
// Vanishes iff r W = 0; pinned by the test suite.
inline GrassmannPoly susy_1cell_obstruction(const Eigen::VectorXd& x, double w, double r) {
    const int n = static_cast<int>(x.size());
    Susy1CellLayout lay{n};
    GrassmannPoly out;
    GrassmannPoly xi = GrassmannPoly::generator(lay.xi());
    for (int t = 0; t < n; ++t) {
        GrassmannPoly second = GrassmannPoly::generator(lay.th(t + 1)) +
                               GrassmannPoly::generator(lay.th(t - 1)) -
                               cplx{2.0, 0.0} * GrassmannPoly::generator(lay.th(t));
        out += (cplx{0.0, r * w} * x(t)) * (xi * second);
    }
    return out;
}

// ---------------------------------------------------------------------------
// M-cell first-order chain (massless, doubly periodic). Generators: xi = 0,
// theta(I,J) = 1 + I*M + J, theta_tilde(I,J) = 1 + N*M + I*M + J.
// ---------------------------------------------------------------------------

struct SusyMCellLayout {
    int n, m;
    int xi() const { return 0; }
    int th(int i, int j) const { return 1 + wrap(i, n) * m + wrap(j, m); }
    int tt(int i, int j) const { return 1 + n * m + wrap(i, n) * m + wrap(j, m); }
    static int wrap(int v, int lim) { return ((v % lim) + lim) % lim; }
};

struct SusyMCellFields {
    int n = 0, m = 0;
    std::vector<GrassmannPoly> x, p, l, theta, theta_tilde;  // flattened I*M+J

    const GrassmannPoly& at(const std::vector<GrassmannPoly>& v, int i, int j) const {
        return v[SusyMCellLayout::wrap(i, n) * m + SusyMCellLayout::wrap(j, m)];
    }
};

namespace susy_detail {

inline GrassmannPoly dt(const SusyMCellFields& f, const std::vector<GrassmannPoly>& v, int i,
                        int j) {
    return f.at(v, i + 1, j) - f.at(v, i - 1, j);
}
inline GrassmannPoly dx(const SusyMCellFields& f, const std::vector<GrassmannPoly>& v, int i,
                        int j) {
    return f.at(v, i, j + 1) - f.at(v, i, j - 1);
}
inline GrassmannPoly wt(const SusyMCellFields& f, const std::vector<GrassmannPoly>& v, int i,
                        int j) {
    return f.at(v, i + 1, j) + f.at(v, i - 1, j) - cplx{2.0, 0.0} * f.at(v, i, j);
}
inline GrassmannPoly wx(const SusyMCellFields& f, const std::vector<GrassmannPoly>& v, int i,
                        int j) {
    return f.at(v, i, j + 1) + f.at(v, i, j - 1) - cplx{2.0, 0.0} * f.at(v, i, j);
}

}  // namespace susy_detail

inline SusyMCellFields susy_mcell_base_fields(const Eigen::MatrixXd& x, const Eigen::MatrixXd& p,
                                              const Eigen::MatrixXd& l) {
    const int n = static_cast<int>(x.rows());
    const int m = static_cast<int>(x.cols());
    if (p.rows() != n || p.cols() != m || l.rows() != n || l.cols() != m)
        throw ConfigError("X, P, L configurations must share the lattice shape");
    if (2 * n * m + 1 > 62)
        throw GeneratorBudgetExceeded("lattice too large for the generator budget");
    SusyMCellLayout lay{n, m};
    SusyMCellFields f;
    f.n = n;
    f.m = m;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            f.x.push_back(GrassmannPoly::scalar(x(i, j)));
            f.p.push_back(GrassmannPoly::scalar(p(i, j)));
            f.l.push_back(GrassmannPoly::scalar(l(i, j)));
            f.theta.push_back(GrassmannPoly::generator(lay.th(i, j)));
            f.theta_tilde.push_back(GrassmannPoly::generator(lay.tt(i, j)));
        }
    return f;
}

// First-order action with chirality-mixing Wilson couplings:
// S = sum ( -P (Dt - r Wt) X + L (Dx - r Wx) X + P^2 - L^2 ) / 2
//   + i/2 theta (Dt theta - r Wt theta~) + i/2 theta (Dx theta - r Wx theta~)
//   + i/2 theta~ (Dt theta~ + r Wt theta) - i/2 theta~ (Dx theta~ - r Wx theta).
inline GrassmannPoly susy_action_mcell_functional(const SusyMCellFields& f, double r) {
    using namespace susy_detail;
    GrassmannPoly s;
    const cplx ih{0.0, 0.5};
    const cplx half{0.5, 0.0};
    const cplx rr{r, 0.0};
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.m; ++j) {
            GrassmannPoly atx = dt(f, f.x, i, j) - rr * wt(f, f.x, i, j);
            GrassmannPoly axx = dx(f, f.x, i, j) - rr * wx(f, f.x, i, j);
            s -= half * (f.at(f.p, i, j) * atx);
            s += half * (f.at(f.l, i, j) * axx);
            s += half * (f.at(f.p, i, j) * f.at(f.p, i, j));
            s -= half * (f.at(f.l, i, j) * f.at(f.l, i, j));
            s += ih * (f.at(f.theta, i, j) *
                       (dt(f, f.theta, i, j) - rr * wt(f, f.theta_tilde, i, j)));
            s += ih * (f.at(f.theta, i, j) *
                       (dx(f, f.theta, i, j) - rr * wx(f, f.theta_tilde, i, j)));
            s += ih * (f.at(f.theta_tilde, i, j) *
                       (dt(f, f.theta_tilde, i, j) + rr * wt(f, f.theta, i, j)));
            s -= ih * (f.at(f.theta_tilde, i, j) *
                       (dx(f, f.theta_tilde, i, j) - rr * wx(f, f.theta, i, j)));
        }
    return s;
}

inline GrassmannPoly susy_action_mcell(const Eigen::MatrixXd& x, const Eigen::MatrixXd& p,
                                       const Eigen::MatrixXd& l, double r) {
    return susy_action_mcell_functional(susy_mcell_base_fields(x, p, l), r);
}

// Mechanically substituted variation. The boson rules follow the transcribed
// transformations; the fermion rules carry the unique normalization that
// annihilates the action at r = 0:
//   dX = i xi (theta - theta~)
//   dP = i xi/2 [(Dt theta - r Wt theta~) - (Dt theta~ + r Wt theta)]
//   dL = i xi/2 [(Dx theta - r Wx theta~) - (Dx theta~ - r Wx theta)]
//   d theta    = +fermion_scale * xi/4 (At X - Ax X)
//   d theta~   = -fermion_scale * xi/4 (At X + Ax X)
// fermion_scale = 1 is the balanced normalization; -2 reproduces the
// transcribed delta theta = -xi/2 (...), delta theta~ = +xi/2 (...).
inline GrassmannPoly susy_variation_mcell(const Eigen::MatrixXd& x, const Eigen::MatrixXd& p,
                                          const Eigen::MatrixXd& l, double r,
                                          double fermion_scale = 1.0) {
    using namespace susy_detail;
    SusyMCellFields base = susy_mcell_base_fields(x, p, l);
    SusyMCellFields tr = base;
    SusyMCellLayout lay{base.n, base.m};
    GrassmannPoly xi = GrassmannPoly::generator(lay.xi());
    const cplx ih{0.0, 0.5};
    const cplx rr{r, 0.0};
    auto wilson_t = [&](const Eigen::MatrixXd& v, int i, int j) {
        auto a = [&](int ii, int jj) {
            return v(SusyMCellLayout::wrap(ii, base.n), SusyMCellLayout::wrap(jj, base.m));
        };
        return (a(i + 1, j) - a(i - 1, j)) - r * (a(i + 1, j) + a(i - 1, j) - 2.0 * a(i, j));
    };
    auto wilson_x = [&](const Eigen::MatrixXd& v, int i, int j) {
        auto a = [&](int ii, int jj) {
            return v(SusyMCellLayout::wrap(ii, base.n), SusyMCellLayout::wrap(jj, base.m));
        };
        return (a(i, j + 1) - a(i, j - 1)) - r * (a(i, j + 1) + a(i, j - 1) - 2.0 * a(i, j));
    };
    for (int i = 0; i < base.n; ++i)
        for (int j = 0; j < base.m; ++j) {
            int idx = i * base.m + j;
            tr.x[idx] += cplx{0.0, 1.0} *
                         (xi * (base.at(base.theta, i, j) - base.at(base.theta_tilde, i, j)));
            GrassmannPoly dp = (dt(base, base.theta, i, j) - rr * wt(base, base.theta_tilde, i, j)) -
                               (dt(base, base.theta_tilde, i, j) + rr * wt(base, base.theta, i, j));
            tr.p[idx] += ih * (xi * dp);
            GrassmannPoly dl = (dx(base, base.theta, i, j) - rr * wx(base, base.theta_tilde, i, j)) -
                               (dx(base, base.theta_tilde, i, j) - rr * wx(base, base.theta, i, j));
            tr.l[idx] += ih * (xi * dl);
            double atx = wilson_t(x, i, j), axx = wilson_x(x, i, j);
            tr.theta[idx] += cplx{fermion_scale * 0.25 * (atx - axx), 0.0} * xi;
            tr.theta_tilde[idx] += cplx{-fermion_scale * 0.25 * (atx + axx), 0.0} * xi;
        }
    return susy_action_mcell_functional(tr, r) - susy_action_mcell_functional(base, r);
}

// ---------------------------------------------------------------------------
// Mixed kernels: the action has no boson-fermion cross terms, so the path
// integral factorizes into a Fresnel reduction times a Berezin integral.
// ---------------------------------------------------------------------------

struct SusyKernel {
    cplx boson_amplitude{1.0, 0.0};
    GrassmannPoly fermion_poly;  // in the boundary fermion generators

    GrassmannPoly total() const { return boson_amplitude * fermion_poly; }
};

// Generator map of the fixed-boundary one-cell kernel: theta(I) = I,
// theta_bar(I) = (N+1) + I for I = 0..N.
struct SusyKernel1CellLayout {
    int n;
    int th(int i) const { return i; }
    int thb(int i) const { return n + 1 + i; }
};

// K(x0, xN) with interior X(1..N-1), P(1..N-1) integrated out (each variable
// normalized by 1/sqrt(2 pi i); fully decoupled interior variables contribute
// a unit factor) and interior fermion pairs Berezin-integrated from e^{iS}.
inline SusyKernel kernel_susy_1cell(int n, double w, double r, double x0, double xn) {
    if (n < 2) throw ConfigError("kernel_susy_1cell needs n >= 2");
    if (2 * (n + 1) > 62) throw GeneratorBudgetExceeded("chain too long");
    SusyKernel1CellLayout lay{n};

    // fermionic factor
    std::vector<GrassmannPoly> th, thb;
    for (int i = 0; i <= n; ++i) {
        th.push_back(GrassmannPoly::generator(lay.th(i)));
        thb.push_back(GrassmannPoly::generator(lay.thb(i)));
    }
    GrassmannPoly sf;
    const cplx imag{0.0, 1.0};
    for (int t = 1; t < n; ++t) {
        GrassmannPoly d = cplx{0.5, 0.0} * (th[t + 1] - th[t - 1]);
        if (r != 0.0)
            d -= cplx{0.5 * r, 0.0} * (th[t + 1] + th[t - 1] - cplx{2.0, 0.0} * th[t]);
        sf += imag * (thb[t] * d);
        sf -= cplx{w, 0.0} * (thb[t] * th[t]);
    }
    GrassmannPoly weight = (imag * sf).gexp();
    std::vector<int> order;
    for (int t = n - 1; t >= 1; --t) {
        order.push_back(lay.thb(t));
        order.push_back(lay.th(t));
    }
    SusyKernel out;
    out.fermion_poly = weight.berezin_all(order);

    // bosonic factor: variables X(0..N) then P(1..N-1)
    const int nx = n + 1;
    QuadraticForm form(nx + (n - 1));
    for (int i = 0; i <= n; ++i) form.labels()[i] = VarLabel{i, 0, "X"};
    for (int t = 1; t < n; ++t) form.labels()[nx + t - 1] = VarLabel{t, 0, "P"};
    auto pv = [nx](int t) { return nx + t - 1; };
    for (int t = 1; t < n; ++t) {
        // P(t) * (X(t+1) - X(t-1) - r(X(t+1) + X(t-1) - 2X(t))) / 2
        form.add_quadratic(pv(t), t + 1, 0.5 * (1.0 - r));
        form.add_quadratic(pv(t), t - 1, 0.5 * (-1.0 - r));
        form.add_quadratic(pv(t), t, r);
        form.add_quadratic(pv(t), pv(t), -0.5);
        form.add_quadratic(t, t, -0.5 * w * w);
    }
    // momenta first: their pivots are always -1, and eliminating them endows
    // the interior X's with nonzero diagonals even at w = 0
    std::vector<int> interior;
    for (int t = 1; t < n; ++t) interior.push_back(pv(t));
    for (int t = 1; t < n; ++t) interior.push_back(t);
    // fully decoupled interior variables integrate to a unit factor
    std::vector<int> live;
    for (int k : interior) {
        bool coupled = form.linear()(k) != 0.0 || form.matrix().row(k).cwiseAbs().sum() != 0.0;
        if (coupled) live.push_back(k);
    }
    Reduction red = reduce_quadratic(form, live);
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(form.size());
    vals(0) = x0;
    vals(n) = xn;
    cplx amp = red.prefactor;
    amp *= std::pow(cplx{0.0, 2.0 * std::numbers::pi}, -0.5 * static_cast<double>(live.size()));
    out.boson_amplitude = amp * std::polar(1.0, red.residual.evaluate(vals));
    return out;
}

// Generator map of the fixed-time-boundary M-cell kernel: theta(I,J) first,
// theta_tilde(I,J) after, flattened I*M+J over rows 0..N.
struct SusyKernelMCellLayout {
    int n, m;
    int th(int i, int j) const { return i * m + j; }
    int tt(int i, int j) const { return (n + 1) * m + i * m + j; }
};

// K(X(0,.), X(N,.)) for the doubly-discretized chain: interior X rows and all
// interior P, L integrated by pivoted Fresnel reduction (one 1/sqrt(2 pi i)
// per variable), interior theta and theta_tilde Berezin-integrated from
// e^{iS} in descending generator order.
inline SusyKernel kernel_susy_mcell(int n, int m, double r, const Eigen::VectorXd& row0,
                                    const Eigen::VectorXd& rown) {
    if (n < 2 || m < 2) throw ConfigError("kernel_susy_mcell needs N, M >= 2");
    if (row0.size() != m || rown.size() != m)
        throw ConfigError("boundary rows must have M entries");
    if (2 * (n + 1) * m > 62) throw GeneratorBudgetExceeded("lattice too large");
    SusyKernelMCellLayout lay{n, m};
    auto wj = [m](int j) { return ((j % m) + m) % m; };

    // fermionic factor: action rows 1..N-1, spatially periodic
    auto th = [&](int i, int j) { return GrassmannPoly::generator(lay.th(i, wj(j))); };
    auto tt = [&](int i, int j) { return GrassmannPoly::generator(lay.tt(i, wj(j))); };
    const cplx ih{0.0, 0.5};
    const cplx rr{r, 0.0};
    GrassmannPoly sf;
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            GrassmannPoly dt_th = th(i + 1, j) - th(i - 1, j);
            GrassmannPoly dx_th = th(i, j + 1) - th(i, j - 1);
            GrassmannPoly dt_tt = tt(i + 1, j) - tt(i - 1, j);
            GrassmannPoly dx_tt = tt(i, j + 1) - tt(i, j - 1);
            GrassmannPoly wt_th = th(i + 1, j) + th(i - 1, j) - cplx{2, 0} * th(i, j);
            GrassmannPoly wx_th = th(i, j + 1) + th(i, j - 1) - cplx{2, 0} * th(i, j);
            GrassmannPoly wt_tt = tt(i + 1, j) + tt(i - 1, j) - cplx{2, 0} * tt(i, j);
            GrassmannPoly wx_tt = tt(i, j + 1) + tt(i, j - 1) - cplx{2, 0} * tt(i, j);
            sf += ih * (th(i, j) * (dt_th - rr * wt_tt));
            sf += ih * (th(i, j) * (dx_th - rr * wx_tt));
            sf += ih * (tt(i, j) * (dt_tt + rr * wt_th));
            sf -= ih * (tt(i, j) * (dx_tt - rr * wx_th));
        }
    GrassmannPoly weight = (cplx{0.0, 1.0} * sf).gexp();
    std::vector<int> order;
    for (int i = n - 1; i >= 1; --i)
        for (int j = m - 1; j >= 0; --j) {
            order.push_back(lay.tt(i, j));
            order.push_back(lay.th(i, j));
        }
    std::sort(order.begin(), order.end(), std::greater<int>());
    SusyKernel out;
    out.fermion_poly = weight.berezin_all(order);

    // bosonic factor: variables X rows 0..N, then P rows 1..N-1, then L
    const int nx = (n + 1) * m;
    const int nint = (n - 1) * m;
    QuadraticForm form(nx + 2 * nint);
    auto xv = [&](int i, int j) { return i * m + wj(j); };
    auto pv = [&](int i, int j) { return nx + (i - 1) * m + wj(j); };
    auto lv = [&](int i, int j) { return nx + nint + (i - 1) * m + wj(j); };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < m; ++j) form.labels()[xv(i, j)] = VarLabel{i, j, "X"};
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            form.labels()[pv(i, j)] = VarLabel{i, j, "P"};
            form.labels()[lv(i, j)] = VarLabel{i, j, "L"};
        }
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            // -1/2 P (X(i+1,j) - X(i-1,j) - r(X(i+1,j) + X(i-1,j) - 2X(i,j)))
            form.add_quadratic(pv(i, j), xv(i + 1, j), -0.5 * (1.0 - r));
            form.add_quadratic(pv(i, j), xv(i - 1, j), -0.5 * (-1.0 - r));
            form.add_quadratic(pv(i, j), xv(i, j), -r);
            // +1/2 L (X(i,j+1) - X(i,j-1) - r(X(i,j+1) + X(i,j-1) - 2X(i,j)))
            form.add_quadratic(lv(i, j), xv(i, j + 1), 0.5 * (1.0 - r));
            form.add_quadratic(lv(i, j), xv(i, j - 1), 0.5 * (-1.0 - r));
            form.add_quadratic(lv(i, j), xv(i, j), r);
            form.add_quadratic(pv(i, j), pv(i, j), 0.5);
            form.add_quadratic(lv(i, j), lv(i, j), -0.5);
        }
    std::vector<int> interior;
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < m; ++j) interior.push_back(pv(i, j));
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < m; ++j) interior.push_back(lv(i, j));
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < m; ++j) interior.push_back(xv(i, j));
    std::vector<int> live;
    for (int k : interior) {
        bool coupled = form.linear()(k) != 0.0 || form.matrix().row(k).cwiseAbs().sum() != 0.0;
        if (coupled) live.push_back(k);
    }
    Reduction red = reduce_quadratic_pivoted(form, live);
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(form.size());
    for (int j = 0; j < m; ++j) {
        vals(xv(0, j)) = row0(j);
        vals(xv(n, j)) = rown(j);
    }
    cplx amp = red.prefactor *
               std::pow(cplx{0.0, 2.0 * std::numbers::pi}, -0.5 * static_cast<double>(live.size()));
    out.boson_amplitude = amp * std::polar(1.0, red.residual.evaluate(vals));
    return out;
}

// Clock and shift matrices with U V = e^{2 pi i / M} V U.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> clock_shift(int m) {
    if (m < 1) throw ConfigError("clock_shift needs M >= 1");
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(m, m);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        u(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
        v(k, (k + m - 1) % m) = 1.0;
    }
    return {u, v};
}

}  // namespace qca
