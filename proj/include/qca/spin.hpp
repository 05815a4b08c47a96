#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <numbers>
#include <vector>

#include "qca/lattice.hpp"

namespace qca {

using OperatorMatrix = Eigen::MatrixXcd;

enum class ChainBoundary { open, periodic };

namespace spin_detail {

inline void check_sites(int m, int cap) {
    if (m < 1) throw ConfigError("site count must be >= 1");
    if (m > cap)
        throw DimensionBudgetExceeded("dense Hilbert space capped at " + std::to_string(cap) +
                                      " sites, got " + std::to_string(m));
}

// Site 0 occupies the highest bit; within a site the first basis state is
// spin-up (S_z = +1/2).
inline long site_mask(int site, int m) { return 1L << (m - 1 - site); }

}  // namespace spin_detail

// Spin-1/2 operators S_a(K) = sigma_a/2 embedded by site.
struct SpinOps {
    std::vector<OperatorMatrix> sx, sy, sz;

    int sites() const { return static_cast<int>(sx.size()); }
    long dim() const { return 1L << sites(); }
};

inline SpinOps spin_ops(int m) {
    spin_detail::check_sites(m, 12);
    const long dim = 1L << m;
    const cplx ih{0.0, 0.5};
    SpinOps ops;
    for (int k = 0; k < m; ++k) {
        long mask = spin_detail::site_mask(k, m);
        OperatorMatrix sx = OperatorMatrix::Zero(dim, dim);
        OperatorMatrix sy = OperatorMatrix::Zero(dim, dim);
        OperatorMatrix sz = OperatorMatrix::Zero(dim, dim);
        for (long i = 0; i < dim; ++i) {
            bool down = (i & mask) != 0;
            sx(i ^ mask, i) = 0.5;
            sy(i ^ mask, i) = down ? -ih : ih;
            sz(i, i) = down ? -0.5 : 0.5;
        }
        ops.sx.push_back(std::move(sx));
        ops.sy.push_back(std::move(sy));
        ops.sz.push_back(std::move(sz));
    }
    return ops;
}

inline double hermiticity_residual(const OperatorMatrix& h) {
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const OperatorMatrix& h, double tol = 1e-10) {
    double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (hermiticity_residual(h) > tol * scale)
        throw HermiticityError("matrix deviates from Hermiticity by " +
                               std::to_string(hermiticity_residual(h)));
}

namespace spin_detail {

// coef * S(a).S(b), written entrywise: SzSz on the diagonal, SxSx + SySy on
// the double flip (they cancel for equal bits and add to 1/2 otherwise)
inline void add_exchange_bond(OperatorMatrix& h, int a, int b, int m, double coef) {
    const long dim = h.rows();
    long ma = site_mask(a, m), mb = site_mask(b, m);
    for (long i = 0; i < dim; ++i) {
        double sza = (i & ma) ? -0.5 : 0.5;
        double szb = (i & mb) ? -0.5 : 0.5;
        h(i, i) += coef * sza * szb;
        bool equal_bits = ((i & ma) != 0) == ((i & mb) != 0);
        if (!equal_bits) h(i ^ ma ^ mb, i) += 0.5 * coef;
    }
}

inline void add_sxsx_bond(OperatorMatrix& h, int a, int b, int m, double coef) {
    const long dim = h.rows();
    long ma = site_mask(a, m), mb = site_mask(b, m);
    for (long i = 0; i < dim; ++i) h(i ^ ma ^ mb, i) += 0.25 * coef;
}

}  // namespace spin_detail

// H = sum_J S(J).S(J+1) + sum_J S(J).B
inline OperatorMatrix heisenberg_h(int m, const Eigen::Vector3d& b, ChainBoundary boundary) {
    if (m < 2) throw ConfigError("heisenberg_h needs at least two sites");
    spin_detail::check_sites(m, 12);
    const long dim = 1L << m;
    OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
    const int bonds = boundary == ChainBoundary::open ? m - 1 : m;
    for (int j = 0; j < bonds; ++j) spin_detail::add_exchange_bond(h, j, (j + 1) % m, m, 1.0);
    const cplx ih{0.0, 0.5};
    for (int j = 0; j < m; ++j) {
        long mask = spin_detail::site_mask(j, m);
        for (long i = 0; i < dim; ++i) {
            bool down = (i & mask) != 0;
            h(i, i) += b(2) * (down ? -0.5 : 0.5);
            if (b(0) != 0.0 || b(1) != 0.0)
                h(i ^ mask, i) += b(0) * 0.5 + b(1) * (down ? -ih : ih);
        }
    }
    return h;
}

// H = B_z sum_K S_z(K) + gamma sum_K S_x(K) S_x(K+1)
inline OperatorMatrix tfim_h(int m, double bz, double gamma, ChainBoundary boundary) {
    if (m < 2) throw ConfigError("tfim_h needs at least two sites");
    spin_detail::check_sites(m, 12);
    const long dim = 1L << m;
    OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
    for (int j = 0; j < m; ++j) {
        long mask = spin_detail::site_mask(j, m);
        for (long i = 0; i < dim; ++i) h(i, i) += bz * ((i & mask) ? -0.5 : 0.5);
    }
    const int bonds = boundary == ChainBoundary::open ? m - 1 : m;
    for (int j = 0; j < bonds; ++j) spin_detail::add_sxsx_bond(h, j, (j + 1) % m, m, gamma);
    return h;
}

// Jordan-Wigner fermions theta(J) = exp(i pi sum_{K<J} S+ S-)(K) S-(J); the
// string exponential is diagonal and applied entrywise.
inline std::vector<OperatorMatrix> jw_fermions(int m) {
    spin_detail::check_sites(m, 12);
    const long dim = 1L << m;
    const cplx string_phase = std::exp(cplx{0.0, std::numbers::pi});
    Eigen::VectorXcd string = Eigen::VectorXcd::Ones(dim);
    std::vector<OperatorMatrix> theta;
    for (int j = 0; j < m; ++j) {
        long mask = spin_detail::site_mask(j, m);
        OperatorMatrix th = OperatorMatrix::Zero(dim, dim);
        for (long i = 0; i < dim; ++i)
            if (!(i & mask))  // spin-up column, lowered into i ^ mask
                th(i ^ mask, i) = string(i ^ mask);
        theta.push_back(std::move(th));
        for (long i = 0; i < dim; ++i)
            if (!(i & mask)) string(i) *= string_phase;  // e^{i pi n_j}, n = 1 on up
    }
    return theta;
}

namespace spin_detail {

using SparseOp = Eigen::SparseMatrix<cplx>;

inline Eigen::VectorXcd number_diagonal(const std::vector<SparseOp>& th) {
    const long dim = th[0].rows();
    Eigen::VectorXcd n = Eigen::VectorXcd::Zero(dim);
    for (const auto& t : th) {
        SparseOp num = SparseOp(t.adjoint()) * t;
        for (int k = 0; k < num.outerSize(); ++k)
            for (SparseOp::InnerIterator it(num, k); it; ++it)
                if (it.row() == it.col()) n(it.row()) += it.value();
    }
    return n;
}

}  // namespace spin_detail

// Fermionized transverse-field chain built from the jw_fermions matrices:
//   -B_z M/2 + B_z sum n_K + (gamma/4) sum (th+_K - th_K)(th+_{K+1} + th_{K+1}),
// the operator image of tfim_h bond by bond. On a periodic chain the plain
// quadratic wrap bond is kept; include_boundary_term adds the parity
// correction -(gamma/4)(th+_M - th_M)(th+_1 + th_1)(P + 1) that restores the
// exact spin Hamiltonian.
inline OperatorMatrix fermionized_tfim(int m, double bz, double gamma, ChainBoundary boundary,
                                       bool include_boundary_term) {
    if (m < 2) throw ConfigError("fermionized_tfim needs at least two sites");
    using spin_detail::SparseOp;
    auto dense = jw_fermions(m);
    std::vector<SparseOp> th;
    th.reserve(dense.size());
    for (const auto& d : dense) th.push_back(d.sparseView());
    const long dim = dense[0].rows();

    OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
    Eigen::VectorXcd number = spin_detail::number_diagonal(th);
    for (long i = 0; i < dim; ++i) h(i, i) += -0.5 * bz * m + bz * number(i);
    auto bond = [&](int a, int b) {
        SparseOp left = SparseOp(th[a].adjoint()) - th[a];
        SparseOp right = SparseOp(th[b].adjoint()) + th[b];
        return OperatorMatrix(SparseOp(0.25 * gamma * (left * right)));
    };
    for (int k = 0; k + 1 < m; ++k) h += bond(k, k + 1);
    if (boundary == ChainBoundary::periodic) {
        OperatorMatrix wrap = bond(m - 1, 0);
        h += wrap;
        if (include_boundary_term) {
            Eigen::VectorXcd parity_plus_one(dim);
            for (long i = 0; i < dim; ++i)
                parity_plus_one(i) = std::exp(cplx{0.0, std::numbers::pi} * number(i)) + 1.0;
            h -= wrap * parity_plus_one.asDiagonal();
        }
    }
    return h;
}

// Single-particle energies of the quadratic fermion form via the 2M x 2M
// Bogoliubov-de Gennes block matrix, and the many-body ground energy
// const + Tr(A)/2 - sum Lambda_k / 2.
struct BogoliubovResult {
    Eigen::VectorXd single_particle;  // M nonnegative energies
    double ground_energy;
};

inline BogoliubovResult bogoliubov_spectrum(int m, double bz, double gamma,
                                            ChainBoundary boundary) {
    if (m < 2) throw ConfigError("bogoliubov_spectrum needs at least two sites");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) a(k, k) = bz;
    const int bonds = boundary == ChainBoundary::open ? m - 1 : m;
    for (int j = 0; j < bonds; ++j) {
        int k = (j + 1) % m;
        // (gamma/4)(th+_j - th_j)(th+_k + th_k) expands into hopping
        // th+_j th_k + th+_k th_j and pairing th+_j th+_k - th_j th_k
        a(j, k) += 0.25 * gamma;
        a(k, j) += 0.25 * gamma;
        b(j, k) += 0.25 * gamma;
        b(k, j) -= 0.25 * gamma;
    }
    Eigen::MatrixXd bdg(2 * m, 2 * m);
    bdg << a, b, -b, -a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bdg);
    Eigen::VectorXd evals = es.eigenvalues();
    BogoliubovResult out{Eigen::VectorXd::Zero(m), 0.0};
    for (int k = 0; k < m; ++k) out.single_particle(k) = evals(m + k);  // nonnegative half
    out.ground_energy = -0.5 * bz * m + 0.5 * a.trace() - 0.5 * out.single_particle.sum();
    return out;
}

// e^{-iHT} psi0 through the full eigendecomposition.
inline Eigen::VectorXcd propagate(const OperatorMatrix& h, const Eigen::VectorXcd& psi0,
                                  double t) {
    require_hermitian(h);
    if (h.rows() != psi0.size()) throw ConfigError("state dimension mismatch");
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
    Eigen::VectorXcd in_eigen = es.eigenvectors().adjoint() * psi0;
    for (int k = 0; k < in_eigen.size(); ++k)
        in_eigen(k) *= std::polar(1.0, -es.eigenvalues()(k) * t);
    return es.eigenvectors() * in_eigen;
}

inline OperatorMatrix expm_hermitian_i(const OperatorMatrix& h, double t) {
    // e^{-i h t}
    require_hermitian(h);
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
    Eigen::VectorXcd phases(h.rows());
    for (int k = 0; k < h.rows(); ++k)
        phases(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// One piecewise-constant control segment for the spin model:
// H = sum_K alpha_K S_x(K) + beta_K S_y(K) + sum_{K,L} gamma_KL S_z(K) S_z(L)
//     + constant.
struct SpinSegment {
    double duration = 0.0;
    Eigen::VectorXd alpha_x;
    Eigen::VectorXd beta_y;
    Eigen::MatrixXd gamma_zz;
    double constant = 0.0;
};

// Fermionic model segment:
// H = sum_K (a_K theta_K + b_K theta+_K)
//     + sum_{K,L} w_KL (theta+_K theta_L + theta+_L theta_K)
//     + sum_{K,L} g_KL n_K n_L + constant.
struct FermiSegment {
    double duration = 0.0;
    Eigen::VectorXcd a;
    Eigen::VectorXcd b;
    Eigen::MatrixXd w;
    Eigen::MatrixXd g;
    double constant = 0.0;
};

inline OperatorMatrix spin_segment_h(const SpinSegment& seg, const SpinOps& ops) {
    const int m = ops.sites();
    if (seg.alpha_x.size() != m || seg.beta_y.size() != m || seg.gamma_zz.rows() != m ||
        seg.gamma_zz.cols() != m)
        throw ConfigError("segment coefficient arrays must be sized to the chain");
    if (seg.duration <= 0.0) throw ConfigError("segment durations must be positive");
    OperatorMatrix h = seg.constant * OperatorMatrix::Identity(ops.dim(), ops.dim());
    for (int k = 0; k < m; ++k)
        h += seg.alpha_x(k) * ops.sx[k] + seg.beta_y(k) * ops.sy[k];
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
            if (seg.gamma_zz(k, l) != 0.0) h += seg.gamma_zz(k, l) * ops.sz[k] * ops.sz[l];
    require_hermitian(h);
    return h;
}

inline OperatorMatrix fermi_segment_h(const FermiSegment& seg,
                                      const std::vector<OperatorMatrix>& th) {
    const int m = static_cast<int>(th.size());
    if (seg.a.size() != m || seg.b.size() != m || seg.w.rows() != m || seg.g.rows() != m)
        throw ConfigError("segment coefficient arrays must be sized to the chain");
    if (seg.duration <= 0.0) throw ConfigError("segment durations must be positive");
    const long dim = th[0].rows();
    OperatorMatrix h = seg.constant * OperatorMatrix::Identity(dim, dim);
    for (int k = 0; k < m; ++k) h += seg.a(k) * th[k] + seg.b(k) * th[k].adjoint();
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
            if (seg.w(k, l) != 0.0)
                h += seg.w(k, l) * (th[k].adjoint() * th[l] + th[l].adjoint() * th[k]);
            if (seg.g(k, l) != 0.0)
                h += seg.g(k, l) * (th[k].adjoint() * th[k]) * (th[l].adjoint() * th[l]);
        }
    require_hermitian(h);
    return h;
}

// U = prod over segments of e^{-i H_seg dt}, later segments applied on the left.
inline OperatorMatrix control_unitary_spin(int m, const std::vector<SpinSegment>& segments) {
    spin_detail::check_sites(m, 10);
    SpinOps ops = spin_ops(m);
    OperatorMatrix u = OperatorMatrix::Identity(ops.dim(), ops.dim());
    for (const auto& seg : segments)
        u = expm_hermitian_i(spin_segment_h(seg, ops), seg.duration) * u;
    return u;
}

inline OperatorMatrix control_unitary_fermi(int m, const std::vector<FermiSegment>& segments) {
    spin_detail::check_sites(m, 10);
    auto th = jw_fermions(m);
    OperatorMatrix u = OperatorMatrix::Identity(th[0].rows(), th[0].cols());
    for (const auto& seg : segments)
        u = expm_hermitian_i(fermi_segment_h(seg, th), seg.duration) * u;
    return u;
}

// Exact image of a spin segment under the Jordan-Wigner map. Single-site
// terms are representable only on site 1 (elsewhere the string obstructs the
// fermionic form); gamma_zz maps onto g, diagonal w and a constant.
inline FermiSegment jw_map_segment(const SpinSegment& seg) {
    const int m = static_cast<int>(seg.alpha_x.size());
    FermiSegment out;
    out.duration = seg.duration;
    out.a = Eigen::VectorXcd::Zero(m);
    out.b = Eigen::VectorXcd::Zero(m);
    out.w = Eigen::MatrixXd::Zero(m, m);
    out.g = Eigen::MatrixXd::Zero(m, m);
    out.constant = seg.constant;
    for (int k = 1; k < m; ++k)
        if (seg.alpha_x(k) != 0.0 || seg.beta_y(k) != 0.0)
            throw ConfigError("single-site controls map through the string only on site 1");
    // S_x(1) = (theta+ + theta)/2 ; S_y(1) = -i(theta+ - theta)/2
    out.a(0) = 0.5 * seg.alpha_x(0) + cplx{0.0, 0.5} * seg.beta_y(0);
    out.b(0) = 0.5 * seg.alpha_x(0) - cplx{0.0, 0.5} * seg.beta_y(0);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
            double g = seg.gamma_zz(k, l);
            if (g == 0.0) continue;
            if (k == l) {
                // S_z^2 = 1/4
                out.constant += 0.25 * g;
                continue;
            }
            // S_z S_z = (n_K - 1/2)(n_L - 1/2)
            out.g(k, l) += g;
            out.w(k, k) += -0.25 * g;
            out.w(l, l) += -0.25 * g;
            out.constant += 0.25 * g;
        }
    return out;
}

inline std::vector<FermiSegment> jw_map_schedule(const std::vector<SpinSegment>& segments) {
    std::vector<FermiSegment> out;
    out.reserve(segments.size());
    for (const auto& s : segments) out.push_back(jw_map_segment(s));
    return out;
}

}  // namespace qca
