#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "qca/lattice.hpp"

namespace qca {

// Sparse polynomial over anticommuting generators. Monomials are bitmasks
// with generators in ascending index order; up to 63 generators.
class GrassmannPoly {
public:
    using Mask = std::uint64_t;

    GrassmannPoly() = default;

    static GrassmannPoly scalar(cplx c) {
        GrassmannPoly p;
        if (c != cplx{0.0, 0.0}) p.terms_[0] = c;
        return p;
    }
    static GrassmannPoly generator(int k) {
        check_index(k);
        GrassmannPoly p;
        p.terms_[Mask{1} << k] = cplx{1.0, 0.0};
        return p;
    }
    // Ordered product of generators times a coefficient.
    static GrassmannPoly monomial(const std::vector<int>& gens, cplx c) {
        GrassmannPoly p = scalar(c);
        for (int g : gens) p = p * generator(g);
        return p;
    }

    const std::map<Mask, cplx>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    cplx coeff(Mask m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
    }

    double max_abs_coeff() const {
        double v = 0.0;
        for (const auto& [m, c] : terms_) v = std::max(v, std::abs(c));
        return v;
    }

    bool is_zero(double tol) const { return max_abs_coeff() <= tol; }

    int degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, std::popcount(m));
        return d;
    }

    GrassmannPoly& operator+=(const GrassmannPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    GrassmannPoly& operator-=(const GrassmannPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend GrassmannPoly operator+(GrassmannPoly a, const GrassmannPoly& b) { return a += b; }
    friend GrassmannPoly operator-(GrassmannPoly a, const GrassmannPoly& b) { return a -= b; }

    friend GrassmannPoly operator*(const GrassmannPoly& a, const GrassmannPoly& b) {
        GrassmannPoly out;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                if (ma & mb) continue;  // theta^2 = 0
                out.add_term(ma | mb, ca * cb * reorder_sign(ma, mb));
            }
        return out;
    }
    friend GrassmannPoly operator*(cplx c, GrassmannPoly p) {
        GrassmannPoly out;
        for (const auto& [m, v] : p.terms_) out.add_term(m, c * v);
        return out;
    }
    GrassmannPoly operator-() const { return cplx{-1.0, 0.0} * (*this); }

    // int d theta_k: drops theta_k after moving it to the front; monomials
    // without theta_k vanish.
    GrassmannPoly berezin(int k) const {
        check_index(k);
        const Mask bit = Mask{1} << k;
        const Mask below = bit - 1;
        GrassmannPoly out;
        for (const auto& [m, c] : terms_) {
            if (!(m & bit)) continue;
            int swaps = std::popcount(m & below);
            out.add_term(m & ~bit, (swaps % 2 == 0) ? c : -c);
        }
        return out;
    }

    // Sequential Berezin integration; the first listed generator is applied
    // first (innermost differential).
    GrassmannPoly berezin_all(const std::vector<int>& order) const {
        GrassmannPoly p = *this;
        for (int k : order) p = p.berezin(k);
        return p;
    }

    // Left derivative d/d theta_k.
    GrassmannPoly derivative(int k) const { return berezin(k); }

    // exp(p); the nilpotent part terminates the series exactly.
    GrassmannPoly gexp() const {
        cplx s = coeff(0);
        GrassmannPoly nil = *this;
        nil.terms_.erase(0);
        GrassmannPoly acc = scalar(std::exp(s));
        GrassmannPoly term = acc;
        for (int k = 1; ; ++k) {
            term = cplx{1.0 / k, 0.0} * (term * nil);
            if (term.empty()) break;
            acc += term;
        }
        return acc;
    }

    // Sign from sorting the concatenation of two ascending monomials.
    static double reorder_sign(Mask a, Mask b) {
        int swaps = 0;
        Mask rest = a;
        while (rest) {
            int i = std::countr_zero(rest);
            rest &= rest - 1;
            swaps += std::popcount(b & ((Mask{1} << i) - 1));
        }
        return (swaps % 2 == 0) ? 1.0 : -1.0;
    }

private:
    static void check_index(int k) {
        if (k < 0 || k > 62) throw ConfigError("generator index out of the 63-bit range");
    }
    void add_term(Mask m, cplx c) {
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == cplx{0.0, 0.0}) terms_.erase(it);
        }
    }

    std::map<Mask, cplx> terms_;
};

// Quadratic-plus-quartic fermionic action. Two generator layouts:
//  - conjugate_pairs: theta_i = i, theta_bar_i = n + i, with S containing
//    sum_{ij} theta_bar_i M_ij theta_j;
//  - general: a single list of generators with an antisymmetric pair matrix C,
//    S = sum_{a<b} C_ab g_a g_b.
struct FermiAction {
    enum class Layout { conjugate_pairs, general };

    struct Quartic {
        int a, b, c, d;
        cplx g;
    };

    Layout layout = Layout::conjugate_pairs;
    int n_gen = 0;
    Eigen::MatrixXcd bilinear;  // conjugate_pairs: n x n matrix M
    Eigen::MatrixXcd pair_form; // general: n_gen x n_gen antisymmetric C
    std::vector<Quartic> quartic;

    static FermiAction conjugate(const Eigen::MatrixXcd& m) {
        FermiAction a;
        a.layout = Layout::conjugate_pairs;
        a.n_gen = 2 * static_cast<int>(m.rows());
        a.bilinear = m;
        return a;
    }
    static FermiAction general(int n_gen) {
        FermiAction a;
        a.layout = Layout::general;
        a.n_gen = n_gen;
        a.pair_form = Eigen::MatrixXcd::Zero(n_gen, n_gen);
        return a;
    }

    int pairs() const { return static_cast<int>(bilinear.rows()); }
    int gen_theta(int i) const { return i; }
    int gen_theta_bar(int i) const { return pairs() + i; }

    void add_pair_term(int a, int b, cplx c) {
        // S += c g_a g_b
        pair_form(a, b) += c;
        pair_form(b, a) -= c;
    }

    GrassmannPoly to_poly() const {
        GrassmannPoly s;
        if (layout == Layout::conjugate_pairs) {
            const int n = pairs();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (bilinear(i, j) != cplx{0.0, 0.0})
                        s += GrassmannPoly::monomial({gen_theta_bar(i), gen_theta(j)},
                                                     bilinear(i, j));
        } else {
            for (int a = 0; a < n_gen; ++a)
                for (int b = a + 1; b < n_gen; ++b)
                    if (pair_form(a, b) != cplx{0.0, 0.0})
                        s += GrassmannPoly::monomial({a, b}, pair_form(a, b));
        }
        for (const auto& q : quartic)
            s += GrassmannPoly::monomial({q.a, q.b, q.c, q.d}, q.g);
        return s;
    }

    // Integration order fixing the measure. Conjugate pairs use
    // prod_i d theta_bar_i d theta_i (theta_i innermost per pair, so that
    // int d theta_bar d theta e^{-theta_bar a theta} = a). The general layout
    // integrates generators in descending index order.
    std::vector<int> measure_order() const {
        std::vector<int> order;
        if (layout == Layout::conjugate_pairs) {
            for (int i = pairs() - 1; i >= 0; --i) {
                order.push_back(gen_theta(i));
                order.push_back(gen_theta_bar(i));
            }
        } else {
            for (int k = n_gen - 1; k >= 0; --k) order.push_back(k);
        }
        return order;
    }
};

// Full Berezin integral of e^{-S} by explicit expansion. The oracle route.
inline cplx berezin_amplitude(const FermiAction& action) {
    if (action.n_gen > 24)
        throw GeneratorBudgetExceeded("brute-force expansion capped at 24 generators, got " +
                                      std::to_string(action.n_gen));
    GrassmannPoly p = (-action.to_poly()).gexp();
    return p.berezin_all(action.measure_order()).coeff(0);
}

// Gaussian evaluation of int e^{-S} for a quartic-free action. Conjugate-pair
// actions reduce to det(M); general actions are evaluated by pair elimination
// (Schur updates on the antisymmetric form).
inline cplx det_amplitude(const FermiAction& action) {
    if (!action.quartic.empty())
        throw ConfigError("det_amplitude needs a quartic-free action");
    if (action.layout == FermiAction::Layout::conjugate_pairs) {
        if (action.pairs() == 0) return {1.0, 0.0};
        return Eigen::PartialPivLU<Eigen::MatrixXcd>(action.bilinear).determinant();
    }
    // Pair elimination: repeatedly integrate the lowest remaining generator a
    // against its first partner b. With the descending measure,
    //   F_G[e^{-S}] = (-1)^{pos(b)-1} C_ab F_{G \ {a,b}}[e^{-S'}],
    //   S' = S_rest - L_a L_b / C_ab.
    Eigen::MatrixXcd c = action.pair_form;
    std::vector<int> live(action.n_gen);
    for (int k = 0; k < action.n_gen; ++k) live[k] = k;
    cplx amp{1.0, 0.0};
    while (!live.empty()) {
        if (live.size() == 1) return {0.0, 0.0};
        int a = live[0];
        int pos_b = -1;
        for (size_t t = 1; t < live.size(); ++t)
            if (c(a, live[t]) != cplx{0.0, 0.0}) {
                pos_b = static_cast<int>(t);
                break;
            }
        if (pos_b < 0) return {0.0, 0.0};  // generator a appears nowhere
        int b = live[static_cast<size_t>(pos_b)];
        cplx cab = c(a, b);
        amp *= ((pos_b - 1) % 2 == 0 ? 1.0 : -1.0) * cab;
        for (size_t u = 0; u < live.size(); ++u)
            for (size_t v = u + 1; v < live.size(); ++v) {
                int j = live[u], l = live[v];
                if (j == a || j == b || l == a || l == b) continue;
                cplx upd = (c(a, j) * c(b, l) - c(a, l) * c(b, j)) / cab;
                c(j, l) -= upd;
                c(l, j) += upd;
            }
        live.erase(live.begin() + pos_b);
        live.erase(live.begin());
    }
    return amp;
}

// Exact Berezin integral of e^{-S} including quartic couplings.
inline cplx quartic_amplitude(const FermiAction& action) {
    if (action.n_gen > 24)
        throw GeneratorBudgetExceeded("quartic expansion capped at 24 generators, got " +
                                      std::to_string(action.n_gen));
    return berezin_amplitude(action);
}

// One-cell fermionic oscillator on a periodic time chain:
// S = sum_I i theta_bar(I) ( (theta(I+1)-theta(I-1))/2
//                            - (r/2)(theta(I+1)+theta(I-1)-2 theta(I)) )
//     - W theta_bar(I) theta(I).
inline FermiAction fermi_action_1cell(int n, double w, double r) {
    if (n < 2) throw ConfigError("fermi_action_1cell needs n >= 2");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    const cplx i{0.0, 1.0};
    for (int t = 0; t < n; ++t) {
        int up = (t + 1) % n, dn = (t + n - 1) % n;
        m(t, up) += i * (0.5 - 0.5 * r);
        m(t, dn) += i * (-0.5 - 0.5 * r);
        m(t, t) += i * r - w;
    }
    return FermiAction::conjugate(m);
}

// Two-species M-cell action on a doubly periodic lattice, transcribed with the
// chirality-mixing Wilson couplings; generators theta(I,J) then
// theta_tilde(I,J), flattened I*M+J.
inline FermiAction fermi_action_mcell(int n, int m_sites, double r) {
    if (n < 2 || m_sites < 2) throw ConfigError("fermi_action_mcell needs N, M >= 2");
    FermiAction a = FermiAction::general(2 * n * m_sites);
    const cplx i{0.0, 1.0};
    auto th = [m_sites](int t, int j) { return t * m_sites + j; };
    auto tt = [n, m_sites](int t, int j) { return n * m_sites + t * m_sites + j; };
    auto wrap = [](int v, int lim) { return ((v % lim) + lim) % lim; };
    for (int t = 0; t < n; ++t)
        for (int j = 0; j < m_sites; ++j) {
            int tu = wrap(t + 1, n), td = wrap(t - 1, n);
            int ju = wrap(j + 1, m_sites), jd = wrap(j - 1, m_sites);
            // -i/2 theta (D_t theta - r W_t theta~)
            a.add_pair_term(th(t, j), th(tu, j), -0.5 * i);
            a.add_pair_term(th(t, j), th(td, j), 0.5 * i);
            a.add_pair_term(th(t, j), tt(tu, j), 0.5 * i * r);
            a.add_pair_term(th(t, j), tt(td, j), 0.5 * i * r);
            a.add_pair_term(th(t, j), tt(t, j), -i * r);
            // -i/2 theta (D_x theta - r W_x theta~)
            a.add_pair_term(th(t, j), th(t, ju), -0.5 * i);
            a.add_pair_term(th(t, j), th(t, jd), 0.5 * i);
            a.add_pair_term(th(t, j), tt(t, ju), 0.5 * i * r);
            a.add_pair_term(th(t, j), tt(t, jd), 0.5 * i * r);
            a.add_pair_term(th(t, j), tt(t, j), -i * r);
            // -i/2 theta~ (D_t theta~ + r W_t theta)
            a.add_pair_term(tt(t, j), tt(tu, j), -0.5 * i);
            a.add_pair_term(tt(t, j), tt(td, j), 0.5 * i);
            a.add_pair_term(tt(t, j), th(tu, j), -0.5 * i * r);
            a.add_pair_term(tt(t, j), th(td, j), -0.5 * i * r);
            a.add_pair_term(tt(t, j), th(t, j), i * r);
            // +i/2 theta~ (D_x theta~ - r W_x theta)
            a.add_pair_term(tt(t, j), tt(t, ju), 0.5 * i);
            a.add_pair_term(tt(t, j), tt(t, jd), -0.5 * i);
            a.add_pair_term(tt(t, j), th(t, ju), -0.5 * i * r);
            a.add_pair_term(tt(t, j), th(t, jd), -0.5 * i * r);
            a.add_pair_term(tt(t, j), th(t, j), i * r);
        }
    return a;
}

// Two-dimensional Dirac representation used by the doublet form.
struct DiracRep {
    Eigen::Matrix2cd rho0;
    Eigen::Matrix2cd rho1;

    DiracRep() {
        const cplx i{0.0, 1.0};
        const cplx z{0.0, 0.0};
        rho0 << z, -i, i, z;
        rho1 << z, i, i, z;
    }
};

namespace detail {

// Bracketing + bisection roots of f over one period, reported in (-pi, pi].
// The scan runs slightly past both ends so a zero sitting exactly on the
// boundary (p = pi) is still bracketed; results within 1e-8 of 0 or +-pi are
// snapped so refinement of the grid cannot move them.
inline std::vector<double> axis_roots(const std::function<double(double)>& f, int grid) {
    const double pi = std::numbers::pi;
    const double h = 2.0 * pi / grid;
    std::vector<double> raw;
    double prev_p = -pi - 2.0 * h, prev_v = f(prev_p);
    for (int g = 1; g <= grid + 4; ++g) {
        double p = -pi + (g - 2) * h;
        double v = f(p);
        if (v == 0.0) {
            raw.push_back(p);
        } else if (prev_v != 0.0 && (prev_v < 0) != (v < 0)) {
            double lo = prev_p, hi = p, flo = prev_v;
            while (hi - lo > 1e-12) {
                double mid = 0.5 * (lo + hi), fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0) != (fm < 0))
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            raw.push_back(0.5 * (lo + hi));
        }
        prev_p = p;
        prev_v = v;
    }
    std::vector<double> out;
    for (double r : raw) {
        if (std::abs(r) < 1e-8) r = 0.0;
        if (std::abs(r - pi) < 1e-8 || std::abs(r + pi) < 1e-8) r = pi;
        if (r <= -pi || r > pi + 1e-8) continue;
        bool dup = false;
        for (double o : out)
            if (std::abs(r - o) < 1e-8) dup = true;
        if (!dup) out.push_back(r);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Momenta in (-pi, pi]^dim where every component of the lattice inverse
// propagator vanishes: 1D components (sin p0, 2 r sin^2(p0/2)); 2D components
// (sin p0, sin p1, r (2 sin^2(p0/2) + 2 sin^2(p1/2))).
inline std::vector<std::vector<double>> doubler_census(double r, int dim, int grid = 256) {
    if (r < 0) throw ConfigError("doubler_census needs r >= 0");
    if (dim != 1 && dim != 2) throw ConfigError("doubler_census supports dim 1 or 2");
    const double tol = 1e-9;
    auto sin_roots = detail::axis_roots([](double p) { return std::sin(p); }, grid);
    std::vector<std::vector<double>> out;
    if (dim == 1) {
        for (double p : sin_roots) {
            double wilson = 2.0 * r * std::sin(p / 2.0) * std::sin(p / 2.0);
            if (std::abs(wilson) <= tol) out.push_back({p});
        }
    } else {
        for (double p0 : sin_roots)
            for (double p1 : sin_roots) {
                double wilson = r * (2.0 * std::sin(p0 / 2.0) * std::sin(p0 / 2.0) +
                                     2.0 * std::sin(p1 / 2.0) * std::sin(p1 / 2.0));
                if (std::abs(wilson) <= tol) out.push_back({p0, p1});
            }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace qca
