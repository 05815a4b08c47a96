#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qca/lattice.hpp"

namespace qca {

struct VarLabel {
    int i = 0;
    int j = 0;
    std::string species = "x";

    std::string str() const {
        return species + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
    }
};

struct Reduction;
class QuadraticForm;
Reduction reduce_quadratic(const QuadraticForm& form, const std::vector<int>& interior);
Reduction reduce_quadratic_pivoted(const QuadraticForm& form, const std::vector<int>& interior);

// S(x) = 1/2 x^T A x + b^T x + c with A kept exactly symmetric.
class QuadraticForm {
public:
    explicit QuadraticForm(int n)
        : a_(Eigen::MatrixXd::Zero(n, n)), b_(Eigen::VectorXd::Zero(n)), c_(0.0), labels_(n) {
        for (int k = 0; k < n; ++k) labels_[k] = VarLabel{k, 0, "x"};
    }

    int size() const { return static_cast<int>(b_.size()); }
    const Eigen::MatrixXd& matrix() const { return a_; }
    const Eigen::VectorXd& linear() const { return b_; }
    double constant() const { return c_; }
    std::vector<VarLabel>& labels() { return labels_; }
    const std::vector<VarLabel>& labels() const { return labels_; }

    // Adds coef * x_i * x_j to S (symmetrized into A).
    void add_quadratic(int i, int j, double coef) {
        if (i == j) {
            a_(i, i) += 2.0 * coef;
        } else {
            a_(i, j) += coef;
            a_(j, i) += coef;
        }
    }
    void add_linear(int i, double coef) { b_(i) += coef; }
    void add_constant(double coef) { c_ += coef; }

    double evaluate(const Eigen::VectorXd& x) const {
        return 0.5 * x.dot(a_ * x) + b_.dot(x) + c_;
    }

private:
    friend Reduction reduce_quadratic(const QuadraticForm&, const std::vector<int>&);
    friend Reduction reduce_quadratic_pivoted(const QuadraticForm&, const std::vector<int>&);
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    double c_;
    std::vector<VarLabel> labels_;
};

// Closed form of the oscillatory Gaussian integral over the real line,
//   int dx e^{i (a x^2 + b x)} = sqrt(pi/|a|) e^{i sgn(a) pi/4} e^{-i b^2/(4a)},
// on the principal branch.
inline cplx fresnel_1d(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw SingularIntegral("fresnel_1d requires finite coefficients");
    if (a == 0.0) throw SingularIntegral("fresnel_1d: vanishing quadratic coefficient");
    const double pi = std::numbers::pi;
    double mod = std::sqrt(pi / std::abs(a));
    double phase = (a > 0 ? pi / 4.0 : -pi / 4.0) - b * b / (4.0 * a);
    return std::polar(mod, phase);
}

struct Reduction {
    cplx prefactor{1.0, 0.0};     // product of raw Fresnel factors, one per variable
    QuadraticForm residual;       // depends only on the variables that were kept
    std::vector<int> eliminated;  // in elimination order
    std::vector<int> remaining;
};

// Integrates the listed variables out of e^{iS} one at a time (Gaussian
// elimination with the Fresnel phase tracked per pivot). The prefactor is the
// raw product of fresnel_1d moduli/phases; no measure normalization applied.
inline Reduction reduce_quadratic(const QuadraticForm& form, const std::vector<int>& interior) {
    Reduction red{cplx{1.0, 0.0}, form, {}, {}};
    Eigen::MatrixXd& a = red.residual.a_;
    Eigen::VectorXd& b = red.residual.b_;

    std::vector<bool> gone(form.size(), false);
    for (int k : interior) {
        double d = a(k, k);
        double scale = a.cwiseAbs().maxCoeff();
        if (std::abs(d) <= 1e-12 * std::max(1.0, scale))
            throw SingularReduction("zero pivot eliminating " + form.labels()[k].str());
        // int dx_k e^{i(d/2 x_k^2 + L x_k)} with L collecting the couplings.
        red.prefactor *= fresnel_1d(0.5 * d, 0.0);
        Eigen::VectorXd v = a.col(k);
        v(k) = 0.0;
        double bk = b(k);
        a -= (v * v.transpose()) / d;
        b -= (bk / d) * v;
        red.residual.c_ -= bk * bk / (2.0 * d);
        a.col(k).setZero();
        a.row(k).setZero();
        b(k) = 0.0;
        gone[k] = true;
        red.eliminated.push_back(k);
    }
    for (int k = 0; k < form.size(); ++k)
        if (!gone[k]) red.remaining.push_back(k);
    return red;
}

// Same integral with the elimination order chosen greedily by pivot size, and
// hyperbolic 2x2 steps for zero-diagonal pairs (the lightcone form of the
// wave action has identically vanishing diagonals):
//   int dx dy e^{i(a x y + x L_x + y L_y)} = (2 pi / |a|) e^{-i L_x L_y / a}.
inline Reduction reduce_quadratic_pivoted(const QuadraticForm& form,
                                          const std::vector<int>& interior) {
    Reduction red{cplx{1.0, 0.0}, form, {}, {}};
    Eigen::MatrixXd& a = red.residual.a_;
    Eigen::VectorXd& b = red.residual.b_;
    const double pi = std::numbers::pi;

    std::vector<int> live = interior;

    auto drop = [&](int k) {
        a.col(k).setZero();
        a.row(k).setZero();
        b(k) = 0.0;
        live.erase(std::find(live.begin(), live.end(), k));
        red.eliminated.push_back(k);
    };

    while (!live.empty()) {
        double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        int best = live.front();
        for (int k : live)
            if (std::abs(a(k, k)) > std::abs(a(best, best))) best = k;
        if (std::abs(a(best, best)) > 1e-9 * scale) {
            int k = best;
            double d = a(k, k);
            red.prefactor *= fresnel_1d(0.5 * d, 0.0);
            Eigen::VectorXd v = a.col(k);
            v(k) = 0.0;
            double bk = b(k);
            a -= (v * v.transpose()) / d;
            b -= (bk / d) * v;
            red.residual.c_ -= bk * bk / (2.0 * d);
            drop(k);
            continue;
        }
        // all remaining diagonals vanish: find the strongest interior pair
        int pk = -1, pl = -1;
        double amax = 0.0;
        for (size_t u = 0; u < live.size(); ++u)
            for (size_t w = u + 1; w < live.size(); ++w)
                if (std::abs(a(live[u], live[w])) > amax) {
                    amax = std::abs(a(live[u], live[w]));
                    pk = live[u];
                    pl = live[w];
                }
        if (pk < 0 || amax <= 1e-9 * scale)
            throw SingularReduction("zero pivot eliminating " + form.labels()[best].str());
        double alpha = a(pk, pl);
        red.prefactor *= 2.0 * pi / std::abs(alpha);
        Eigen::VectorXd vk = a.col(pk), vl = a.col(pl);
        vk(pk) = vk(pl) = 0.0;
        vl(pk) = vl(pl) = 0.0;
        double bk = b(pk), bl = b(pl);
        a -= (vk * vl.transpose() + vl * vk.transpose()) / alpha;
        b -= (bk * vl + bl * vk) / alpha;
        red.residual.c_ -= bk * bl / alpha;
        drop(pk);
        drop(pl);
    }
    for (int k = 0; k < form.size(); ++k)
        if (std::find(red.eliminated.begin(), red.eliminated.end(), k) == red.eliminated.end())
            red.remaining.push_back(k);
    return red;
}

}  // namespace qca
