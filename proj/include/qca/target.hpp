#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "qca/lattice.hpp"

namespace qca {

// Exact enumeration over interior configurations is exponential; this budget
// caps the configuration count (QCA_ENUM_BUDGET overrides).
inline double enumeration_budget() {
    if (const char* env = std::getenv("QCA_ENUM_BUDGET")) {
        double v = std::atof(env);
        if (v > 0) return v;
    }
    return 1e7;
}

// Continuous-time walk amplitude on Z:
//   (1/2pi) int_{-pi}^{pi} dp e^{i p delta} e^{-2 i t (cos p - 1)},
// evaluated by the trapezoid rule, which is spectrally exact here.
inline cplx walk_z(long long delta, double t) {
    if (!std::isfinite(t)) throw ConfigError("walk_z requires finite t");
    const double pi = std::numbers::pi;
    long long q = 128;
    long long need = 2 * std::llabs(delta) + static_cast<long long>(8.0 * std::abs(t)) + 64;
    while (q < need) q *= 2;
    cplx acc{0.0, 0.0};
    for (long long j = 0; j < q; ++j) {
        double p = -pi + 2.0 * pi * j / q;
        acc += std::polar(1.0, p * delta - 2.0 * t * (std::cos(p) - 1.0));
    }
    return acc / static_cast<double>(q);
}

namespace detail {

// Smallest n0 > 2t such that the Bessel tail sum_{n >= n0} t^n/n! drops below eps.
inline long long bessel_tail_order(double t, double eps) {
    double at = std::abs(t);
    long long n = static_cast<long long>(std::ceil(at)) + 1;
    double term = 1.0;
    for (long long k = 1; k <= n; ++k) term *= at / k;
    while (true) {
        double ratio = at / (n + 1);
        if (ratio < 1.0) {
            double tail = term * ratio / (1.0 - ratio);
            if (tail < eps) return n;
        }
        ++n;
        term *= at / n;
        if (n > 100000) return n;
    }
}

}  // namespace detail

// Projects any amplitude on Z down to Z_k by summing over images
// x_i + m k, |m| <= m_max.
template <typename AmpFn>
cplx image_sum_zk(int k, long long xi, long long xf, long long m_max, AmpFn&& amplitude) {
    if (k < 2) throw ConfigError("image_sum_zk requires modulus k >= 2");
    if (m_max < 1) throw ConfigError("image_sum_zk requires m_max >= 1");
    cplx acc{0.0, 0.0};
    for (long long m = -m_max; m <= m_max; ++m)
        acc += amplitude(xi + m * static_cast<long long>(k) - xf);
    return acc;
}

// Walk on Z_k as the image sum over the covering walk on Z. m_max <= 0 picks
// the truncation automatically from the Bessel tail bound |J_n(2t)| <= t^n/n!.
inline cplx walk_zk(int k, long long xi, long long xf, double t, long long m_max = 0) {
    if (k < 2) throw ConfigError("walk_zk requires modulus k >= 2");
    if (m_max <= 0) {
        long long order = detail::bessel_tail_order(t, 1e-12);
        m_max = (order + std::llabs(xi - xf)) / k + 2;
    }
    return image_sum_zk(k, xi, xf, m_max,
                        [t](long long delta) { return walk_z(delta, t); });
}

// Independent route through the momentum eigenbasis of the cycle graph.
inline cplx walk_zk_eigenbasis(int k, long long xi, long long xf, double t) {
    const double pi = std::numbers::pi;
    cplx acc{0.0, 0.0};
    for (int n = 0; n < k; ++n) {
        double p = 2.0 * pi * n / k;
        acc += std::polar(1.0, p * (xi - xf) - 2.0 * t * (std::cos(p) - 1.0));
    }
    return acc / static_cast<double>(k);
}

// Integer-valued lattice configuration over Z_k.
struct ZkConfig {
    int k = 2;
    Eigen::MatrixXi values;  // (N+1) x M

    ZkConfig(int k_, Eigen::MatrixXi v) : k(k_), values(std::move(v)) {
        if (k < 2) throw ConfigError("ZkConfig: modulus must be >= 2");
    }
};

struct SpinConfigZ2 {
    Eigen::MatrixXi values;  // entries +1 / -1

    explicit SpinConfigZ2(Eigen::MatrixXi v) : values(std::move(v)) {
        for (int i = 0; i < values.rows(); ++i)
            for (int j = 0; j < values.cols(); ++j)
                if (values(i, j) != 1 && values(i, j) != -1)
                    throw ConfigError("SpinConfigZ2: entries must be +-1");
    }
};

namespace detail {

// cos/ sin of 2 pi d / k tabulated per k so equal residues give bitwise equal
// action values (shift invariance and mod-k periodicity come out exact).
struct CycleTable {
    int k;
    std::vector<double> c;

    explicit CycleTable(int k_) : k(k_), c(k_) {
        for (int d = 0; d < k; ++d) c[d] = std::cos(2.0 * std::numbers::pi * d / k);
    }
    double cos_diff(long long a, long long b) const {
        long long d = (a - b) % k;
        if (d < 0) d += k;
        return c[static_cast<size_t>(d)];
    }
};

}  // namespace detail

// S = (k/2pi)^2 sum_{I=0}^{N-1} sum_J [cos(2pi(X(I,J+1)-X(I,J))/k)
//                                      - cos(2pi(X(I+1,J)-X(I,J))/k)],
// J periodic.
inline double circle_action(const ZkConfig& cfg) {
    const int rows = static_cast<int>(cfg.values.rows());
    const int m = static_cast<int>(cfg.values.cols());
    if (rows < 2) throw ConfigError("circle_action needs initial and final rows");
    detail::CycleTable tab(cfg.k);
    const double scale = cfg.k / (2.0 * std::numbers::pi);
    const double pref = scale * scale;
    double s = 0.0;
    for (int i = 0; i + 1 < rows; ++i)
        for (int j = 0; j < m; ++j) {
            s += tab.cos_diff(cfg.values(i, (j + 1) % m), cfg.values(i, j));
            s -= tab.cos_diff(cfg.values(i + 1, j), cfg.values(i, j));
        }
    return pref * s;
}

// A = (1/pi)^2 sum_{I=0}^{N-1} sum_J [S(I,J+1)S(I,J) - S(I+1,J)S(I,J)].
inline double ising_action(const SpinConfigZ2& cfg) {
    const int rows = static_cast<int>(cfg.values.rows());
    const int m = static_cast<int>(cfg.values.cols());
    if (rows < 2) throw ConfigError("ising_action needs initial and final rows");
    // written as a square so the k = 2 circle action produces bitwise equal values
    const double inv_pi = 1.0 / std::numbers::pi;
    const double pref = inv_pi * inv_pi;
    double s = 0.0;
    for (int i = 0; i + 1 < rows; ++i)
        for (int j = 0; j < m; ++j) {
            s += static_cast<double>(cfg.values(i, (j + 1) % m) * cfg.values(i, j));
            s -= static_cast<double>(cfg.values(i + 1, j) * cfg.values(i, j));
        }
    return pref * s;
}

namespace detail {

inline void check_enum_budget(double base, long long cells) {
    double count = std::pow(base, static_cast<double>(cells));
    double budget = enumeration_budget();
    if (count > budget) throw EnumerationBudgetExceeded(count, budget);
}

}  // namespace detail

// K = sum over all interior Z_k configurations of e^{i S}; rows 0 and N fixed.
inline cplx zk_amplitude(int k, int n_steps, const Eigen::VectorXi& row0,
                         const Eigen::VectorXi& rown) {
    if (row0.size() != rown.size()) throw ConfigError("boundary rows must agree in length");
    const int m = static_cast<int>(row0.size());
    const long long cells = static_cast<long long>(n_steps - 1) * m;
    if (cells < 0) throw ConfigError("zk_amplitude requires n_steps >= 1");
    detail::check_enum_budget(k, cells);

    ZkConfig cfg(k, Eigen::MatrixXi::Zero(n_steps + 1, m));
    cfg.values.row(0) = row0.transpose();
    cfg.values.row(n_steps) = rown.transpose();

    std::vector<int> digits(static_cast<size_t>(std::max<long long>(cells, 0)), 0);
    cplx acc{0.0, 0.0};
    while (true) {
        for (long long c = 0; c < cells; ++c)
            cfg.values(1 + static_cast<int>(c) / m, static_cast<int>(c) % m) =
                digits[static_cast<size_t>(c)];
        acc += std::polar(1.0, circle_action(cfg));
        long long pos = 0;
        while (pos < cells && ++digits[static_cast<size_t>(pos)] == k)
            digits[static_cast<size_t>(pos++)] = 0;
        if (pos == cells) break;
    }
    return acc;
}

inline cplx ising_amplitude(int n_steps, const Eigen::VectorXi& row0,
                            const Eigen::VectorXi& rown) {
    if (row0.size() != rown.size()) throw ConfigError("boundary rows must agree in length");
    const int m = static_cast<int>(row0.size());
    const long long cells = static_cast<long long>(n_steps - 1) * m;
    if (cells < 0) throw ConfigError("ising_amplitude requires n_steps >= 1");
    detail::check_enum_budget(2, cells);

    Eigen::MatrixXi v = Eigen::MatrixXi::Ones(n_steps + 1, m);
    v.row(0) = row0.transpose();
    v.row(n_steps) = rown.transpose();

    std::vector<int> digits(static_cast<size_t>(std::max<long long>(cells, 0)), 0);
    cplx acc{0.0, 0.0};
    while (true) {
        for (long long c = 0; c < cells; ++c)
            v(1 + static_cast<int>(c) / m, static_cast<int>(c) % m) =
                digits[static_cast<size_t>(c)] == 0 ? 1 : -1;
        acc += std::polar(1.0, ising_action(SpinConfigZ2(v)));
        long long pos = 0;
        while (pos < cells && ++digits[static_cast<size_t>(pos)] == 2)
            digits[static_cast<size_t>(pos++)] = 0;
        if (pos == cells) break;
    }
    return acc;
}

}  // namespace qca
