#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qca/lattice.hpp"

namespace qca {

// Second-order update rules. Wave and Harmonic subtract the I-1 row,
// SpinPrecession and SusyFirstOrder add it.
struct RuleSpec {
    enum class Kind { wave, harmonic, spin_precession, susy_first_order };

    Kind kind = Kind::wave;
    double w = 0.0;
    Eigen::Vector3d b_field = Eigen::Vector3d::Zero();
    bool coupling = false;

    static RuleSpec Wave() { return RuleSpec{Kind::wave, 0.0, Eigen::Vector3d::Zero(), false}; }
    static RuleSpec Harmonic(double w) {
        return RuleSpec{Kind::harmonic, w, Eigen::Vector3d::Zero(), false};
    }
    static RuleSpec SpinPrecession(const Eigen::Vector3d& b, bool coupling) {
        return RuleSpec{Kind::spin_precession, 0.0, b, coupling};
    }
    static RuleSpec SusyFirstOrder(double w) {
        return RuleSpec{Kind::susy_first_order, w, Eigen::Vector3d::Zero(), false};
    }

    int sign() const {
        return (kind == Kind::wave || kind == Kind::harmonic) ? -1 : +1;
    }
    bool is_spin() const { return kind == Kind::spin_precession; }
};

struct FieldHistory {
    LatticeShape shape;
    Eigen::MatrixXd values;  // filled_rows x m_space
    int filled_rows = 0;

    Eigen::VectorXd row(int i) const { return values.row(i).transpose(); }
};

struct SpinHistory {
    LatticeShape shape;
    std::vector<Eigen::Matrix3Xd> rows;  // one 3 x M block per time row

    int filled_rows() const { return static_cast<int>(rows.size()); }
};

namespace detail {

inline Eigen::VectorXd scalar_update(const RuleSpec& rule, const LatticeShape& shape,
                                     const Eigen::VectorXd& prev, const Eigen::VectorXd& cur) {
    const int m = shape.m_space;
    Eigen::VectorXd next(m);
    switch (rule.kind) {
        case RuleSpec::Kind::wave:
            for (int j = 0; j < m; ++j)
                next(j) = cur(shape.neighbor(j, -1)) + cur(shape.neighbor(j, +1)) - prev(j);
            break;
        case RuleSpec::Kind::harmonic:
            for (int j = 0; j < m; ++j)
                next(j) = (2.0 - rule.w * rule.w) * cur(j) - prev(j);
            break;
        default:
            throw ConfigError("scalar evolve supports wave and harmonic rules");
    }
    return next;
}

// f of the spin rule: 2 S x (B + coupled neighbors), evaluated at row I.
inline Eigen::Matrix3Xd spin_f(const RuleSpec& rule, const LatticeShape& shape,
                               const Eigen::Matrix3Xd& cur) {
    const int m = shape.m_space;
    Eigen::Matrix3Xd f(3, m);
    for (int j = 0; j < m; ++j) {
        Eigen::Vector3d field = rule.b_field;
        if (rule.coupling)
            field += cur.col(shape.neighbor(j, -1)) + cur.col(shape.neighbor(j, +1));
        f.col(j) = 2.0 * cur.col(j).cross(field);
    }
    return f;
}

}  // namespace detail

inline FieldHistory evolve(const RuleSpec& rule, const Eigen::VectorXd& row0,
                           const Eigen::VectorXd& row1, int steps,
                           SpaceBoundary sb = SpaceBoundary::periodic) {
    if (rule.is_spin()) throw ConfigError("spin rule needs the SpinHistory overload");
    if (row0.size() != row1.size()) throw ConfigError("initial rows differ in length");
    if (steps < 0) throw ConfigError("steps must be >= 0");
    LatticeShape shape(steps + 2, static_cast<int>(row0.size()), TimeBoundary::fixed, sb);
    FieldHistory h{shape, Eigen::MatrixXd::Zero(steps + 2, shape.m_space), steps + 2};
    h.values.row(0) = row0.transpose();
    h.values.row(1) = row1.transpose();
    for (int i = 1; i <= steps; ++i) {
        Eigen::VectorXd next = detail::scalar_update(rule, shape, h.row(i - 1), h.row(i));
        h.values.row(i + 1) = next.transpose();
    }
    return h;
}

// Runs the automaton backward from the final two rows; returned history is in
// forward time order, ending with the two input rows.
inline FieldHistory reverse(const RuleSpec& rule, const Eigen::VectorXd& row_n_minus1,
                            const Eigen::VectorXd& row_n, int steps,
                            SpaceBoundary sb = SpaceBoundary::periodic) {
    if (rule.is_spin()) throw ConfigError("spin rule needs the SpinHistory overload");
    if (steps < 0) throw ConfigError("steps must be >= 0");
    LatticeShape shape(steps + 2, static_cast<int>(row_n.size()), TimeBoundary::fixed, sb);
    FieldHistory h{shape, Eigen::MatrixXd::Zero(steps + 2, shape.m_space), steps + 2};
    h.values.row(steps) = row_n_minus1.transpose();
    h.values.row(steps + 1) = row_n.transpose();
    for (int i = steps; i >= 1; --i) {
        // X(I-1) = f(X(I)) - X(I+1) for minus rules; the update helper returns
        // f(cur) - prev, so feeding prev = next row inverts the step.
        Eigen::VectorXd prev = detail::scalar_update(rule, shape, h.row(i + 1), h.row(i));
        h.values.row(i - 1) = prev.transpose();
    }
    return h;
}

inline SpinHistory evolve_spin(const RuleSpec& rule, const Eigen::Matrix3Xd& row0,
                               const Eigen::Matrix3Xd& row1, int steps,
                               SpaceBoundary sb = SpaceBoundary::periodic) {
    if (!rule.is_spin()) throw ConfigError("evolve_spin needs a spin rule");
    if (steps < 0) throw ConfigError("steps must be >= 0");
    LatticeShape shape(steps + 2, static_cast<int>(row0.cols()), TimeBoundary::fixed, sb);
    SpinHistory h{shape, {row0, row1}};
    for (int i = 1; i <= steps; ++i) {
        Eigen::Matrix3Xd next = detail::spin_f(rule, shape, h.rows[i]) + h.rows[i - 1];
        h.rows.push_back(next);
    }
    return h;
}

inline SpinHistory reverse_spin(const RuleSpec& rule, const Eigen::Matrix3Xd& row_n_minus1,
                                const Eigen::Matrix3Xd& row_n, int steps,
                                SpaceBoundary sb = SpaceBoundary::periodic) {
    if (!rule.is_spin()) throw ConfigError("reverse_spin needs a spin rule");
    LatticeShape shape(steps + 2, static_cast<int>(row_n.cols()), TimeBoundary::fixed, sb);
    SpinHistory h{shape, {}};
    h.rows.assign(steps + 2, Eigen::Matrix3Xd::Zero(3, shape.m_space));
    h.rows[steps] = row_n_minus1;
    h.rows[steps + 1] = row_n;
    for (int i = steps; i >= 1; --i)
        h.rows[i - 1] = h.rows[i + 1] - detail::spin_f(rule, shape, h.rows[i]);
    return h;
}

// Exact one-step rotation seeding the leapfrog: row 1 from row 0 alone.
inline Eigen::Matrix3Xd seed_spin_row1(const RuleSpec& rule, const Eigen::Matrix3Xd& row0,
                                       SpaceBoundary sb = SpaceBoundary::periodic) {
    LatticeShape shape(2, static_cast<int>(row0.cols()), TimeBoundary::fixed, sb);
    Eigen::Matrix3Xd row1(3, shape.m_space);
    for (int j = 0; j < shape.m_space; ++j) {
        Eigen::Vector3d field = rule.b_field;
        if (rule.coupling)
            field += row0.col(shape.neighbor(j, -1)) + row0.col(shape.neighbor(j, +1));
        double wmag = field.norm();
        if (wmag == 0.0) {
            row1.col(j) = row0.col(j);
            continue;
        }
        // dS/dt = S x B precesses clockwise about the field axis.
        Eigen::Vector3d axis = field / wmag;
        row1.col(j) = Eigen::AngleAxisd(-wmag, axis) * row0.col(j);
    }
    return row1;
}

// Coupled first-order trajectories P, X and the fermionic representative theta.
struct SusyTrajectory {
    Eigen::VectorXd p;
    Eigen::VectorXd x;
    Eigen::VectorXcd theta;
};

inline SusyTrajectory evolve_susy_first_order(double w, std::array<double, 2> p_init,
                                              std::array<double, 2> x_init,
                                              std::array<cplx, 2> theta_init, int steps) {
    if (steps < 0) throw ConfigError("steps must be >= 0");
    const int n = steps + 2;
    SusyTrajectory t{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n),
                     Eigen::VectorXcd::Zero(n)};
    t.p(0) = p_init[0];
    t.p(1) = p_init[1];
    t.x(0) = x_init[0];
    t.x(1) = x_init[1];
    t.theta(0) = theta_init[0];
    t.theta(1) = theta_init[1];
    for (int i = 1; i <= steps; ++i) {
        t.p(i + 1) = -2.0 * w * w * t.x(i) + t.p(i - 1);
        t.x(i + 1) = 2.0 * t.p(i) + t.x(i - 1);
        t.theta(i + 1) = cplx{0.0, -2.0 * w} * t.theta(i) + t.theta(i - 1);
    }
    return t;
}

// ASCII PGM, one pixel per cell, min -> white, max -> black; a degenerate
// value range maps to mid gray.
inline std::string render_pgm(const FieldHistory& h) {
    if (h.filled_rows < 1) throw EmptyHistory("no computed rows to render");
    const auto block = h.values.topRows(h.filled_rows);
    double lo = block.minCoeff(), hi = block.maxCoeff();
    std::string out = "P2\n" + std::to_string(h.shape.m_space) + " " +
                      std::to_string(h.filled_rows) + "\n255\n";
    for (int i = 0; i < h.filled_rows; ++i) {
        for (int j = 0; j < h.shape.m_space; ++j) {
            int g = 128;
            if (hi > lo) g = static_cast<int>(std::lround(255.0 * (hi - block(i, j)) / (hi - lo)));
            out += std::to_string(g);
            out += (j + 1 < h.shape.m_space) ? ' ' : '\n';
        }
    }
    return out;
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string write_csv(const FieldHistory& h) {
    std::string out;
    for (int i = 0; i < h.filled_rows; ++i) {
        for (int j = 0; j < h.shape.m_space; ++j) {
            out += format_g17(h.values(i, j));
            out += (j + 1 < h.shape.m_space) ? ',' : '\n';
        }
    }
    return out;
}

inline std::string write_csv(const SpinHistory& h) {
    std::string out;
    for (const auto& r : h.rows) {
        for (int j = 0; j < r.cols(); ++j)
            for (int a = 0; a < 3; ++a) {
                out += format_g17(r(a, j));
                bool last = (j + 1 == r.cols()) && (a == 2);
                out += last ? '\n' : ',';
            }
    }
    return out;
}

}  // namespace qca
