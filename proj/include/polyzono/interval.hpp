#pragma once

/**
 * @file interval.hpp
 * @brief Scalar and vector interval arithmetic.
 *
 * Intervals carry neuron input bounds, activation approximation errors and
 * linearization remainders. Elementary functions inflate their result by a
 * globally configurable epsilon instead of using directed rounding.
 */

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace polyzono {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Absolute inflation applied to elementary-function images (default 1e-12).
double interval_epsilon();
void set_interval_epsilon(double eps);

/**
 * @brief Closed scalar interval [lo, hi].
 *
 * Invariant: lo <= hi. All operations return a superset of the exact image;
 * even integer powers are tightened to [0, max] when the base straddles zero.
 */
class Interval {
  public:
    Interval() : lo_(0.0), hi_(0.0) {}
    Interval(double point) : lo_(point), hi_(point) {}
    Interval(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!(lo <= hi)) {
            throw std::invalid_argument("Interval: lower bound exceeds upper bound");
        }
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double mid() const { return 0.5 * (lo_ + hi_); }
    double rad() const { return 0.5 * (hi_ - lo_); }
    double width() const { return hi_ - lo_; }

    bool contains(double x) const { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }

    /// Smallest interval containing both operands.
    Interval join(const Interval& other) const {
        return Interval(std::min(lo_, other.lo_), std::max(hi_, other.hi_));
    }

    /// Symmetric inflation by a non-negative amount.
    Interval inflate(double amount) const { return Interval(lo_ - amount, hi_ + amount); }

  private:
    double lo_;
    double hi_;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);  ///< throws if 0 in b

Interval operator+(const Interval& a, double b);
Interval operator-(const Interval& a, double b);
Interval operator*(double a, const Interval& b);

/// a^n for n >= 0; even powers are tight ([0, max] when 0 in a).
Interval iv_pow_int(const Interval& a, int n);

Interval iv_sin(const Interval& a);
Interval iv_cos(const Interval& a);
Interval iv_exp(const Interval& a);
Interval iv_tanh(const Interval& a);
Interval iv_sigmoid(const Interval& a);
Interval iv_sqrt(const Interval& a);  ///< requires a.lo() >= 0
Interval iv_relu(const Interval& a);
Interval iv_abs(const Interval& a);

/**
 * @brief Axis-aligned box, i.e. an n-dimensional interval [l, u].
 */
struct Box {
    Vec l;
    Vec u;

    Box() = default;
    Box(Vec lower, Vec upper);

    Eigen::Index dim() const { return l.size(); }
    Interval component(Eigen::Index i) const { return Interval(l(i), u(i)); }
    Vec mid() const { return 0.5 * (l + u); }
    Vec rad() const { return 0.5 * (u - l); }
    Vec width() const { return u - l; }

    bool contains(const Vec& x, double slack = 0.0) const;
    bool contains(const Box& other, double slack = 0.0) const;
    Box join(const Box& other) const;
    Box inflate(double amount) const;
};

}  // namespace polyzono
