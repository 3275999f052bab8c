#include "polyzono/interval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace polyzono {

namespace {

std::atomic<double> g_epsilon{1e-12};

double sigmoid_scalar(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Monotone image with epsilon inflation.
template <typename F>
Interval monotone_image(const Interval& a, F f) {
    const double fa = f(a.lo());
    const double fb = f(a.hi());
    return Interval(std::min(fa, fb), std::max(fa, fb)).inflate(interval_epsilon());
}

}  // namespace

double interval_epsilon() { return g_epsilon.load(); }

void set_interval_epsilon(double eps) {
    if (eps < 0.0) {
        throw std::invalid_argument("set_interval_epsilon: epsilon must be non-negative");
    }
    g_epsilon.store(eps);
}

Interval operator+(const Interval& a, const Interval& b) {
    return Interval(a.lo() + b.lo(), a.hi() + b.hi());
}

Interval operator-(const Interval& a, const Interval& b) {
    return Interval(a.lo() - b.hi(), a.hi() - b.lo());
}

Interval operator-(const Interval& a) { return Interval(-a.hi(), -a.lo()); }

Interval operator*(const Interval& a, const Interval& b) {
    const double p1 = a.lo() * b.lo();
    const double p2 = a.lo() * b.hi();
    const double p3 = a.hi() * b.lo();
    const double p4 = a.hi() * b.hi();
    return Interval(std::min(std::min(p1, p2), std::min(p3, p4)),
                    std::max(std::max(p1, p2), std::max(p3, p4)));
}

Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains(0.0)) {
        throw std::domain_error("Interval division: divisor contains zero");
    }
    return a * Interval(1.0 / b.hi(), 1.0 / b.lo());
}

Interval operator+(const Interval& a, double b) { return Interval(a.lo() + b, a.hi() + b); }
Interval operator-(const Interval& a, double b) { return Interval(a.lo() - b, a.hi() - b); }
Interval operator*(double a, const Interval& b) {
    return a >= 0.0 ? Interval(a * b.lo(), a * b.hi()) : Interval(a * b.hi(), a * b.lo());
}

Interval iv_pow_int(const Interval& a, int n) {
    if (n < 0) {
        throw std::invalid_argument("iv_pow_int: negative exponent");
    }
    if (n == 0) {
        return Interval(1.0, 1.0);
    }
    const double pl = std::pow(a.lo(), n);
    const double ph = std::pow(a.hi(), n);
    if (n % 2 == 1) {
        return Interval(pl, ph);
    }
    // even power: minimum at 0 when the base straddles zero
    const double hi = std::max(pl, ph);
    const double lo = a.contains(0.0) ? 0.0 : std::min(pl, ph);
    return Interval(lo, hi);
}

Interval iv_sin(const Interval& a) {
    if (a.width() >= 2.0 * M_PI) {
        return Interval(-1.0, 1.0);
    }
    double lo = std::min(std::sin(a.lo()), std::sin(a.hi()));
    double hi = std::max(std::sin(a.lo()), std::sin(a.hi()));
    // interior critical points at pi/2 + k*pi
    const double first = std::ceil((a.lo() - M_PI / 2.0) / M_PI);
    for (double k = first; M_PI / 2.0 + k * M_PI <= a.hi(); k += 1.0) {
        const double x = M_PI / 2.0 + k * M_PI;
        const double v = std::sin(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const Interval inflated = Interval(lo, hi).inflate(interval_epsilon());
    return Interval(std::max(inflated.lo(), -1.0), std::min(inflated.hi(), 1.0));
}

Interval iv_cos(const Interval& a) { return iv_sin(a + Interval(M_PI / 2.0, M_PI / 2.0)); }

Interval iv_exp(const Interval& a) {
    return monotone_image(a, [](double x) { return std::exp(x); });
}

Interval iv_tanh(const Interval& a) {
    Interval r = monotone_image(a, [](double x) { return std::tanh(x); });
    return Interval(std::max(r.lo(), -1.0), std::min(r.hi(), 1.0));
}

Interval iv_sigmoid(const Interval& a) {
    Interval r = monotone_image(a, sigmoid_scalar);
    return Interval(std::max(r.lo(), 0.0), std::min(r.hi(), 1.0));
}

Interval iv_sqrt(const Interval& a) {
    if (a.lo() < 0.0) {
        throw std::domain_error("iv_sqrt: negative lower bound");
    }
    Interval r = monotone_image(a, [](double x) { return std::sqrt(x); });
    return Interval(std::max(r.lo(), 0.0), r.hi());
}

Interval iv_relu(const Interval& a) {
    return Interval(std::max(0.0, a.lo()), std::max(0.0, a.hi()));
}

Interval iv_abs(const Interval& a) {
    const double hi = std::max(std::abs(a.lo()), std::abs(a.hi()));
    const double lo = a.contains(0.0) ? 0.0 : std::min(std::abs(a.lo()), std::abs(a.hi()));
    return Interval(lo, hi);
}

Box::Box(Vec lower, Vec upper) : l(std::move(lower)), u(std::move(upper)) {
    if (l.size() != u.size()) {
        throw std::invalid_argument("Box: bound dimensions differ");
    }
    for (Eigen::Index i = 0; i < l.size(); ++i) {
        if (!(l(i) <= u(i))) {
            throw std::invalid_argument("Box: lower bound exceeds upper bound at index " +
                                        std::to_string(i));
        }
    }
}

bool Box::contains(const Vec& x, double slack) const {
    if (x.size() != dim()) {
        return false;
    }
    for (Eigen::Index i = 0; i < dim(); ++i) {
        if (x(i) < l(i) - slack || x(i) > u(i) + slack) {
            return false;
        }
    }
    return true;
}

bool Box::contains(const Box& other, double slack) const {
    if (other.dim() != dim()) {
        return false;
    }
    for (Eigen::Index i = 0; i < dim(); ++i) {
        if (other.l(i) < l(i) - slack || other.u(i) > u(i) + slack) {
            return false;
        }
    }
    return true;
}

Box Box::join(const Box& other) const {
    if (other.dim() != dim()) {
        throw std::invalid_argument("Box::join: dimensions differ");
    }
    return Box(l.cwiseMin(other.l), u.cwiseMax(other.u));
}

Box Box::inflate(double amount) const {
    return Box(l.array() - amount, u.array() + amount);
}

}  // namespace polyzono
