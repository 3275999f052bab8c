#include "polyzono/reach.hpp"

#include "polyzono/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace polyzono {

namespace {

// |e^{A dt} - Phi|_inf bound alongside the computed exponential
struct ExpResult {
    Mat Phi;
    double remainder = 0.0;
};

ExpResult matrix_exponential(const Mat& A, double dt, int order) {
    const Eigen::Index n = A.rows();
    const Mat M = A * dt;
    const double L = M.cwiseAbs().rowwise().sum().maxCoeff();

    int s = 0;
    while (L / std::ldexp(1.0, s) > 0.5 && s < 60) {
        ++s;
    }
    const double scale = std::ldexp(1.0, s);
    const Mat Ms = M / scale;
    const double Ls = L / scale;

    Mat T = Mat::Identity(n, n);
    Mat term = Mat::Identity(n, n);
    for (int k = 1; k <= order; ++k) {
        term = term * Ms / static_cast<double>(k);
        T += term;
    }
    // Taylor tail of the scaled exponential
    double tail = std::pow(Ls, order + 1);
    for (int k = 2; k <= order + 1; ++k) {
        tail /= static_cast<double>(k);
    }
    tail /= std::max(1e-16, 1.0 - Ls / static_cast<double>(order + 2));

    // error amplification through repeated squaring
    double err = tail;
    double exact_norm = std::exp(Ls);
    for (int i = 0; i < s; ++i) {
        err = err * (2.0 * exact_norm + err);
        exact_norm = exact_norm * exact_norm;
        T = T * T;
    }
    return ExpResult{std::move(T), err};
}

// D = int_0^dt e^{A s} ds and its componentwise-absolute counterpart, with a
// shared tail bound on the truncated series
struct IntegralResult {
    Mat D;
    Mat D_abs;
    double remainder = 0.0;
};

IntegralResult exponential_integral(const Mat& A, double dt, int order) {
    const Eigen::Index n = A.rows();
    const double L = (A * dt).cwiseAbs().rowwise().sum().maxCoeff();
    const int terms = std::max(order, static_cast<int>(std::ceil(2.0 * L)) + 4);

    Mat D = Mat::Zero(n, n);
    Mat D_abs = Mat::Zero(n, n);
    Mat pow = Mat::Identity(n, n);
    const Mat A_abs = A.cwiseAbs();
    Mat pow_abs = Mat::Identity(n, n);
    double coeff = dt;  // dt^{k+1} / (k+1)!
    for (int k = 0; k <= terms; ++k) {
        D += coeff * pow;
        D_abs += coeff * pow_abs;
        pow = pow * A;
        pow_abs = pow_abs * A_abs;
        coeff *= dt / static_cast<double>(k + 2);
    }
    double tail = dt * std::pow(L, terms + 1);
    for (int k = 2; k <= terms + 2; ++k) {
        tail /= static_cast<double>(k);
    }
    tail /= std::max(1e-16, 1.0 - L / static_cast<double>(terms + 3));
    return IntegralResult{std::move(D), std::move(D_abs), tail};
}

Interval box_component_or_zero(const Box& b, Eigen::Index i) {
    return b.dim() > 0 ? b.component(i) : Interval(0.0);
}

// interval image of A z + c0 + Ew w over a box in z and w
Box affine_range(const Mat& A, const Vec& c0, const Mat& Ew, const Box& W, const Box& z) {
    const Eigen::Index n = A.rows();
    Vec lo(n);
    Vec hi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Interval acc(c0.size() > 0 ? c0(i) : 0.0);
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            acc = acc + A(i, j) * z.component(j);
        }
        for (Eigen::Index k = 0; k < Ew.cols(); ++k) {
            acc = acc + Ew(i, k) * box_component_or_zero(W, k);
        }
        lo(i) = acc.lo();
        hi(i) = acc.hi();
    }
    return Box(std::move(lo), std::move(hi));
}

PolyZonotope box_as_pz(const Box& box) {
    const Eigen::Index n = box.dim();
    const Vec rad = box.rad();
    Eigen::Index nz = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (rad(i) != 0.0) {
            ++nz;
        }
    }
    Mat GI = Mat::Zero(n, nz);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (rad(i) != 0.0) {
            GI(i, col++) = rad(i);
        }
    }
    return PolyZonotope(box.mid(), Mat(n, 0), std::move(GI), ExpMat(0, 0));
}

Expr substitute_inputs_as_states(const Expr& e, Eigen::Index n) {
    switch (e->kind) {
        case ExprKind::Constant: return e;
        case ExprKind::Var:
            if (e->var == VarKind::Input) {
                return make_var(VarKind::State, n + e->index);
            }
            return e;
        case ExprKind::Add:
            return make_add(substitute_inputs_as_states(e->lhs, n),
                            substitute_inputs_as_states(e->rhs, n));
        case ExprKind::Sub:
            return make_sub(substitute_inputs_as_states(e->lhs, n),
                            substitute_inputs_as_states(e->rhs, n));
        case ExprKind::Mul:
            return make_mul(substitute_inputs_as_states(e->lhs, n),
                            substitute_inputs_as_states(e->rhs, n));
        case ExprKind::Div:
            return make_div(substitute_inputs_as_states(e->lhs, n),
                            substitute_inputs_as_states(e->rhs, n));
        case ExprKind::Neg: return make_neg(substitute_inputs_as_states(e->lhs, n));
        case ExprKind::Pow: return make_pow(substitute_inputs_as_states(e->lhs, n), e->power);
        case ExprKind::Func: return make_func(e->func, substitute_inputs_as_states(e->lhs, n));
    }
    return e;
}

// fresh dependent rows: every monomial becomes its own factor (even columns
// map through 0.5 + 0.5 alpha to keep their [0,1] range exact)
PolyZonotope rebase_factors(const PolyZonotope& pz) {
    const Eigen::Index h = pz.num_dependent();
    if (pz.num_factors() == h && pz.E() == ExpMat::Identity(h, h)) {
        return pz;
    }
    Vec c = pz.c();
    Mat G = pz.G();
    const std::vector<Eigen::Index> H = even_exponent_columns(pz.E());
    for (Eigen::Index i : H) {
        c += 0.5 * pz.G().col(i);
        G.col(i) *= 0.5;
    }
    return PolyZonotope(std::move(c), std::move(G), pz.GI(), ExpMat::Identity(h, h));
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Eigen::Index ControlSetup::state_dim() const {
    return linear ? linear->A.rows() : nonlinear->dims.n;
}

Eigen::Index ControlSetup::control_dim() const {
    return linear ? linear->B.cols() : nonlinear->dims.m;
}

Eigen::Index ControlSetup::disturbance_dim() const {
    return linear ? linear->Ew.cols() : nonlinear->dims.r;
}

void ControlSetup::validate() const {
    if (static_cast<bool>(linear) == static_cast<bool>(nonlinear)) {
        throw std::invalid_argument("ControlSetup: exactly one plant model required");
    }
    if (linear) {
        if (linear->A.rows() != linear->A.cols() || linear->B.rows() != linear->A.rows() ||
            (linear->Ew.cols() > 0 && linear->Ew.rows() != linear->A.rows())) {
            throw std::invalid_argument("ControlSetup: inconsistent linear plant dimensions");
        }
    }
    if (!(dt > 0.0) || !(tF > 0.0)) {
        throw std::invalid_argument("ControlSetup: dt and tF must be positive");
    }
    const double ratio = tF / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        throw std::invalid_argument("ControlSetup: tF must be a multiple of dt");
    }
    if (controller.input_dim() != state_dim()) {
        throw std::invalid_argument("ControlSetup: controller input must match state dimension");
    }
    if (controller.output_dim() != control_dim()) {
        throw std::invalid_argument("ControlSetup: controller output must match control dimension");
    }
    if (X0.dim() != state_dim()) {
        throw std::invalid_argument("ControlSetup: initial set dimension mismatch");
    }
    if (W.dim() != disturbance_dim()) {
        throw std::invalid_argument("ControlSetup: disturbance set dimension mismatch");
    }
    if (prop.taylor_order < 2 || prop.substeps < 1 || prop.max_refine < 1) {
        throw std::invalid_argument("ControlSetup: invalid propagator options");
    }
    policy.validate();
}

std::pair<PolyZonotope, PolyZonotope> propagate_affine(const Mat& A, const Vec& c0, const Mat& Ew,
                                                       const Box& W, const PolyZonotope& pz,
                                                       double dt, const PropagatorOptions& opts) {
    const Eigen::Index n = pz.dim();
    if (A.rows() != n || A.cols() != n) {
        throw std::invalid_argument("propagate_affine: system matrix dimension mismatch");
    }
    if (Ew.cols() > 0 && (Ew.rows() != n || W.dim() != Ew.cols())) {
        throw std::invalid_argument("propagate_affine: disturbance dimension mismatch");
    }

    const Box box_in = interval_enclosure(pz);
    const ExpResult exp = matrix_exponential(A, dt, opts.taylor_order);
    const IntegralResult integral = exponential_integral(A, dt, opts.taylor_order);

    Vec center_shift = Vec::Zero(n);
    Vec bloat = Vec::Zero(n);

    // truncation of the exponential acts on the whole state
    double zmax = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        zmax = std::max(zmax, std::max(std::abs(box_in.l(i)), std::abs(box_in.u(i))));
    }
    bloat.array() += exp.remainder * zmax;

    if (c0.size() > 0 && c0.cwiseAbs().maxCoeff() > 0.0) {
        center_shift += integral.D * c0;
        bloat.array() += integral.remainder * c0.cwiseAbs().maxCoeff();
    }
    if (Ew.cols() > 0) {
        const Vec wc = W.mid();
        const Vec wr = W.rad();
        const Vec drive = Ew * wc;
        if (drive.cwiseAbs().maxCoeff() > 0.0) {
            center_shift += integral.D * drive;
            bloat.array() += integral.remainder * drive.cwiseAbs().maxCoeff();
        }
        const Vec spread = Ew.cwiseAbs() * wr;
        if (spread.cwiseAbs().maxCoeff() > 0.0) {
            bloat += integral.D_abs * spread;
            bloat.array() += integral.remainder * spread.maxCoeff();
        }
    }

    PolyZonotope at_end = affine_map(exp.Phi, pz, center_shift);
    if (bloat.maxCoeff() > 0.0) {
        at_end = minkowski_sum_interval(at_end, Box(-bloat, bloat));
    }

    // time-interval enclosure: hull of the endpoint boxes plus a curvature
    // bound on the deviation from the chord, made self-consistent
    const Box box_end = interval_enclosure(at_end);
    const Box hull = box_in.join(box_end);
    Vec cb = Vec::Zero(n);
    bool admissible = false;
    for (int iter = 0; iter < opts.max_refine + 10; ++iter) {
        const Box cand(hull.l - cb, hull.u + cb);
        const Box zdot = affine_range(A, c0, Ew, W, cand);
        const Box zddot = affine_range(A, Vec::Zero(n), Mat(n, 0), Box(Vec(0), Vec(0)),
                                       zdot);
        Vec cb_new(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            cb_new(i) = dt * dt / 8.0 *
                        std::max(std::abs(zddot.l(i)), std::abs(zddot.u(i)));
        }
        if ((cb_new.array() <= cb.array() + 1e-300).all()) {
            admissible = true;
            break;
        }
        cb = cb_new * 1.01 + Vec::Constant(n, 1e-15);
    }
    if (!admissible) {
        throw PropagatorDivergence("propagate_affine: curvature bound did not stabilize");
    }
    const Box tau(hull.l - cb, hull.u + cb);
    return {std::move(at_end), box_as_pz(tau)};
}

std::pair<PolyZonotope, PolyZonotope> propagate_linear(const Mat& A, const PolyZonotope& pz,
                                                       double dt, const PropagatorOptions& opts) {
    return propagate_affine(A, Vec::Zero(A.rows()), Mat(A.rows(), 0), Box(Vec(0), Vec(0)), pz, dt,
                            opts);
}

Plant extend_plant(const Plant& plant) {
    VarDims dims;
    dims.n = plant.dims.n + plant.dims.m;
    dims.m = 0;
    dims.r = plant.dims.r;
    std::vector<Expr> f;
    f.reserve(static_cast<std::size_t>(dims.n));
    for (const Expr& e : plant.f) {
        f.push_back(substitute_inputs_as_states(e, plant.dims.n));
    }
    for (Eigen::Index j = 0; j < plant.dims.m; ++j) {
        f.push_back(make_const(0.0));
    }
    return Plant(dims, std::move(f));
}

std::pair<PolyZonotope, PolyZonotope> propagate_nonlinear(const Plant& extended, const Box& W,
                                                          const PolyZonotope& pz, double dt,
                                                          const PropagatorOptions& opts) {
    const Eigen::Index N = extended.dims.n;
    if (extended.dims.m != 0) {
        throw std::invalid_argument("propagate_nonlinear: plant must be in extended form");
    }
    if (pz.dim() != N || W.dim() != extended.dims.r) {
        throw std::invalid_argument("propagate_nonlinear: dimension mismatch");
    }
    const Eigen::Index r = extended.dims.r;
    const Box empty_u(Vec(0), Vec(0));

    // symbolic Jacobians for the mean-value remainder
    std::vector<std::vector<Expr>> Jz(static_cast<std::size_t>(N));
    std::vector<std::vector<Expr>> Jw(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i) {
        Jz[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(N));
        for (Eigen::Index j = 0; j < N; ++j) {
            Jz[static_cast<std::size_t>(i)].push_back(
                diff(extended.f[static_cast<std::size_t>(i)], VarKind::State, j));
        }
        for (Eigen::Index k = 0; k < r; ++k) {
            Jw[static_cast<std::size_t>(i)].push_back(
                diff(extended.f[static_cast<std::size_t>(i)], VarKind::Disturbance, k));
        }
    }

    const Box zbox = interval_enclosure(pz);
    const Vec zc = zbox.mid();
    const Vec wc = r > 0 ? W.mid() : Vec(0);

    Mat A_lin(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) {
            A_lin(i, j) = eval(Jz[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], zc,
                               Vec(0), wc);
        }
    }
    const Vec b_lin = extended.eval_rhs(zc, Vec(0), wc) - A_lin * zc;

    // candidate enclosure from the remainder-free propagation
    auto [end0, tau0] = propagate_affine(A_lin, b_lin, Mat(N, 0), Box(Vec(0), Vec(0)), pz, dt,
                                         opts);
    Box tau0_box = interval_enclosure(tau0);
    Vec rad = tau0_box.rad() * 1.1 + Vec::Constant(N, 1e-6);
    Box cand(tau0_box.mid() - rad, tau0_box.mid() + rad);

    for (int iter = 0; iter < opts.max_refine; ++iter) {
        // mean-value remainder over the candidate
        Vec ell_lo(N);
        Vec ell_hi(N);
        const Box zc_box(zc, zc);
        for (Eigen::Index i = 0; i < N; ++i) {
            Interval acc(0.0);
            for (Eigen::Index j = 0; j < N; ++j) {
                const Interval dj =
                    interval_eval(Jz[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                  cand, empty_u, W) -
                    Interval(A_lin(i, j));
                acc = acc + dj * (cand.component(j) - Interval(zc(j)));
            }
            for (Eigen::Index k = 0; k < r; ++k) {
                const Interval jw =
                    interval_eval(Jw[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                  zc_box, empty_u, W);
                acc = acc + jw * (W.component(k) - Interval(wc(k)));
            }
            ell_lo(i) = acc.lo();
            ell_hi(i) = acc.hi();
        }

        auto [at_end, tau] = propagate_affine(A_lin, b_lin, Mat::Identity(N, N),
                                              Box(ell_lo, ell_hi), pz, dt, opts);
        const Box tau_box = interval_enclosure(tau);
        if (cand.contains(tau_box)) {
            return {std::move(at_end), std::move(tau)};
        }
        const Box joined = cand.join(tau_box);
        const Vec new_rad = joined.rad() * 2.0;
        cand = Box(joined.mid() - new_rad, joined.mid() + new_rad);
    }
    throw PropagatorDivergence(
        "propagate_nonlinear: linearization-remainder fixed point not found");
}

ReachResult reach(const ControlSetup& setup) {
    setup.validate();
    const Eigen::Index n = setup.state_dim();
    const Eigen::Index m = setup.control_dim();
    const auto steps = static_cast<std::int64_t>(std::round(setup.tF / setup.dt));

    Mat A_ext;
    Mat Ew_ext;
    Plant ext_plant;
    if (setup.linear) {
        A_ext = Mat::Zero(n + m, n + m);
        A_ext.topLeftCorner(n, n) = setup.linear->A;
        A_ext.topRightCorner(n, m) = setup.linear->B;
        Ew_ext = Mat::Zero(n + m, setup.linear->Ew.cols());
        Ew_ext.topRows(n) = setup.linear->Ew;
    } else {
        ext_plant = extend_plant(*setup.nonlinear);
    }

    Mat project = Mat::Zero(n, n + m);
    project.leftCols(n) = Mat::Identity(n, n);

    ReachResult result;
    result.nonlinear_propagator = !setup.linear;
    PolyZonotope pz = setup.X0;
    result.time_points.push_back(pz);

    const double h_sub = setup.dt / setup.prop.substeps;
    for (std::int64_t i = 0; i < steps; ++i) {
        if (pz.order() > setup.state_reduction_order) {
            pz = reduce_order(pz, setup.state_reduction_order);
        }
        pz = rebase_factors(pz);

        auto [Y, trace] = image_enclosure(setup.controller, pz, setup.policy);
        PolyZonotope extended = cartesian_product_dep(pz, Y);

        std::optional<Box> tau_acc;
        for (int s = 0; s < setup.prop.substeps; ++s) {
            std::pair<PolyZonotope, PolyZonotope> step =
                setup.linear
                    ? propagate_affine(A_ext, Vec::Zero(n + m), Ew_ext, setup.W, extended, h_sub,
                                       setup.prop)
                    : propagate_nonlinear(ext_plant, setup.W, extended, h_sub, setup.prop);
            extended = std::move(step.first);
            const Box tau_box = interval_enclosure(step.second);
            tau_acc = tau_acc ? tau_acc->join(tau_box) : tau_box;
        }

        pz = affine_map(project, extended, Vec::Zero(n));
        const Box tau_state(tau_acc->l.head(n), tau_acc->u.head(n));
        result.time_points.push_back(pz);
        result.time_intervals.push_back(box_as_pz(tau_state));
        result.control_sets.push_back(std::move(Y));
    }
    return result;
}

Trajectory simulate(const ControlSetup& setup, const Vec& x0, std::uint64_t seed,
                    double micro_step) {
    setup.validate();
    if (!(micro_step > 0.0)) {
        throw std::invalid_argument("simulate: micro step must be positive");
    }
    const Eigen::Index n = setup.state_dim();
    if (x0.size() != n) {
        throw std::invalid_argument("simulate: initial state dimension mismatch");
    }
    const Eigen::Index r = setup.disturbance_dim();
    std::mt19937_64 rng(seed);

    auto rhs = [&](const Vec& x, const Vec& u, const Vec& w) -> Vec {
        if (setup.linear) {
            Vec dx = setup.linear->A * x + setup.linear->B * u;
            if (r > 0) {
                dx += setup.linear->Ew * w;
            }
            return dx;
        }
        return setup.nonlinear->eval_rhs(x, u, w);
    };

    Trajectory traj;
    Vec x = x0;
    double t = 0.0;
    traj.times.push_back(t);
    traj.states.push_back(x);

    const auto cycles = static_cast<std::int64_t>(std::round(setup.tF / setup.dt));
    const auto micro_per_cycle =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::round(setup.dt / micro_step)));
    const double h = setup.dt / static_cast<double>(micro_per_cycle);

    for (std::int64_t c = 0; c < cycles; ++c) {
        const Vec u = setup.controller.forward(x);
        for (std::int64_t k = 0; k < micro_per_cycle; ++k) {
            Vec w(r);
            for (Eigen::Index j = 0; j < r; ++j) {
                w(j) = setup.W.l(j) + (setup.W.u(j) - setup.W.l(j)) * uniform01(rng);
            }
            const Vec k1 = rhs(x, u, w);
            const Vec k2 = rhs(x + 0.5 * h * k1, u, w);
            const Vec k3 = rhs(x + 0.5 * h * k2, u, w);
            const Vec k4 = rhs(x + h * k3, u, w);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            if (!x.allFinite()) {
                throw std::runtime_error("simulate: state became non-finite");
            }
            traj.times.push_back(t);
            traj.states.push_back(x);
        }
    }
    return traj;
}

SetCheckReport check_sets(const ReachResult& result, const std::optional<Box>& goal,
                          const std::vector<HalfspaceSet>& avoid) {
    SetCheckReport report;
    if (goal) {
        const Box final_box = interval_enclosure(result.time_points.back());
        report.goal_proved = goal->contains(final_box);
        report.all_proved = report.all_proved && *report.goal_proved;
    }
    for (const HalfspaceSet& hs : avoid) {
        OutputSpec spec;
        spec.mode = OutputSpec::Mode::Avoid;
        spec.A = hs.A;
        spec.b = hs.b;
        bool proved = true;
        for (const PolyZonotope& tau : result.time_intervals) {
            if (check_enclosure(tau, spec) != EnclosureCheck::Proved) {
                proved = false;
                break;
            }
        }
        report.avoid_proved.push_back(proved);
        report.all_proved = report.all_proved && proved;
    }
    return report;
}

}  // namespace polyzono
