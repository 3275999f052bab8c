#include "polyzono/enclosure.hpp"

#include "polyzono/interval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyzono {

namespace {

double clamp_unit(double x) { return std::min(1.0, std::max(-1.0, x)); }

bool is_sshaped(Activation act) {
    return act == Activation::Sigmoid || act == Activation::Tanh;
}

// Bounds for regression/Taylor/closed-form coefficients. The ReLU piecewise
// extrema and the linear-scheme bounds are exact and get the epsilon
// inflation; the sampling bounds already carry their delta slack.
QuadApprox with_error_bounds(Activation act, const std::array<double, 3>& coeffs, double l,
                             double u, const ApproxPolicy& policy) {
    QuadApprox qa;
    qa.a1 = coeffs[0];
    qa.a2 = coeffs[1];
    qa.a3 = coeffs[2];
    if (act == Activation::Relu) {
        auto [lo, hi] = error_bounds_relu(coeffs, l, u);
        qa.d_lo = lo;
        qa.d_hi = hi;
    } else if (is_sshaped(act)) {
        const SamplingBounds sb =
            error_bounds_sampling(act, coeffs, l, u, policy.sampling_precision);
        qa.d_lo = sb.d_lo;
        qa.d_hi = sb.d_hi;
    } else {
        throw std::invalid_argument("neuron_approximation: no error bounding scheme for identity");
    }
    return qa;
}

}  // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Regression: return "regression";
        case Scheme::ReluClosedForm: return "relu_closed_form";
        case Scheme::Taylor: return "taylor";
        case Scheme::Linear: return "linear";
        case Scheme::BestOf: return "best_of";
    }
    return "linear";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "regression") return Scheme::Regression;
    if (name == "relu_closed_form") return Scheme::ReluClosedForm;
    if (name == "taylor") return Scheme::Taylor;
    if (name == "linear") return Scheme::Linear;
    if (name == "best_of") return Scheme::BestOf;
    throw std::invalid_argument("unknown approximation scheme: " + name);
}

Scheme ApproxPolicy::scheme_for(std::size_t layer_index) const {
    if (!layer_schemes.empty()) {
        if (layer_index < layer_schemes.size()) {
            return layer_schemes[layer_index];
        }
        return layer_schemes.back();
    }
    return layer_index < 2 ? Scheme::Regression : Scheme::Linear;
}

void ApproxPolicy::validate() const {
    if (regression_samples < 3) {
        throw std::invalid_argument("ApproxPolicy: regression needs at least 3 samples");
    }
    if (sampling_precision <= 0.0) {
        throw std::invalid_argument("ApproxPolicy: sampling precision must be positive");
    }
    if (reduction_order < 1.0) {
        throw std::invalid_argument("ApproxPolicy: reduction order must be at least 1");
    }
}

std::array<double, 3> approx_regression(const std::function<double(double)>& f, double l,
                                        double u, int N) {
    if (!(l < u)) {
        throw std::invalid_argument("approx_regression: requires l < u");
    }
    if (N < 3) {
        throw std::invalid_argument("approx_regression: requires at least 3 samples");
    }
    Mat A(N, 3);
    Vec b(N);
    for (int i = 0; i < N; ++i) {
        const double x = l + (u - l) * static_cast<double>(i) / static_cast<double>(N - 1);
        A(i, 0) = x * x;
        A(i, 1) = x;
        A(i, 2) = 1.0;
        b(i) = f(x);
    }
    const Mat AtA = A.transpose() * A;
    const Vec Atb = A.transpose() * b;
    const Vec theta = AtA.partialPivLu().solve(Atb);
    return {theta(0), theta(1), theta(2)};
}

std::array<double, 3> approx_regression(Activation act, double l, double u, int N) {
    return approx_regression([act](double x) { return act_eval(act, x); }, l, u, N);
}

std::array<double, 3> approx_relu_closed_form(double l, double u) {
    if (!(l < 0.0 && u > 0.0)) {
        throw std::invalid_argument("approx_relu_closed_form: requires l < 0 < u");
    }
    const double denom = (u - l) * (u - l);
    const double a1 = u / denom;
    const double a2 = -2.0 * l * u / denom;
    const double a3 = u * u * (2.0 * l - u) / denom + u;
    return {a1, a2, a3};
}

std::array<double, 3> approx_taylor(Activation act, double l, double u) {
    if (!is_sshaped(act)) {
        throw std::invalid_argument("approx_taylor: only sigmoid and tanh are supported");
    }
    if (!(l <= u)) {
        throw std::invalid_argument("approx_taylor: requires l <= u");
    }
    const double xs = 0.5 * (l + u);
    const double f0 = act_eval(act, xs);
    const double f1 = act_d1(act, xs);
    const double f2 = act_d2(act, xs);
    const double a1 = 0.5 * f2;
    const double a2 = f1 - f2 * xs;
    const double a3 = f0 - f1 * xs + 0.5 * f2 * xs * xs;
    return {a1, a2, a3};
}

QuadApprox approx_linear(Activation act, double l, double u) {
    QuadApprox qa;
    const double eps = interval_epsilon();
    if (act == Activation::Relu) {
        if (!(l < 0.0 && u > 0.0)) {
            throw std::invalid_argument("approx_linear: ReLU case requires l < 0 < u");
        }
        qa.a1 = 0.0;
        qa.a2 = u / (u - l);
        qa.a3 = -u * l / (2.0 * (u - l));
        qa.d_lo = u * l / (2.0 * (u - l)) - eps;
        qa.d_hi = -u * l / (2.0 * (u - l)) + eps;
        return qa;
    }
    if (is_sshaped(act)) {
        if (!(l <= u)) {
            throw std::invalid_argument("approx_linear: requires l <= u");
        }
        qa.a1 = 0.0;
        qa.a2 = std::min(act_d1(act, l), act_d1(act, u));
        qa.a3 = 0.5 * (act_eval(act, u) + act_eval(act, l) - qa.a2 * (u + l));
        const double spread = 0.5 * (act_eval(act, u) - act_eval(act, l) - qa.a2 * (u - l));
        qa.d_lo = -spread - eps;
        qa.d_hi = spread + eps;
        return qa;
    }
    if (act == Activation::Identity) {
        qa.a2 = 1.0;
        return qa;
    }
    throw std::invalid_argument("approx_linear: unsupported activation");
}

std::pair<double, double> error_bounds_relu(const std::array<double, 3>& coeffs, double l,
                                            double u) {
    if (!(l < 0.0 && u > 0.0)) {
        throw std::invalid_argument("error_bounds_relu: requires l < 0 < u");
    }
    const double a1 = coeffs[0];
    const double a2 = coeffs[1];
    const double a3 = coeffs[2];

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    auto consider = [&](double d) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    };

    // on [l, 0] the activation is 0: d(x) = -a1 x^2 - a2 x - a3
    auto d_neg = [&](double x) { return -a1 * x * x - a2 * x - a3; };
    consider(d_neg(l));
    consider(d_neg(0.0));
    if (a1 != 0.0) {
        const double xs = -0.5 * a2 / a1;
        if (xs > l && xs < 0.0) {
            consider(d_neg(xs));
        }
    }

    // on [0, u] the activation is x: d(x) = -a1 x^2 + (1 - a2) x - a3
    auto d_pos = [&](double x) { return -a1 * x * x + (1.0 - a2) * x - a3; };
    consider(d_pos(0.0));
    consider(d_pos(u));
    if (a1 != 0.0) {
        const double xs = 0.5 * (1.0 - a2) / a1;
        if (xs > 0.0 && xs < u) {
            consider(d_pos(xs));
        }
    }

    const double eps = interval_epsilon();
    return {lo - eps, hi + eps};
}

SamplingBounds error_bounds_sampling(Activation act, const std::array<double, 3>& coeffs,
                                     double l, double u, double delta) {
    if (!is_sshaped(act)) {
        throw std::invalid_argument("error_bounds_sampling: only sigmoid and tanh are supported");
    }
    if (!(l <= u)) {
        throw std::invalid_argument("error_bounds_sampling: requires l <= u");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("error_bounds_sampling: precision must be positive");
    }
    const double a1 = coeffs[0];
    const double a2 = coeffs[1];
    const double a3 = coeffs[2];
    auto d = [&](double x) { return act_eval(act, x) - (a1 * x * x + a2 * x + a3); };

    SamplingBounds sb;
    if (l == u) {
        const double v = d(l);
        sb.d_lo = v - delta;
        sb.d_hi = v + delta;
        sb.segments = 0;
        return sb;
    }

    // mu' in [0, mu_bar], g' in [g_lo, g_hi] on [l, u], hence
    // d' in [-g_hi, mu_bar - g_lo]
    const double mu_bar = (act == Activation::Sigmoid) ? 0.25 : 1.0;
    const double s1 = 2.0 * a1 * l + a2;
    const double s2 = 2.0 * a1 * u + a2;
    const double g_lo = std::min(s1, s2);
    const double g_hi = std::max(s1, s2);
    const double slope = std::max(std::abs(-g_hi), std::abs(mu_bar - g_lo));

    const double dx = delta / slope;
    const auto segments =
        static_cast<Eigen::Index>(std::max(1.0, std::ceil((u - l) / dx)));

    double dmin = std::numeric_limits<double>::infinity();
    double dmax = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i <= segments; ++i) {
        const double x =
            l + (u - l) * static_cast<double>(i) / static_cast<double>(segments);
        const double v = d(x);
        dmin = std::min(dmin, v);
        dmax = std::max(dmax, v);
    }
    sb.d_lo = dmin - delta;
    sb.d_hi = dmax + delta;
    sb.segments = segments;
    return sb;
}

QuadApprox neuron_approximation(Activation act, Scheme scheme, double l, double u,
                                const ApproxPolicy& policy) {
    switch (scheme) {
        case Scheme::Regression:
            return with_error_bounds(act, approx_regression(act, l, u, policy.regression_samples),
                                     l, u, policy);
        case Scheme::ReluClosedForm:
            if (act != Activation::Relu) {
                throw std::invalid_argument(
                    "neuron_approximation: relu_closed_form requires ReLU activation");
            }
            return with_error_bounds(act, approx_relu_closed_form(l, u), l, u, policy);
        case Scheme::Taylor:
            return with_error_bounds(act, approx_taylor(act, l, u), l, u, policy);
        case Scheme::Linear:
            return approx_linear(act, l, u);
        case Scheme::BestOf: {
            std::vector<Scheme> candidates;
            if (act == Activation::Relu) {
                candidates = {Scheme::ReluClosedForm, Scheme::Regression, Scheme::Linear};
            } else {
                candidates = {Scheme::Regression, Scheme::Taylor, Scheme::Linear};
            }
            QuadApprox best;
            bool have = false;
            for (Scheme s : candidates) {
                const QuadApprox qa = neuron_approximation(act, s, l, u, policy);
                if (!have || qa.error_width() < best.error_width()) {
                    best = qa;
                    have = true;
                }
            }
            return best;
        }
    }
    throw std::invalid_argument("neuron_approximation: unknown scheme");
}

std::pair<PolyZonotope, LayerTrace> layer_enclosure(const PolyZonotope& pz, const Layer& layer,
                                                    Scheme scheme, const ApproxPolicy& policy) {
    if (layer.W.cols() != pz.dim()) {
        throw std::invalid_argument("layer_enclosure: layer width does not match set dimension");
    }
    const Eigen::Index v = layer.W.rows();
    const Eigen::Index h = pz.num_dependent();
    const Eigen::Index q = pz.num_independent();
    const Eigen::Index p = pz.num_factors();

    LayerTrace trace;
    trace.h_in = h;
    trace.q_in = q;
    trace.E_in = pz.E();
    trace.neurons.resize(static_cast<std::size_t>(v));

    // per-neuron affine input sets (all share E and the independent layout)
    std::vector<PolyZonotope> rows;
    rows.reserve(static_cast<std::size_t>(v));
    for (Eigen::Index j = 0; j < v; ++j) {
        Vec bj(1);
        bj(0) = layer.b(j);
        rows.push_back(affine_map(layer.W.row(j), pz, bj));

        NeuronRecord& rec = trace.neurons[static_cast<std::size_t>(j)];
        const Box bounds = interval_enclosure(rows.back());
        rec.l = bounds.l(0);
        rec.u = bounds.u(0);
        rec.scheme = scheme;

        if (layer.act == Activation::Identity) {
            rec.approx = QuadApprox{0.0, 1.0, 0.0, 0.0, 0.0};
            rec.exact = true;
        } else if (rec.l == rec.u) {
            rec.approx = QuadApprox{0.0, 0.0, act_eval(layer.act, rec.l), 0.0, 0.0};
            rec.exact = true;
        } else if (layer.act == Activation::Relu && rec.l >= 0.0) {
            rec.approx = QuadApprox{0.0, 1.0, 0.0, 0.0, 0.0};
            rec.exact = true;
        } else if (layer.act == Activation::Relu && rec.u <= 0.0) {
            rec.approx = QuadApprox{0.0, 0.0, 0.0, 0.0, 0.0};
            rec.exact = true;
        } else {
            rec.approx = neuron_approximation(layer.act, scheme, rec.l, rec.u, policy);
        }
    }

    trace.quadratic_mode = std::any_of(trace.neurons.begin(), trace.neurons.end(),
                                       [](const NeuronRecord& r) { return r.approx.a1 != 0.0; });

    Eigen::Index h_core = h;
    Eigen::Index q_core = q;
    if (trace.quadratic_mode) {
        h_core = h + h + h * (h - 1) / 2;
        q_core = q + h * q + q + q * (q - 1) / 2;
    }

    // error columns come after the shared core layout, one per neuron with
    // a non-degenerate error interval
    trace.error_col.assign(static_cast<std::size_t>(v), -1);
    Eigen::Index n_err = 0;
    for (Eigen::Index j = 0; j < v; ++j) {
        const NeuronRecord& rec = trace.neurons[static_cast<std::size_t>(j)];
        if (!rec.exact && rec.approx.error_width() > 0.0) {
            trace.error_col[static_cast<std::size_t>(j)] = q_core + n_err;
            ++n_err;
        }
    }
    trace.q_full = q_core + n_err;

    Vec c_out(v);
    Mat G_out = Mat::Zero(v, h_core);
    Mat GI_out = Mat::Zero(v, trace.q_full);
    ExpMat E_out;

    if (!trace.quadratic_mode) {
        E_out = pz.E();
        for (Eigen::Index j = 0; j < v; ++j) {
            const NeuronRecord& rec = trace.neurons[static_cast<std::size_t>(j)];
            const PolyZonotope& rj = rows[static_cast<std::size_t>(j)];
            c_out(j) = rec.approx.a2 * rj.c()(0) + rec.approx.a3;
            G_out.row(j) = rec.approx.a2 * rj.G().row(0);
            GI_out.block(j, 0, 1, q) = rec.approx.a2 * rj.GI().row(0);
        }
    } else {
        for (Eigen::Index j = 0; j < v; ++j) {
            const NeuronRecord& rec = trace.neurons[static_cast<std::size_t>(j)];
            const PolyZonotope qm =
                quadratic_map(rows[static_cast<std::size_t>(j)], rec.approx.a1, rec.approx.a2,
                              rec.approx.a3);
            if (j == 0) {
                E_out = qm.E();
            }
            c_out(j) = qm.c()(0);
            G_out.row(j) = qm.G().row(0);
            GI_out.block(j, 0, 1, q_core) = qm.GI().row(0);
        }
    }

    // approximation error per Minkowski sum with [d_lo, d_hi]
    for (Eigen::Index j = 0; j < v; ++j) {
        const NeuronRecord& rec = trace.neurons[static_cast<std::size_t>(j)];
        if (rec.exact) {
            continue;
        }
        c_out(j) += 0.5 * (rec.approx.d_hi + rec.approx.d_lo);
        const Eigen::Index col = trace.error_col[static_cast<std::size_t>(j)];
        if (col >= 0) {
            GI_out(j, col) = 0.5 * (rec.approx.d_hi - rec.approx.d_lo);
        }
    }

    if (E_out.cols() == 0) {
        E_out.resize(p, h_core);
    }
    PolyZonotope out(std::move(c_out), std::move(G_out), std::move(GI_out), std::move(E_out));

    // identity post-processing maps; image_enclosure overwrites them
    trace.kept_independent.resize(static_cast<std::size_t>(trace.q_full));
    for (Eigen::Index i = 0; i < trace.q_full; ++i) {
        trace.kept_independent[static_cast<std::size_t>(i)] = i;
    }
    trace.h_out = out.num_dependent();
    trace.q_out = out.num_independent();
    return {std::move(out), std::move(trace)};
}

std::pair<PolyZonotope, EnclosureTrace> image_enclosure(const Network& net,
                                                        const PolyZonotope& X0,
                                                        const ApproxPolicy& policy) {
    if (X0.dim() != net.input_dim()) {
        throw std::invalid_argument("image_enclosure: input set dimension mismatch");
    }
    policy.validate();

    EnclosureTrace trace(X0);
    PolyZonotope pz = X0;
    for (std::size_t li = 0; li < net.num_layers(); ++li) {
        auto [next, lt] = layer_enclosure(pz, net.layer(li), policy.scheme_for(li), policy);
        pz = std::move(next);
        if (policy.compact_after_layer) {
            CompactRecord cr;
            pz = compact(pz, cr);
            lt.kept_independent = cr.kept_independent;
        }
        if (pz.order() > policy.reduction_order) {
            pz = reduce_order(pz, policy.reduction_order, lt.reduction);
        }
        lt.h_out = pz.num_dependent();
        lt.q_out = pz.num_independent();
        trace.layers.push_back(std::move(lt));
    }
    return {std::move(pz), std::move(trace)};
}

std::pair<PolyZonotope, EnclosureTrace> image_enclosure(const Network& net, const Box& X0,
                                                        const ApproxPolicy& policy) {
    return image_enclosure(net, PolyZonotope::from_box(X0), policy);
}

FactorAssignment image_witness_from_assignment(const EnclosureTrace& trace, const Network& net,
                                               const FactorAssignment& fa_in) {
    if (trace.layers.size() != net.num_layers()) {
        throw std::invalid_argument("image_witness: trace does not match network");
    }
    Vec y = evaluate(trace.input, fa_in);
    Vec alpha = fa_in.alpha;
    Vec beta = fa_in.beta;

    for (std::size_t li = 0; li < trace.layers.size(); ++li) {
        const LayerTrace& lt = trace.layers[li];
        const Layer& layer = net.layer(li);
        const Vec z = layer.W * y + layer.b;
        const Eigen::Index h = lt.h_in;
        const Eigen::Index q = lt.q_in;
        if (beta.size() != q) {
            throw std::logic_error("image_witness: independent factor bookkeeping out of sync");
        }

        // substituted independent factors of the shared quadratic-map layout
        Vec beta_core;
        if (lt.quadratic_mode) {
            beta_core.resize(q + h * q + q + q * (q - 1) / 2);
            beta_core.head(q) = beta;
            Eigen::Index col = q;
            for (Eigen::Index i = 0; i < h; ++i) {
                const double mono = monomial(alpha, lt.E_in, i);
                for (Eigen::Index j = 0; j < q; ++j) {
                    beta_core(col++) = beta(j) * mono;
                }
            }
            for (Eigen::Index i = 0; i < q; ++i) {
                beta_core(col++) = 2.0 * beta(i) * beta(i) - 1.0;
            }
            for (Eigen::Index i = 0; i < q; ++i) {
                for (Eigen::Index j = i + 1; j < q; ++j) {
                    beta_core(col++) = beta(i) * beta(j);
                }
            }
        } else {
            beta_core = beta;
        }

        // neuron-private error factors reproduce d(z_j) exactly
        Vec beta_full(lt.q_full);
        beta_full.head(beta_core.size()) = beta_core;
        for (std::size_t j = 0; j < lt.neurons.size(); ++j) {
            const Eigen::Index col = lt.error_col[j];
            if (col < 0) {
                continue;
            }
            const NeuronRecord& rec = lt.neurons[j];
            const double zj = z(static_cast<Eigen::Index>(j));
            const double dj = act_eval(layer.act, zj) - rec.approx.g(zj);
            const double mid = 0.5 * (rec.approx.d_hi + rec.approx.d_lo);
            const double rad = 0.5 * (rec.approx.d_hi - rec.approx.d_lo);
            beta_full(col) = clamp_unit((dj - mid) / rad);
        }

        // compact projection: dropped columns were all zero
        Vec beta_pc(static_cast<Eigen::Index>(lt.kept_independent.size()));
        for (std::size_t k = 0; k < lt.kept_independent.size(); ++k) {
            beta_pc(static_cast<Eigen::Index>(k)) = beta_full(lt.kept_independent[k]);
        }

        // order reduction: removed generators collapse into box factors
        if (lt.reduction.reduced) {
            const ReductionRecord& rr = lt.reduction;
            Vec removed_value = Vec::Zero(rr.box_mid.size());
            for (Eigen::Index k = 0; k < rr.removed_G.cols(); ++k) {
                removed_value += monomial(alpha, rr.removed_E, k) * rr.removed_G.col(k);
            }
            for (std::size_t k = 0; k < rr.removed_independent.size(); ++k) {
                removed_value += beta_pc(rr.removed_independent[k]) *
                                 rr.removed_GI.col(static_cast<Eigen::Index>(k));
            }
            std::vector<bool> removed(static_cast<std::size_t>(beta_pc.size()), false);
            for (Eigen::Index idx : rr.removed_independent) {
                removed[static_cast<std::size_t>(idx)] = true;
            }
            Vec beta_red(beta_pc.size() - static_cast<Eigen::Index>(rr.removed_independent.size()) +
                         static_cast<Eigen::Index>(rr.box_dims.size()));
            Eigen::Index w = 0;
            for (Eigen::Index k = 0; k < beta_pc.size(); ++k) {
                if (!removed[static_cast<std::size_t>(k)]) {
                    beta_red(w++) = beta_pc(k);
                }
            }
            for (Eigen::Index d : rr.box_dims) {
                beta_red(w++) = clamp_unit((removed_value(d) - rr.box_mid(d)) / rr.box_rad(d));
            }
            beta_pc = std::move(beta_red);
        }

        beta = std::move(beta_pc);
        Vec y_next(z.size());
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            y_next(j) = act_eval(layer.act, z(j));
        }
        y = std::move(y_next);
    }
    return FactorAssignment{std::move(alpha), std::move(beta)};
}

FactorAssignment image_witness(const EnclosureTrace& trace, const Network& net, const Vec& x0) {
    const PolyZonotope& in = trace.input;
    const Eigen::Index n = in.dim();
    const bool box_form = in.num_independent() == 0 && in.num_factors() == n &&
                          in.num_dependent() == n && in.E() == ExpMat::Identity(n, n);
    if (!box_form) {
        throw std::invalid_argument(
            "image_witness: input set is not in box form; use image_witness_from_assignment");
    }
    if (x0.size() != n) {
        throw std::invalid_argument("image_witness: input dimension mismatch");
    }
    Vec alpha(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rad = in.G()(i, i);
        const double off = x0(i) - in.c()(i);
        if (rad == 0.0) {
            if (std::abs(off) > 1e-12) {
                throw std::invalid_argument("image_witness: input point outside the input set");
            }
            alpha(i) = 0.0;
        } else {
            const double a = off / rad;
            if (std::abs(a) > 1.0 + 1e-9) {
                throw std::invalid_argument("image_witness: input point outside the input set");
            }
            alpha(i) = clamp_unit(a);
        }
    }
    return image_witness_from_assignment(trace, net, FactorAssignment{std::move(alpha), Vec(0)});
}

}  // namespace polyzono
