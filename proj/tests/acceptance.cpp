// Acceptance runner: prints one PASS/FAIL line per criterion and exits with
// the number of failed criteria. Tolerances are pinned in code.

#include "polyzono/enclosure.hpp"
#include "polyzono/network.hpp"
#include "polyzono/pz.hpp"
#include "polyzono/reach.hpp"
#include "polyzono/verify.hpp"

#include "fixtures.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace polyzono;
namespace pt = polyzono::testing;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail, double seconds) {
    std::printf("%s criterion %d: %s (%.2f s)\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str(), seconds);
    if (!pass) {
        ++g_failures;
    }
}

template <typename F>
void run(int criterion, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(criterion, pass, detail, seconds);
}

Network random_fig4_net(std::mt19937_64& rng, Activation act) {
    Layer l1;
    l1.W = pt::random_mat(rng, 50, 2, -1.0, 1.0);
    l1.b = pt::random_vec(rng, 50, -0.5, 0.5);
    l1.act = act;
    Layer l2;
    l2.W = pt::random_mat(rng, 2, 50, -1.0, 1.0);
    l2.b = pt::random_vec(rng, 2, -0.5, 0.5);
    l2.act = Activation::Identity;
    return Network(2, {l1, l2});
}

Network identity_net(Eigen::Index n) {
    Layer l;
    l.W = Mat::Identity(n, n);
    l.b = Vec::Zero(n);
    l.act = Activation::Identity;
    return Network(n, {l});
}

OutputSpec prove_rows(const Mat& A, const Vec& b) {
    OutputSpec spec;
    spec.mode = OutputSpec::Mode::Prove;
    spec.A = A;
    spec.b = b;
    return spec;
}

// criterion 1: witness exactness for the quadratic map
bool criterion1(std::string& detail) {
    std::mt19937_64 rng(20240901);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto h = static_cast<Eigen::Index>(rng() % 5);
        const auto q = static_cast<Eigen::Index>(rng() % 4);
        const auto p = static_cast<Eigen::Index>(1 + rng() % 3);
        const PolyZonotope pz = pt::random_pz(rng, 1, h, q, p, 2.0);
        const double a1 = pt::uniform(rng, -2.0, 2.0);
        const double a2 = pt::uniform(rng, -2.0, 2.0);
        const double a3 = pt::uniform(rng, -2.0, 2.0);
        const FactorAssignment fa = pt::random_fa(rng, pz);
        const double x = evaluate(pz, fa)(0);
        const double expected = a1 * x * x + a2 * x + a3;
        const PolyZonotope mapped = quadratic_map(pz, a1, a2, a3);
        const double got = evaluate(mapped, quadratic_map_witness(pz, fa))(0);
        const double rel = std::abs(got - expected) / std::max(1.0, std::abs(expected));
        worst = std::max(worst, rel);
        if (rel > 1e-9) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2e", rel);
            detail = std::string("witness identity violated, relative error ") + buf;
            return false;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", worst);
    detail = std::string("1000 random quadratic maps, worst relative error ") + buf;
    return true;
}

// criterion 2: interval enclosure of the worked example
bool criterion2(std::string& detail) {
    const PolyZonotope pz = pt::example_set();
    const Box hull = interval_enclosure(pz);
    if (hull.l(0) != -2.0 || hull.u(0) != 10.0 || hull.l(1) != 0.0 || hull.u(1) != 8.0) {
        detail = "enclosure is not exactly [-2,10]x[0,8]";
        return false;
    }
    // confirm with a 10^6-point grid over the factors
    double min0 = 1e300, max0 = -1e300, min1 = 1e300, max1 = -1e300;
    FactorAssignment fa;
    fa.alpha.resize(2);
    fa.beta.resize(1);
    for (int i = 0; i < 100; ++i) {
        fa.alpha(0) = -1.0 + 2.0 * i / 99.0;
        for (int j = 0; j < 100; ++j) {
            fa.alpha(1) = -1.0 + 2.0 * j / 99.0;
            for (int k = 0; k < 100; ++k) {
                fa.beta(0) = -1.0 + 2.0 * k / 99.0;
                const Vec y = evaluate(pz, fa);
                min0 = std::min(min0, y(0));
                max0 = std::max(max0, y(0));
                min1 = std::min(min1, y(1));
                max1 = std::max(max1, y(1));
            }
        }
    }
    if (min0 < hull.l(0) || max0 > hull.u(0) || min1 < hull.l(1) || max1 > hull.u(1)) {
        detail = "sampled hull escapes the enclosure";
        return false;
    }
    detail = "exact [-2,10]x[0,8]; 10^6-sample hull [" + std::to_string(min0) + "," +
             std::to_string(max0) + "]x[" + std::to_string(min1) + "," + std::to_string(max1) +
             "] contained";
    return true;
}

// criterion 3: closed-form ReLU coefficients on [-1, 1]
bool criterion3(std::string& detail) {
    const auto [a1, a2, a3] = approx_relu_closed_form(-1.0, 1.0);
    if (a1 != 0.25 || a2 != 0.5 || a3 != 0.25) {
        detail = "expected (0.25, 0.5, 0.25), got (" + std::to_string(a1) + ", " +
                 std::to_string(a2) + ", " + std::to_string(a3) + ")";
        return false;
    }
    detail = "closed form on [-1,1] equals (0.25, 0.5, 0.25) exactly";
    return true;
}

// criterion 4: witness soundness on random one-hidden-layer networks
bool criterion4(std::string& detail) {
    const ApproxPolicy policy;
    const Box x0(-Vec::Ones(2), Vec::Ones(2));
    double worst = 0.0;
    for (Activation act : {Activation::Relu, Activation::Sigmoid, Activation::Tanh}) {
        for (int netid = 0; netid < 20; ++netid) {
            std::mt19937_64 rng(1000 + 7919 * netid + static_cast<int>(act));
            const Network net = random_fig4_net(rng, act);
            const auto [enclosure, trace] = image_enclosure(net, x0, policy);
            for (int k = 0; k < 10000; ++k) {
                Vec x(2);
                x << pt::uniform(rng, -1.0, 1.0), pt::uniform(rng, -1.0, 1.0);
                const FactorAssignment fa = image_witness(trace, net, x);
                const Vec got = evaluate(enclosure, fa);
                const Vec expected = net.forward(x);
                const double err = (got - expected).cwiseAbs().maxCoeff();
                worst = std::max(worst, err);
                if (err > 1e-7) {
                    char buf[64];
                    std::snprintf(buf, sizeof(buf), "%.2e", err);
                    detail = std::string("replay error ") + buf + " for " +
                             activation_name(act) + " net " + std::to_string(netid);
                    return false;
                }
            }
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", worst);
    detail = std::string("60 nets x 10^4 inputs replayed; worst error ") + buf;
    return true;
}

// criterion 5: error-bound validity and the sampling precision guarantee
bool criterion5(std::string& detail) {
    std::mt19937_64 rng(555);
    const ApproxPolicy policy;
    const double delta = policy.sampling_precision;
    int sampling_cases = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int pick = trial % 8;
        Activation act;
        Scheme scheme;
        double l, u;
        if (pick < 3) {
            act = Activation::Relu;
            scheme = pick == 0 ? Scheme::ReluClosedForm
                               : (pick == 1 ? Scheme::Regression : Scheme::Linear);
            l = pt::uniform(rng, -3.0, -0.05);
            u = pt::uniform(rng, 0.05, 3.0);
        } else {
            act = (pick % 2 == 0) ? Activation::Sigmoid : Activation::Tanh;
            const Scheme choices[] = {Scheme::Regression, Scheme::Taylor, Scheme::Linear};
            scheme = choices[pick % 3];
            l = pt::uniform(rng, -3.0, 2.0);
            u = l + pt::uniform(rng, 0.05, 3.0);
        }
        const QuadApprox qa = neuron_approximation(act, scheme, l, u, policy);
        for (int k = 0; k <= 10000; ++k) {
            const double x = l + (u - l) * k / 10000.0;
            const double d = act_eval(act, x) - qa.g(x);
            if (d < qa.d_lo || d > qa.d_hi) {
                detail = "error bound violated at x=" + std::to_string(x) + " (" +
                         scheme_name(scheme) + " on " + activation_name(act) + ")";
                return false;
            }
        }
        // the sampling-based schemes must obey the precision guarantee
        if (act != Activation::Relu && scheme != Scheme::Linear) {
            ++sampling_cases;
            const std::array<double, 3> coeffs = {qa.a1, qa.a2, qa.a3};
            const SamplingBounds sb = error_bounds_sampling(act, coeffs, l, u, delta);
            auto d = [&](double x) { return act_eval(act, x) - qa.g(x); };
            double oracle_max = -1e300, oracle_min = 1e300;
            const Eigen::Index fine = std::max<Eigen::Index>(1, sb.segments) * 100;
            for (Eigen::Index k = 0; k <= fine; ++k) {
                const double x = l + (u - l) * static_cast<double>(k) / static_cast<double>(fine);
                oracle_max = std::max(oracle_max, d(x));
                oracle_min = std::min(oracle_min, d(x));
            }
            for (Eigen::Index k = 0; k <= sb.segments; ++k) {
                const double x =
                    l + (u - l) * static_cast<double>(k) / static_cast<double>(sb.segments);
                oracle_max = std::max(oracle_max, d(x));
                oracle_min = std::min(oracle_min, d(x));
            }
            const double gap_hi = sb.d_hi - oracle_max;
            const double gap_lo = oracle_min - sb.d_lo;
            if (gap_hi < -1e-12 || gap_hi > delta + 1e-12 || gap_lo < -1e-12 ||
                gap_lo > delta + 1e-12) {
                detail = "precision guarantee violated: gaps " + std::to_string(gap_hi) + ", " +
                         std::to_string(gap_lo);
                return false;
            }
        }
    }
    detail = "500 cases on a 10^4 grid; " + std::to_string(sampling_cases) +
             " sampling cases within delta = 0.001 of the refined oracle";
    return true;
}

// criterion 6: identity networks are enclosed exactly
bool criterion6(std::string& detail) {
    std::mt19937_64 rng(606);
    const ApproxPolicy policy;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 3);
        const int depth = 1 + static_cast<int>(rng() % 3);
        std::vector<Layer> layers;
        Eigen::Index prev = n;
        for (int li = 0; li < depth; ++li) {
            Layer l;
            const Eigen::Index width = 2 + static_cast<Eigen::Index>(rng() % 3);
            l.W = pt::random_mat(rng, width, prev, -1.0, 1.0);
            l.b = pt::random_vec(rng, width, -1.0, 1.0);
            l.act = Activation::Identity;
            prev = width;
            layers.push_back(std::move(l));
        }
        const Network net(n, std::move(layers));
        const Box x0(-Vec::Ones(n), Vec::Ones(n));
        const auto [enclosure, trace] = image_enclosure(net, x0, policy);

        PolyZonotope exact = PolyZonotope::from_box(x0);
        for (const Layer& l : net.layers()) {
            exact = affine_map(l.W, exact, l.b);
        }
        const PolyZonotope a = compact(enclosure);
        const PolyZonotope b = compact(exact);
        for (int k = 0; k < 50; ++k) {
            const FactorAssignment fa = pt::random_fa(rng, b);
            FactorAssignment fa_a = fa;
            fa_a.beta.resize(a.num_independent());
            fa_a.beta.setZero();
            const Vec va = evaluate(a, fa_a);
            const Vec vb = evaluate(b, fa);
            if ((va - vb).cwiseAbs().maxCoeff() > 1e-9) {
                detail = "identity network enclosure deviates from the affine image";
                return false;
            }
        }
    }
    detail = "50 identity networks enclosed exactly (evaluation equality after compact)";
    return true;
}

// criterion 7: open-loop verifier on fixtures with known verdicts
bool criterion7(std::string& detail) {
    const ApproxPolicy policy;
    SplitBudget budget;
    budget.max_subproblems = 1000;

    struct Fixture {
        std::string name;
        Network net;
        Box box;
        OutputSpec spec;
        bool verifiable;
    };
    std::vector<Fixture> fixtures;

    // verifiable
    fixtures.push_back({"identity-trivial", identity_net(2), Box(-Vec::Ones(2), Vec::Ones(2)),
                        prove_rows((Mat(1, 2) << 1.0, 0.0).finished(),
                                   (Vec(1) << 2.0).finished()),
                        true});
    {
        Layer l1;
        l1.W = (Mat(2, 1) << 1.0, -1.0).finished();
        l1.b = (Vec(2) << 0.5, 0.5).finished();
        l1.act = Activation::Relu;
        Layer l2;
        l2.W = (Mat(1, 2) << -1.0, -1.0).finished();
        l2.b = (Vec(1) << 2.0).finished();
        l2.act = Activation::Identity;
        fixtures.push_back({"hat-needs-splits", Network(1, {l1, l2}),
                            Box(-Vec::Ones(1), Vec::Ones(1)),
                            prove_rows((Mat(1, 1) << 1.0).finished(),
                                       (Vec(1) << 1.2).finished()),
                            true});
    }
    {
        Layer l1;
        l1.W = Mat::Identity(2, 2);
        l1.b = Vec::Zero(2);
        l1.act = Activation::Relu;
        Layer l2;
        l2.W = (Mat(1, 2) << 1.0, 1.0).finished();
        l2.b = Vec::Zero(1);
        l2.act = Activation::Identity;
        fixtures.push_back({"relu-sum", Network(2, {l1, l2}), Box(-Vec::Ones(2), Vec::Ones(2)),
                            prove_rows((Mat(1, 1) << 1.0).finished(),
                                       (Vec(1) << 2.05).finished()),
                            true});
    }
    {
        std::mt19937_64 rng(777);
        Layer l1;
        l1.W = pt::random_mat(rng, 4, 1, -1.0, 1.0);
        l1.b = pt::random_vec(rng, 4, -0.5, 0.5);
        l1.act = Activation::Sigmoid;
        Layer l2;
        l2.W = pt::random_mat(rng, 1, 4, -1.0, 1.0);
        l2.b = (Vec(1) << 0.2).finished();
        l2.act = Activation::Identity;
        const double bound = l2.W.cwiseAbs().sum() + 0.2 + 0.5;
        fixtures.push_back({"sigmoid-range", Network(1, {l1, l2}),
                            Box(-Vec::Ones(1), Vec::Ones(1)),
                            prove_rows((Mat(1, 1) << 1.0).finished(),
                                       (Vec(1) << bound).finished()),
                            true});
    }
    {
        std::mt19937_64 rng(778);
        Layer l1;
        l1.W = pt::random_mat(rng, 4, 2, -1.0, 1.0);
        l1.b = pt::random_vec(rng, 4, -0.5, 0.5);
        l1.act = Activation::Tanh;
        Layer l2;
        l2.W = pt::random_mat(rng, 1, 4, -1.0, 1.0);
        l2.b = Vec::Zero(1);
        l2.act = Activation::Identity;
        OutputSpec avoid;
        avoid.mode = OutputSpec::Mode::Avoid;
        avoid.A = (Mat(1, 1) << -1.0).finished();  // unsafe: y >= 10
        avoid.b = (Vec(1) << -10.0).finished();
        fixtures.push_back({"tanh-avoid", Network(2, {l1, l2}), Box(-Vec::Ones(2), Vec::Ones(2)),
                            avoid, true});
    }

    // falsifiable
    fixtures.push_back({"identity-false", identity_net(2), Box(Vec::Zero(2), Vec::Ones(2)),
                        prove_rows((Mat(1, 2) << 1.0, 0.0).finished(),
                                   (Vec(1) << -2.0).finished()),
                        false});
    fixtures.push_back({"corner-sum", identity_net(2), Box(Vec::Zero(2), Vec::Ones(2)),
                        prove_rows((Mat(1, 2) << 1.0, 1.0).finished(),
                                   (Vec(1) << 1.5).finished()),
                        false});
    {
        Layer l1;
        l1.W = (Mat(2, 2) << 1.0, 0.0, 0.0, -1.0).finished();
        l1.b = Vec::Zero(2);
        l1.act = Activation::Relu;
        Layer l2;
        l2.W = (Mat(1, 2) << 1.0, -1.0).finished();
        l2.b = Vec::Zero(1);
        l2.act = Activation::Identity;
        fixtures.push_back({"relu-corner", Network(2, {l1, l2}),
                            Box(-Vec::Ones(2), Vec::Ones(2)),
                            prove_rows((Mat(1, 1) << 1.0).finished(),
                                       (Vec(1) << 0.9).finished()),
                            false});
    }
    {
        std::mt19937_64 rng(779);
        Layer l1;
        l1.W = pt::random_mat(rng, 2, 1, -1.5, 1.5);
        l1.b = pt::random_vec(rng, 2, -0.5, 0.5);
        l1.act = Activation::Sigmoid;
        Layer l2;
        l2.W = pt::random_mat(rng, 1, 2, -1.5, 1.5);
        l2.b = Vec::Zero(1);
        l2.act = Activation::Identity;
        const Network net(1, {l1, l2});
        double ymax = -1e300;
        for (int k = 0; k <= 1000; ++k) {
            ymax = std::max(ymax, net.forward((Vec(1) << -1.0 + 2.0 * k / 1000.0).finished())(0));
        }
        fixtures.push_back({"sigmoid-false", net, Box(-Vec::Ones(1), Vec::Ones(1)),
                            prove_rows((Mat(1, 1) << 1.0).finished(),
                                       (Vec(1) << ymax - 0.05).finished()),
                            false});
    }
    {
        OutputSpec avoid;
        avoid.mode = OutputSpec::Mode::Avoid;
        avoid.A = Mat::Identity(2, 2);  // unsafe: y <= (0.5, 0.5)
        avoid.b = (Vec(2) << 0.5, 0.5).finished();
        fixtures.push_back({"avoid-hit", identity_net(2), Box(Vec::Zero(2), Vec::Ones(2)), avoid,
                            false});
    }

    int verified = 0, falsified = 0;
    for (const Fixture& fx : fixtures) {
        const Verdict v = verify(fx.net, fx.box, fx.spec, policy, budget, 0);
        if (fx.verifiable) {
            if (v.kind != Verdict::Kind::Verified) {
                detail = fx.name + ": expected Verified";
                return false;
            }
            ++verified;
        } else {
            if (v.kind != Verdict::Kind::Falsified || !v.counterexample) {
                detail = fx.name + ": expected Falsified with counterexample";
                return false;
            }
            const Vec replay = fx.net.forward(v.counterexample->input);
            if ((replay - v.counterexample->output).cwiseAbs().maxCoeff() != 0.0 ||
                !violates(fx.spec, replay)) {
                detail = fx.name + ": counterexample does not replay";
                return false;
            }
            ++falsified;
        }
    }
    detail = std::to_string(verified) + " verified + " + std::to_string(falsified) +
             " falsified fixtures, all correct within 1000 subproblems";
    return true;
}

// criterion 8: closed-loop simulation containment on both fixtures
bool criterion8(std::string& detail) {
    for (const bool linear : {true, false}) {
        const ControlSetup setup =
            linear ? pt::double_integrator_setup() : pt::pendulum_setup();
        const auto start = std::chrono::steady_clock::now();
        const ReachResult result = reach(setup);
        std::mt19937_64 rng(linear ? 88001 : 88002);
        const Box x0 = interval_enclosure(setup.X0);
        for (int k = 0; k < 100; ++k) {
            Vec start_state(2);
            start_state << pt::uniform(rng, x0.l(0), x0.u(0)),
                pt::uniform(rng, x0.l(1), x0.u(1));
            const Trajectory traj = simulate(setup, start_state, rng(), 1e-3);
            if (!pt::trajectory_contained(traj, result, setup.dt)) {
                detail = std::string(linear ? "double integrator" : "pendulum") +
                         ": trajectory escapes the flowpipe";
                return false;
            }
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > 30.0) {
            detail = std::string(linear ? "double integrator" : "pendulum") +
                     " exceeded the 30 s budget";
            return false;
        }
    }
    detail = "double integrator and pendulum: 100 RK4 trajectories each inside all R(tau_i)";
    return true;
}

// criterion 9: Cartesian-product dependency exactness
bool criterion9(std::string& detail) {
    Layer l;
    l.W = Mat::Identity(1, 1);
    l.b = Vec::Zero(1);
    l.act = Activation::Identity;
    const Network identity(1, {l});
    const PolyZonotope x0 = PolyZonotope::from_box(Box(-Vec::Ones(1), Vec::Ones(1)));
    const ApproxPolicy policy;
    const auto [y, trace] = image_enclosure(identity, x0, policy);
    const PolyZonotope ext = cartesian_product_dep(x0, y);
    std::mt19937_64 rng(909);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const FactorAssignment fa = pt::random_fa(rng, ext);
        const Vec z = evaluate(ext, fa);
        worst = std::max(worst, std::abs(z(0) - z(1)));
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", worst);
    if (worst > 1e-9) {
        detail = std::string("control component deviates from the state component by ") + buf;
        return false;
    }
    detail = std::string("u-component equals x-component pointwise (worst ") + buf + ")";
    return true;
}

// criterion 10: quadratic policy hull area vs linear policy hull area
bool criterion10(std::string& detail) {
    const Box x0(-Vec::Ones(2), Vec::Ones(2));
    ApproxPolicy quad;
    quad.layer_schemes = {Scheme::ReluClosedForm, Scheme::ReluClosedForm};
    ApproxPolicy lin;
    lin.layer_schemes = {Scheme::Linear, Scheme::Linear};

    int tighter = 0;
    for (int netid = 0; netid < 20; ++netid) {
        std::mt19937_64 rng(5000 + 104729 * netid);
        const Network net = random_fig4_net(rng, Activation::Relu);
        const auto [pq, tq] = image_enclosure(net, x0, quad);
        const auto [pl, tl] = image_enclosure(net, x0, lin);
        const Box bq = interval_enclosure(pq);
        const Box bl = interval_enclosure(pl);
        const double area_q = bq.width()(0) * bq.width()(1);
        const double area_l = bl.width()(0) * bl.width()(1);
        if (area_q <= area_l) {
            ++tighter;
        }
    }
    detail = "quadratic hull area <= linear hull area on " + std::to_string(tighter) +
             " of 20 seeded ReLU nets";
    return tighter >= 15;
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();

    {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = criterion1(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report(1, pass && secs < 5.0, detail + (secs >= 5.0 ? "; over 5 s budget" : ""), secs);
    }
    run(2, criterion2);
    run(3, criterion3);
    {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = criterion4(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report(4, pass && secs < 60.0, detail + (secs >= 60.0 ? "; over 60 s budget" : ""), secs);
    }
    run(5, criterion5);
    run(6, criterion6);
    {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = criterion7(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report(7, pass && secs < 30.0, detail + (secs >= 30.0 ? "; over 30 s budget" : ""), secs);
    }
    run(8, criterion8);
    run(9, criterion9);
    run(10, criterion10);

    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 10 criteria passed (%.1f s total)\n", 10 - g_failures, total);
    return g_failures;
}
