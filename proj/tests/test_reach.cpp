#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "polyzono/reach.hpp"
#include "fixtures.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace polyzono;
using testing::double_integrator_setup;
using testing::pendulum_setup;
using testing::tanh_controller;
using testing::trajectory_contained;

namespace {

Network constant_controller(Eigen::Index n, double value) {
    Layer l;
    l.W = Mat::Zero(1, n);
    l.b = (Vec(1) << value).finished();
    l.act = Activation::Identity;
    return Network(n, {l});
}

}  // namespace

TEST_CASE("linear propagation") {
    PropagatorOptions opts;

    SUBCASE("zero dynamics keeps the set") {
        const PolyZonotope pz = PolyZonotope::from_box(Box(-Vec::Ones(2), Vec::Ones(2)));
        const auto [end, tau] = propagate_linear(Mat::Zero(2, 2), pz, 0.5, opts);
        CHECK((end.c() - pz.c()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((end.G() - pz.G()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(end.num_independent() == 0);
        const Box tb = interval_enclosure(tau);
        const Box ib = interval_enclosure(pz);
        CHECK((tb.l - ib.l).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((tb.u - ib.u).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("nilpotent double integrator is exact") {
        const Mat A = (Mat(2, 2) << 0.0, 1.0, 0.0, 0.0).finished();
        Vec c(2);
        c << 1.0, 2.0;
        const auto [end, tau] = propagate_linear(A, PolyZonotope(c), 0.1, opts);
        CHECK(end.c()(0) == doctest::Approx(1.2).epsilon(1e-12));
        CHECK(end.c()(1) == doctest::Approx(2.0).epsilon(1e-12));
        const Box hull = interval_enclosure(end);
        CHECK(hull.width().maxCoeff() < 1e-9);
    }

    SUBCASE("scalar exponential growth hits e within 1e-9") {
        Vec one(1);
        one << 1.0;
        const auto [end, tau] = propagate_linear((Mat(1, 1) << 1.0).finished(),
                                                 PolyZonotope(one), 1.0, opts);
        const Box hull = interval_enclosure(end);
        CHECK(std::abs(hull.mid()(0) - std::exp(1.0)) < 1e-9);
        CHECK(hull.width()(0) < 1e-6);
    }

    SUBCASE("constant disturbance integrates like a ramp") {
        Vec zero(1);
        zero << 0.0;
        Vec wl(1), wu(1);
        wl << 0.5;
        wu << 0.5;
        const auto [end, tau] = propagate_affine(Mat::Zero(1, 1), Vec::Zero(1),
                                                 Mat::Identity(1, 1), Box(wl, wu),
                                                 PolyZonotope(zero), 0.4, PropagatorOptions{});
        const Box hull = interval_enclosure(end);
        CHECK(hull.mid()(0) == doctest::Approx(0.2).epsilon(1e-9));
        CHECK(hull.width()(0) < 1e-9);
    }
}

TEST_CASE("nonlinear propagation") {
    PropagatorOptions opts;

    SUBCASE("identically zero dynamics is the identity") {
        const Plant plant = Plant::parse({"0", "0"}, 0, 0);
        const Plant ext = extend_plant(plant);
        const PolyZonotope pz = PolyZonotope::from_box(Box(-Vec::Ones(2), Vec::Ones(2)));
        const auto [end, tau] = propagate_nonlinear(ext, Box(Vec(0), Vec(0)), pz, 0.25, opts);
        const Box he = interval_enclosure(end);
        const Box hi = interval_enclosure(pz);
        CHECK((he.l - hi.l).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((he.u - hi.u).cwiseAbs().maxCoeff() < 1e-9);
    }

    SUBCASE("linear dynamics given as expressions match the linear propagator") {
        const Plant plant = Plant::parse({"x2", "-0.5*x1"}, 0, 0);
        const Plant ext = extend_plant(plant);
        const PolyZonotope pz =
            PolyZonotope::from_box(Box((Vec(2) << 0.9, -0.1).finished(),
                                       (Vec(2) << 1.1, 0.1).finished()));
        const Mat A = (Mat(2, 2) << 0.0, 1.0, -0.5, 0.0).finished();
        const auto [end_nl, tau_nl] = propagate_nonlinear(ext, Box(Vec(0), Vec(0)), pz, 0.05,
                                                          opts);
        const auto [end_l, tau_l] = propagate_linear(A, pz, 0.05, opts);
        const Box bn = interval_enclosure(end_nl);
        const Box bl = interval_enclosure(end_l);
        CHECK((bn.l - bl.l).cwiseAbs().maxCoeff() < 1e-7);
        CHECK((bn.u - bl.u).cwiseAbs().maxCoeff() < 1e-7);
    }

    SUBCASE("cubic decay encloses sampled endpoints") {
        const Plant plant = Plant::parse({"-x1^3"}, 0, 0);
        const Plant ext = extend_plant(plant);
        Vec l(1), u(1);
        l << 0.9;
        u << 1.1;
        const PolyZonotope pz = PolyZonotope::from_box(Box(l, u));
        const auto [end, tau] = propagate_nonlinear(ext, Box(Vec(0), Vec(0)), pz, 0.01, opts);
        const Box hull = interval_enclosure(end);

        std::mt19937_64 rng(907);
        for (int k = 0; k < 100; ++k) {
            double x = testing::uniform(rng, 0.9, 1.1);
            const double h = 0.001;
            for (int s = 0; s < 10; ++s) {
                const auto f = [](double v) { return -v * v * v; };
                const double k1 = f(x);
                const double k2 = f(x + 0.5 * h * k1);
                const double k3 = f(x + 0.5 * h * k2);
                const double k4 = f(x + h * k3);
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            CHECK(hull.l(0) <= x + 1e-9);
            CHECK(hull.u(0) >= x - 1e-9);
        }
    }
}

TEST_CASE("simulation") {
    SUBCASE("zero dynamics stays constant") {
        ControlSetup setup(constant_controller(1, 0.0),
                           PolyZonotope((Vec(1) << 0.3).finished()));
        LinearPlant plant;
        plant.A = Mat::Zero(1, 1);
        plant.B = Mat::Zero(1, 1);
        plant.Ew = Mat(1, 0);
        setup.linear = std::move(plant);
        setup.dt = 0.5;
        setup.tF = 2.0;
        const Trajectory traj = simulate(setup, (Vec(1) << 0.3).finished(), 0, 0.01);
        for (const Vec& x : traj.states) {
            CHECK(x(0) == doctest::Approx(0.3));
        }
    }

    SUBCASE("integrator with bias controller is a ramp") {
        ControlSetup setup(constant_controller(1, 0.7), PolyZonotope(Vec::Zero(1)));
        LinearPlant plant;
        plant.A = Mat::Zero(1, 1);
        plant.B = Mat::Identity(1, 1);
        plant.Ew = Mat(1, 0);
        setup.linear = std::move(plant);
        setup.dt = 1.0;
        setup.tF = 2.0;
        const Trajectory traj = simulate(setup, Vec::Zero(1), 0, 1e-3);
        CHECK(std::abs(traj.states.back()(0) - 1.4) < 1e-9);
    }

    SUBCASE("harmonic oscillator conserves energy") {
        ControlSetup setup(constant_controller(2, 0.0),
                           PolyZonotope((Vec(2) << 1.0, 0.0).finished()));
        setup.nonlinear = Plant::parse({"x2", "-x1 + 0*u1"}, 1, 0);
        setup.dt = 1.0;
        setup.tF = 10.0;
        const Vec x0 = (Vec(2) << 1.0, 0.0).finished();
        const Trajectory traj = simulate(setup, x0, 0, 1e-3);
        for (const Vec& x : traj.states) {
            CHECK(std::abs(x.squaredNorm() - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("closed-loop reachability") {
    SUBCASE("zero dynamics keeps every set at the initial set") {
        Vec l(2), u(2);
        l << -0.2, 0.1;
        u << 0.2, 0.3;
        ControlSetup setup(tanh_controller(), PolyZonotope::from_box(Box(l, u)));
        setup.nonlinear = Plant::parse({"0*x1 + 0*u1", "0"}, 1, 0);
        setup.dt = 0.5;
        setup.tF = 2.0;
        const ReachResult result = reach(setup);
        REQUIRE(result.time_points.size() == 5);
        for (const PolyZonotope& pz : result.time_points) {
            const Box hull = interval_enclosure(pz);
            CHECK((hull.l - l).cwiseAbs().maxCoeff() < 1e-7);
            CHECK((hull.u - u).cwiseAbs().maxCoeff() < 1e-7);
        }
    }

    SUBCASE("scalar integrator with constant control marches linearly") {
        ControlSetup setup(constant_controller(1, 0.7), PolyZonotope(Vec::Zero(1)));
        LinearPlant plant;
        plant.A = Mat::Zero(1, 1);
        plant.B = Mat::Identity(1, 1);
        plant.Ew = Mat(1, 0);
        setup.linear = std::move(plant);
        setup.dt = 1.0;
        setup.tF = 2.0;
        const ReachResult result = reach(setup);
        REQUIRE(result.time_points.size() == 3);
        CHECK(interval_enclosure(result.time_points[1]).mid()(0) == doctest::Approx(0.7));
        CHECK(interval_enclosure(result.time_points[2]).mid()(0) == doctest::Approx(1.4));
        CHECK(interval_enclosure(result.time_points[2]).width()(0) < 1e-9);
    }

    SUBCASE("double integrator trajectories stay inside the flowpipe") {
        const ControlSetup setup = double_integrator_setup();
        const ReachResult result = reach(setup);
        std::mt19937_64 rng(1009);
        for (int k = 0; k < 20; ++k) {
            Vec x0(2);
            x0 << testing::uniform(rng, 0.9, 1.1), testing::uniform(rng, -0.1, 0.1);
            const Trajectory traj = simulate(setup, x0, rng(), 1e-3);
            CHECK(trajectory_contained(traj, result, setup.dt));
        }
    }

    SUBCASE("pendulum trajectories stay inside the flowpipe") {
        const ControlSetup setup = pendulum_setup();
        const ReachResult result = reach(setup);
        CHECK(result.nonlinear_propagator);
        std::mt19937_64 rng(1013);
        for (int k = 0; k < 20; ++k) {
            Vec x0(2);
            x0 << testing::uniform(rng, 0.4, 0.6), testing::uniform(rng, -0.1, 0.1);
            const Trajectory traj = simulate(setup, x0, rng(), 1e-3);
            CHECK(trajectory_contained(traj, result, setup.dt));
        }
    }

    SUBCASE("bounded disturbances keep disturbed trajectories inside the flowpipe") {
        ControlSetup setup = double_integrator_setup();
        setup.linear->Ew = (Mat(2, 1) << 0.0, 1.0).finished();
        setup.W = Box((Vec(1) << -0.05).finished(), (Vec(1) << 0.05).finished());
        setup.tF = 1.0;
        const ReachResult result = reach(setup);
        std::mt19937_64 rng(1031);
        for (int k = 0; k < 20; ++k) {
            Vec x0(2);
            x0 << testing::uniform(rng, 0.9, 1.1), testing::uniform(rng, -0.1, 0.1);
            const Trajectory traj = simulate(setup, x0, rng(), 1e-3);
            CHECK(trajectory_contained(traj, result, setup.dt));
        }
    }

    SUBCASE("time consistency: each endpoint lies within its interval hull") {
        const ControlSetup setup = double_integrator_setup();
        const ReachResult result = reach(setup);
        for (std::size_t i = 0; i < result.time_intervals.size(); ++i) {
            const Box tau = interval_enclosure(result.time_intervals[i]);
            const Box next = interval_enclosure(result.time_points[i + 1]);
            CHECK(tau.contains(next, 1e-9));
        }
    }

    SUBCASE("coarser substepping is never tighter") {
        ControlSetup fine = double_integrator_setup();
        fine.tF = 1.0;
        ControlSetup coarse = double_integrator_setup();
        coarse.tF = 1.0;
        fine.prop.substeps = 4;
        coarse.prop.substeps = 2;
        const ReachResult rf = reach(fine);
        const ReachResult rc = reach(coarse);
        for (std::size_t i = 0; i < rf.time_intervals.size(); ++i) {
            const Box bf = interval_enclosure(rf.time_intervals[i]);
            const Box bc = interval_enclosure(rc.time_intervals[i]);
            CHECK(bc.contains(bf, 1e-9));
        }
    }

    SUBCASE("dependency preservation for the identity controller") {
        Layer l;
        l.W = Mat::Identity(1, 1);
        l.b = Vec::Zero(1);
        l.act = Activation::Identity;
        const Network identity(1, {l});
        const PolyZonotope x0 = PolyZonotope::from_box(Box(-Vec::Ones(1), Vec::Ones(1)));
        ApproxPolicy policy;
        const auto [y, trace] = image_enclosure(identity, x0, policy);
        const PolyZonotope ext = cartesian_product_dep(x0, y);
        std::mt19937_64 rng(1021);
        for (int k = 0; k < 200; ++k) {
            const FactorAssignment fa = testing::random_fa(rng, ext);
            const Vec z = evaluate(ext, fa);
            CHECK(std::abs(z(0) - z(1)) < 1e-9);
        }
    }

    SUBCASE("setup validation") {
        ControlSetup setup = double_integrator_setup();
        setup.tF = 0.35;  // not a multiple of dt
        CHECK_THROWS_AS(reach(setup), std::invalid_argument);
    }
}

TEST_CASE("goal and avoid checks") {
    const ControlSetup setup = double_integrator_setup();
    const ReachResult result = reach(setup);

    SUBCASE("whole space as goal is proved") {
        const Box everything(Vec::Constant(2, -1e9), Vec::Constant(2, 1e9));
        const SetCheckReport report = check_sets(result, everything, {});
        REQUIRE(report.goal_proved.has_value());
        CHECK(*report.goal_proved);
        CHECK(report.all_proved);
    }

    SUBCASE("avoid set touching the initial set is not proved") {
        HalfspaceSet unsafe;
        unsafe.A = (Mat(2, 2) << 1.0, 0.0, -1.0, 0.0).finished();
        unsafe.b = (Vec(2) << 1.05, -0.95).finished();  // band 0.95 <= x1 <= 1.05
        const SetCheckReport report = check_sets(result, std::nullopt, {unsafe});
        REQUIRE(report.avoid_proved.size() == 1);
        CHECK_FALSE(report.avoid_proved[0]);
        CHECK_FALSE(report.all_proved);
    }

    SUBCASE("distant unsafe region is proved avoided") {
        HalfspaceSet unsafe;
        unsafe.A = (Mat(1, 2) << -1.0, 0.0).finished();  // x1 >= 100
        unsafe.b = (Vec(1) << -100.0).finished();
        const SetCheckReport report = check_sets(result, std::nullopt, {unsafe});
        CHECK(report.avoid_proved[0]);
    }
}
