#pragma once

// Closed-loop fixtures shared between the unit suites and the acceptance
// runner: a double integrator and a pendulum-style nonlinear plant, both
// driven by a small hand-built tanh controller.

#include "polyzono/reach.hpp"

namespace polyzono::testing {

inline Network tanh_controller() {
    Layer l1;
    l1.W = (Mat(4, 2) << 0.5, 0.3, -0.4, 0.6, 0.2, -0.7, -0.3, -0.2).finished();
    l1.b = (Vec(4) << 0.1, -0.1, 0.0, 0.05).finished();
    l1.act = Activation::Tanh;
    Layer l2;
    l2.W = (Mat(1, 4) << -0.8, 0.5, -0.3, 0.4).finished();
    l2.b = (Vec(1) << 0.0).finished();
    l2.act = Activation::Identity;
    return Network(2, {l1, l2});
}

inline ControlSetup double_integrator_setup() {
    Vec l(2), u(2);
    l << 0.9, -0.1;
    u << 1.1, 0.1;
    ControlSetup setup(tanh_controller(), PolyZonotope::from_box(Box(l, u)));
    LinearPlant plant;
    plant.A = (Mat(2, 2) << 0.0, 1.0, 0.0, 0.0).finished();
    plant.B = (Mat(2, 1) << 0.0, 1.0).finished();
    plant.Ew = Mat(2, 0);
    setup.linear = std::move(plant);
    setup.dt = 0.1;
    setup.tF = 2.0;
    setup.policy.reduction_order = 20.0;
    setup.state_reduction_order = 20.0;
    return setup;
}

inline ControlSetup pendulum_setup() {
    Vec l(2), u(2);
    l << 0.4, -0.1;
    u << 0.6, 0.1;
    ControlSetup setup(tanh_controller(), PolyZonotope::from_box(Box(l, u)));
    setup.nonlinear = Plant::parse({"x2", "-sin(x1) + u1"}, 1, 0);
    setup.dt = 0.1;
    setup.tF = 2.0;
    setup.policy.reduction_order = 20.0;
    setup.state_reduction_order = 20.0;
    return setup;
}

/// Verifies that every trajectory point lies in the hull of the covering
/// time-interval set; boundary times are checked against the earlier step.
inline bool trajectory_contained(const Trajectory& traj, const ReachResult& result, double dt,
                                 double slack = 1e-9) {
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        auto idx = static_cast<std::int64_t>(t / dt);
        if (idx >= static_cast<std::int64_t>(result.time_intervals.size())) {
            idx = static_cast<std::int64_t>(result.time_intervals.size()) - 1;
        }
        bool inside = false;
        for (std::int64_t cand : {idx, idx - 1}) {
            if (cand < 0 || cand >= static_cast<std::int64_t>(result.time_intervals.size())) {
                continue;
            }
            const Box hull = interval_enclosure(
                result.time_intervals[static_cast<std::size_t>(cand)]);
            const double tlo = static_cast<double>(cand) * dt - 1e-12;
            const double thi = static_cast<double>(cand + 1) * dt + 1e-12;
            if (t >= tlo && t <= thi && hull.contains(traj.states[k], slack)) {
                inside = true;
                break;
            }
        }
        if (!inside) {
            return false;
        }
    }
    return true;
}

}  // namespace polyzono::testing
