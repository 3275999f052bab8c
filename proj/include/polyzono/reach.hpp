#pragma once

/**
 * @file reach.hpp
 * @brief Sampled-data reachability of neural-network-controlled systems.
 *
 * Per control cycle the controller image is computed as a polynomial
 * zonotope, attached to the state set through the dependency-preserving
 * Cartesian product, and the extended system (x' = f(x,u,w), u' = 0) is
 * propagated over one sampling period.
 *
 * Plant propagation is pluggable: linear plants propagate through a rigorous
 * matrix exponential (scaling-and-squaring Taylor series with an explicit
 * truncation-remainder bloat), nonlinear plants through first-order
 * conservative linearization with an interval mean-value remainder. The
 * latter replaces the conservative polynomialization algorithm of the
 * original setting; reports carry a deviation flag for it.
 */

#include "polyzono/dynamics.hpp"
#include "polyzono/enclosure.hpp"
#include "polyzono/network.hpp"
#include "polyzono/pz.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace polyzono {

/// x' = A x + B u + Ew w.
struct LinearPlant {
    Mat A;
    Mat B;
    Mat Ew;  ///< n x r, may have zero columns
};

struct PropagatorOptions {
    int taylor_order = 12;  ///< matrix exponential truncation order
    int substeps = 4;       ///< subdivision of each control cycle
    int max_refine = 10;    ///< enlargement attempts for the remainder fixed point
};

/// Unsafe region {y | A y <= b}.
struct HalfspaceSet {
    Mat A;
    Vec b;
};

struct ControlSetup {
    std::optional<LinearPlant> linear;
    std::optional<Plant> nonlinear;
    Network controller;
    PolyZonotope X0;
    Box W;  ///< disturbance set, dimension r (possibly 0)
    double dt = 0.1;
    double tF = 1.0;
    ApproxPolicy policy;
    PropagatorOptions prop;
    std::optional<Box> goal;
    std::vector<HalfspaceSet> avoid;
    double state_reduction_order = 50.0;  ///< applied to R(t_i) at cycle start

    ControlSetup(Network ctrl, PolyZonotope x0)
        : controller(std::move(ctrl)), X0(std::move(x0)), W(Vec(0), Vec(0)) {}

    Eigen::Index state_dim() const;
    Eigen::Index control_dim() const;
    Eigen::Index disturbance_dim() const;
    void validate() const;
};

struct ReachResult {
    std::vector<PolyZonotope> time_points;     ///< R(t_0), ..., R(t_K)
    std::vector<PolyZonotope> time_intervals;  ///< R(tau_0), ..., R(tau_{K-1})
    std::vector<PolyZonotope> control_sets;    ///< controller image per cycle
    bool nonlinear_propagator = false;
};

/// Raised when the linearization-remainder fixed point cannot be found.
class PropagatorDivergence : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief One step of z' = A z + c0 + Ew w, w(t) in W (measurable).
 *
 * Returns the set at t + dt and the time-interval enclosure over [t, t + dt]
 * (interval hull of the endpoint sets bloated by a curvature bound, returned
 * as a box-shaped polynomial zonotope).
 */
std::pair<PolyZonotope, PolyZonotope> propagate_affine(const Mat& A, const Vec& c0, const Mat& Ew,
                                                       const Box& W, const PolyZonotope& pz,
                                                       double dt, const PropagatorOptions& opts);

/// Homogeneous linear step z' = A z.
std::pair<PolyZonotope, PolyZonotope> propagate_linear(const Mat& A, const PolyZonotope& pz,
                                                       double dt,
                                                       const PropagatorOptions& opts = {});

/**
 * @brief One conservative-linearization step of z' = f(z, w), w in W.
 *
 * Linearizes at the enclosure centre and bounds the linearization error with
 * an interval mean-value remainder over a candidate enclosure that is
 * enlarged until self-consistent (up to opts.max_refine doublings).
 */
std::pair<PolyZonotope, PolyZonotope> propagate_nonlinear(const Plant& extended, const Box& W,
                                                          const PolyZonotope& pz, double dt,
                                                          const PropagatorOptions& opts);

/// Plant with the control inputs appended as frozen states (u' = 0).
Plant extend_plant(const Plant& plant);

/// Reachable sets for the whole horizon per the sampled-data control loop.
ReachResult reach(const ControlSetup& setup);

/// RK4 simulation with piecewise-constant control (recomputed every dt) and
/// disturbances held constant per micro-step, sampled uniformly from W.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
};
Trajectory simulate(const ControlSetup& setup, const Vec& x0, std::uint64_t seed,
                    double micro_step);

struct SetCheckReport {
    std::optional<bool> goal_proved;
    std::vector<bool> avoid_proved;
    bool all_proved = true;
};

/// Goal: interval enclosure of R(t_F) inside the goal box. Avoid: every
/// time-interval set provably misses every unsafe half-space intersection.
SetCheckReport check_sets(const ReachResult& result, const std::optional<Box>& goal,
                          const std::vector<HalfspaceSet>& avoid);

}  // namespace polyzono
