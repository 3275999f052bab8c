#pragma once

/**
 * @file enclosure.hpp
 * @brief Layer-by-layer polynomial-zonotope enclosure of neural-network
 *        images.
 *
 * Every neuron's input-output relation is abstracted by a quadratic
 * g(x) = a1 x^2 + a2 x + a3 plus a rigorous error interval [d_lo, d_hi]
 * covering mu(x) - g(x) on the neuron's input range. The quadratic is
 * evaluated set-based through the quadratic map, the error enters as a fresh
 * independent generator.
 *
 * All neurons of one layer share a single exponent matrix and independent
 * block layout: the quadratic-map exponent blocks depend only on the input
 * exponent matrix and the substituted independent factors depend only on the
 * input factors, never on the neuron. Only the error factors are
 * neuron-private. This makes witness replay well defined: for a concrete
 * input the exact factor assignment reproducing forward() can be
 * reconstructed layer by layer.
 */

#include "polyzono/network.hpp"
#include "polyzono/pz.hpp"

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace polyzono {

/// Quadratic abstraction of one neuron plus its error bounds.
struct QuadApprox {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double d_lo = 0.0;
    double d_hi = 0.0;

    double g(double x) const { return a1 * x * x + a2 * x + a3; }
    double error_width() const { return d_hi - d_lo; }
};

enum class Scheme { Regression, ReluClosedForm, Taylor, Linear, BestOf };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/**
 * @brief Per-enclosure configuration.
 *
 * With an empty layer_schemes the default recipe applies: quadratic
 * regression on the first two layers and the linear abstraction on the rest.
 */
struct ApproxPolicy {
    std::vector<Scheme> layer_schemes;   ///< explicit per-layer override
    int regression_samples = 10;         ///< N
    double sampling_precision = 1e-3;    ///< delta
    double reduction_order = 50.0;       ///< rho
    bool compact_after_layer = true;

    Scheme scheme_for(std::size_t layer_index) const;
    void validate() const;
};

/// Least-squares quadratic over N uniform samples on [l, u]; returns
/// (a1, a2, a3). Solved via the normal equations with pivoted elimination.
std::array<double, 3> approx_regression(Activation act, double l, double u, int N);
std::array<double, 3> approx_regression(const std::function<double(double)>& f, double l,
                                        double u, int N);

/// Closed-form ReLU approximation enforcing g(l) = 0, g'(l) = 0, g(u) = u;
/// requires l < 0 < u.
std::array<double, 3> approx_relu_closed_form(double l, double u);

/// Second-order Taylor expansion at x* = 0.5 (l + u); sigmoid/tanh only.
std::array<double, 3> approx_taylor(Activation act, double l, double u);

/// Linear (zonotope) abstraction with closed-form error bounds.
QuadApprox approx_linear(Activation act, double l, double u);

/// Exact piecewise-quadratic extrema of d(x) = relu(x) - g(x) on [l, u];
/// requires l < 0 < u.
std::pair<double, double> error_bounds_relu(const std::array<double, 3>& coeffs, double l,
                                            double u);

/// Sampling-based bounds for sigmoid/tanh with guarantee
/// d_hi - max d <= delta (and symmetrically for d_lo).
struct SamplingBounds {
    double d_lo = 0.0;
    double d_hi = 0.0;
    Eigen::Index segments = 0;  ///< number of uniform segments used
};
SamplingBounds error_bounds_sampling(Activation act, const std::array<double, 3>& coeffs,
                                     double l, double u, double delta);

/// Coefficients plus matching error bounds for one scheme.
QuadApprox neuron_approximation(Activation act, Scheme scheme, double l, double u,
                                const ApproxPolicy& policy);

/// Per-neuron record kept for witness replay and reporting.
struct NeuronRecord {
    double l = 0.0;
    double u = 0.0;
    QuadApprox approx;
    bool exact = false;  ///< identity, stable ReLU, or degenerate bounds: zero error
    Scheme scheme = Scheme::Linear;
};

struct LayerTrace {
    bool quadratic_mode = false;  ///< full quadratic-map layout vs. linear layout
    Eigen::Index h_in = 0;
    Eigen::Index q_in = 0;
    ExpMat E_in;  ///< exponent matrix entering the layer
    std::vector<NeuronRecord> neurons;
    std::vector<Eigen::Index> error_col;         ///< full-layout column per neuron, -1 if none
    Eigen::Index q_full = 0;                     ///< independent columns before post-processing
    std::vector<Eigen::Index> kept_independent;  ///< surviving columns after compact
    ReductionRecord reduction;                   ///< order reduction applied after compact
    Eigen::Index h_out = 0;
    Eigen::Index q_out = 0;
};

struct EnclosureTrace {
    PolyZonotope input;  ///< X0 in polynomial-zonotope form
    std::vector<LayerTrace> layers;

    explicit EnclosureTrace(PolyZonotope x0) : input(std::move(x0)) {}
};

/// One layer of the image enclosure; scheme applies to mixed neurons only
/// (stable ReLU and identity neurons use their exact affine relation).
std::pair<PolyZonotope, LayerTrace> layer_enclosure(const PolyZonotope& pz, const Layer& layer,
                                                    Scheme scheme, const ApproxPolicy& policy);

/// Full network image enclosure. The output's dependent factors extend the
/// input set's factors positionally.
std::pair<PolyZonotope, EnclosureTrace> image_enclosure(const Network& net,
                                                        const PolyZonotope& X0,
                                                        const ApproxPolicy& policy);
std::pair<PolyZonotope, EnclosureTrace> image_enclosure(const Network& net, const Box& X0,
                                                        const ApproxPolicy& policy);

/**
 * @brief Reconstructs the factor assignment under which the enclosure
 *        reproduces forward(net, x0) exactly (up to clamping of
 *        floating-point dust).
 *
 * Requires the trace input to be in box form (as produced by the Box
 * overload of image_enclosure).
 */
FactorAssignment image_witness(const EnclosureTrace& trace, const Network& net, const Vec& x0);

/// Witness replay for a general input set, starting from a concrete factor
/// assignment of the input polynomial zonotope.
FactorAssignment image_witness_from_assignment(const EnclosureTrace& trace, const Network& net,
                                               const FactorAssignment& fa_in);

}  // namespace polyzono
