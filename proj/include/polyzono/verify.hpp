#pragma once

/**
 * @file verify.hpp
 * @brief Open-loop output specification checking and a complete verifier via
 *        recursive input splitting.
 */

#include "polyzono/enclosure.hpp"
#include "polyzono/network.hpp"
#include "polyzono/pz.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace polyzono {

/**
 * @brief Linear output specification A y <= b.
 *
 * Prove mode: the constraints must hold for every output. Avoid mode: the
 * unsafe set {y | A y <= b} must be missed by every output.
 */
struct OutputSpec {
    enum class Mode { Prove, Avoid };
    Mode mode = Mode::Prove;
    Mat A;
    Vec b;

    void validate() const;
};

struct Counterexample {
    Vec input;
    Vec output;
};

struct Verdict {
    enum class Kind { Verified, Falsified, Unknown };
    Kind kind = Kind::Unknown;
    std::optional<Counterexample> counterexample;
    std::int64_t subproblems = 0;
};

struct SplitBudget {
    std::int64_t max_subproblems = 1000;
    std::int64_t max_depth = 30;
    std::int64_t falsification_samples = 200;

    void validate() const;
};

/// Enclosure-level check: prove mode succeeds when the interval enclosure of
/// A * PZ - b is non-positive; avoid mode when some row is provably positive.
enum class EnclosureCheck { Proved, Inconclusive };
EnclosureCheck check_enclosure(const PolyZonotope& pz, const OutputSpec& spec);

/// Sampling plus coordinate-descent falsifier; any returned counterexample is
/// re-validated through forward().
std::optional<Counterexample> falsify(const Network& net, const Box& input_box,
                                      const OutputSpec& spec, std::int64_t samples,
                                      std::uint64_t seed = 0);

/// Complete verifier: best-first bisection on the widest input dimension.
Verdict verify(const Network& net, const Box& input_box, const OutputSpec& spec,
               const ApproxPolicy& policy, const SplitBudget& budget, std::uint64_t seed = 0);

/// True when the concrete output violates the specification.
bool violates(const OutputSpec& spec, const Vec& output);

}  // namespace polyzono
