#include "polyzono/verify.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

namespace polyzono {

namespace {

// margin of the most-violated constraint; > 0 violates prove mode,
// <= 0 lies inside the avoid-mode unsafe set
double spec_margin(const OutputSpec& spec, const Vec& y) {
    return (spec.A * y - spec.b).maxCoeff();
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vec random_point(const Box& box, std::mt19937_64& rng) {
    Vec x(box.dim());
    for (Eigen::Index i = 0; i < box.dim(); ++i) {
        x(i) = box.l(i) + (box.u(i) - box.l(i)) * uniform01(rng);
    }
    return x;
}

}  // namespace

void OutputSpec::validate() const {
    if (A.rows() != b.size()) {
        throw std::invalid_argument("OutputSpec: constraint row count does not match offset");
    }
}

void SplitBudget::validate() const {
    if (max_subproblems <= 0 || max_depth <= 0 || falsification_samples <= 0) {
        throw std::invalid_argument("SplitBudget: all limits must be positive");
    }
}

bool violates(const OutputSpec& spec, const Vec& output) {
    const double margin = spec_margin(spec, output);
    return spec.mode == OutputSpec::Mode::Prove ? margin > 0.0 : margin <= 0.0;
}

EnclosureCheck check_enclosure(const PolyZonotope& pz, const OutputSpec& spec) {
    spec.validate();
    if (spec.A.cols() != pz.dim()) {
        throw std::invalid_argument("check_enclosure: constraint dimension mismatch");
    }
    const PolyZonotope mapped = affine_map(spec.A, pz, -spec.b);
    const Box bounds = interval_enclosure(mapped);
    if (spec.mode == OutputSpec::Mode::Prove) {
        for (Eigen::Index i = 0; i < bounds.dim(); ++i) {
            if (bounds.u(i) > 0.0) {
                return EnclosureCheck::Inconclusive;
            }
        }
        return EnclosureCheck::Proved;
    }
    // avoid: one provably positive row separates the image from the unsafe set
    for (Eigen::Index i = 0; i < bounds.dim(); ++i) {
        if (bounds.l(i) > 0.0) {
            return EnclosureCheck::Proved;
        }
    }
    return EnclosureCheck::Inconclusive;
}

std::optional<Counterexample> falsify(const Network& net, const Box& input_box,
                                      const OutputSpec& spec, std::int64_t samples,
                                      std::uint64_t seed) {
    spec.validate();
    if (samples <= 0) {
        throw std::invalid_argument("falsify: sample count must be positive");
    }
    const Eigen::Index d = input_box.dim();
    std::mt19937_64 rng(seed);

    // prove mode looks for large margins, avoid mode for small ones
    const double sign = spec.mode == OutputSpec::Mode::Prove ? 1.0 : -1.0;
    Vec best;
    double best_score = -std::numeric_limits<double>::infinity();

    auto probe = [&](const Vec& x) -> bool {
        const Vec y = net.forward(x);
        const double score = sign * spec_margin(spec, y);
        if (score > best_score) {
            best_score = score;
            best = x;
        }
        return violates(spec, y);
    };

    // corners first (exhaustive when cheap), then uniform samples
    if (d <= 12) {
        const std::int64_t corners = std::int64_t{1} << d;
        for (std::int64_t mask = 0; mask < corners; ++mask) {
            Vec x(d);
            for (Eigen::Index i = 0; i < d; ++i) {
                x(i) = (mask >> i) & 1 ? input_box.u(i) : input_box.l(i);
            }
            if (probe(x)) {
                return Counterexample{x, net.forward(x)};
            }
        }
    }
    for (std::int64_t s = 0; s < samples; ++s) {
        const Vec x = random_point(input_box, rng);
        if (probe(x)) {
            return Counterexample{x, net.forward(x)};
        }
    }

    // coordinate descent on the most-violated constraint margin
    Vec x = best;
    constexpr int kPasses = 3;
    constexpr int kGrid = 9;
    for (int pass = 0; pass < kPasses; ++pass) {
        for (Eigen::Index i = 0; i < d; ++i) {
            double best_val = x(i);
            double best_local = sign * spec_margin(spec, net.forward(x));
            for (int g = 0; g < kGrid; ++g) {
                Vec trial = x;
                trial(i) = input_box.l(i) + (input_box.u(i) - input_box.l(i)) *
                                                static_cast<double>(g) /
                                                static_cast<double>(kGrid - 1);
                const double score = sign * spec_margin(spec, net.forward(trial));
                if (score > best_local) {
                    best_local = score;
                    best_val = trial(i);
                }
            }
            x(i) = best_val;
        }
        const Vec y = net.forward(x);
        if (violates(spec, y)) {
            return Counterexample{x, y};
        }
    }
    return std::nullopt;
}

Verdict verify(const Network& net, const Box& input_box, const OutputSpec& spec,
               const ApproxPolicy& policy, const SplitBudget& budget, std::uint64_t seed) {
    spec.validate();
    budget.validate();
    if (input_box.dim() != net.input_dim()) {
        throw std::invalid_argument("verify: input box dimension mismatch");
    }

    struct Item {
        Box box;
        std::int64_t depth;
        std::int64_t id;
        double width;
    };
    auto wider = [](const Item& a, const Item& b) {
        if (a.width != b.width) {
            return a.width < b.width;  // priority_queue pops the widest first
        }
        return a.id > b.id;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(wider)> queue(wider);

    std::int64_t next_id = 0;
    auto push = [&](Box box, std::int64_t depth) {
        const double width = box.dim() == 0 ? 0.0 : (box.u - box.l).maxCoeff();
        queue.push(Item{std::move(box), depth, next_id++, width});
    };
    push(input_box, 0);

    Verdict verdict;
    bool exhausted = false;
    while (!queue.empty()) {
        if (verdict.subproblems >= budget.max_subproblems) {
            exhausted = true;
            break;
        }
        const Item item = queue.top();
        queue.pop();
        ++verdict.subproblems;

        const auto [enclosure, trace] = image_enclosure(net, item.box, policy);
        if (check_enclosure(enclosure, spec) == EnclosureCheck::Proved) {
            continue;
        }

        const std::uint64_t sub_seed = seed + static_cast<std::uint64_t>(item.id) * 0x9e3779b9ULL;
        if (auto cex = falsify(net, item.box, spec, budget.falsification_samples, sub_seed)) {
            verdict.kind = Verdict::Kind::Falsified;
            verdict.counterexample = std::move(cex);
            return verdict;
        }

        if (item.depth >= budget.max_depth) {
            exhausted = true;
            continue;
        }
        Eigen::Index split = 0;
        (item.box.u - item.box.l).maxCoeff(&split);
        const double mid = 0.5 * (item.box.l(split) + item.box.u(split));
        Box left = item.box;
        Box right = item.box;
        left.u(split) = mid;
        right.l(split) = mid;
        push(std::move(left), item.depth + 1);
        push(std::move(right), item.depth + 1);
    }

    verdict.kind = exhausted ? Verdict::Kind::Unknown : Verdict::Kind::Verified;
    return verdict;
}

}  // namespace polyzono
