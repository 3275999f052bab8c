// pybind11 bindings exposing the main operations: polynomial-zonotope set
// arithmetic, network parsing and evaluation, image enclosure with witness
// replay, open-loop verification, and closed-loop reachability.

#include "polyzono/dynamics.hpp"
#include "polyzono/enclosure.hpp"
#include "polyzono/network.hpp"
#include "polyzono/pz.hpp"
#include "polyzono/reach.hpp"
#include "polyzono/serialization.hpp"
#include "polyzono/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>

namespace py = pybind11;
using namespace polyzono;

namespace {

Box box_from_bounds(const Vec& l, const Vec& u) { return Box(l, u); }

OutputSpec make_spec(const std::string& mode, const Mat& A, const Vec& b) {
    OutputSpec spec;
    if (mode == "prove") {
        spec.mode = OutputSpec::Mode::Prove;
    } else if (mode == "avoid") {
        spec.mode = OutputSpec::Mode::Avoid;
    } else {
        throw std::invalid_argument("spec mode must be 'prove' or 'avoid'");
    }
    spec.A = A;
    spec.b = b;
    spec.validate();
    return spec;
}

}  // namespace

PYBIND11_MODULE(_polyzono, m) {
    m.doc() = "Polynomial-zonotope image enclosures, neural-network verification, and "
              "closed-loop reachability";

    py::class_<PolyZonotope>(m, "PolyZonotope")
        .def(py::init<Vec, Mat, Mat, ExpMat>(), py::arg("c"), py::arg("G"), py::arg("GI"),
             py::arg("E"))
        .def_static(
            "from_box",
            [](const Vec& l, const Vec& u) { return PolyZonotope::from_box(Box(l, u)); },
            py::arg("l"), py::arg("u"))
        .def_property_readonly("c", &PolyZonotope::c)
        .def_property_readonly("G", &PolyZonotope::G)
        .def_property_readonly("GI", &PolyZonotope::GI)
        .def_property_readonly("E", &PolyZonotope::E)
        .def_property_readonly("dim", &PolyZonotope::dim)
        .def_property_readonly("num_dependent", &PolyZonotope::num_dependent)
        .def_property_readonly("num_independent", &PolyZonotope::num_independent)
        .def_property_readonly("num_factors", &PolyZonotope::num_factors)
        .def("order", &PolyZonotope::order);

    m.def(
        "evaluate",
        [](const PolyZonotope& pz, const Vec& alpha, const Vec& beta) {
            return evaluate(pz, FactorAssignment{alpha, beta});
        },
        py::arg("pz"), py::arg("alpha"), py::arg("beta"));
    m.def("affine_map", &affine_map, py::arg("A"), py::arg("pz"), py::arg("b"));
    m.def(
        "minkowski_sum_interval",
        [](const PolyZonotope& pz, const Vec& l, const Vec& u) {
            return minkowski_sum_interval(pz, Box(l, u));
        },
        py::arg("pz"), py::arg("l"), py::arg("u"));
    m.def("cartesian_product_dep", &cartesian_product_dep, py::arg("pz1"), py::arg("pz2"),
          py::arg("shared_beta") = 0);
    m.def(
        "interval_enclosure",
        [](const PolyZonotope& pz) {
            const Box b = interval_enclosure(pz);
            return py::make_tuple(b.l, b.u);
        },
        py::arg("pz"));
    m.def(
        "zonotope_enclosure",
        [](const PolyZonotope& pz) {
            const Zonotope z = zonotope_enclosure(pz);
            return py::make_tuple(z.center, z.generators);
        },
        py::arg("pz"));
    m.def("quadratic_map", &quadratic_map, py::arg("pz"), py::arg("a1"), py::arg("a2"),
          py::arg("a3"));
    m.def(
        "quadratic_map_witness",
        [](const PolyZonotope& pz, const Vec& alpha, const Vec& beta) {
            const FactorAssignment fa = quadratic_map_witness(pz, FactorAssignment{alpha, beta});
            return py::make_tuple(fa.alpha, fa.beta);
        },
        py::arg("pz"), py::arg("alpha"), py::arg("beta"));
    m.def(
        "reduce_order",
        [](const PolyZonotope& pz, double rho) { return reduce_order(pz, rho); }, py::arg("pz"),
        py::arg("rho"));
    m.def(
        "compact", [](const PolyZonotope& pz) { return compact(pz); }, py::arg("pz"));

    py::class_<Network>(m, "Network")
        .def_static("from_json", &parse_json_network, py::arg("text"))
        .def_static("from_nnet", &parse_nnet, py::arg("text"))
        .def_static("from_file", &load_network_file, py::arg("path"))
        .def("forward", &Network::forward, py::arg("x"))
        .def_property_readonly("input_dim", &Network::input_dim)
        .def_property_readonly("output_dim", &Network::output_dim)
        .def_property_readonly("num_layers", &Network::num_layers)
        .def("to_json", &serialize_network);

    py::class_<ApproxPolicy>(m, "ApproxPolicy")
        .def(py::init<>())
        .def_readwrite("regression_samples", &ApproxPolicy::regression_samples)
        .def_readwrite("sampling_precision", &ApproxPolicy::sampling_precision)
        .def_readwrite("reduction_order", &ApproxPolicy::reduction_order)
        .def_readwrite("compact_after_layer", &ApproxPolicy::compact_after_layer)
        .def("set_schemes", [](ApproxPolicy& p, const std::vector<std::string>& names) {
            p.layer_schemes.clear();
            for (const std::string& name : names) {
                p.layer_schemes.push_back(scheme_from_name(name));
            }
        });

    py::class_<EnclosureTrace>(m, "EnclosureTrace");

    m.def(
        "image_enclosure",
        [](const Network& net, const Vec& l, const Vec& u, const ApproxPolicy& policy) {
            auto [pz, trace] = image_enclosure(net, Box(l, u), policy);
            return py::make_tuple(std::move(pz), std::move(trace));
        },
        py::arg("net"), py::arg("l"), py::arg("u"), py::arg("policy") = ApproxPolicy{});
    m.def(
        "image_witness",
        [](const EnclosureTrace& trace, const Network& net, const Vec& x0) {
            const FactorAssignment fa = image_witness(trace, net, x0);
            return py::make_tuple(fa.alpha, fa.beta);
        },
        py::arg("trace"), py::arg("net"), py::arg("x0"));

    m.def(
        "verify",
        [](const Network& net, const Vec& l, const Vec& u, const std::string& mode, const Mat& A,
           const Vec& b, const ApproxPolicy& policy, std::int64_t max_subproblems,
           std::int64_t max_depth, std::int64_t samples, std::uint64_t seed) {
            SplitBudget budget;
            budget.max_subproblems = max_subproblems;
            budget.max_depth = max_depth;
            budget.falsification_samples = samples;
            const Verdict v =
                verify(net, Box(l, u), make_spec(mode, A, b), policy, budget, seed);
            py::dict out;
            out["verdict"] = v.kind == Verdict::Kind::Verified
                                 ? "verified"
                                 : (v.kind == Verdict::Kind::Falsified ? "falsified" : "unknown");
            out["subproblems"] = v.subproblems;
            if (v.counterexample) {
                out["counterexample_input"] = v.counterexample->input;
                out["counterexample_output"] = v.counterexample->output;
            }
            return out;
        },
        py::arg("net"), py::arg("l"), py::arg("u"), py::arg("mode"), py::arg("A"), py::arg("b"),
        py::arg("policy") = ApproxPolicy{}, py::arg("max_subproblems") = 1000,
        py::arg("max_depth") = 30, py::arg("samples") = 200, py::arg("seed") = 0);

    py::class_<ControlSetup>(m, "ControlSetup");
    py::class_<ReachResult>(m, "ReachResult")
        .def_readonly("time_points", &ReachResult::time_points)
        .def_readonly("time_intervals", &ReachResult::time_intervals)
        .def_readonly("control_sets", &ReachResult::control_sets)
        .def_readonly("nonlinear_propagator", &ReachResult::nonlinear_propagator);

    m.def(
        "load_setup",
        [](const std::string& path) {
            const std::string base = std::filesystem::path(path).parent_path().string();
            return setup_from_json(nlohmann::json::parse(read_text_file(path)), base);
        },
        py::arg("path"));
    m.def(
        "setup_from_json",
        [](const std::string& text, const std::string& base_dir) {
            return setup_from_json(nlohmann::json::parse(text), base_dir);
        },
        py::arg("text"), py::arg("base_dir") = std::string("."));
    m.def("reach", &reach, py::arg("setup"));
    m.def(
        "simulate",
        [](const ControlSetup& setup, const Vec& x0, std::uint64_t seed, double micro_step) {
            const Trajectory traj = simulate(setup, x0, seed, micro_step);
            Mat states(static_cast<Eigen::Index>(traj.states.size()),
                       traj.states.empty() ? 0 : traj.states.front().size());
            Vec times(static_cast<Eigen::Index>(traj.times.size()));
            for (std::size_t k = 0; k < traj.states.size(); ++k) {
                states.row(static_cast<Eigen::Index>(k)) = traj.states[k].transpose();
                times(static_cast<Eigen::Index>(k)) = traj.times[k];
            }
            return py::make_tuple(times, states);
        },
        py::arg("setup"), py::arg("x0"), py::arg("seed") = 0, py::arg("micro_step") = 1e-3);

    m.attr("__version__") = "0.1.0";
}
