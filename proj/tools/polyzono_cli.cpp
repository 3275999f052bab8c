// Command-line front end: image enclosure, open-loop verification,
// closed-loop reachability, simulation, and SVG plotting.
//
// Exit codes: 0 success / property proved, 1 specification falsified,
// 2 file or input errors, 3 inconclusive (budget exhausted / not proved),
// 4 propagator divergence.

#include "polyzono/enclosure.hpp"
#include "polyzono/network.hpp"
#include "polyzono/reach.hpp"
#include "polyzono/serialization.hpp"
#include "polyzono/svg.hpp"
#include "polyzono/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>

namespace {

using namespace polyzono;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct CommonArgs {
    std::uint64_t seed = 0;
    std::string policy_file;
    std::string out_dir = ".";
    std::string report_file;
    bool svg = false;
    bool timings = false;
    std::string dims = "0,1";
};

class PhaseTimer {
  public:
    explicit PhaseTimer(bool enabled) : enabled_(enabled) {}

    template <typename F>
    auto run(const std::string& name, F&& f) {
        const auto start = std::chrono::steady_clock::now();
        auto result = f();
        if (enabled_) {
            const auto end = std::chrono::steady_clock::now();
            timings_[name] =
                std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
        }
        return result;
    }

    OrderedJson json() const {
        OrderedJson j = OrderedJson::object();
        for (const auto& [name, ms] : timings_) {
            j[name] = ms;
        }
        return j;
    }

  private:
    bool enabled_;
    std::map<std::string, long long> timings_;
};

std::pair<Eigen::Index, Eigen::Index> parse_dims(const std::string& dims) {
    const auto comma = dims.find(',');
    if (comma == std::string::npos) {
        throw std::invalid_argument("--dims expects two comma-separated indices");
    }
    return {static_cast<Eigen::Index>(std::stoll(dims.substr(0, comma))),
            static_cast<Eigen::Index>(std::stoll(dims.substr(comma + 1)))};
}

ApproxPolicy load_policy(const std::string& path) {
    if (path.empty()) {
        return ApproxPolicy{};
    }
    return policy_from_json(nlohmann::json::parse(read_text_file(path)));
}

OrderedJson base_report(const std::string& command, const CommonArgs& args) {
    OrderedJson report;
    report["tool"] = {{"name", "polyzono"}, {"version", kVersion}};
    report["command"] = command;
    report["seed"] = args.seed;
    return report;
}

OrderedJson pz_stats(const PolyZonotope& pz) {
    return OrderedJson{{"n", pz.dim()},
                       {"h", pz.num_dependent()},
                       {"q", pz.num_independent()},
                       {"p", pz.num_factors()}};
}

void finish_report(OrderedJson& report, const CommonArgs& args, const PhaseTimer& timer,
                   const std::string& default_name) {
    if (args.timings) {
        report["timings_ms"] = timer.json();
    }
    std::string path = args.report_file;
    if (path.empty()) {
        path = (fs::path(args.out_dir) / default_name).string();
    }
    fs::create_directories(fs::path(path).parent_path().empty()
                               ? "."
                               : fs::path(path).parent_path().string());
    write_text_file(path, report.dump(2) + "\n");
}

int cmd_enclose(const CommonArgs& args, const std::string& net_file,
                const std::string& box_file) {
    PhaseTimer timer(args.timings);
    const Network net = timer.run("parse", [&] { return load_network_file(net_file); });
    const Box box = box_from_json(nlohmann::json::parse(read_text_file(box_file)));
    const ApproxPolicy policy = load_policy(args.policy_file);

    auto [pz, trace] =
        timer.run("enclose", [&] { return image_enclosure(net, box, policy); });

    fs::create_directories(args.out_dir);
    write_text_file((fs::path(args.out_dir) / "enclosure.json").string(),
                    pz_to_json(pz).dump(2) + "\n");

    OrderedJson report = base_report("enclose", args);
    report["network"] = net_file;
    report["input_box"] = box_to_json(box);
    report["policy"] = policy_to_json(policy);
    report["output_set"] = pz_stats(pz);
    report["layers"] = OrderedJson::array();
    for (const LayerTrace& lt : trace.layers) {
        report["layers"].push_back(OrderedJson{{"quadratic", lt.quadratic_mode},
                                               {"h", lt.h_out},
                                               {"q", lt.q_out}});
    }
    if (args.svg) {
        const auto [dx, dy] = parse_dims(args.dims);
        PlotOptions opts;
        opts.dim_x = dx;
        opts.dim_y = dy;
        opts.seed = args.seed;
        write_text_file((fs::path(args.out_dir) / "enclosure.svg").string(),
                        render_pz_svg(pz, opts));
    }
    finish_report(report, args, timer, "enclose_report.json");
    return 0;
}

int cmd_verify(const CommonArgs& args, const std::string& net_file, const std::string& spec_file,
               const SplitBudget& budget) {
    PhaseTimer timer(args.timings);
    const Network net = load_network_file(net_file);
    const SpecFile spec = spec_from_json(nlohmann::json::parse(read_text_file(spec_file)));
    const ApproxPolicy policy = load_policy(args.policy_file);

    const Verdict verdict = timer.run("verify", [&] {
        return verify(net, spec.input_box, spec.spec, policy, budget, args.seed);
    });

    OrderedJson report = base_report("verify", args);
    report["network"] = net_file;
    report["spec"] = spec_file;
    report["budget"] = {{"max_subproblems", budget.max_subproblems},
                        {"max_depth", budget.max_depth},
                        {"falsification_samples", budget.falsification_samples}};
    report["subproblems"] = verdict.subproblems;
    switch (verdict.kind) {
        case Verdict::Kind::Verified: report["verdict"] = "verified"; break;
        case Verdict::Kind::Falsified: report["verdict"] = "falsified"; break;
        case Verdict::Kind::Unknown: report["verdict"] = "unknown"; break;
    }
    if (verdict.counterexample) {
        OrderedJson cex;
        cex["input"] = OrderedJson::array();
        for (Eigen::Index i = 0; i < verdict.counterexample->input.size(); ++i) {
            cex["input"].push_back(verdict.counterexample->input(i));
        }
        cex["output"] = OrderedJson::array();
        for (Eigen::Index i = 0; i < verdict.counterexample->output.size(); ++i) {
            cex["output"].push_back(verdict.counterexample->output(i));
        }
        report["counterexample"] = std::move(cex);
    }
    finish_report(report, args, timer, "verify_report.json");

    switch (verdict.kind) {
        case Verdict::Kind::Verified: return 0;
        case Verdict::Kind::Falsified: return 1;
        case Verdict::Kind::Unknown: return 3;
    }
    return 3;
}

int cmd_reach(const CommonArgs& args, const std::string& setup_file) {
    PhaseTimer timer(args.timings);
    const std::string base_dir = fs::path(setup_file).parent_path().string();
    ControlSetup setup =
        setup_from_json(nlohmann::json::parse(read_text_file(setup_file)), base_dir);
    if (!args.policy_file.empty()) {
        setup.policy = load_policy(args.policy_file);
    }

    const ReachResult result = timer.run("reach", [&] { return reach(setup); });
    const SetCheckReport checks = check_sets(result, setup.goal, setup.avoid);

    fs::create_directories(args.out_dir);
    write_text_file((fs::path(args.out_dir) / "reach.json").string(),
                    reach_result_to_json(result).dump(2) + "\n");

    OrderedJson report = base_report("reach", args);
    report["setup"] = setup_file;
    report["steps"] = static_cast<std::int64_t>(result.time_intervals.size());
    report["deviations"] = OrderedJson::array();
    if (result.nonlinear_propagator) {
        report["deviations"].push_back(
            "nonlinear plant propagated by first-order conservative linearization");
    }
    report["final_set"] = pz_stats(result.time_points.back());
    if (checks.goal_proved.has_value()) {
        report["goal_proved"] = *checks.goal_proved;
    }
    if (!checks.avoid_proved.empty()) {
        report["avoid_proved"] = checks.avoid_proved;
    }
    if (args.svg) {
        const auto [dx, dy] = parse_dims(args.dims);
        std::vector<Box> boxes;
        for (const PolyZonotope& pz : result.time_intervals) {
            boxes.push_back(interval_enclosure(pz));
        }
        write_text_file((fs::path(args.out_dir) / "reach.svg").string(),
                        render_boxes_svg(boxes, dx, dy));
    }
    finish_report(report, args, timer, "reach_report.json");

    const bool has_checks = setup.goal.has_value() || !setup.avoid.empty();
    if (has_checks && !checks.all_proved) {
        return 3;
    }
    return 0;
}

int cmd_simulate(const CommonArgs& args, const std::string& setup_file, int samples,
                 double micro_step) {
    PhaseTimer timer(args.timings);
    const std::string base_dir = fs::path(setup_file).parent_path().string();
    const ControlSetup setup =
        setup_from_json(nlohmann::json::parse(read_text_file(setup_file)), base_dir);

    const Box x0_box = interval_enclosure(setup.X0);
    std::mt19937_64 rng(args.seed);
    auto uniform01 = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    OrderedJson traj_doc;
    traj_doc["trajectories"] = OrderedJson::array();
    for (int s = 0; s < samples; ++s) {
        Vec x0(x0_box.dim());
        for (Eigen::Index i = 0; i < x0_box.dim(); ++i) {
            x0(i) = x0_box.l(i) + (x0_box.u(i) - x0_box.l(i)) * uniform01();
        }
        const Trajectory traj = simulate(setup, x0, rng(), micro_step);
        OrderedJson jt;
        jt["times"] = OrderedJson::array();
        jt["states"] = OrderedJson::array();
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            jt["times"].push_back(traj.times[k]);
            OrderedJson st = OrderedJson::array();
            for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) {
                st.push_back(traj.states[k](i));
            }
            jt["states"].push_back(std::move(st));
        }
        traj_doc["trajectories"].push_back(std::move(jt));
    }
    fs::create_directories(args.out_dir);
    write_text_file((fs::path(args.out_dir) / "trajectories.json").string(),
                    traj_doc.dump(2) + "\n");

    OrderedJson report = base_report("simulate", args);
    report["setup"] = setup_file;
    report["samples"] = samples;
    report["micro_step"] = micro_step;
    finish_report(report, args, timer, "simulate_report.json");
    return 0;
}

int cmd_plot(const CommonArgs& args, const std::string& set_file, const std::string& reach_file,
             int grid, const std::string& out_svg) {
    PhaseTimer timer(args.timings);
    const auto [dx, dy] = parse_dims(args.dims);
    std::string svg;
    if (!set_file.empty()) {
        const PolyZonotope pz = pz_from_json(nlohmann::json::parse(read_text_file(set_file)));
        PlotOptions opts;
        opts.dim_x = dx;
        opts.dim_y = dy;
        opts.grid = grid;
        opts.seed = args.seed;
        svg = render_pz_svg(pz, opts);
    } else if (!reach_file.empty()) {
        const nlohmann::json doc = nlohmann::json::parse(read_text_file(reach_file));
        std::vector<Box> boxes;
        for (const nlohmann::json& jpz : doc.at("time_intervals")) {
            boxes.push_back(interval_enclosure(pz_from_json(jpz)));
        }
        svg = render_boxes_svg(boxes, dx, dy);
    } else {
        throw std::invalid_argument("plot: provide --set or --reach");
    }
    write_text_file(out_svg, svg);

    OrderedJson report = base_report("plot", args);
    report["output"] = out_svg;
    finish_report(report, args, timer, "plot_report.json");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polyzono: neural-network image enclosures, open-loop verification, and "
                 "closed-loop reachability with polynomial zonotopes"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string net_file, box_file, spec_file, setup_file, set_file, reach_file;
    std::string out_svg = "plot.svg";
    SplitBudget budget;
    int samples = 10;
    double micro_step = 1e-3;
    int grid = 200;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", args.seed, "random seed");
        cmd->add_option("--policy", args.policy_file, "approximation policy JSON file");
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--report", args.report_file, "report JSON path");
        cmd->add_flag("--svg", args.svg, "render an SVG alongside the results");
        cmd->add_flag("--timings", args.timings, "include wall-clock timings in the report");
        cmd->add_option("--dims", args.dims, "projection dimensions i,j for SVG output");
    };

    CLI::App* enclose = app.add_subcommand("enclose", "enclose a network image");
    enclose->add_option("--net", net_file, "network file (.json or .nnet)")->required();
    enclose->add_option("--box", box_file, "input box JSON file")->required();
    add_common(enclose);

    CLI::App* verify_cmd = app.add_subcommand("verify", "verify an output specification");
    verify_cmd->add_option("--net", net_file, "network file (.json or .nnet)")->required();
    verify_cmd->add_option("--spec", spec_file, "specification JSON file")->required();
    verify_cmd->add_option("--max-subproblems", budget.max_subproblems, "split budget");
    verify_cmd->add_option("--max-depth", budget.max_depth, "maximum split depth");
    verify_cmd->add_option("--samples", budget.falsification_samples,
                           "falsification samples per subproblem");
    add_common(verify_cmd);

    CLI::App* reach_cmd = app.add_subcommand("reach", "closed-loop reachable sets");
    reach_cmd->add_option("--setup", setup_file, "reachability setup JSON file")->required();
    add_common(reach_cmd);

    CLI::App* sim_cmd = app.add_subcommand("simulate", "sample closed-loop trajectories");
    sim_cmd->add_option("--setup", setup_file, "reachability setup JSON file")->required();
    sim_cmd->add_option("--samples", samples, "number of trajectories");
    sim_cmd->add_option("--micro-step", micro_step, "integration micro step");
    add_common(sim_cmd);

    CLI::App* plot_cmd = app.add_subcommand("plot", "render a 2-D projection as SVG");
    plot_cmd->add_option("--set", set_file, "polynomial zonotope JSON file");
    plot_cmd->add_option("--reach", reach_file, "reach result JSON file");
    plot_cmd->add_option("--grid", grid, "samples per dependent-factor axis");
    plot_cmd->add_option("--out-svg", out_svg, "output SVG path");
    add_common(plot_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (enclose->parsed()) {
            return cmd_enclose(args, net_file, box_file);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(args, net_file, spec_file, budget);
        }
        if (reach_cmd->parsed()) {
            return cmd_reach(args, setup_file);
        }
        if (sim_cmd->parsed()) {
            return cmd_simulate(args, setup_file, samples, micro_step);
        }
        if (plot_cmd->parsed()) {
            return cmd_plot(args, set_file, reach_file, grid, out_svg);
        }
    } catch (const polyzono::PropagatorDivergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
