#include "polyzono/serialization.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polyzono {

namespace {

using nlohmann::json;

OrderedJson matrix_flat(const Mat& M) {
    OrderedJson arr = OrderedJson::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            arr.push_back(M(i, j));
        }
    }
    return arr;
}

OrderedJson expmat_flat(const ExpMat& M) {
    OrderedJson arr = OrderedJson::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            arr.push_back(M(i, j));
        }
    }
    return arr;
}

OrderedJson vec_to_json(const Vec& v) {
    OrderedJson arr = OrderedJson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v(i));
    }
    return arr;
}

Vec vec_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) {
        throw std::invalid_argument(std::string("expected array for ") + what);
    }
    Vec v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return v;
}

Mat matrix_from_flat(const json& arr, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols) {
        throw std::invalid_argument(std::string("flat matrix size mismatch for ") + what);
    }
    Mat M(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            M(i, j) = arr[k++].get<double>();
        }
    }
    return M;
}

Mat matrix_from_rows(const json& rows, const char* what) {
    if (!rows.is_array()) {
        throw std::invalid_argument(std::string("expected array of rows for ") + what);
    }
    if (rows.empty()) {
        return Mat(0, 0);
    }
    const std::size_t ncols = rows.front().size();
    Mat M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != ncols) {
            throw std::invalid_argument(std::string("ragged rows in ") + what);
        }
        for (std::size_t j = 0; j < ncols; ++j) {
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
        }
    }
    return M;
}

}  // namespace

OrderedJson pz_to_json(const PolyZonotope& pz) {
    OrderedJson j;
    j["dims"] = {{"n", pz.dim()},
                 {"h", pz.num_dependent()},
                 {"q", pz.num_independent()},
                 {"p", pz.num_factors()}};
    j["c"] = vec_to_json(pz.c());
    j["G"] = matrix_flat(pz.G());
    j["GI"] = matrix_flat(pz.GI());
    j["E"] = expmat_flat(pz.E());
    return j;
}

PolyZonotope pz_from_json(const json& j) {
    const auto n = j.at("dims").at("n").get<Eigen::Index>();
    const auto h = j.at("dims").at("h").get<Eigen::Index>();
    const auto q = j.at("dims").at("q").get<Eigen::Index>();
    const auto p = j.at("dims").at("p").get<Eigen::Index>();
    Vec c = vec_from_json(j.at("c"), "c");
    if (c.size() != n) {
        throw std::invalid_argument("polynomial zonotope JSON: centre length mismatch");
    }
    Mat G = matrix_from_flat(j.at("G"), n, h, "G");
    Mat GI = matrix_from_flat(j.at("GI"), n, q, "GI");
    const json& earr = j.at("E");
    if (static_cast<Eigen::Index>(earr.size()) != p * h) {
        throw std::invalid_argument("polynomial zonotope JSON: exponent size mismatch");
    }
    ExpMat E(p, h);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index jj = 0; jj < h; ++jj) {
            E(i, jj) = earr[k++].get<std::int64_t>();
        }
    }
    return PolyZonotope(std::move(c), std::move(G), std::move(GI), std::move(E));
}

OrderedJson box_to_json(const Box& box) {
    OrderedJson j;
    j["l"] = vec_to_json(box.l);
    j["u"] = vec_to_json(box.u);
    return j;
}

Box box_from_json(const json& j) {
    return Box(vec_from_json(j.at("l"), "l"), vec_from_json(j.at("u"), "u"));
}

SpecFile spec_from_json(const json& j) {
    SpecFile file;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "prove") {
        file.spec.mode = OutputSpec::Mode::Prove;
    } else if (mode == "avoid") {
        file.spec.mode = OutputSpec::Mode::Avoid;
    } else {
        throw std::invalid_argument("spec JSON: mode must be 'prove' or 'avoid'");
    }
    file.spec.A = matrix_from_rows(j.at("A"), "A");
    file.spec.b = vec_from_json(j.at("b"), "b");
    file.spec.validate();
    file.input_box = box_from_json(j.at("input_box"));
    return file;
}

OrderedJson policy_to_json(const ApproxPolicy& policy) {
    OrderedJson j;
    if (policy.layer_schemes.empty()) {
        j["schemes"] = "default";
    } else {
        OrderedJson arr = OrderedJson::array();
        for (Scheme s : policy.layer_schemes) {
            arr.push_back(scheme_name(s));
        }
        j["schemes"] = std::move(arr);
    }
    j["regression_samples"] = policy.regression_samples;
    j["sampling_precision"] = policy.sampling_precision;
    j["reduction_order"] = policy.reduction_order;
    j["compact"] = policy.compact_after_layer;
    return j;
}

ApproxPolicy policy_from_json(const json& j) {
    ApproxPolicy policy;
    if (j.contains("schemes") && j["schemes"].is_array()) {
        for (const json& s : j["schemes"]) {
            policy.layer_schemes.push_back(scheme_from_name(s.get<std::string>()));
        }
    }
    if (j.contains("regression_samples")) {
        policy.regression_samples = j["regression_samples"].get<int>();
    }
    if (j.contains("sampling_precision")) {
        policy.sampling_precision = j["sampling_precision"].get<double>();
    }
    if (j.contains("reduction_order")) {
        policy.reduction_order = j["reduction_order"].get<double>();
    }
    if (j.contains("compact")) {
        policy.compact_after_layer = j["compact"].get<bool>();
    }
    policy.validate();
    return policy;
}

ControlSetup setup_from_json(const json& j, const std::string& base_dir) {
    Network controller = [&]() {
        const json& jc = j.at("controller");
        if (jc.is_string()) {
            std::string path = jc.get<std::string>();
            if (!path.empty() && path.front() != '/' && !base_dir.empty()) {
                path = base_dir + "/" + path;
            }
            return load_network_file(path);
        }
        return parse_json_network(jc.dump());
    }();

    PolyZonotope x0 = [&]() {
        const json& jx = j.at("X0");
        if (jx.contains("dims")) {
            return pz_from_json(jx);
        }
        return PolyZonotope::from_box(box_from_json(jx));
    }();

    ControlSetup setup(std::move(controller), std::move(x0));

    const json& jp = j.at("plant");
    if (jp.contains("linear")) {
        LinearPlant lp;
        lp.A = matrix_from_rows(jp["linear"].at("A"), "plant A");
        lp.B = matrix_from_rows(jp["linear"].at("B"), "plant B");
        if (jp["linear"].contains("E")) {
            lp.Ew = matrix_from_rows(jp["linear"]["E"], "plant E");
        } else {
            lp.Ew = Mat(lp.A.rows(), 0);
        }
        if (lp.Ew.size() == 0) {
            lp.Ew = Mat(lp.A.rows(), 0);
        }
        setup.linear = std::move(lp);
    } else if (jp.contains("expressions")) {
        std::vector<std::string> exprs;
        for (const json& e : jp["expressions"]) {
            exprs.push_back(e.get<std::string>());
        }
        const auto m = jp.value("input_dim", static_cast<Eigen::Index>(0));
        const auto r = jp.value("disturbance_dim", static_cast<Eigen::Index>(0));
        setup.nonlinear = Plant::parse(exprs, m, r);
    } else {
        throw std::invalid_argument("setup JSON: plant must be 'linear' or 'expressions'");
    }

    if (j.contains("W")) {
        setup.W = box_from_json(j["W"]);
    } else {
        setup.W = Box(Vec(0), Vec(0));
    }
    setup.dt = j.at("dt").get<double>();
    setup.tF = j.at("tF").get<double>();
    if (j.contains("policy")) {
        setup.policy = policy_from_json(j["policy"]);
    }
    if (j.contains("propagator")) {
        const json& pr = j["propagator"];
        setup.prop.taylor_order = pr.value("taylor_order", 12);
        setup.prop.substeps = pr.value("substeps", 4);
        setup.prop.max_refine = pr.value("max_refine", 10);
    }
    if (j.contains("goal")) {
        setup.goal = box_from_json(j["goal"]);
    }
    if (j.contains("avoid")) {
        for (const json& ja : j["avoid"]) {
            HalfspaceSet hs;
            hs.A = matrix_from_rows(ja.at("A"), "avoid A");
            hs.b = vec_from_json(ja.at("b"), "avoid b");
            setup.avoid.push_back(std::move(hs));
        }
    }
    if (j.contains("state_reduction_order")) {
        setup.state_reduction_order = j["state_reduction_order"].get<double>();
    }
    setup.validate();
    return setup;
}

OrderedJson reach_result_to_json(const ReachResult& result) {
    OrderedJson j;
    j["time_points"] = OrderedJson::array();
    for (const PolyZonotope& pz : result.time_points) {
        j["time_points"].push_back(pz_to_json(pz));
    }
    j["time_intervals"] = OrderedJson::array();
    for (const PolyZonotope& pz : result.time_intervals) {
        j["time_intervals"].push_back(pz_to_json(pz));
    }
    j["control_sets"] = OrderedJson::array();
    for (const PolyZonotope& pz : result.control_sets) {
        j["control_sets"].push_back(pz_to_json(pz));
    }
    j["nonlinear_propagator"] = result.nonlinear_propagator;
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path);
    }
    out << content;
}

}  // namespace polyzono
