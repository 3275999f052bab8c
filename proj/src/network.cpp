#include "polyzono/network.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polyzono {

namespace {

using json = nlohmann::json;

double sigmoid_scalar(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Mat json_to_matrix(const json& rows, const char* what) {
    if (!rows.is_array() || rows.empty()) {
        throw std::invalid_argument(std::string("network JSON: ") + what +
                                    " must be a non-empty array of rows");
    }
    const std::size_t ncols = rows.front().size();
    Mat M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != ncols) {
            throw std::invalid_argument(std::string("network JSON: ragged rows in ") + what);
        }
        for (std::size_t j = 0; j < ncols; ++j) {
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j].get<double>();
        }
    }
    return M;
}

// pulls every numeric token out of the remaining .nnet body
class NumberStream {
  public:
    explicit NumberStream(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("//", 0) == 0) {
                continue;
            }
            for (char& ch : line) {
                if (ch == ',') {
                    ch = ' ';
                }
            }
            std::istringstream ls(line);
            double v = 0.0;
            while (ls >> v) {
                values_.push_back(v);
            }
        }
    }

    double next(const char* what) {
        if (pos_ >= values_.size()) {
            throw std::invalid_argument(std::string(".nnet: file truncated while reading ") + what);
        }
        return values_[pos_++];
    }

  private:
    std::vector<double> values_;
    std::size_t pos_ = 0;
};

std::vector<double> parse_csv_line(std::istream& in, const char* what) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("//", 0) == 0) {
            continue;
        }
        for (char& ch : line) {
            if (ch == ',') {
                ch = ' ';
            }
        }
        std::istringstream ls(line);
        std::vector<double> out;
        double v = 0.0;
        while (ls >> v) {
            out.push_back(v);
        }
        if (!out.empty()) {
            return out;
        }
    }
    throw std::invalid_argument(std::string(".nnet: missing header line for ") + what);
}

}  // namespace

std::string activation_name(Activation act) {
    switch (act) {
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation name: " + name);
}

double act_eval(Activation act, double x) {
    switch (act) {
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Sigmoid: return sigmoid_scalar(x);
        case Activation::Tanh: return std::tanh(x);
        case Activation::Identity: return x;
    }
    return x;
}

double act_d1(Activation act, double x) {
    switch (act) {
        case Activation::Relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::Sigmoid: {
            const double s = sigmoid_scalar(x);
            return s * (1.0 - s);
        }
        case Activation::Tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

double act_d2(Activation act, double x) {
    switch (act) {
        case Activation::Relu: return 0.0;
        case Activation::Sigmoid: {
            const double s = sigmoid_scalar(x);
            return s * (1.0 - s) * (1.0 - 2.0 * s);
        }
        case Activation::Tanh: {
            const double t = std::tanh(x);
            return -2.0 * t * (1.0 - t * t);
        }
        case Activation::Identity: return 0.0;
    }
    return 0.0;
}

Network::Network(Eigen::Index input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
    if (layers_.empty()) {
        throw std::invalid_argument("Network: at least one layer required");
    }
    Eigen::Index prev = input_dim_;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& L = layers_[i];
        if (L.W.cols() != prev) {
            throw std::invalid_argument("Network: layer " + std::to_string(i) +
                                        " input width does not chain");
        }
        if (L.W.rows() != L.b.size()) {
            throw std::invalid_argument("Network: layer " + std::to_string(i) +
                                        " bias length does not match weight rows");
        }
        prev = L.W.rows();
    }
}

Vec Network::forward(const Vec& x) const {
    if (x.size() != input_dim_) {
        throw std::invalid_argument("Network::forward: input dimension mismatch");
    }
    Vec y = x;
    for (const Layer& L : layers_) {
        Vec z = L.W * y + L.b;
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            z(j) = act_eval(L.act, z(j));
        }
        y = std::move(z);
    }
    return y;
}

Network parse_json_network(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("network JSON: ") + e.what());
    }
    if (!doc.contains("input_dim") || !doc.contains("layers")) {
        throw std::invalid_argument("network JSON: missing input_dim or layers");
    }
    const Eigen::Index input_dim = doc["input_dim"].get<Eigen::Index>();
    if (input_dim <= 0) {
        throw std::invalid_argument("network JSON: input_dim must be positive");
    }
    std::vector<Layer> layers;
    for (const json& jl : doc["layers"]) {
        Layer L;
        L.W = json_to_matrix(jl.at("weights"), "weights");
        const json& bias = jl.at("bias");
        L.b.resize(static_cast<Eigen::Index>(bias.size()));
        for (std::size_t i = 0; i < bias.size(); ++i) {
            L.b(static_cast<Eigen::Index>(i)) = bias[i].get<double>();
        }
        L.act = activation_from_name(jl.at("activation").get<std::string>());
        layers.push_back(std::move(L));
    }
    return Network(input_dim, std::move(layers));
}

std::string serialize_network(const Network& net) {
    nlohmann::ordered_json doc;
    doc["input_dim"] = net.input_dim();
    doc["layers"] = nlohmann::ordered_json::array();
    for (const Layer& L : net.layers()) {
        nlohmann::ordered_json jl;
        jl["weights"] = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (Eigen::Index j = 0; j < L.W.cols(); ++j) {
                row.push_back(L.W(i, j));
            }
            jl["weights"].push_back(std::move(row));
        }
        jl["bias"] = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < L.b.size(); ++i) {
            jl["bias"].push_back(L.b(i));
        }
        jl["activation"] = activation_name(L.act);
        doc["layers"].push_back(std::move(jl));
    }
    return doc.dump(2);
}

Network parse_nnet(const std::string& text) {
    std::istringstream in(text);

    const std::vector<double> counts = parse_csv_line(in, "layer counts");
    if (counts.size() < 4) {
        throw std::invalid_argument(".nnet: header must list numLayers, inputSize, outputSize, "
                                    "maxLayerSize");
    }
    const auto num_layers = static_cast<Eigen::Index>(counts[0]);
    const auto input_size = static_cast<Eigen::Index>(counts[1]);
    const auto output_size = static_cast<Eigen::Index>(counts[2]);
    if (num_layers < 1 || input_size < 1 || output_size < 1) {
        throw std::invalid_argument(".nnet: non-positive size in header");
    }

    const std::vector<double> sizes = parse_csv_line(in, "layer sizes");
    if (sizes.size() != static_cast<std::size_t>(num_layers) + 1) {
        throw std::invalid_argument(".nnet: layer size line count mismatch");
    }
    std::vector<Eigen::Index> v(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        v[i] = static_cast<Eigen::Index>(sizes[i]);
    }
    if (v.front() != input_size || v.back() != output_size) {
        throw std::invalid_argument(".nnet: layer sizes disagree with header");
    }

    const std::vector<double> symmetric = parse_csv_line(in, "symmetric flag");
    if (symmetric.empty() || symmetric[0] != 0.0) {
        throw std::invalid_argument(".nnet: symmetric normalization is not supported");
    }

    const std::vector<double> mins = parse_csv_line(in, "input minimums");
    const std::vector<double> maxes = parse_csv_line(in, "input maximums");
    const std::vector<double> means = parse_csv_line(in, "normalization means");
    const std::vector<double> ranges = parse_csv_line(in, "normalization ranges");
    if (mins.size() != static_cast<std::size_t>(input_size) ||
        maxes.size() != static_cast<std::size_t>(input_size)) {
        throw std::invalid_argument(".nnet: input bound line count mismatch");
    }
    if (means.size() != static_cast<std::size_t>(input_size) + 1 ||
        ranges.size() != static_cast<std::size_t>(input_size) + 1) {
        throw std::invalid_argument(".nnet: normalization line count mismatch");
    }
    for (double r : ranges) {
        if (r == 0.0) {
            throw std::invalid_argument(".nnet: zero normalization range");
        }
    }

    NumberStream numbers(in);
    std::vector<Layer> layers;

    // leading affine layer realizes (x - mean) / range
    Layer norm;
    norm.W = Mat::Zero(input_size, input_size);
    norm.b = Vec::Zero(input_size);
    for (Eigen::Index i = 0; i < input_size; ++i) {
        norm.W(i, i) = 1.0 / ranges[static_cast<std::size_t>(i)];
        norm.b(i) = -means[static_cast<std::size_t>(i)] / ranges[static_cast<std::size_t>(i)];
    }
    norm.act = Activation::Identity;
    layers.push_back(std::move(norm));

    for (Eigen::Index k = 0; k < num_layers; ++k) {
        Layer L;
        L.W.resize(v[static_cast<std::size_t>(k) + 1], v[static_cast<std::size_t>(k)]);
        for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
            for (Eigen::Index j = 0; j < L.W.cols(); ++j) {
                L.W(i, j) = numbers.next("weights");
            }
        }
        L.b.resize(L.W.rows());
        for (Eigen::Index i = 0; i < L.b.size(); ++i) {
            L.b(i) = numbers.next("biases");
        }
        L.act = (k + 1 < num_layers) ? Activation::Relu : Activation::Identity;
        layers.push_back(std::move(L));
    }

    // output denormalization y * range + mean folds into the last layer
    const double out_range = ranges.back();
    const double out_mean = means.back();
    layers.back().W *= out_range;
    layers.back().b = out_range * layers.back().b + Vec::Constant(output_size, out_mean);

    return Network(input_size, std::move(layers));
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open network file: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".nnet") {
        return parse_nnet(buf.str());
    }
    return parse_json_network(buf.str());
}

}  // namespace polyzono
