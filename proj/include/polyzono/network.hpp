#pragma once

/**
 * @file network.hpp
 * @brief Feed-forward neural networks: representation, concrete evaluation,
 *        activation derivatives, and parsers for the JSON and .nnet formats.
 *
 * Networks are immutable after construction and safe for concurrent reads.
 */

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace polyzono {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Activation { Relu, Sigmoid, Tanh, Identity };

std::string activation_name(Activation act);
Activation activation_from_name(const std::string& name);

double act_eval(Activation act, double x);
/// First derivative; the ReLU subgradient at 0 is fixed to 0.
double act_d1(Activation act, double x);
double act_d2(Activation act, double x);

struct Layer {
    Mat W;
    Vec b;
    Activation act = Activation::Identity;
};

class Network {
  public:
    Network(Eigen::Index input_dim, std::vector<Layer> layers);

    Eigen::Index input_dim() const { return input_dim_; }
    Eigen::Index output_dim() const { return layers_.back().W.rows(); }
    std::size_t num_layers() const { return layers_.size(); }
    const Layer& layer(std::size_t i) const { return layers_.at(i); }
    const std::vector<Layer>& layers() const { return layers_; }

    Vec forward(const Vec& x) const;

  private:
    Eigen::Index input_dim_;
    std::vector<Layer> layers_;
};

/// Parses the JSON network schema
/// {"input_dim": n, "layers": [{"weights": [[..]], "bias": [..], "activation": "relu"}]}.
Network parse_json_network(const std::string& text);
std::string serialize_network(const Network& net);

/**
 * @brief Parses the .nnet text format.
 *
 * Input normalization (x - mean) / range is folded into a leading affine
 * layer, output denormalization into the last layer; hidden activations are
 * ReLU, the output layer identity. The symmetric-normalization flag is
 * rejected.
 */
Network parse_nnet(const std::string& text);

Network load_network_file(const std::string& path);

}  // namespace polyzono
