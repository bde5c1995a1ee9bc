#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dale/model.hpp"

namespace dale {

enum class Activation { tanh, softplus, identity };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

// Gradient of the network output with respect to every weight and bias,
// laid out like MlpModel's own parameters.
struct MlpParameterGradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  void set_zero();
};

// Fully connected network with a scalar linear output. `layer_widths` holds
// the input width, every hidden width, and the final 1. Hidden layers use a
// smooth activation so that second derivatives are well defined.
class MlpModel final : public DifferentiableModel {
 public:
  // Weights drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  MlpModel(std::vector<std::size_t> layer_widths, Activation activation, std::uint64_t seed);
  // weights[l] is (widths[l+1] x widths[l]), row-major; biases[l] has widths[l+1].
  MlpModel(std::vector<std::size_t> layer_widths, Activation activation,
           std::vector<std::vector<double>> weights, std::vector<std::vector<double>> biases);

  std::size_t dim() const override { return widths_.front(); }
  std::string name() const override { return "mlp"; }

  const std::vector<std::size_t>& layer_widths() const noexcept { return widths_; }
  Activation activation() const noexcept { return activation_; }
  std::size_t num_layers() const noexcept { return weights_.size(); }
  std::size_t num_parameters() const;
  const Eigen::MatrixXd& weight(std::size_t layer) const { return weights_.at(layer); }
  const Eigen::VectorXd& bias(std::size_t layer) const { return biases_.at(layer); }

  // Training support: forward + reverse sweep over the parameters. Adds
  // scale(output) * d(output)/d(theta) into `grad` and returns the output.
  // Does not touch the evaluation counters.
  double accumulate_parameter_gradient(std::span<const double> x,
                                       const std::function<double(double)>& scale,
                                       MlpParameterGradient& grad) const;
  MlpParameterGradient zero_gradient() const;
  // theta <- theta + step (elementwise, same layout).
  void apply_update(const MlpParameterGradient& step);

 protected:
  double do_value(std::span<const double> x) const override;
  void do_gradient(std::span<const double> x, std::span<double> out) const override;
  double do_second_derivative(std::span<const double> x, std::size_t l,
                              std::size_t m) const override;
  void do_value_batch(const Matrix& points, std::span<double> out) const override;

 private:
  struct Tape {
    std::vector<Eigen::VectorXd> pre;   // z per layer
    std::vector<Eigen::VectorXd> post;  // a per layer, post[0] = input
  };

  void validate() const;
  bool is_hidden(std::size_t layer) const { return layer + 1 < weights_.size(); }
  void forward(std::span<const double> x, Tape& tape) const;
  // Adjoints of the pre-activations, index-aligned with the layers.
  std::vector<Eigen::VectorXd> backward(const Tape& tape) const;

  std::vector<std::size_t> widths_;
  Activation activation_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

}  // namespace dale
