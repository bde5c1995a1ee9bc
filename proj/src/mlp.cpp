#include "dale/mlp.hpp"

#include <cmath>

#include "dale/errors.hpp"
#include "dale/rng.hpp"

namespace dale {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double act(Activation a, double z) {
  switch (a) {
    case Activation::tanh: return std::tanh(z);
    case Activation::softplus: return z > 30.0 ? z : std::log1p(std::exp(z));
    case Activation::identity: return z;
  }
  return z;
}

double act_d1(Activation a, double z) {
  switch (a) {
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::softplus: return 1.0 / (1.0 + std::exp(-z));
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

double act_d2(Activation a, double z) {
  switch (a) {
    case Activation::tanh: {
      const double t = std::tanh(z);
      return -2.0 * t * (1.0 - t * t);
    }
    case Activation::softplus: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::identity: return 0.0;
  }
  return 0.0;
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "softplus") return Activation::softplus;
  if (name == "identity") return Activation::identity;
  throw Error(ErrorKind::parameter, "unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::softplus: return "softplus";
    case Activation::identity: return "identity";
  }
  return "?";
}

void MlpParameterGradient::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

MlpModel::MlpModel(std::vector<std::size_t> layer_widths, Activation activation,
                   std::uint64_t seed)
    : widths_(std::move(layer_widths)), activation_(activation) {
  if (widths_.size() < 2) throw Error(ErrorKind::parameter, "an MLP needs at least two widths");
  SplitMix64 rng(seed);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(widths_[l]);
    const auto fan_out = static_cast<Eigen::Index>(widths_[l + 1]);
    if (fan_in == 0 || fan_out == 0) throw Error(ErrorKind::parameter, "layer widths must be positive");
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    Eigen::VectorXd b(fan_out);
    for (Eigen::Index r = 0; r < fan_out; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c) w(r, c) = a * (2.0 * rng.uniform() - 1.0);
    for (Eigen::Index r = 0; r < fan_out; ++r) b(r) = a * (2.0 * rng.uniform() - 1.0);
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
  validate();
}

MlpModel::MlpModel(std::vector<std::size_t> layer_widths, Activation activation,
                   std::vector<std::vector<double>> weights,
                   std::vector<std::vector<double>> biases)
    : widths_(std::move(layer_widths)), activation_(activation) {
  if (widths_.size() < 2) throw Error(ErrorKind::parameter, "an MLP needs at least two widths");
  const std::size_t n_layers = widths_.size() - 1;
  if (weights.size() != n_layers || biases.size() != n_layers) {
    throw Error(ErrorKind::shape, "expected " + std::to_string(n_layers) + " weight/bias arrays");
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    if (weights[l].size() != in * out || biases[l].size() != out) {
      throw Error(ErrorKind::shape, "layer " + std::to_string(l) + " has wrong parameter count");
    }
    weights_.push_back(Eigen::Map<const RowMajor>(weights[l].data(), static_cast<Eigen::Index>(out),
                                                  static_cast<Eigen::Index>(in)));
    biases_.push_back(Eigen::Map<const Eigen::VectorXd>(biases[l].data(),
                                                        static_cast<Eigen::Index>(out)));
  }
  validate();
}

void MlpModel::validate() const {
  if (widths_.back() != 1) throw Error(ErrorKind::parameter, "MLP output width must be 1");
  for (auto w : widths_)
    if (w == 0) throw Error(ErrorKind::parameter, "layer widths must be positive");
}

std::size_t MlpModel::num_parameters() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  }
  return n;
}

void MlpModel::forward(std::span<const double> x, Tape& tape) const {
  const std::size_t n = weights_.size();
  tape.pre.resize(n);
  tape.post.resize(n + 1);
  tape.post[0] = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < n; ++l) {
    tape.pre[l].noalias() = weights_[l] * tape.post[l];
    tape.pre[l] += biases_[l];
    if (is_hidden(l)) {
      tape.post[l + 1] = tape.pre[l].unaryExpr([this](double z) { return act(activation_, z); });
    } else {
      tape.post[l + 1] = tape.pre[l];
    }
  }
}

std::vector<Eigen::VectorXd> MlpModel::backward(const Tape& tape) const {
  const std::size_t n = weights_.size();
  std::vector<Eigen::VectorXd> adj_pre(n);
  adj_pre[n - 1] = Eigen::VectorXd::Ones(1);
  for (std::size_t l = n - 1; l > 0; --l) {
    Eigen::VectorXd adj_post = weights_[l].transpose() * adj_pre[l];
    adj_pre[l - 1] = adj_post.cwiseProduct(
        tape.pre[l - 1].unaryExpr([this](double z) { return act_d1(activation_, z); }));
  }
  return adj_pre;
}

double MlpModel::do_value(std::span<const double> x) const {
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * a + biases_[l];
    if (is_hidden(l)) {
      a = z.unaryExpr([this](double v) { return act(activation_, v); });
    } else {
      a = std::move(z);
    }
  }
  return a(0);
}

void MlpModel::do_gradient(std::span<const double> x, std::span<double> out) const {
  Tape tape;
  forward(x, tape);
  const auto adj_pre = backward(tape);
  Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())).noalias() =
      weights_[0].transpose() * adj_pre[0];
}

// Forward-over-reverse: differentiate the reverse sweep along e_m and read
// component l of the resulting Hessian column.
double MlpModel::do_second_derivative(std::span<const double> x, std::size_t l,
                                      std::size_t m) const {
  const std::size_t n = weights_.size();
  Tape tape;
  forward(x, tape);
  const auto adj_pre = backward(tape);

  // Tangents of the pre-activations along e_m.
  std::vector<Eigen::VectorXd> dpre(n);
  dpre[0] = weights_[0].col(static_cast<Eigen::Index>(m));
  for (std::size_t k = 1; k < n; ++k) {
    Eigen::VectorXd dpost = dpre[k - 1].cwiseProduct(
        tape.pre[k - 1].unaryExpr([this](double z) { return act_d1(activation_, z); }));
    dpre[k] = weights_[k] * dpost;
  }

  // Tangent of the reverse sweep; the output adjoint is constant.
  Eigen::VectorXd dadj_pre = Eigen::VectorXd::Zero(1);
  for (std::size_t k = n - 1; k > 0; --k) {
    const Eigen::VectorXd adj_post = weights_[k].transpose() * adj_pre[k];
    const Eigen::VectorXd dadj_post = weights_[k].transpose() * dadj_pre;
    const Eigen::VectorXd& z = tape.pre[k - 1];
    Eigen::VectorXd next(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      next(i) = dadj_post(i) * act_d1(activation_, z(i)) +
                adj_post(i) * act_d2(activation_, z(i)) * dpre[k - 1](i);
    }
    dadj_pre = std::move(next);
  }
  return weights_[0].col(static_cast<Eigen::Index>(l)).dot(dadj_pre);
}

void MlpModel::do_value_batch(const Matrix& points, std::span<double> out) const {
  constexpr std::size_t block = 1024;
  const std::size_t d = points.cols();
  for (std::size_t start = 0; start < points.rows(); start += block) {
    const std::size_t rows = std::min(block, points.rows() - start);
    Eigen::Map<const RowMajor> in(points.data().data() + start * d, static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(d));
    RowMajor a = in;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      RowMajor z = a * weights_[l].transpose();
      z.rowwise() += biases_[l].transpose();
      if (is_hidden(l)) {
        a = z.unaryExpr([this](double v) { return act(activation_, v); });
      } else {
        a = std::move(z);
      }
    }
    for (std::size_t r = 0; r < rows; ++r) out[start + r] = a(static_cast<Eigen::Index>(r), 0);
  }
}

MlpParameterGradient MlpModel::zero_gradient() const {
  MlpParameterGradient g;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

double MlpModel::accumulate_parameter_gradient(std::span<const double> x,
                                               const std::function<double(double)>& scale,
                                               MlpParameterGradient& grad) const {
  check_input(x);
  Tape tape;
  forward(x, tape);
  const double output = tape.post.back()(0);
  const double s = scale(output);
  const auto adj_pre = backward(tape);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    grad.weights[l].noalias() += (s * adj_pre[l]) * tape.post[l].transpose();
    grad.biases[l] += s * adj_pre[l];
  }
  return output;
}

void MlpModel::apply_update(const MlpParameterGradient& step) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] += step.weights[l];
    biases_[l] += step.biases[l];
  }
}

}  // namespace dale
