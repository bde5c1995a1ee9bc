#include "dale/model.hpp"

#include <cmath>
#include <memory>

#include "dale/errors.hpp"

namespace dale {

void DifferentiableModel::check_input(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw Error(ErrorKind::shape, "model '" + name() + "' expects " + std::to_string(dim()) +
                                      " inputs, got " + std::to_string(x.size()));
  }
}

double DifferentiableModel::value(std::span<const double> x) const {
  check_input(x);
  counters_.add_value();
  return do_value(x);
}

std::vector<double> DifferentiableModel::gradient(std::span<const double> x) const {
  std::vector<double> out(dim());
  gradient(x, out);
  return out;
}

void DifferentiableModel::gradient(std::span<const double> x, std::span<double> out) const {
  check_input(x);
  if (out.size() != dim()) throw Error(ErrorKind::shape, "gradient buffer has wrong length");
  counters_.add_gradient();
  do_gradient(x, out);
}

double DifferentiableModel::second_derivative(std::span<const double> x, std::size_t l,
                                              std::size_t m) const {
  check_input(x);
  if (l >= dim() || m >= dim()) {
    throw Error(ErrorKind::parameter, "second-derivative index out of range");
  }
  counters_.add_second();
  return do_second_derivative(x, l, m);
}

std::vector<double> DifferentiableModel::value_batch(const Matrix& points) const {
  if (points.rows() > 0 && points.cols() != dim()) {
    throw Error(ErrorKind::shape, "model '" + name() + "' expects " + std::to_string(dim()) +
                                      " inputs, got rows of " + std::to_string(points.cols()));
  }
  std::vector<double> out(points.rows());
  counters_.add_value(points.rows());
  do_value_batch(points, out);
  return out;
}

void DifferentiableModel::do_value_batch(const Matrix& points, std::span<double> out) const {
  for (std::size_t i = 0; i < points.rows(); ++i) out[i] = do_value(points.row(i));
}

AnalyticModel::AnalyticModel(std::string name, std::size_t dim, ValueFn value,
                             GradientFn gradient, SecondFn second)
    : name_(std::move(name)),
      dim_(dim),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      second_(std::move(second)) {
  if (dim_ == 0) throw Error(ErrorKind::parameter, "model dimension must be positive");
}

AnalyticModel linear_model(std::vector<double> weights, double bias) {
  const std::size_t d = weights.size();
  auto w = std::make_shared<const std::vector<double>>(std::move(weights));
  return AnalyticModel(
      "linear", d,
      [w, bias](std::span<const double> x) {
        double acc = bias;
        for (std::size_t s = 0; s < x.size(); ++s) acc += (*w)[s] * x[s];
        return acc;
      },
      [w](std::span<const double>, std::span<double> g) {
        for (std::size_t s = 0; s < g.size(); ++s) g[s] = (*w)[s];
      },
      [](std::span<const double>, std::size_t, std::size_t) { return 0.0; });
}

AnalyticModel constant_model(std::size_t dim, double c) {
  return AnalyticModel(
      "constant", dim, [c](std::span<const double>) { return c; },
      [](std::span<const double>, std::span<double> g) {
        for (auto& v : g) v = 0.0;
      },
      [](std::span<const double>, std::size_t, std::size_t) { return 0.0; });
}

AnalyticModel bilinear_model(std::size_t dim, std::size_t l, std::size_t m) {
  if (l >= dim || m >= dim || l == m) {
    throw Error(ErrorKind::parameter, "bilinear model needs two distinct feature indices");
  }
  return AnalyticModel(
      "bilinear", dim, [l, m](std::span<const double> x) { return x[l] * x[m]; },
      [l, m](std::span<const double> x, std::span<double> g) {
        for (auto& v : g) v = 0.0;
        g[l] = x[m];
        g[m] = x[l];
      },
      [l, m](std::span<const double>, std::size_t a, std::size_t b) {
        return ((a == l && b == m) || (a == m && b == l)) ? 1.0 : 0.0;
      });
}

}  // namespace dale
