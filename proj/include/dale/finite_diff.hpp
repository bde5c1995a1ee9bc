#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dale/model.hpp"

namespace dale {

using ValueFunction = std::function<double(std::span<const double>)>;

// Default central-difference step for coordinate value v:
// cbrt(machine epsilon) * max(1, |v|).
double default_fd_step(double v);

// Central differences (f(x + h e_s) - f(x - h e_s)) / 2h for every s.
// Uses exactly 2 * x.size() calls of f. When `step` is given it is used as
// the absolute step for every coordinate.
std::vector<double> finite_diff_gradient(const ValueFunction& f, std::span<const double> x,
                                         std::optional<double> step = std::nullopt);

// Model whose derivatives come from central differences of a value-only
// function. Gradient calls are counted as gradients; the inner value calls
// of the wrapped function are not visible on this model's counters.
class FiniteDifferenceModel final : public DifferentiableModel {
 public:
  FiniteDifferenceModel(std::string name, std::size_t dim, ValueFunction f,
                        std::optional<double> step = std::nullopt);

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return name_; }

 protected:
  double do_value(std::span<const double> x) const override;
  void do_gradient(std::span<const double> x, std::span<double> out) const override;
  double do_second_derivative(std::span<const double> x, std::size_t l,
                              std::size_t m) const override;

 private:
  std::string name_;
  std::size_t dim_;
  ValueFunction f_;
  std::optional<double> step_;
};

}  // namespace dale
