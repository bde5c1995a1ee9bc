#include "dale/finite_diff.hpp"

#include <cmath>
#include <limits>

#include "dale/errors.hpp"

namespace dale {
namespace {

double checked(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::numeric, "non-finite function value in finite difference");
  return v;
}

}  // namespace

double default_fd_step(double v) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * std::max(1.0, std::abs(v));
}

std::vector<double> finite_diff_gradient(const ValueFunction& f, std::span<const double> x,
                                         std::optional<double> step) {
  if (step && !(*step > 0.0)) throw Error(ErrorKind::parameter, "finite-difference step must be positive");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t s = 0; s < x.size(); ++s) {
    const double h = step ? *step : default_fd_step(x[s]);
    probe[s] = x[s] + h;
    const double up = checked(f(probe));
    probe[s] = x[s] - h;
    const double down = checked(f(probe));
    probe[s] = x[s];
    g[s] = (up - down) / (2.0 * h);
  }
  return g;
}

FiniteDifferenceModel::FiniteDifferenceModel(std::string name, std::size_t dim, ValueFunction f,
                                             std::optional<double> step)
    : name_(std::move(name)), dim_(dim), f_(std::move(f)), step_(step) {
  if (dim_ == 0) throw Error(ErrorKind::parameter, "model dimension must be positive");
  if (step_ && !(*step_ > 0.0)) throw Error(ErrorKind::parameter, "finite-difference step must be positive");
}

double FiniteDifferenceModel::do_value(std::span<const double> x) const { return f_(x); }

void FiniteDifferenceModel::do_gradient(std::span<const double> x, std::span<double> out) const {
  const auto g = finite_diff_gradient(f_, x, step_);
  std::copy(g.begin(), g.end(), out.begin());
}

// Four-point mixed central difference. Larger step than the gradient since
// the truncation/rounding balance is quartic-root.
double FiniteDifferenceModel::do_second_derivative(std::span<const double> x, std::size_t l,
                                                   std::size_t m) const {
  static const double base = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  std::vector<double> p(x.begin(), x.end());
  const double hl = step_ ? *step_ : base * std::max(1.0, std::abs(x[l]));
  const double hm = step_ ? *step_ : base * std::max(1.0, std::abs(x[m]));
  auto at = [&](double dl, double dm) {
    p.assign(x.begin(), x.end());
    p[l] += dl;
    p[m] += dm;
    return checked(f_(p));
  };
  if (l == m) {
    return (at(hl, 0.0) - 2.0 * checked(f_(x)) + at(-hl, 0.0)) / (hl * hl);
  }
  return (at(hl, hm) - at(hl, -hm) - at(-hl, hm) + at(-hl, -hm)) / (4.0 * hl * hm);
}

}  // namespace dale
