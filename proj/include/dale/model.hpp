#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dale/dataset.hpp"

namespace dale {

struct CounterSnapshot {
  std::uint64_t n_value = 0;
  std::uint64_t n_gradient = 0;
  std::uint64_t n_second = 0;

  bool operator==(const CounterSnapshot&) const = default;
  CounterSnapshot operator-(const CounterSnapshot& o) const {
    return {n_value - o.n_value, n_gradient - o.n_gradient, n_second - o.n_second};
  }
};

// Per-model evaluation counters. Increments are atomic so that batch
// evaluation may run rows on several threads.
class EvalCounters {
 public:
  EvalCounters() = default;
  EvalCounters(const EvalCounters& other) noexcept { restore(other.snapshot()); }
  EvalCounters& operator=(const EvalCounters& other) noexcept {
    restore(other.snapshot());
    return *this;
  }

  void add_value(std::uint64_t n = 1) noexcept { value_.fetch_add(n, std::memory_order_relaxed); }
  void add_gradient(std::uint64_t n = 1) noexcept { gradient_.fetch_add(n, std::memory_order_relaxed); }
  void add_second(std::uint64_t n = 1) noexcept { second_.fetch_add(n, std::memory_order_relaxed); }

  std::uint64_t n_value() const noexcept { return value_.load(std::memory_order_relaxed); }
  std::uint64_t n_gradient() const noexcept { return gradient_.load(std::memory_order_relaxed); }
  std::uint64_t n_second() const noexcept { return second_.load(std::memory_order_relaxed); }

  CounterSnapshot snapshot() const noexcept { return {n_value(), n_gradient(), n_second()}; }
  void reset() noexcept { restore({}); }

 private:
  void restore(const CounterSnapshot& s) noexcept {
    value_.store(s.n_value, std::memory_order_relaxed);
    gradient_.store(s.n_gradient, std::memory_order_relaxed);
    second_.store(s.n_second, std::memory_order_relaxed);
  }

  std::atomic<std::uint64_t> value_{0};
  std::atomic<std::uint64_t> gradient_{0};
  std::atomic<std::uint64_t> second_{0};
};

// Scalar function over D-dimensional inputs with first and second
// derivatives. The public entry points validate shapes and count calls; the
// protected hooks do the arithmetic.
class DifferentiableModel {
 public:
  virtual ~DifferentiableModel() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;

  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  double second_derivative(std::span<const double> x, std::size_t l, std::size_t m) const;

  // Evaluates every row of `points`; counts one value evaluation per row.
  std::vector<double> value_batch(const Matrix& points) const;

  EvalCounters& counters() const noexcept { return counters_; }

 protected:
  virtual double do_value(std::span<const double> x) const = 0;
  virtual void do_gradient(std::span<const double> x, std::span<double> out) const = 0;
  virtual double do_second_derivative(std::span<const double> x, std::size_t l,
                                      std::size_t m) const = 0;
  virtual void do_value_batch(const Matrix& points, std::span<double> out) const;

  void check_input(std::span<const double> x) const;

 private:
  mutable EvalCounters counters_;
};

// Model defined by closed-form callables.
class AnalyticModel final : public DifferentiableModel {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;
  using SecondFn = std::function<double(std::span<const double>, std::size_t, std::size_t)>;

  AnalyticModel(std::string name, std::size_t dim, ValueFn value, GradientFn gradient,
                SecondFn second);

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return name_; }

 protected:
  double do_value(std::span<const double> x) const override { return value_(x); }
  void do_gradient(std::span<const double> x, std::span<double> out) const override {
    gradient_(x, out);
  }
  double do_second_derivative(std::span<const double> x, std::size_t l,
                              std::size_t m) const override {
    return second_(x, l, m);
  }

 private:
  std::string name_;
  std::size_t dim_;
  ValueFn value_;
  GradientFn gradient_;
  SecondFn second_;
};

// f(x) = w.x + b
AnalyticModel linear_model(std::vector<double> weights, double bias = 0.0);
// f(x) = c
AnalyticModel constant_model(std::size_t dim, double c);
// f(x) = x_l * x_m (l != m)
AnalyticModel bilinear_model(std::size_t dim, std::size_t l, std::size_t m);

}  // namespace dale
