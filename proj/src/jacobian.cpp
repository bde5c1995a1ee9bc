#include "dale/jacobian.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "dale/errors.hpp"

namespace dale {
namespace {

template <typename RowFn>
void for_each_row(std::size_t n, unsigned threads, RowFn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check_dataset(const DifferentiableModel& model, const Dataset& X) {
  if (X.empty()) throw Error(ErrorKind::empty_input, "dataset has no rows");
  if (X.dim() != model.dim()) {
    throw Error(ErrorKind::shape, "dataset has " + std::to_string(X.dim()) + " features, model expects " +
                                      std::to_string(model.dim()));
  }
}

}  // namespace

Matrix jacobian_batch(const DifferentiableModel& model, const Dataset& X, unsigned threads) {
  check_dataset(model, X);
  Matrix J(X.size(), X.dim());
  for_each_row(X.size(), threads, [&](std::size_t i) { model.gradient(X.row(i), J.row(i)); });
  return J;
}

std::vector<double> hessian_entry_batch(const DifferentiableModel& model, const Dataset& X,
                                        std::size_t l, std::size_t m, unsigned threads) {
  if (l >= model.dim() || m >= model.dim()) {
    throw Error(ErrorKind::parameter, "feature index out of range for Hessian entry");
  }
  check_dataset(model, X);
  std::vector<double> out(X.size());
  for_each_row(X.size(), threads,
               [&](std::size_t i) { out[i] = model.second_derivative(X.row(i), l, m); });
  return out;
}

}  // namespace dale
