#pragma once

#include <cstddef>
#include <vector>

#include "dale/dataset.hpp"
#include "dale/model.hpp"

namespace dale {

// N x D matrix of model gradients at every row of X: exactly N gradient
// evaluations. Rows may be split across `threads` workers; the result does
// not depend on the thread count.
Matrix jacobian_batch(const DifferentiableModel& model, const Dataset& X, unsigned threads = 1);

// f_{l,m} at every row of X: exactly N second-derivative evaluations.
std::vector<double> hessian_entry_batch(const DifferentiableModel& model, const Dataset& X,
                                        std::size_t l, std::size_t m, unsigned threads = 1);

}  // namespace dale
