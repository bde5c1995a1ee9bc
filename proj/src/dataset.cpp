#include "dale/dataset.hpp"

#include <algorithm>
#include <limits>

#include "dale/errors.hpp"

namespace dale {

std::vector<double> Matrix::column(std::size_t c) const {
  if (c >= cols_) {
    throw Error(ErrorKind::parameter, "column index " + std::to_string(c) + " out of range");
  }
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
  return out;
}

Dataset::Dataset(Matrix values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
  const std::size_t d = values_.cols();
  if (names_.empty()) {
    for (std::size_t s = 0; s < d; ++s) names_.push_back("x" + std::to_string(s + 1));
  }
  if (names_.size() != d) {
    throw Error(ErrorKind::shape, "dataset has " + std::to_string(d) + " columns but " +
                                      std::to_string(names_.size()) + " names");
  }
  mins_.assign(d, std::numeric_limits<double>::infinity());
  maxs_.assign(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < values_.rows(); ++i) {
    for (std::size_t s = 0; s < d; ++s) {
      mins_[s] = std::min(mins_[s], values_(i, s));
      maxs_[s] = std::max(maxs_[s], values_(i, s));
    }
  }
}

std::size_t Dataset::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(ErrorKind::schema, "unknown column '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

}  // namespace dale
