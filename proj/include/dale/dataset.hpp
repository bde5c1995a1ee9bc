#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dale {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// N x D design matrix with feature names and per-feature observed ranges.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Matrix values, std::vector<std::string> names = {});

  std::size_t size() const noexcept { return values_.rows(); }
  std::size_t dim() const noexcept { return values_.cols(); }
  bool empty() const noexcept { return values_.empty(); }

  const Matrix& values() const noexcept { return values_; }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  std::vector<double> column(std::size_t s) const { return values_.column(s); }
  double operator()(std::size_t i, std::size_t s) const { return values_(i, s); }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t s) const { return names_.at(s); }
  // Throws a schema error when the name is not present.
  std::size_t index_of(const std::string& name) const;

  double min(std::size_t s) const { return mins_.at(s); }
  double max(std::size_t s) const { return maxs_.at(s); }

 private:
  Matrix values_;
  std::vector<std::string> names_;
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

}  // namespace dale
