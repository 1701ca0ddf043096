#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stegcal::ml {

enum class Label : int { Cover = 0, Stego = 1 };

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Dataset {
  Matrix x;
  std::vector<Label> y;
  std::vector<std::string> ids;

  std::size_t size() const { return y.size(); }
  std::size_t dims() const { return x.cols(); }
  std::size_t count(Label label) const;

  // Throws on non-finite entries or ragged labels/ids.
  void validate() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  // Keeps columns where mask[c] is true.
  Dataset select_columns(const std::vector<bool>& mask) const;
};

}  // namespace stegcal::ml
