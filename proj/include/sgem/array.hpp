#pragma once

#include <cstddef>
#include <vector>

namespace sgem {

/// Dense row-major 2-D table of doubles.
class Array2 {
 public:
  Array2() = default;
  Array2(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Array2&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dense row-major 3-D table of doubles.
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t n0, std::size_t n1, std::size_t n2, double fill = 0.0)
      : n0_(n0), n1_(n1), n2_(n2), data_(n0 * n1 * n2, fill) {}

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * n1_ + j) * n2_ + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * n1_ + j) * n2_ + k];
  }

  std::size_t dim0() const { return n0_; }
  std::size_t dim1() const { return n1_; }
  std::size_t dim2() const { return n2_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Array3&) const = default;

 private:
  std::size_t n0_ = 0;
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  std::vector<double> data_;
};

}  // namespace sgem
