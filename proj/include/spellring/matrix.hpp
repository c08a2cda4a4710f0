#ifndef SPELLRING_MATRIX_HPP
#define SPELLRING_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "spellring/error.hpp"

namespace spellring {

// Dense row-major matrix. Echo profiles are [frames x range_bins], posteriors
// are [frames x symbols], network activations are [time x channels].
template <typename T>
class MatrixT {
 public:
  MatrixT() = default;

  MatrixT(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& at(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  T* row(std::size_t r) { return data_.data() + r * cols_; }
  const T* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool operator==(const MatrixT& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = MatrixT<double>;
using MatrixF = MatrixT<float>;

}  // namespace spellring

#endif
