// include/lid/tensor.hpp

// Copyright 2026  The lidda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LID_TENSOR_HPP_
#define LID_TENSOR_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lid/error.hpp"

namespace lid {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXd = RowMatrix<double>;

/// Dense n-dimensional array in row-major order. Storage is an Eigen column
/// vector so element-wise work can use Eigen expressions directly; the 2-D and
/// per-sample views below expose row-major matrix maps for the GEMM paths.
template <typename Scalar>
class BasicTensor {
 public:
  using Shape = std::vector<Index>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<RowMatrix<Scalar>>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix<Scalar>>;

  BasicTensor() = default;

  explicit BasicTensor(Shape shape)
      : shape_(std::move(shape)), data_(Vector::Zero(CheckedSize(shape_))) {}

  BasicTensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (CheckedSize(shape_) != data_.size()) {
      throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                           " does not match shape " + ShapeString(shape_));
    }
  }

  static BasicTensor Zeros(Shape shape) { return BasicTensor(std::move(shape)); }

  static BasicTensor Constant(Shape shape, Scalar value) {
    BasicTensor t(std::move(shape));
    t.data_.setConstant(value);
    return t;
  }

  /// Wraps a matrix as a rank-2 tensor (rows × cols).
  template <typename Derived>
  static BasicTensor FromMatrix(const Eigen::MatrixBase<Derived>& m) {
    BasicTensor t({m.rows(), m.cols()});
    t.Matrix() = m;
    return t;
  }

  const Shape& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  Vector& values() { return data_; }
  const Vector& values() const { return data_; }
  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  /// Rank-2 view: dim(0) rows, product of the remaining dims as columns.
  MatrixMap Matrix() { return MatrixMap(data_.data(), shape_.at(0), size() / shape_.at(0)); }
  ConstMatrixMap Matrix() const {
    return ConstMatrixMap(data_.data(), shape_.at(0), size() / shape_.at(0));
  }

  /// For rank-3 [B, C, T] tensors, the C×T matrix of sample b.
  MatrixMap Sample(Index b) {
    return MatrixMap(data_.data() + b * shape_[1] * shape_[2], shape_[1], shape_[2]);
  }
  ConstMatrixMap Sample(Index b) const {
    return ConstMatrixMap(data_.data() + b * shape_[1] * shape_[2], shape_[1], shape_[2]);
  }

  Scalar& operator()(Index i, Index j) { return data_[i * shape_[1] + j]; }
  Scalar operator()(Index i, Index j) const { return data_[i * shape_[1] + j]; }
  Scalar& operator()(Index i, Index j, Index k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  Scalar operator()(Index i, Index j, Index k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  bool AllFinite() const { return data_.allFinite(); }

  void SetZero() { data_.setZero(); }

  friend bool operator==(const BasicTensor& a, const BasicTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

  static Index CheckedSize(const Shape& shape) {
    Index n = 1;
    for (Index d : shape) {
      if (d <= 0) throw DimensionError("tensor shape " + ShapeString(shape) + " has a non-positive dim");
      n *= d;
    }
    return n;
  }

  static std::string ShapeString(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ']';
    return os.str();
  }

 private:
  Shape shape_;
  Vector data_;
};

using Tensor = BasicTensor<double>;

/// Throws DimensionError unless `t` has exactly `rank` dims.
inline void RequireRank(const Tensor& t, Index rank, const char* what) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(what) + ": expected rank " + std::to_string(rank) +
                         ", got shape " + Tensor::ShapeString(t.shape()));
  }
}

/// Throws NumericError if any element is NaN or infinite.
inline void RequireFinite(const Tensor& t, const char* what) {
  if (!t.AllFinite()) throw NumericError(std::string(what) + ": non-finite value");
}

}  // namespace lid

#endif  // LID_TENSOR_HPP_
