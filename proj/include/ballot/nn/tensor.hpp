#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "ballot/error.hpp"

namespace ballot::nn {

using Index = Eigen::Index;

// Row-major so that a window of consecutive rows is one contiguous block.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using RowVectorXd = RowVector<double>;
using IndexMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::string shape_str(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename Derived>
std::string shape_str(const Eigen::EigenBase<Derived>& m) {
  return shape_str(m.rows(), m.cols());
}

// An ordered list of named dense tensors. Models keep all trainable state in
// one of these; gradients and optimizer moments use the same layout.
template <typename Scalar>
class ParameterSet {
 public:
  Index add(std::string name, Index rows, Index cols) {
    names_.push_back(std::move(name));
    tensors_.push_back(Matrix<Scalar>::Zero(rows, cols));
    return static_cast<Index>(tensors_.size()) - 1;
  }

  Index size() const { return static_cast<Index>(tensors_.size()); }

  Matrix<Scalar>& operator[](Index i) { return tensors_[static_cast<std::size_t>(i)]; }
  const Matrix<Scalar>& operator[](Index i) const { return tensors_[static_cast<std::size_t>(i)]; }

  const std::string& name(Index i) const { return names_[static_cast<std::size_t>(i)]; }

  Index total_size() const {
    Index n = 0;
    for (const auto& t : tensors_) n += t.size();
    return n;
  }

  ParameterSet zeros_like() const {
    ParameterSet out;
    out.names_ = names_;
    out.tensors_.reserve(tensors_.size());
    for (const auto& t : tensors_) out.tensors_.push_back(Matrix<Scalar>::Zero(t.rows(), t.cols()));
    return out;
  }

  void set_zero() {
    for (auto& t : tensors_) t.setZero();
  }

  bool same_shape(const ParameterSet& other) const {
    if (other.tensors_.size() != tensors_.size()) return false;
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
      if (tensors_[i].rows() != other.tensors_[i].rows() ||
          tensors_[i].cols() != other.tensors_[i].cols())
        return false;
    }
    return true;
  }

  bool all_finite() const {
    for (const auto& t : tensors_)
      if (!t.allFinite()) return false;
    return true;
  }

  ParameterSet& operator+=(const ParameterSet& other) {
    for (std::size_t i = 0; i < tensors_.size(); ++i) tensors_[i] += other.tensors_[i];
    return *this;
  }

  ParameterSet& operator*=(Scalar s) {
    for (auto& t : tensors_) t *= s;
    return *this;
  }

  // Flat element access in tensor order, used by finite-difference checks.
  Scalar& flat(Index k) {
    for (auto& t : tensors_) {
      if (k < t.size()) return t.data()[k];
      k -= t.size();
    }
    throw Error(Errc::shape, "flat index out of range");
  }
  Scalar flat(Index k) const { return const_cast<ParameterSet&>(*this).flat(k); }

 private:
  std::vector<std::string> names_;
  std::vector<Matrix<Scalar>> tensors_;
};

template <typename Scalar>
using GradientSet = ParameterSet<Scalar>;

}  // namespace ballot::nn
