// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_BASIS_HPP
#define RBM_BASIS_HPP

#include <Eigen/Dense>

namespace rbm
{

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Orthonormal column basis V (n x r). r may be zero; the ambient dimension
// is kept so that an empty basis still knows where it lives.
class ReducedBasis
{
public:
  static constexpr double kOrthonormalityTol = 1e-10;

  explicit ReducedBasis(Index ambient_dim);

  // Validates ||V^T V - I||_max <= kOrthonormalityTol.
  explicit ReducedBasis(Matrix columns);

  Index ambient_dim() const { return n_; }
  Index dim() const { return v_.cols(); }
  bool empty() const { return v_.cols() == 0; }
  const Matrix &matrix() const { return v_; }

  // ||V^T V - I||_max, 0 for an empty basis.
  double orthonormality_defect() const;

private:
  Index n_;
  Matrix v_;
};

}  // namespace rbm

#endif  // RBM_BASIS_HPP
