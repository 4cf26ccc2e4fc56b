// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_DENSE_HPP
#define RBM_DENSE_HPP

#include <cstdint>
#include <vector>

#include "rbm/basis.hpp"

namespace rbm::dense
{

struct SvdResult
{
  Matrix left_vectors;   // m x k, orthonormal columns
  Vector singular_values;  // k, non-increasing
  Matrix right_vectors;  // n x k, orthonormal columns
};

struct PivotedQrResult
{
  Matrix q_factor;  // m x k
  Matrix r_factor;  // k x n, upper triangular
  std::vector<Index> pivots;  // 0-based column permutation, A(:, pivots) = Q R
};

struct KmeansResult
{
  std::vector<Index> assignments;
  Matrix centroids;  // k x d
  double objective = 0.0;
  std::vector<Index> representative_rows;

  // Objective after every Lloyd sweep of the winning restart.
  std::vector<double> iteration_objectives;
  // Final objective of every restart, in restart order.
  std::vector<double> restart_objectives;
};

struct Orthonormalized
{
  ReducedBasis basis;
  Index dropped = 0;
};

// Throws InvalidArgument when any entry is NaN/Inf or the matrix is empty.
void require_finite(const Matrix &a, const char *what);

// Thin SVD. Throws NumericalError carrying the dimensions on failure.
SvdResult svd(const Matrix &a);

// Left singular vectors and values only; cheaper for wide snapshot matrices.
SvdResult left_svd(const Matrix &a);

// Truncated SVD from a blocked randomized QB factorization with exact residual
// tracking: blocks of `block` Gaussian samples of the current residual are
// added until ||A - Q B||_F <= rel_tol * ||A||_F or Q has max_rank columns.
// `power_iters` subspace iterations refine each block. Deterministic for a
// given seed.
SvdResult randomized_svd(const Matrix &a, double rel_tol, Index max_rank, Index block, std::uint64_t seed,
                         int power_iters = 0);

// Smallest l >= 1 with sum_{i>l} sigma_i / sum_i sigma_i < eps_svd.
Index rank_from_energy(const Vector &sigma, double eps_svd);

// Householder QR with column pivoting. Residual column norms are recomputed
// at every step (no downdating); ties within 1e-14 relative go to the lowest
// original column index.
PivotedQrResult pivoted_qr(const Matrix &a);

// Smallest q with |R(q+1,q+1)| / |R(1,1)| < eps_qr; the full diagonal length
// when nothing drops below the threshold.
Index rank_from_rdiag(const Matrix &r_factor, double eps_qr);

// Best of `restarts` Lloyd runs with k-means++ seeding. Restart j draws from
// a generator seeded with seed + j.
KmeansResult kmeans(const Matrix &rows_of, Index k, Index restarts, std::uint64_t seed);

// Orthonormalizes the columns of w against v (and each other) with two passes
// of modified Gram-Schmidt. Columns whose remaining norm falls below
// 1e-12 * (original norm + 1) are dropped and counted.
Orthonormalized orthonormalize_against(const ReducedBasis &v, const Matrix &w);

// Smallest singular value of a (tall or square) matrix.
double sigma_min(const Matrix &a);

// Spectral norm.
double norm2(const Matrix &a);

}  // namespace rbm::dense

#endif  // RBM_DENSE_HPP
