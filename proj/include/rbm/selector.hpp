// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_SELECTOR_HPP
#define RBM_SELECTOR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbm/basis.hpp"
#include "rbm/benchmarks.hpp"

namespace rbm::select
{

enum class Method
{
  Deim,
  Qdeim,
  Kdeim,
  Qr,
  GappyEig,
  GappyClust
};

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

// Interpolation (or pivot) indices into the rows of `basis`'s ambient space.
// For Method::Qr the basis is left empty; the indices address columns of
// the factored matrix, i.e. rows of the output snapshot matrix.
struct InterpolationSelection
{
  Matrix basis;
  std::vector<Index> indices;
  Method method = Method::Deim;
  // Smallest singular value of the selected-row matrix after every append,
  // recorded by gappy_eigenvector (first entry: the base selection).
  std::vector<double> growth_sigma_min;

  Index size() const { return static_cast<Index>(indices.size()); }
};

// Rows `indices` of u, in selection order (P^T U).
Matrix selected_rows(const Matrix &u, const std::vector<Index> &indices);

// Leading left singular vectors of f truncated by the energy criterion.
Matrix truncated_basis(const Matrix &f, double eps_svd);

// Greedy DEIM point selection on a given basis.
std::vector<Index> deim_indices(const Matrix &u);

// First u.cols() pivots of the column-pivoted QR of U^T.
std::vector<Index> qdeim_indices(const Matrix &u);

InterpolationSelection deim(const Matrix &f, double eps_svd);
InterpolationSelection qdeim(const Matrix &f, double eps_svd);
InterpolationSelection kdeim(const Matrix &f, double eps_svd, std::uint64_t seed);

// Cluster representatives of the rows of u, k clusters, five restarts.
std::vector<Index> cluster_indices(const Matrix &u, Index k, std::uint64_t seed);

// Grows base.indices to m entries, each time appending the unselected row that
// maximizes the smallest singular value of the selected-row matrix.
InterpolationSelection gappy_eigenvector(const InterpolationSelection &base, Index m);

InterpolationSelection gappy_clustering(const Matrix &f, double eps_svd, Index m, std::uint64_t seed);

// Column-pivoted QR of Y^T; keeps the first h pivots with h from the R diagonal.
InterpolationSelection qr_pivot_select(const Matrix &y, double eps_qr);

// Samples of `fine` whose positions occur in selection.indices, in fine-set order.
TrainingSet subsample_training_set(const TrainingSet &fine, const InterpolationSelection &selection);

// U (P^T U)^+ : maps sampled values to basis-space reconstruction, n x |I|.
Matrix interpolation_operator(const InterpolationSelection &selection);

struct SelectorConfig
{
  Method method = Method::Qdeim;
  double eps_svd = 1e-6;
  double eps_qr = 1e-6;
  double oversample_factor = 2.0;  // gappy variants: m = ceil(factor * l)
  std::uint64_t seed = 0;
};

// Applies the configured selector to an output snapshot matrix whose rows are
// training parameters. Returned indices are parameter positions.
InterpolationSelection select_parameters(const Matrix &y, const SelectorConfig &cfg);

}  // namespace rbm::select

#endif  // RBM_SELECTOR_HPP
