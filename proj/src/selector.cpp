// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include "rbm/selector.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "rbm/dense.hpp"
#include "rbm/error.hpp"

namespace rbm::select
{

namespace
{

constexpr Index kKmeansRestarts = 5;

Index argmax_abs(const Vector &v)
{
  Index best = 0;
  double best_v = std::abs(v[0]);
  for (Index i = 1; i < v.size(); ++i)
  {
    const double a = std::abs(v[i]);
    if (a > best_v)
    {
      best_v = a;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(Method m)
{
  switch (m)
  {
  case Method::Deim:
    return "deim";
  case Method::Qdeim:
    return "qdeim";
  case Method::Kdeim:
    return "kdeim";
  case Method::Qr:
    return "qr";
  case Method::GappyEig:
    return "gappy-eig";
  case Method::GappyClust:
    return "gappy-clust";
  }
  return "unknown";
}

Method method_from_string(std::string_view name)
{
  for (Method m : {Method::Deim, Method::Qdeim, Method::Kdeim, Method::Qr, Method::GappyEig,
                   Method::GappyClust})
    if (to_string(m) == name)
      return m;
  throw InvalidArgument("unknown selector '" + std::string(name) + "'");
}

Matrix selected_rows(const Matrix &u, const std::vector<Index> &indices)
{
  Matrix out(static_cast<Index>(indices.size()), u.cols());
  for (std::size_t i = 0; i < indices.size(); ++i)
    out.row(static_cast<Index>(i)) = u.row(indices[i]);
  return out;
}

Matrix truncated_basis(const Matrix &f, double eps_svd)
{
  const dense::SvdResult dec = dense::left_svd(f);
  const Index l = dense::rank_from_energy(dec.singular_values, eps_svd);
  return dec.left_vectors.leftCols(l);
}

std::vector<Index> deim_indices(const Matrix &u)
{
  if (u.cols() < 1 || u.rows() < u.cols())
    throw InvalidArgument("deim: basis must have 1 <= l <= n columns");
  std::vector<Index> idx;
  idx.push_back(argmax_abs(u.col(0)));
  for (Index i = 1; i < u.cols(); ++i)
  {
    const Matrix pu = selected_rows(u.leftCols(i), idx);
    Vector rhs(i);
    for (Index j = 0; j < i; ++j)
      rhs[j] = u(idx[j], i);
    const Vector alpha = pu.partialPivLu().solve(rhs);
    const Vector res = u.col(i) - u.leftCols(i) * alpha;
    idx.push_back(argmax_abs(res));
  }
  return idx;
}

std::vector<Index> qdeim_indices(const Matrix &u)
{
  if (u.cols() < 1 || u.rows() < u.cols())
    throw InvalidArgument("qdeim: basis must have 1 <= l <= n columns");
  const dense::PivotedQrResult qr = dense::pivoted_qr(u.transpose());
  return std::vector<Index>(qr.pivots.begin(), qr.pivots.begin() + u.cols());
}

std::vector<Index> cluster_indices(const Matrix &u, Index k, std::uint64_t seed)
{
  const dense::KmeansResult km = dense::kmeans(u, k, kKmeansRestarts, seed);
  return km.representative_rows;
}

InterpolationSelection deim(const Matrix &f, double eps_svd)
{
  InterpolationSelection sel;
  sel.basis = truncated_basis(f, eps_svd);
  sel.indices = deim_indices(sel.basis);
  sel.method = Method::Deim;
  return sel;
}

InterpolationSelection qdeim(const Matrix &f, double eps_svd)
{
  InterpolationSelection sel;
  sel.basis = truncated_basis(f, eps_svd);
  sel.indices = qdeim_indices(sel.basis);
  sel.method = Method::Qdeim;
  return sel;
}

InterpolationSelection kdeim(const Matrix &f, double eps_svd, std::uint64_t seed)
{
  InterpolationSelection sel;
  sel.basis = truncated_basis(f, eps_svd);
  sel.indices = cluster_indices(sel.basis, sel.basis.cols(), seed);
  sel.method = Method::Kdeim;
  return sel;
}

InterpolationSelection gappy_eigenvector(const InterpolationSelection &base, Index m)
{
  const Matrix &u = base.basis;
  const Index l = static_cast<Index>(base.indices.size());
  if (m < l)
    throw InvalidArgument("gappy_eigenvector: budget m below the base selection size");
  if (m > u.rows())
    throw InvalidArgument("gappy_eigenvector: budget m exceeds the number of rows");

  InterpolationSelection sel = base;
  sel.method = Method::GappyEig;
  sel.growth_sigma_min.clear();
  std::vector<char> taken(u.rows(), 0);
  for (Index i : sel.indices)
    taken[i] = 1;

  Matrix gram = Matrix::Zero(u.cols(), u.cols());
  for (Index i : sel.indices)
    gram.noalias() += u.row(i).transpose() * u.row(i);
  sel.growth_sigma_min.push_back(dense::sigma_min(selected_rows(u, sel.indices)));

  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  while (sel.size() < m)
  {
    Index pick = -1;
    double best = -1.0;
    for (Index c = 0; c < u.rows(); ++c)
    {
      if (taken[c])
        continue;
      const Matrix grown = gram + u.row(c).transpose() * u.row(c);
      eig.compute(grown, Eigen::EigenvaluesOnly);
      const double lam = std::max(0.0, eig.eigenvalues()[0]);
      if (lam > best)
      {
        best = lam;
        pick = c;
      }
    }
    taken[pick] = 1;
    sel.indices.push_back(pick);
    gram.noalias() += u.row(pick).transpose() * u.row(pick);
    sel.growth_sigma_min.push_back(dense::sigma_min(selected_rows(u, sel.indices)));
  }
  return sel;
}

InterpolationSelection gappy_clustering(const Matrix &f, double eps_svd, Index m, std::uint64_t seed)
{
  InterpolationSelection sel;
  sel.basis = truncated_basis(f, eps_svd);
  if (m < sel.basis.cols())
    throw InvalidArgument("gappy_clustering: budget m below the basis size");
  if (m > sel.basis.rows())
    throw InvalidArgument("gappy_clustering: budget m exceeds the number of rows");
  sel.indices = cluster_indices(sel.basis, m, seed);
  sel.method = Method::GappyClust;
  return sel;
}

InterpolationSelection qr_pivot_select(const Matrix &y, double eps_qr)
{
  const dense::PivotedQrResult qr = dense::pivoted_qr(y.transpose());
  const Index h = dense::rank_from_rdiag(qr.r_factor, eps_qr);
  InterpolationSelection sel;
  sel.indices.assign(qr.pivots.begin(), qr.pivots.begin() + h);
  sel.method = Method::Qr;
  return sel;
}

TrainingSet subsample_training_set(const TrainingSet &fine, const InterpolationSelection &selection)
{
  std::set<Index> keep;
  for (Index i : selection.indices)
  {
    if (i < 0 || i >= static_cast<Index>(fine.size()))
      throw InvalidArgument("subsample_training_set: index outside the fine training set");
    keep.insert(i);
  }
  std::vector<ParameterSample> samples;
  samples.reserve(keep.size());
  for (Index i : keep)
    samples.push_back(fine[static_cast<std::size_t>(i)]);
  return TrainingSet(std::move(samples), Provenance::Subsampled);
}

Matrix interpolation_operator(const InterpolationSelection &selection)
{
  const Matrix pu = selected_rows(selection.basis, selection.indices);
  if (pu.rows() == pu.cols())
    return selection.basis * pu.partialPivLu().inverse();
  return selection.basis * pu.completeOrthogonalDecomposition().pseudoInverse();
}

InterpolationSelection select_parameters(const Matrix &y, const SelectorConfig &cfg)
{
  switch (cfg.method)
  {
  case Method::Qr:
    return qr_pivot_select(y, cfg.eps_qr);
  case Method::Deim:
    return deim(y, cfg.eps_svd);
  case Method::Qdeim:
    return qdeim(y, cfg.eps_svd);
  case Method::Kdeim:
    return kdeim(y, cfg.eps_svd, cfg.seed);
  case Method::GappyEig:
  case Method::GappyClust:
  {
    const Matrix u = truncated_basis(y, cfg.eps_svd);
    const Index m = std::min<Index>(
        y.rows(), static_cast<Index>(std::ceil(cfg.oversample_factor * static_cast<double>(u.cols()) - 1e-9)));
    if (cfg.method == Method::GappyClust)
    {
      InterpolationSelection sel;
      sel.basis = u;
      sel.indices = cluster_indices(u, std::max(m, u.cols()), cfg.seed);
      sel.method = Method::GappyClust;
      return sel;
    }
    InterpolationSelection base;
    base.basis = u;
    base.indices = qdeim_indices(u);
    base.method = Method::Qdeim;
    return gappy_eigenvector(base, std::max(m, u.cols()));
  }
  }
  throw InvalidArgument("select_parameters: unknown method");
}

}  // namespace rbm::select
