// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include "rbm/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "rbm/error.hpp"
#include "rbm/random.hpp"

namespace rbm
{

ReducedBasis::ReducedBasis(Index ambient_dim) : n_(ambient_dim), v_(ambient_dim, 0)
{
  if (ambient_dim < 1)
    throw InvalidArgument("ReducedBasis: ambient dimension must be positive");
}

ReducedBasis::ReducedBasis(Matrix columns) : n_(columns.rows()), v_(std::move(columns))
{
  if (n_ < 1)
    throw InvalidArgument("ReducedBasis: ambient dimension must be positive");
  const double defect = orthonormality_defect();
  if (!(defect <= kOrthonormalityTol))
  {
    std::ostringstream msg;
    msg << "ReducedBasis: columns not orthonormal (defect " << defect << ")";
    throw InvalidArgument(msg.str());
  }
}

double ReducedBasis::orthonormality_defect() const
{
  if (v_.cols() == 0)
    return 0.0;
  const Matrix gram = v_.transpose() * v_;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

namespace dense
{

void require_finite(const Matrix &a, const char *what)
{
  if (a.rows() < 1 || a.cols() < 1)
    throw InvalidArgument(std::string(what) + ": matrix must be non-empty");
  if (!a.allFinite())
    throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
}

namespace
{

SvdResult checked(const Eigen::BDCSVD<Matrix> &dec, const Matrix &a, bool with_right)
{
  SvdResult out;
  out.left_vectors = dec.matrixU();
  out.singular_values = dec.singularValues();
  if (with_right)
    out.right_vectors = dec.matrixV();
  if (!out.left_vectors.allFinite() || !out.singular_values.allFinite() ||
      (with_right && !out.right_vectors.allFinite()))
  {
    std::ostringstream msg;
    msg << "svd: failed to converge for " << a.rows() << "x" << a.cols() << " matrix";
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace

SvdResult svd(const Matrix &a)
{
  require_finite(a, "svd");
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return checked(dec, a, true);
}

SvdResult left_svd(const Matrix &a)
{
  require_finite(a, "svd");
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU);
  return checked(dec, a, false);
}

SvdResult randomized_svd(const Matrix &a, double rel_tol, Index max_rank, Index block, std::uint64_t seed,
                         int power_iters)
{
  require_finite(a, "randomized_svd");
  if (block < 1 || max_rank < 1)
    throw InvalidArgument("randomized_svd: block and max_rank must be positive");
  const Index m = a.rows();
  const Index n = a.cols();
  const Index cap = std::min({max_rank, m, n});
  const double total = a.norm();

  Rng rng(seed);
  Matrix residual = a;
  Matrix q(m, 0);
  Matrix b(0, n);
  const auto orthonormal_columns = [](const Matrix &y) {
    Eigen::HouseholderQR<Matrix> qr(y);
    return Matrix(qr.householderQ() * Matrix::Identity(y.rows(), y.cols()));
  };

  while (q.cols() < cap && residual.norm() > rel_tol * total)
  {
    const Index width = std::min(block, cap - q.cols());
    Matrix omega(n, width);
    for (Index j = 0; j < width; ++j)
      for (Index i = 0; i < n; ++i)
        omega(i, j) = rng.normal();
    Matrix y = residual * omega;
    for (int p = 0; p < power_iters; ++p)
    {
      y = orthonormal_columns(y);
      y = residual * (residual.transpose() * y);
    }
    for (int pass = 0; pass < 2; ++pass)
      if (q.cols() > 0)
        y -= q * (q.transpose() * y);
    const Matrix qb = orthonormal_columns(y);
    const Matrix bb = qb.transpose() * residual;
    residual.noalias() -= qb * bb;

    Matrix q_next(m, q.cols() + width);
    q_next << q, qb;
    q = std::move(q_next);
    Matrix b_next(b.rows() + width, n);
    b_next << b, bb;
    b = std::move(b_next);
  }

  SvdResult out;
  if (q.cols() == 0)
  {
    out.left_vectors.resize(m, 0);
    out.singular_values.resize(0);
    out.right_vectors.resize(n, 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> small(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.left_vectors = q * small.matrixU();
  out.singular_values = small.singularValues();
  out.right_vectors = small.matrixV();
  return out;
}

Index rank_from_energy(const Vector &sigma, double eps_svd)
{
  if (sigma.size() == 0)
    throw InvalidArgument("rank_from_energy: empty spectrum");
  if (!(eps_svd > 0.0 && eps_svd < 1.0))
    throw InvalidArgument("rank_from_energy: eps_svd must lie in (0, 1)");
  const Index len = sigma.size();
  // tail[l] = sum_{i >= l} sigma_i (0-based), accumulated smallest first.
  std::vector<double> tail(len + 1, 0.0);
  for (Index i = len - 1; i >= 0; --i)
    tail[i] = tail[i + 1] + sigma[i];
  const double total = tail[0];
  if (!(total > 0.0))
    throw NumericalError("rank_from_energy: zero spectrum");
  for (Index l = 1; l <= len; ++l)
    if (tail[l] / total < eps_svd)
      return l;
  return len;
}

PivotedQrResult pivoted_qr(const Matrix &a)
{
  require_finite(a, "pivoted_qr");
  const Index m = a.rows();
  const Index n = a.cols();
  const Index k = std::min(m, n);

  Matrix work = a;
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<Vector> reflectors;
  std::vector<double> taus;
  reflectors.reserve(k);
  taus.reserve(k);

  for (Index j = 0; j < k; ++j)
  {
    double best = -1.0;
    for (Index c = j; c < n; ++c)
      best = std::max(best, work.col(c).tail(m - j).norm());
    const double cutoff = best * (1.0 - 1e-14);
    Index pick = -1;
    for (Index c = j; c < n; ++c)
    {
      if (work.col(c).tail(m - j).norm() >= cutoff && (pick < 0 || perm[c] < perm[pick]))
        pick = c;
    }
    if (pick != j)
    {
      work.col(j).swap(work.col(pick));
      std::swap(perm[j], perm[pick]);
    }

    // Householder reflector zeroing work(j+1:m, j).
    Vector v = work.col(j).tail(m - j);
    const double alpha = v.norm();
    double tau = 0.0;
    if (alpha > 0.0)
    {
      const double beta = v[0] >= 0.0 ? -alpha : alpha;
      v[0] -= beta;
      const double vnorm2 = v.squaredNorm();
      if (vnorm2 > 0.0)
      {
        tau = 2.0 / vnorm2;
        auto block = work.bottomRightCorner(m - j, n - j);
        const Eigen::RowVectorXd w = v.transpose() * block;
        block.noalias() -= tau * v * w;
      }
      work(j, j) = beta;
      work.col(j).tail(m - j - 1).setZero();
    }
    reflectors.push_back(std::move(v));
    taus.push_back(tau);
  }

  PivotedQrResult out;
  out.r_factor = work.topRows(k).triangularView<Eigen::Upper>();
  out.q_factor = Matrix::Identity(m, k);
  for (Index j = k - 1; j >= 0; --j)
  {
    if (taus[j] == 0.0)
      continue;
    const Vector &v = reflectors[j];
    auto block = out.q_factor.bottomRows(m - j);
    const Eigen::RowVectorXd w = v.transpose() * block;
    block.noalias() -= taus[j] * v * w;
  }
  out.pivots = std::move(perm);
  return out;
}

Index rank_from_rdiag(const Matrix &r_factor, double eps_qr)
{
  const Index k = std::min(r_factor.rows(), r_factor.cols());
  if (k < 1)
    throw InvalidArgument("rank_from_rdiag: empty factor");
  const double lead = std::abs(r_factor(0, 0));
  if (!(lead > 0.0))
    throw NumericalError("rank_from_rdiag: rank-zero matrix");
  for (Index q = 1; q < k; ++q)
    if (std::abs(r_factor(q, q)) / lead < eps_qr)
      return q;
  return k;
}

namespace
{

struct LloydRun
{
  std::vector<Index> assign;
  Matrix centroids;
  double objective = 0.0;
  std::vector<double> history;
};

double sq_dist(const Matrix &x, Index i, const Matrix &c, Index j)
{
  return (x.row(i) - c.row(j)).squaredNorm();
}

double objective_of(const Matrix &x, const Matrix &c, const std::vector<Index> &assign)
{
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i)
    total += sq_dist(x, i, c, assign[i]);
  return total;
}

Matrix kmeanspp_seed(const Matrix &x, Index k, Rng &rng)
{
  const Index n = x.rows();
  Matrix c(k, x.cols());
  std::vector<char> chosen(n, 0);
  Index first = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
  c.row(0) = x.row(first);
  chosen[first] = 1;
  std::vector<double> d2(n);
  for (Index i = 0; i < n; ++i)
    d2[i] = sq_dist(x, i, c, 0);
  for (Index j = 1; j < k; ++j)
  {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Index pick = -1;
    if (total > 0.0)
    {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i)
      {
        if (d2[i] <= 0.0)
          continue;
        acc += d2[i];
        pick = i;
        if (acc > target)
          break;
      }
    }
    if (pick < 0)
    {
      // All remaining mass is zero: duplicate points; take the lowest unused row.
      for (Index i = 0; i < n && pick < 0; ++i)
        if (!chosen[i])
          pick = i;
    }
    chosen[pick] = 1;
    c.row(j) = x.row(pick);
    for (Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], sq_dist(x, i, c, j));
  }
  return c;
}

LloydRun lloyd(const Matrix &x, Index k, Rng &rng)
{
  constexpr int kMaxIterations = 300;
  const Index n = x.rows();
  LloydRun run;
  run.centroids = kmeanspp_seed(x, k, rng);
  run.assign.assign(n, -1);

  for (int it = 0; it < kMaxIterations; ++it)
  {
    bool changed = false;
    for (Index i = 0; i < n; ++i)
    {
      Index best = 0;
      double best_d = sq_dist(x, i, run.centroids, 0);
      for (Index j = 1; j < k; ++j)
      {
        const double d = sq_dist(x, i, run.centroids, j);
        if (d < best_d)
        {
          best_d = d;
          best = j;
        }
      }
      if (run.assign[i] != best)
      {
        run.assign[i] = best;
        changed = true;
      }
    }

    // Empty-cluster repair: move the point farthest from its centroid.
    std::vector<Index> counts(k, 0);
    for (Index i = 0; i < n; ++i)
      ++counts[run.assign[i]];
    for (Index j = 0; j < k; ++j)
    {
      if (counts[j] > 0)
        continue;
      Index far = -1;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i)
      {
        if (counts[run.assign[i]] < 2)
          continue;
        const double d = sq_dist(x, i, run.centroids, run.assign[i]);
        if (d > far_d)
        {
          far_d = d;
          far = i;
        }
      }
      --counts[run.assign[far]];
      run.assign[far] = j;
      counts[j] = 1;
      run.centroids.row(j) = x.row(far);
      changed = true;
    }

    run.centroids.setZero();
    for (Index i = 0; i < n; ++i)
      run.centroids.row(run.assign[i]) += x.row(i);
    for (Index j = 0; j < k; ++j)
      run.centroids.row(j) /= static_cast<double>(counts[j]);

    run.history.push_back(objective_of(x, run.centroids, run.assign));
    if (!changed)
      break;
  }
  run.objective = run.history.back();
  return run;
}

}  // namespace

KmeansResult kmeans(const Matrix &rows_of, Index k, Index restarts, std::uint64_t seed)
{
  require_finite(rows_of, "kmeans");
  if (k < 1 || k > rows_of.rows())
    throw InvalidArgument("kmeans: k must lie in [1, number of rows]");
  if (restarts < 1)
    throw InvalidArgument("kmeans: restarts must be positive");

  KmeansResult out;
  LloydRun best;
  bool have_best = false;
  for (Index r = 0; r < restarts; ++r)
  {
    Rng rng(seed + static_cast<std::uint64_t>(r));
    LloydRun run = lloyd(rows_of, k, rng);
    out.restart_objectives.push_back(run.objective);
    if (!have_best || run.objective < best.objective)
    {
      best = std::move(run);
      have_best = true;
    }
  }

  out.assignments = best.assign;
  out.centroids = best.centroids;
  out.iteration_objectives = best.history;
  out.objective = objective_of(rows_of, out.centroids, out.assignments);
  out.representative_rows.assign(k, -1);
  std::vector<double> rep_d(k, std::numeric_limits<double>::infinity());
  for (Index i = 0; i < rows_of.rows(); ++i)
  {
    const Index j = out.assignments[i];
    const double d = sq_dist(rows_of, i, out.centroids, j);
    if (d < rep_d[j])
    {
      rep_d[j] = d;
      out.representative_rows[j] = i;
    }
  }
  return out;
}

Orthonormalized orthonormalize_against(const ReducedBasis &v, const Matrix &w)
{
  if (w.cols() > 0 && w.rows() != v.ambient_dim())
    throw InvalidArgument("orthonormalize_against: row count mismatch");
  const Index n = v.ambient_dim();
  const Index r0 = v.dim();
  Matrix q(n, r0 + w.cols());
  q.leftCols(r0) = v.matrix();
  Index r = r0;
  Index dropped = 0;
  for (Index c = 0; c < w.cols(); ++c)
  {
    Vector x = w.col(c);
    const double before = x.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < r; ++j)
        x -= q.col(j).dot(x) * q.col(j);
    const double after = x.norm();
    if (!(after >= 1e-12 * (before + 1.0)))
    {
      ++dropped;
      continue;
    }
    q.col(r++) = x / after;
  }
  q.conservativeResize(n, r);
  return Orthonormalized{ReducedBasis(std::move(q)), dropped};
}

double sigma_min(const Matrix &a)
{
  if (a.rows() == 0 || a.cols() == 0)
    return 0.0;
  Eigen::JacobiSVD<Matrix> dec(a);
  const Vector &s = dec.singularValues();
  if (a.rows() < a.cols())
    return 0.0;
  return s[s.size() - 1];
}

double norm2(const Matrix &a)
{
  if (a.rows() == 0 || a.cols() == 0)
    return 0.0;
  Eigen::BDCSVD<Matrix> dec(a);
  return dec.singularValues()[0];
}

}  // namespace dense
}  // namespace rbm
