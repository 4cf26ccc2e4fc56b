// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rbm/benchmarks.hpp"
#include "rbm/error.hpp"
#include "rbm/random.hpp"

namespace rbm
{

namespace
{

std::string describe(const ParameterSample &mu)
{
  std::ostringstream out;
  out.precision(17);
  out << "mu=(";
  for (std::size_t i = 0; i < mu.size(); ++i)
    out << (i ? ", " : "") << mu[i];
  out << ")";
  return out.str();
}

}  // namespace

bool ParameterBox::contains(const ParameterSample &mu) const
{
  if (mu.size() != lower.size())
    return false;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (!(mu[i] >= lower[i] && mu[i] <= upper[i]))
      return false;
  return true;
}

TrainingSet::TrainingSet(std::vector<ParameterSample> samples, Provenance provenance)
    : samples_(std::move(samples)), provenance_(provenance)
{
  std::vector<std::vector<double>> sorted;
  sorted.reserve(samples_.size());
  for (const auto &s : samples_)
    sorted.push_back(s.values);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgument("TrainingSet: duplicate parameter sample");
}

Index TrainingSet::find(const ParameterSample &mu) const
{
  for (std::size_t i = 0; i < samples_.size(); ++i)
    if (samples_[i] == mu)
      return static_cast<Index>(i);
  return -1;
}

std::vector<double> AffineOperator::theta(const ParameterSample &mu) const
{
  std::vector<double> t = coefficients ? coefficients(mu) : std::vector<double>{};
  if (t.size() != terms.size())
    throw InvalidArgument("AffineOperator: coefficient count does not match term count");
  return t;
}

SparseMatrix AffineOperator::assemble(const ParameterSample &mu) const
{
  const std::vector<double> t = theta(mu);
  SparseMatrix out = constant;
  for (std::size_t i = 0; i < terms.size(); ++i)
    out += t[i] * terms[i];
  out.makeCompressed();
  return out;
}

FomSolver::FomSolver(const ParametricFOM &fom, std::size_t cache_capacity)
    : fom_(fom), capacity_(std::max<std::size_t>(cache_capacity, 1))
{
}

const FomSolver::Factorization &FomSolver::factor(const ParameterSample &mu)
{
  for (auto &entry : cache_)
    if (entry.first == mu)
      return *entry.second;

  SparseMatrix system = fom_.stiffness.assemble(mu);
  if (!fom_.steady)
  {
    system *= fom_.dt;
    system += fom_.mass;
  }
  system.makeCompressed();
  auto lu = std::make_unique<Factorization>();
  lu->analyzePattern(system);
  lu->factorize(system);
  if (lu->info() != Eigen::Success)
    throw NumericalError("FOM: singular system matrix at " + describe(mu));

  if (cache_.size() >= capacity_)
    cache_.erase(cache_.begin());
  cache_.emplace_back(mu, std::move(lu));
  return *cache_.back().second;
}

Trajectory FomSolver::solve(const ParameterSample &mu, Matrix *nonlinear_snapshots)
{
  const Factorization &lu = factor(mu);
  const Index n = fom_.n;
  Trajectory traj;

  if (fom_.steady)
  {
    const Vector forcing = fom_.input_map * fom_.input(0.0, mu);
    Vector x = lu.solve(forcing);
    if (fom_.nonlinearity)
    {
      constexpr int kMaxPicard = 100;
      int it = 0;
      for (; it < kMaxPicard; ++it)
      {
        const Vector next = lu.solve(Vector(fom_.nonlinearity->evaluate(x, mu) + forcing));
        const double step = (next - x).norm();
        x = next;
        if (step <= 1e-12 * std::max(1.0, x.norm()))
          break;
      }
      if (it == kMaxPicard)
        throw NumericalError("FOM: steady fixed-point iteration stalled at " + describe(mu));
      if (nonlinear_snapshots)
        *nonlinear_snapshots = fom_.nonlinearity->evaluate(x, mu);
    }
    if (!x.allFinite())
      throw NumericalError("FOM: non-finite steady state at " + describe(mu));
    traj.states = x;
    traj.outputs = fom_.output_map * x;
    return traj;
  }

  const Index nt = fom_.num_times();
  traj.states.resize(n, nt);
  traj.states.col(0) = fom_.initial_state;
  if (nonlinear_snapshots && fom_.nonlinearity)
    nonlinear_snapshots->resize(n, fom_.steps);

  Vector rhs(n);
  for (Index k = 1; k < nt; ++k)
  {
    const auto prev = traj.states.col(k - 1);
    rhs = fom_.input_map * fom_.input(fom_.time(k - 1), mu);
    if (fom_.nonlinearity)
    {
      Vector fk = fom_.nonlinearity->evaluate(prev, mu);
      rhs += fk;
      if (nonlinear_snapshots)
        nonlinear_snapshots->col(k - 1) = fk;
    }
    rhs *= fom_.dt;
    rhs += fom_.mass * prev;
    traj.states.col(k) = lu.solve(rhs);
    if (!traj.states.col(k).allFinite())
    {
      std::ostringstream msg;
      msg << "FOM: non-finite state at step " << k << ", " << describe(mu);
      throw NumericalError(msg.str());
    }
  }
  traj.outputs = fom_.output_map * traj.states;
  return traj;
}

Trajectory solve_fom(const ParametricFOM &fom, const ParameterSample &mu)
{
  FomSolver solver(fom, 1);
  return solver.solve(mu);
}

std::vector<double> linspace(double lo, double hi, Index count)
{
  if (count < 1)
    throw InvalidArgument("linspace: count must be positive");
  std::vector<double> out(count);
  if (count == 1)
  {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (Index i = 0; i < count; ++i)
    out[i] = lo + step * static_cast<double>(i);
  out[count - 1] = hi;
  return out;
}

TrainingSet random_test_set(const ParameterBox &box, Index count, std::uint64_t seed,
                            const TrainingSet &exclude)
{
  Rng rng(seed);
  std::vector<ParameterSample> drawn;
  drawn.reserve(count);
  while (static_cast<Index>(drawn.size()) < count)
  {
    ParameterSample mu;
    for (std::size_t d = 0; d < box.dim(); ++d)
      mu.values.push_back(rng.uniform(box.lower[d], box.upper[d]));
    if (exclude.find(mu) >= 0 || std::find(drawn.begin(), drawn.end(), mu) != drawn.end())
      continue;
    drawn.push_back(std::move(mu));
  }
  return TrainingSet(std::move(drawn), Provenance::Test);
}

}  // namespace rbm
