// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rbm/benchmarks.hpp"
#include "rbm/error.hpp"

namespace rbm
{

namespace
{

// f_i = -x_i (x_i - x_{i-1}) / dw with x_{-1} = 0 (Dirichlet node). First-order
// upwinding for a non-negative transport velocity.
class BurgersConvection final : public Nonlinearity
{
public:
  explicit BurgersConvection(double dw) : inv_dw_(1.0 / dw) {}

  Vector evaluate(const Vector &x, const ParameterSample &) const override
  {
    const Index n = x.size();
    Vector f(n);
    double left = 0.0;
    for (Index i = 0; i < n; ++i)
    {
      if (x[i] < -kNegativeTol)
      {
        std::ostringstream msg;
        msg << "Burgers: upwind direction violated, x[" << i << "] = " << x[i];
        throw NumericalError(msg.str());
      }
      f[i] = -x[i] * (x[i] - left) * inv_dw_;
      left = x[i];
    }
    return f;
  }

  std::vector<Index> dependencies(std::span<const Index> rows) const override
  {
    std::vector<Index> deps;
    deps.reserve(2 * rows.size());
    for (Index r : rows)
    {
      if (r > 0)
        deps.push_back(r - 1);
      deps.push_back(r);
    }
    std::sort(deps.begin(), deps.end());
    deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
    return deps;
  }

  Vector evaluate_at(std::span<const Index> rows, std::span<const Index> deps,
                     const Vector &x_deps, const ParameterSample &) const override
  {
    Vector f(static_cast<Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j)
    {
      const Index r = rows[j];
      const auto at = [&](Index idx) {
        const auto it = std::lower_bound(deps.begin(), deps.end(), idx);
        return x_deps[static_cast<Index>(it - deps.begin())];
      };
      const double xi = at(r);
      const double left = r > 0 ? at(r - 1) : 0.0;
      f[static_cast<Index>(j)] = -xi * (xi - left) * inv_dw_;
    }
    return f;
  }

private:
  static constexpr double kNegativeTol = 1e-10;
  double inv_dw_;
};

}  // namespace

SparseMatrix burgers_diffusion(Index n)
{
  if (n < 3)
    throw InvalidArgument("build_burgers: n must be at least 3");
  const double dw = 1.0 / static_cast<double>(n);
  const double s = 1.0 / (dw * dw);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * n);
  for (Index i = 0; i < n; ++i)
  {
    if (i > 0)
      trip.emplace_back(i, i - 1, s);
    if (i + 1 < n)
    {
      trip.emplace_back(i, i + 1, s);
      trip.emplace_back(i, i, -2.0 * s);
    }
    else
    {
      // Ghost value x_{n+1} = x_n folds the zero-flux condition into the last row.
      trip.emplace_back(i, i, -s);
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

ParameterBox burgers_domain() { return ParameterBox{{0.005}, {1.0}}; }

ParametricFOM build_burgers(Index n, double dt, double horizon)
{
  if (n < 3)
    throw InvalidArgument("build_burgers: n must be at least 3");
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw InvalidArgument("build_burgers: dt and horizon must be positive");

  ParametricFOM fom;
  fom.name = "burgers";
  fom.n = n;
  fom.mass.resize(n, n);
  fom.mass.setIdentity();
  fom.stiffness.constant.resize(n, n);
  fom.stiffness.terms.push_back(-burgers_diffusion(n));
  fom.stiffness.coefficients = [](const ParameterSample &mu) { return std::vector<double>{mu[0]}; };
  fom.input_map = Matrix::Ones(n, 1);
  fom.output_map = Matrix::Zero(1, n);
  fom.output_map(0, n - 1) = 1.0;
  fom.nonlinearity = std::make_shared<BurgersConvection>(1.0 / static_cast<double>(n));
  fom.input = [](double, const ParameterSample &) { return Vector::Ones(1); };
  fom.initial_state = Vector::Zero(n);
  fom.dt = dt;
  fom.steps = static_cast<Index>(std::llround(horizon / dt));
  fom.domain = burgers_domain();
  return fom;
}

Trajectory solve_burgers(const ParametricFOM &fom, const ParameterSample &mu)
{
  if (mu.size() != 1 || !fom.domain.contains(mu))
    throw InvalidArgument("solve_burgers: viscosity outside [0.005, 1]");
  return solve_fom(fom, mu);
}

TrainingSet burgers_training_set(Index count)
{
  std::vector<ParameterSample> samples;
  for (double v : linspace(0.005, 1.0, count))
    samples.push_back(ParameterSample{{v}});
  return TrainingSet(std::move(samples), Provenance::Fine);
}

}  // namespace rbm
