// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "rbm/benchmarks.hpp"
#include "rbm/error.hpp"

namespace rbm
{

double toy_eval(double x1, double x2, const ParameterSample &mu)
{
  if (mu.size() != 2)
    throw InvalidArgument("toy_eval: two parameters expected");
  constexpr double pi = std::numbers::pi;
  const double sum = mu[0] + mu[1];
  const double phase = 0.5 * pi * (x1 + 1.0);
  const double shear = mu[1] - mu[0] - sum * x2;
  const double s = std::sin(phase);
  const double numerator = 1.0 + 0.25 * pi * pi * shear * shear * s * s;
  const double denominator = 1.0 + sum * std::cos(phase);
  return numerator / denominator;
}

SnapshotMatrix toy_snapshots(Index space_per_dim, Index params_per_dim)
{
  const auto xs = linspace(-1.0, 1.0, space_per_dim);
  const auto ms = linspace(-0.4, 0.4, params_per_dim);
  SnapshotMatrix out;
  for (double x2 : xs)
    for (double x1 : xs)
      out.row_points.push_back({x1, x2});
  for (double m2 : ms)
    for (double m1 : ms)
      out.column_params.push_back(ParameterSample{{m1, m2}});

  out.values.resize(static_cast<Index>(out.row_points.size()),
                    static_cast<Index>(out.column_params.size()));
  for (Index c = 0; c < out.values.cols(); ++c)
    for (Index r = 0; r < out.values.rows(); ++r)
      out.values(r, c) = toy_eval(out.row_points[r][0], out.row_points[r][1], out.column_params[c]);
  return out;
}

}  // namespace rbm
