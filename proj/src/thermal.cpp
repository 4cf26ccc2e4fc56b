// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "rbm/benchmarks.hpp"
#include "rbm/error.hpp"

namespace rbm
{

namespace
{

using Triplets = std::vector<Eigen::Triplet<double>>;

bool overlaps(const Inclusion &a, const Inclusion &b)
{
  const double half = 0.5 * (a.side + b.side);
  return std::abs(a.center_x - b.center_x) < half && std::abs(a.center_y - b.center_y) < half;
}

bool inside(const Inclusion &inc, double x, double y)
{
  const double h = 0.5 * inc.side;
  return x > inc.center_x - h && x < inc.center_x + h && y > inc.center_y - h && y < inc.center_y + h;
}

double triangle_area(const ThermalMesh &mesh, const std::array<Index, 3> &t)
{
  const auto p0 = mesh.nodes.row(t[0]);
  const auto p1 = mesh.nodes.row(t[1]);
  const auto p2 = mesh.nodes.row(t[2]);
  return 0.5 * std::abs((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

SparseMatrix from_triplets(Index n, const Triplets &trip)
{
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace

ThermalMesh build_thermal_mesh(Index mesh_density, const ThermalGeometry &geometry)
{
  if (mesh_density < 8)
    throw InvalidArgument("build_thermal: mesh_density must be at least 8");
  for (std::size_t i = 0; i < geometry.inclusions.size(); ++i)
  {
    const Inclusion &a = geometry.inclusions[i];
    const double h = 0.5 * a.side;
    if (a.center_x - h < 0.0 || a.center_x + h > 1.0 || a.center_y - h < 0.0 || a.center_y + h > 1.0)
      throw InvalidArgument("build_thermal: inclusion leaves the unit square");
    for (std::size_t j = i + 1; j < geometry.inclusions.size(); ++j)
      if (overlaps(a, geometry.inclusions[j]))
        throw InvalidArgument("build_thermal: inclusions overlap");
  }

  const Index nc = mesh_density;
  const Index nv = nc + 1;
  const double h = 1.0 / static_cast<double>(nc);
  ThermalMesh mesh;
  mesh.cells_per_side = nc;
  mesh.nodes.resize(nv * nv + nc * nc, 2);
  for (Index j = 0; j < nv; ++j)
    for (Index i = 0; i < nv; ++i)
      mesh.nodes.row(i + nv * j) << h * static_cast<double>(i), h * static_cast<double>(j);
  for (Index j = 0; j < nc; ++j)
    for (Index i = 0; i < nc; ++i)
      mesh.nodes.row(nv * nv + i + nc * j) << h * (static_cast<double>(i) + 0.5),
          h * (static_cast<double>(j) + 0.5);

  for (Index j = 0; j < nc; ++j)
  {
    for (Index i = 0; i < nc; ++i)
    {
      const Index p00 = i + nv * j;
      const Index p10 = p00 + 1;
      const Index p01 = p00 + nv;
      const Index p11 = p01 + 1;
      const Index c = nv * nv + i + nc * j;
      mesh.triangles.push_back({p00, p10, c});
      mesh.triangles.push_back({p10, p11, c});
      mesh.triangles.push_back({p11, p01, c});
      mesh.triangles.push_back({p01, p00, c});
    }
  }

  mesh.region.reserve(mesh.triangles.size());
  for (const auto &t : mesh.triangles)
  {
    const double cx = (mesh.nodes(t[0], 0) + mesh.nodes(t[1], 0) + mesh.nodes(t[2], 0)) / 3.0;
    const double cy = (mesh.nodes(t[0], 1) + mesh.nodes(t[1], 1) + mesh.nodes(t[2], 1)) / 3.0;
    int reg = 0;
    for (std::size_t k = 0; k < geometry.inclusions.size(); ++k)
      if (inside(geometry.inclusions[k], cx, cy))
        reg = static_cast<int>(k) + 1;
    mesh.region.push_back(reg);
  }

  mesh.dof_of_node.assign(mesh.nodes.rows(), -1);
  Index next = 0;
  for (Index p = 0; p < mesh.nodes.rows(); ++p)
  {
    const bool dirichlet = p < nv * nv && (p % nv) == nc;
    if (!dirichlet)
      mesh.dof_of_node[p] = next++;
  }
  mesh.num_dofs = next;
  return mesh;
}

SparseMatrix assemble_stiffness(const ThermalMesh &mesh, std::span<const double> conductivity)
{
  if (conductivity.size() != mesh.triangles.size())
    throw InvalidArgument("assemble_stiffness: one conductivity per triangle required");
  Triplets trip;
  trip.reserve(9 * mesh.triangles.size());
  for (std::size_t e = 0; e < mesh.triangles.size(); ++e)
  {
    if (conductivity[e] == 0.0)
      continue;
    const auto &t = mesh.triangles[e];
    const double x0 = mesh.nodes(t[0], 0), y0 = mesh.nodes(t[0], 1);
    const double x1 = mesh.nodes(t[1], 0), y1 = mesh.nodes(t[1], 1);
    const double x2 = mesh.nodes(t[2], 0), y2 = mesh.nodes(t[2], 1);
    const double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
    const double area = 0.5 * std::abs(det);
    // Gradients of the barycentric basis functions.
    const double gx[3] = {(y1 - y2) / det, (y2 - y0) / det, (y0 - y1) / det};
    const double gy[3] = {(x2 - x1) / det, (x0 - x2) / det, (x1 - x0) / det};
    for (int a = 0; a < 3; ++a)
    {
      const Index ra = mesh.dof_of_node[t[a]];
      if (ra < 0)
        continue;
      for (int b = 0; b < 3; ++b)
      {
        const Index rb = mesh.dof_of_node[t[b]];
        if (rb < 0)
          continue;
        trip.emplace_back(ra, rb, conductivity[e] * area * (gx[a] * gx[b] + gy[a] * gy[b]));
      }
    }
  }
  return from_triplets(mesh.num_dofs, trip);
}

ThermalProblem build_thermal_problem(Index mesh_density, const ThermalGeometry &geometry)
{
  ThermalProblem prob;
  prob.mesh = build_thermal_mesh(mesh_density, geometry);
  const ThermalMesh &mesh = prob.mesh;
  const Index n = mesh.num_dofs;
  const std::size_t ne = mesh.triangles.size();

  for (int reg = 0; reg < 5; ++reg)
  {
    std::vector<double> indicator(ne, 0.0);
    for (std::size_t e = 0; e < ne; ++e)
      indicator[e] = mesh.region[e] == reg ? 1.0 : 0.0;
    prob.pieces[reg] = assemble_stiffness(mesh, indicator);
  }

  Triplets mass;
  mass.reserve(9 * ne);
  Vector output = Vector::Zero(n);
  double omega2_area = 0.0;
  for (std::size_t e = 0; e < ne; ++e)
  {
    const auto &t = mesh.triangles[e];
    const double area = triangle_area(mesh, t);
    for (int a = 0; a < 3; ++a)
    {
      const Index ra = mesh.dof_of_node[t[a]];
      if (ra < 0)
        continue;
      for (int b = 0; b < 3; ++b)
      {
        const Index rb = mesh.dof_of_node[t[b]];
        if (rb >= 0)
          mass.emplace_back(ra, rb, area / 12.0 * (a == b ? 2.0 : 1.0));
      }
    }
    if (mesh.region[e] == 2)
    {
      omega2_area += area;
      for (int a = 0; a < 3; ++a)
        if (mesh.dof_of_node[t[a]] >= 0)
          output[mesh.dof_of_node[t[a]]] += area / 3.0;
    }
  }
  if (!(omega2_area > 0.0))
    throw InvalidArgument("build_thermal: output region contains no elements");

  // Unit influx on the left edge w_1 = 0.
  const Index nv = mesh.cells_per_side + 1;
  const double h = 1.0 / static_cast<double>(mesh.cells_per_side);
  Matrix input = Matrix::Zero(n, 1);
  for (Index j = 0; j + 1 < nv; ++j)
  {
    input(mesh.dof_of_node[nv * j], 0) += 0.5 * h;
    input(mesh.dof_of_node[nv * (j + 1)], 0) += 0.5 * h;
  }

  ParametricFOM &fom = prob.fom;
  fom.name = "thermal";
  fom.n = n;
  fom.mass = from_triplets(n, mass);
  fom.stiffness.constant = prob.pieces[0] + geometry.kappa4 * prob.pieces[4];
  fom.stiffness.constant.makeCompressed();
  fom.stiffness.terms = {prob.pieces[1], prob.pieces[2], prob.pieces[3]};
  fom.stiffness.coefficients = [](const ParameterSample &mu) {
    return std::vector<double>{mu[0], mu[1], mu[2]};
  };
  fom.input_map = input;
  fom.output_map = (output / omega2_area).transpose();
  fom.input = [](double, const ParameterSample &) { return Vector::Ones(1); };
  fom.initial_state = Vector::Zero(n);
  fom.dt = 0.01;
  fom.steps = 100;
  fom.domain = thermal_domain();
  return prob;
}

ParametricFOM build_thermal(Index mesh_density) { return build_thermal_problem(mesh_density).fom; }

Trajectory solve_thermal(const ParametricFOM &fom, const ParameterSample &mu)
{
  if (mu.size() != 3 || !fom.domain.contains(mu))
    throw InvalidArgument("solve_thermal: parameter outside the conductivity box");
  return solve_fom(fom, mu);
}

ParameterBox thermal_domain() { return ParameterBox{{1e-5, 1e-5, 1e-4}, {1e-2, 1e-2, 1.0}}; }

TrainingSet thermal_training_set(Index per_dim)
{
  const ParameterBox box = thermal_domain();
  const auto k1 = linspace(box.lower[0], box.upper[0], per_dim);
  const auto k2 = linspace(box.lower[1], box.upper[1], per_dim);
  const auto k3 = linspace(box.lower[2], box.upper[2], per_dim);
  std::vector<ParameterSample> samples;
  for (double c : k3)
    for (double b : k2)
      for (double a : k1)
        samples.push_back(ParameterSample{{a, b, c}});
  return TrainingSet(std::move(samples), Provenance::Fine);
}

}  // namespace rbm
