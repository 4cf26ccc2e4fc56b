// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_BENCHMARKS_HPP
#define RBM_BENCHMARKS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "rbm/basis.hpp"

namespace rbm
{

using SparseMatrix = Eigen::SparseMatrix<double>;

struct ParameterSample
{
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const ParameterSample &) const = default;
};

// Axis-aligned parameter domain.
struct ParameterBox
{
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
  bool contains(const ParameterSample &mu) const;
};

enum class Provenance
{
  Fine,
  Subsampled,
  Test
};

// Ordered, duplicate-free list of parameters. The position of a sample is
// its identity for the selectors.
class TrainingSet
{
public:
  TrainingSet() = default;
  TrainingSet(std::vector<ParameterSample> samples, Provenance provenance);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const ParameterSample &operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<ParameterSample> &samples() const { return samples_; }
  Provenance provenance() const { return provenance_; }

  // Position of mu in the set, or -1.
  Index find(const ParameterSample &mu) const;

private:
  std::vector<ParameterSample> samples_;
  Provenance provenance_ = Provenance::Fine;
};

// K(mu) = constant + sum_i theta_i(mu) * terms[i].
struct AffineOperator
{
  SparseMatrix constant;
  std::vector<SparseMatrix> terms;
  std::function<std::vector<double>(const ParameterSample &)> coefficients;

  std::vector<double> theta(const ParameterSample &mu) const;
  SparseMatrix assemble(const ParameterSample &mu) const;
};

// Explicitly treated nonlinearity f(x, mu). Masked evaluation reads only the
// state entries listed by dependencies() and reproduces evaluate() exactly at
// the requested rows.
class Nonlinearity
{
public:
  virtual ~Nonlinearity() = default;

  virtual Vector evaluate(const Vector &x, const ParameterSample &mu) const = 0;

  // Sorted, unique state indices needed to evaluate f at `rows`.
  virtual std::vector<Index> dependencies(std::span<const Index> rows) const = 0;

  // `x_deps[j]` holds the state entry at index `deps[j]`.
  virtual Vector evaluate_at(std::span<const Index> rows, std::span<const Index> deps,
                             const Vector &x_deps, const ParameterSample &mu) const = 0;
};

// Discretized parametric model
//   (E + dt K(mu)) x^k = E x^{k-1} + dt (f(x^{k-1}, mu) + B u(t^{k-1}, mu)),  y^k = C x^k
// or, when steady, K(mu) x = f(x, mu) + B u(0, mu).
struct ParametricFOM
{
  std::string name;
  Index n = 0;
  SparseMatrix mass;
  AffineOperator stiffness;
  Matrix input_map;   // n x m
  Matrix output_map;  // q x n
  std::shared_ptr<const Nonlinearity> nonlinearity;
  std::function<Vector(double, const ParameterSample &)> input;
  Vector initial_state;
  double dt = 0.0;
  Index steps = 0;  // K
  bool steady = false;
  ParameterBox domain;

  Index num_times() const { return steady ? 1 : steps + 1; }
  Index num_outputs() const { return output_map.rows(); }
  Index num_inputs() const { return input_map.cols(); }
  double time(Index k) const { return static_cast<double>(k) * dt; }
};

struct Trajectory
{
  Matrix states;   // n x N_t
  Matrix outputs;  // q x N_t
};

// Solves the FOM, caching sparse factorizations per parameter so repeated
// solves at the same mu reuse them.
class FomSolver
{
public:
  explicit FomSolver(const ParametricFOM &fom, std::size_t cache_capacity = 8);

  // When `nonlinear_snapshots` is given it receives f(x^k, mu), k = 0..K-1.
  Trajectory solve(const ParameterSample &mu, Matrix *nonlinear_snapshots = nullptr);

private:
  using Factorization = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

  const Factorization &factor(const ParameterSample &mu);

  const ParametricFOM &fom_;
  std::size_t capacity_;
  std::vector<std::pair<ParameterSample, std::unique_ptr<Factorization>>> cache_;
};

Trajectory solve_fom(const ParametricFOM &fom, const ParameterSample &mu);

// ---------------------------------------------------------------- Burgers

// Viscous Burgers on (0, 1): n unknowns at w_j = j/n, x(0) = 0 eliminated,
// zero-flux right end by x_{n+1} = x_n. Diffusion mu * A_diff implicit,
// backward-difference convection explicit, unit forcing, y = x(1).
ParametricFOM build_burgers(Index n = 1000, double dt = 1e-3, double horizon = 2.0);

// The second-difference matrix A_diff (n x n, including the 1/dw^2 factor).
SparseMatrix burgers_diffusion(Index n);

Trajectory solve_burgers(const ParametricFOM &fom, const ParameterSample &mu);

ParameterBox burgers_domain();

// `count` equally spaced viscosities in [0.005, 1].
TrainingSet burgers_training_set(Index count = 100);

// ---------------------------------------------------------------- thermal

struct Inclusion
{
  double center_x;
  double center_y;
  double side;
};

struct ThermalGeometry
{
  // Inclusions Omega_1..Omega_4; the output averages over Omega_2.
  std::array<Inclusion, 4> inclusions{{{0.3, 0.3, 0.3}, {0.7, 0.3, 0.3}, {0.3, 0.7, 0.3}, {0.7, 0.7, 0.3}}};
  double kappa4 = 0.5;
};

// Crossed structured triangulation of (0,1)^2: every cell carries a center
// node and four triangles.
struct ThermalMesh
{
  Index cells_per_side = 0;
  Matrix nodes;  // num_nodes x 2
  std::vector<std::array<Index, 3>> triangles;
  std::vector<int> region;         // per triangle, 0..4 by centroid
  std::vector<Index> dof_of_node;  // -1 on the Dirichlet boundary w_1 = 1
  Index num_dofs = 0;
};

ThermalMesh build_thermal_mesh(Index mesh_density, const ThermalGeometry &geometry = {});

// P1 stiffness matrix with element-wise conductivity, restricted to free dofs.
SparseMatrix assemble_stiffness(const ThermalMesh &mesh, std::span<const double> conductivity);

struct ThermalProblem
{
  ThermalMesh mesh;
  std::array<SparseMatrix, 5> pieces;  // A_0 .. A_4, each assembled over its region only
  ParametricFOM fom;
};

ThermalProblem build_thermal_problem(Index mesh_density = 32, const ThermalGeometry &geometry = {});

ParametricFOM build_thermal(Index mesh_density = 32);

Trajectory solve_thermal(const ParametricFOM &fom, const ParameterSample &mu);

// [1e-5, 1e-2] x [1e-5, 1e-2] x [1e-4, 1] for (kappa_1, kappa_2, kappa_3).
ParameterBox thermal_domain();

// Tensor grid with `per_dim` equispaced values per axis, kappa_1 fastest.
TrainingSet thermal_training_set(Index per_dim = 6);

// ---------------------------------------------------------------- toy

double toy_eval(double x1, double x2, const ParameterSample &mu);

struct SnapshotMatrix
{
  Matrix values;
  std::vector<std::array<double, 2>> row_points;  // spatial points, x1 fastest
  std::vector<ParameterSample> column_params;     // parameters, mu1 fastest
};

// 50 x 50 spatial grid on [-1,1]^2 by 40 x 40 parameter grid on [-0.4,0.4]^2.
SnapshotMatrix toy_snapshots(Index space_per_dim = 50, Index params_per_dim = 40);

// ---------------------------------------------------------------- sets

// Uniform random samples in `box`, rejecting any sample equal to a member of
// `exclude` or to an earlier draw.
TrainingSet random_test_set(const ParameterBox &box, Index count, std::uint64_t seed,
                            const TrainingSet &exclude);

std::vector<double> linspace(double lo, double hi, Index count);

}  // namespace rbm

#endif  // RBM_BENCHMARKS_HPP
