// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_REDUCTION_HPP
#define RBM_REDUCTION_HPP

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/SparseCholesky>

#include "rbm/basis.hpp"
#include "rbm/benchmarks.hpp"
#include "rbm/selector.hpp"

namespace rbm::reduce
{

// Masked evaluation data for the DEIM-approximated nonlinearity.
struct HyperReduction
{
  std::vector<Index> mask;   // interpolation rows I
  std::vector<Index> deps;   // state entries read by f at I
  Matrix basis_at_deps;      // V(deps, :)
  Matrix projector;          // V^T U (P^T U)^{-1}, r x l
  Matrix lifted;             // U (P^T U)^{-1}, n x l
};

// Upper-triangular factor R of W = [E V | K_0 V | K_1 V ... | U(P^T U)^{-1} | B].
// The full-order residual of a reduced step is W c for a short coefficient
// vector c, so ||rho|| = ||R c|| at a cost independent of n.
struct ResidualFactor
{
  Matrix r;
  bool has_constant = false;
  Index num_terms = 0;
  Index nonlinear_cols = 0;
  Index input_cols = 0;
};

// Norms for the energy indicator. X = K(mu_ref) with mu_ref the lower corner
// of the parameter domain, so that min_i theta_i(mu) / theta_i(mu_ref) bounds
// the coercivity of K(mu) in the X-norm from below.
struct EnergyNorm
{
  ParameterSample reference;
  std::vector<double> reference_theta;
  Eigen::SimplicialLLT<SparseMatrix> x_factor;
  double output_dual_mass = 0.0;    // ||C||_{E'}
  double output_dual_energy = 0.0;  // ||C||_{X'}
};

// Requires positive reference coefficients and symmetric positive definite
// E and K(mu_ref).
std::shared_ptr<const EnergyNorm> make_energy_norm(const ParametricFOM &fom);

// Projected operators E_r, K_r (affine pieces), B_r, C_r and optional
// hyper-reduction. Immutable once built.
struct RomOperators
{
  Matrix basis;  // V
  Matrix er;
  Matrix kr_constant;
  std::vector<Matrix> kr_terms;
  Matrix br;
  Matrix cr;
  std::optional<HyperReduction> hyper;
  std::optional<ResidualFactor> residual;
  // Factor of X^{-1/2} W for dual-norm residuals, with the E-norm of the
  // initial projection error.
  std::optional<ResidualFactor> energy_residual;
  std::shared_ptr<const EnergyNorm> energy;
  double initial_error = 0.0;
  double output_norm = 0.0;  // ||C||_2
  double dt = 0.0;
  Index steps = 0;
  bool steady = false;

  Index dim() const { return basis.cols(); }
};

struct ProjectionOptions
{
  bool residual_factor = true;
  std::shared_ptr<const EnergyNorm> energy;
};

// Galerkin projection. With a selection the nonlinearity is hyper-reduced;
// without one (and a nonlinear FOM) the reduced solve lifts to full order.
RomOperators galerkin_project(const ParametricFOM &fom, const ReducedBasis &v,
                              const select::InterpolationSelection *selection = nullptr,
                              const ProjectionOptions &options = {});

struct ReducedTrajectory
{
  Matrix states;   // r x N_t
  Matrix outputs;  // q x N_t
  Matrix nonlinear_samples;  // l x K, masked f at z^{k-1}, when hyper-reduced
};

ReducedTrajectory rom_solve(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu);

struct Enrichment
{
  ReducedBasis basis;
  Index added = 0;
  Index dropped = 0;
};

// Enriches v with up to r_pod leading left singular vectors of X - V V^T X.
Enrichment pod_enrich(const ReducedBasis &v, const Matrix &snapshots, Index r_pod);

enum class OutputSource
{
  True,
  Approximate
};

// Rows follow the training set; columns are time blocks (every `stride`-th
// step, starting at t^0) of q outputs each.
struct OutputSnapshotMatrix
{
  Matrix values;
  OutputSource source = OutputSource::True;
  Index stride = 1;
};

// rom == nullptr selects the full-order source.
OutputSnapshotMatrix assemble_output_matrix(const ParametricFOM &fom, const RomOperators *rom,
                                            const TrainingSet &train, Index stride);

// Output columns of one trajectory subsampled at `stride`.
Vector output_row(const Matrix &outputs, Index stride);

// Row of the approximate output snapshot matrix for one reduced trajectory.
// Steady single-output problems contribute the lifted state instead.
Vector approximate_row(const ParametricFOM &fom, const RomOperators &rom, const ReducedTrajectory &traj,
                       Index stride);

enum class IndicatorMode
{
  Residual,
  Energy,
  TrueError
};

std::string_view to_string(IndicatorMode m);
IndicatorMode indicator_from_string(std::string_view name);

struct ErrorEstimate
{
  double value = 0.0;
  std::vector<double> breakdown;  // per-step residual (or output error) norms
};

// Residual mode: (1/(K+1)) sum_k ||rho^k||_2 * ||C||_2 with rho^k the
// full-order residual of the reduced trajectory.
// Energy mode: (1/(K+1)) sum_k ||C||_{E'} (||e^0||_E^2 + sum_{j<=k} ||rho^j||_{X'}^2 / (dt alpha))^{1/2},
// the implicit-Euler energy bound with alpha = min(1, min_i theta_i(mu) / theta_i(mu_ref)).
// TrueError mode runs the FOM.
ErrorEstimate error_indicator(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                              IndicatorMode mode = IndicatorMode::Residual);

// Indicator from an already computed reduced trajectory (Residual mode only).
ErrorEstimate residual_estimate(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                                const ReducedTrajectory &traj);

// Energy-mode indicator from a reduced trajectory (requires rom.energy).
ErrorEstimate energy_estimate(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                              const ReducedTrajectory &traj);

// Indicator of the given non-true mode from a reduced trajectory.
ErrorEstimate estimate_from_trajectory(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                                       const ReducedTrajectory &traj, IndicatorMode mode);

// Residual norms from the factor R (requires rom.residual).
std::vector<double> residual_norms(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                                   const ReducedTrajectory &traj);

// Dual X-norms of the same residuals (requires rom.energy; assembled in full
// dimension when the ROM has no factor).
std::vector<double> energy_residual_norms(const RomOperators &rom, const ParametricFOM &fom,
                                          const ParameterSample &mu, const ReducedTrajectory &traj);

// Same quantity assembled in full dimension; reference route for tests and
// for ROMs projected without a factor.
std::vector<double> residual_norms_direct(const RomOperators &rom, const ParametricFOM &fom,
                                          const ParameterSample &mu, const ReducedTrajectory &traj);

// (1/(K+1)) sum_k ||y^k - y~^k||.
double mean_output_error(const Matrix &y, const Matrix &y_rom);

struct TestSetError
{
  double max_error = 0.0;
  std::vector<double> per_parameter;
};

TestSetError true_output_error(const ParametricFOM &fom, const RomOperators &rom, const TrainingSet &test);

// FOM output trajectories of every test parameter, for reuse across ROMs.
std::vector<Matrix> fom_outputs(const ParametricFOM &fom, const TrainingSet &test);

// As above, against outputs from fom_outputs.
TestSetError true_output_error(const ParametricFOM &fom, const RomOperators &rom, const TrainingSet &test,
                               const std::vector<Matrix> &reference);

}  // namespace rbm::reduce

#endif  // RBM_REDUCTION_HPP
