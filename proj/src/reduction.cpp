// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include "rbm/reduction.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/QR>

#include "rbm/dense.hpp"
#include "rbm/error.hpp"
#include "rbm/parallel.hpp"

namespace rbm::reduce
{

namespace
{

constexpr int kMaxPicard = 100;
constexpr double kReducedRcondFloor = 1e-14;
constexpr double kPodKeepRelative = 1e-12;
constexpr Index kPodOversample = 10;
constexpr Index kExactSvdLimit = 64;
constexpr std::uint64_t kPodSketchSeed = 0x9e3779b97f4a7c15ULL;

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

Matrix project(const Matrix &v, const SparseMatrix &a) { return v.transpose() * (a * v); }

Matrix reduced_stiffness(const RomOperators &rom, const std::vector<double> &theta)
{
  Matrix k = rom.kr_constant;
  for (std::size_t i = 0; i < rom.kr_terms.size(); ++i)
    k += theta[i] * rom.kr_terms[i];
  return k;
}

Eigen::PartialPivLU<Matrix> factor_reduced(const Matrix &m, const ParameterSample &mu)
{
  Eigen::PartialPivLU<Matrix> lu(m);
  const double rc = lu.rcond();
  if (!(rc > kReducedRcondFloor))
    throw NumericalError("ROM: singular reduced system matrix at " + describe(mu));
  return lu;
}

// Nonlinear term at state z: masked values (hyper-reduced) or the full vector.
struct NonlinearEval
{
  Vector masked;
  Vector full;
};

NonlinearEval eval_nonlinear(const RomOperators &rom, const ParametricFOM &fom, const Vector &z,
                             const ParameterSample &mu)
{
  NonlinearEval out;
  if (rom.hyper)
  {
    const HyperReduction &h = *rom.hyper;
    const Vector x_deps = h.basis_at_deps * z;
    out.masked = fom.nonlinearity->evaluate_at(h.mask, h.deps, x_deps, mu);
  }
  else
  {
    out.full = fom.nonlinearity->evaluate(rom.basis * z, mu);
  }
  return out;
}

void check_finite(const Vector &z, const ParameterSample &mu, Index step)
{
  if (!z.allFinite())
  {
    std::ostringstream msg;
    msg << "ROM: non-finite reduced state at step " << step << ", " << describe(mu);
    throw NumericalError(msg.str());
  }
}

// Upper-triangular factor of W = [E V | K_0 V | K_i V ... | lifted | B], or of
// L^{-1} P W when an energy norm X = P^T L L^T P is given.
ResidualFactor build_factor(const ParametricFOM &fom, const Matrix &vm, const HyperReduction *hyper,
                            const EnergyNorm *energy)
{
  ResidualFactor rf;
  const Index r = vm.cols();
  rf.has_constant = fom.stiffness.constant.nonZeros() > 0;
  rf.num_terms = static_cast<Index>(fom.stiffness.terms.size());
  rf.nonlinear_cols = hyper ? hyper->lifted.cols() : 0;
  rf.input_cols = fom.input_map.cols();
  const Index mass_cols = fom.steady ? 0 : r;
  const Index d = mass_cols + (rf.has_constant ? r : 0) + rf.num_terms * r + rf.nonlinear_cols + rf.input_cols;

  Matrix w(fom.n, d);
  Index at = 0;
  if (mass_cols)
  {
    w.middleCols(at, r) = fom.mass * vm;
    at += r;
  }
  if (rf.has_constant)
  {
    w.middleCols(at, r) = fom.stiffness.constant * vm;
    at += r;
  }
  for (const auto &term : fom.stiffness.terms)
  {
    w.middleCols(at, r) = term * vm;
    at += r;
  }
  if (rf.nonlinear_cols)
  {
    w.middleCols(at, rf.nonlinear_cols) = hyper->lifted;
    at += rf.nonlinear_cols;
  }
  w.middleCols(at, rf.input_cols) = fom.input_map;

  if (energy)
  {
    const auto &llt = energy->x_factor;
    Matrix pw = llt.permutationP() * w;
    llt.matrixL().solveInPlace(pw);
    w = std::move(pw);
  }
  if (d > 0)
  {
    Eigen::HouseholderQR<Matrix> qr(w);
    const Index rows = std::min(fom.n, d);
    rf.r = qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>();
  }
  else
  {
    rf.r.resize(0, 0);
  }
  return rf;
}

// ||R c_k|| per step for the residual coefficient vectors c_k of traj.
std::vector<double> factor_norms(const ResidualFactor &rf, Index r, const ParametricFOM &fom,
                                 const ParameterSample &mu, const ReducedTrajectory &traj)
{
  const std::vector<double> theta = fom.stiffness.theta(mu);
  const Index d = rf.r.cols();
  Vector c(d);

  const auto fill = [&](const Vector *z_prev, const Vector &z, double scale, const Vector &f_i,
                        const Vector &u) {
    Index at = 0;
    if (z_prev)
    {
      c.segment(at, r) = z - *z_prev;
      at += r;
    }
    if (rf.has_constant)
    {
      c.segment(at, r) = scale * z;
      at += r;
    }
    for (Index i = 0; i < rf.num_terms; ++i)
    {
      c.segment(at, r) = (scale * theta[i]) * z;
      at += r;
    }
    if (rf.nonlinear_cols)
    {
      c.segment(at, rf.nonlinear_cols) = -scale * f_i;
      at += rf.nonlinear_cols;
    }
    c.segment(at, rf.input_cols) = -scale * u;
  };

  std::vector<double> norms;
  const Vector empty;
  if (fom.steady)
  {
    const Vector z = r ? Vector(traj.states.col(0)) : Vector();
    const Vector f_i = rf.nonlinear_cols ? Vector(traj.nonlinear_samples.col(0)) : empty;
    fill(nullptr, z, 1.0, f_i, fom.input(0.0, mu));
    norms.push_back(d ? (rf.r * c).norm() : 0.0);
    return norms;
  }
  norms.reserve(fom.steps);
  for (Index k = 1; k <= fom.steps; ++k)
  {
    const Vector z = r ? Vector(traj.states.col(k)) : Vector();
    const Vector zp = r ? Vector(traj.states.col(k - 1)) : Vector();
    const Vector f_i = rf.nonlinear_cols ? Vector(traj.nonlinear_samples.col(k - 1)) : empty;
    fill(r ? &zp : nullptr, z, fom.dt, f_i, fom.input(fom.time(k - 1), mu));
    norms.push_back(d ? (rf.r * c).norm() : 0.0);
  }
  return norms;
}

// Spectral norm of C S^{-1/2} for an SPD S given by its factor: the dual norm
// of the output functional.
double dual_output_norm(const Matrix &c, const Eigen::SimplicialLLT<SparseMatrix> &llt)
{
  Matrix g = llt.permutationP() * Matrix(c.transpose());
  llt.matrixL().solveInPlace(g);
  return dense::norm2(g);
}

// Residuals assembled in full dimension, measured by `norm`.
template <typename Norm>
std::vector<double> direct_norms(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                                 const ReducedTrajectory &traj, Norm norm)
{
  const SparseMatrix k_mu = fom.stiffness.assemble(mu);
  const Index r = rom.dim();
  const auto lift = [&](Index col) -> Vector {
    return r ? Vector(rom.basis * traj.states.col(col)) : Vector::Zero(fom.n);
  };
  const auto nonlinear = [&](Index sample_col, const Vector &x_prev) -> Vector {
    if (!fom.nonlinearity)
      return Vector::Zero(fom.n);
    if (rom.hyper)
      return rom.hyper->lifted * traj.nonlinear_samples.col(sample_col);
    return fom.nonlinearity->evaluate(x_prev, mu);
  };

  std::vector<double> norms;
  if (fom.steady)
  {
    const Vector x = lift(0);
    norms.push_back(norm(Vector(k_mu * x - nonlinear(0, x) - fom.input_map * fom.input(0.0, mu))));
    return norms;
  }
  norms.reserve(fom.steps);
  for (Index k = 1; k <= fom.steps; ++k)
  {
    const Vector x = lift(k);
    const Vector xp = lift(k - 1);
    const Vector rho = fom.mass * (x - xp) +
                       fom.dt * (k_mu * x - nonlinear(k - 1, xp) - fom.input_map * fom.input(fom.time(k - 1), mu));
    norms.push_back(norm(rho));
  }
  return norms;
}

}  // namespace

std::string_view to_string(IndicatorMode m)
{
  switch (m)
  {
  case IndicatorMode::Residual:
    return "residual";
  case IndicatorMode::Energy:
    return "energy";
  case IndicatorMode::TrueError:
    return "true-error";
  }
  return "unknown";
}

IndicatorMode indicator_from_string(std::string_view name)
{
  for (IndicatorMode m : {IndicatorMode::Residual, IndicatorMode::Energy, IndicatorMode::TrueError})
    if (to_string(m) == name)
      return m;
  throw InvalidArgument("unknown indicator '" + std::string(name) + "'");
}

std::shared_ptr<const EnergyNorm> make_energy_norm(const ParametricFOM &fom)
{
  if (fom.domain.dim() == 0)
    throw InvalidArgument("make_energy_norm: FOM has no parameter domain");
  auto out = std::make_shared<EnergyNorm>();
  out->reference = ParameterSample{fom.domain.lower};
  out->reference_theta = fom.stiffness.theta(out->reference);
  for (double t : out->reference_theta)
    if (!(t > 0.0))
      throw InvalidArgument("make_energy_norm: affine coefficients must be positive at the reference parameter");
  const SparseMatrix x = fom.stiffness.assemble(out->reference);
  out->x_factor.compute(x);
  if (out->x_factor.info() != Eigen::Success)
    throw NumericalError("make_energy_norm: K(mu_ref) is not positive definite");
  out->output_dual_energy = dual_output_norm(fom.output_map, out->x_factor);
  if (!fom.steady)
  {
    Eigen::SimplicialLLT<SparseMatrix> mass(fom.mass);
    if (mass.info() != Eigen::Success)
      throw NumericalError("make_energy_norm: mass matrix is not positive definite");
    out->output_dual_mass = dual_output_norm(fom.output_map, mass);
  }
  return out;
}

RomOperators galerkin_project(const ParametricFOM &fom, const ReducedBasis &v,
                              const select::InterpolationSelection *selection, const ProjectionOptions &options)
{
  if (v.ambient_dim() != fom.n)
    throw InvalidArgument("galerkin_project: basis dimension does not match the FOM");
  if (selection && !fom.nonlinearity)
    throw InvalidArgument("galerkin_project: selection given for a linear FOM");

  RomOperators rom;
  const Matrix &vm = v.matrix();
  rom.basis = vm;
  rom.er = project(vm, fom.mass);
  rom.kr_constant = project(vm, fom.stiffness.constant);
  for (const auto &term : fom.stiffness.terms)
    rom.kr_terms.push_back(project(vm, term));
  rom.br = vm.transpose() * fom.input_map;
  rom.cr = fom.output_map * vm;
  rom.output_norm = dense::norm2(fom.output_map);
  rom.dt = fom.dt;
  rom.steps = fom.steps;
  rom.steady = fom.steady;

  if (selection)
  {
    if (selection->basis.rows() != fom.n)
      throw InvalidArgument("galerkin_project: interpolation basis dimension does not match the FOM");
    for (Index i : selection->indices)
      if (i < 0 || i >= fom.n)
        throw InvalidArgument("galerkin_project: interpolation index out of range");
    HyperReduction h;
    h.mask = selection->indices;
    h.deps = fom.nonlinearity->dependencies(h.mask);
    h.basis_at_deps = select::selected_rows(vm, h.deps);
    h.lifted = select::interpolation_operator(*selection);
    h.projector = vm.transpose() * h.lifted;
    rom.hyper = std::move(h);
  }

  if (options.residual_factor && (!fom.nonlinearity || rom.hyper))
  {
    rom.residual = build_factor(fom, vm, rom.hyper ? &*rom.hyper : nullptr, nullptr);
    if (options.energy)
      rom.energy_residual = build_factor(fom, vm, rom.hyper ? &*rom.hyper : nullptr, options.energy.get());
  }
  if (options.energy)
  {
    rom.energy = options.energy;
    const Vector e0 = fom.initial_state - vm * (vm.transpose() * fom.initial_state);
    rom.initial_error = fom.steady ? 0.0 : std::sqrt(std::max(0.0, e0.dot(fom.mass * e0)));
  }
  return rom;
}

ReducedTrajectory rom_solve(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu)
{
  const Index r = rom.dim();
  const Index nt = fom.num_times();
  const Index q = fom.num_outputs();
  ReducedTrajectory traj;
  const bool nonlinear = static_cast<bool>(fom.nonlinearity);

  if (r == 0)
  {
    traj.states.resize(0, nt);
    traj.outputs = Matrix::Zero(q, nt);
    if (rom.hyper)
      traj.nonlinear_samples = Matrix::Zero(rom.hyper->mask.size(), fom.steady ? 1 : fom.steps);
    return traj;
  }

  const std::vector<double> theta = fom.stiffness.theta(mu);
  const Matrix kr = reduced_stiffness(rom, theta);

  if (fom.steady)
  {
    const auto lu = factor_reduced(kr, mu);
    const Vector forcing = rom.br * fom.input(0.0, mu);
    Vector z = lu.solve(forcing);
    Vector last_masked;
    if (nonlinear)
    {
      int it = 0;
      for (; it < kMaxPicard; ++it)
      {
        const NonlinearEval nl = eval_nonlinear(rom, fom, z, mu);
        Vector rhs = forcing;
        if (rom.hyper)
        {
          rhs += rom.hyper->projector * nl.masked;
          last_masked = nl.masked;
        }
        else
        {
          rhs += rom.basis.transpose() * nl.full;
        }
        const Vector next = lu.solve(rhs);
        const double step = (next - z).norm();
        z = next;
        if (step <= 1e-12 * std::max(1.0, z.norm()))
          break;
      }
      if (it == kMaxPicard)
        throw NumericalError("ROM: steady fixed-point iteration stalled at " + describe(mu));
      if (rom.hyper)
        last_masked = eval_nonlinear(rom, fom, z, mu).masked;
    }
    check_finite(z, mu, 0);
    traj.states = z;
    traj.outputs = rom.cr * z;
    if (rom.hyper)
      traj.nonlinear_samples = last_masked;
    return traj;
  }

  const double dt = fom.dt;
  const auto lu = factor_reduced(rom.er + dt * kr, mu);
  const Matrix carry = lu.solve(rom.er);
  const Matrix drive = lu.solve(Matrix(dt * rom.br));
  Matrix lift;
  if (rom.hyper)
    lift = lu.solve(Matrix(dt * rom.hyper->projector));

  traj.states.resize(r, nt);
  traj.states.col(0) = rom.basis.transpose() * fom.initial_state;
  if (rom.hyper)
    traj.nonlinear_samples.resize(static_cast<Index>(rom.hyper->mask.size()), fom.steps);

  for (Index k = 1; k < nt; ++k)
  {
    const Vector prev = traj.states.col(k - 1);
    Vector z = carry * prev + drive * fom.input(fom.time(k - 1), mu);
    if (nonlinear)
    {
      const NonlinearEval nl = eval_nonlinear(rom, fom, prev, mu);
      if (rom.hyper)
      {
        z.noalias() += lift * nl.masked;
        traj.nonlinear_samples.col(k - 1) = nl.masked;
      }
      else
      {
        z += lu.solve(Vector(dt * (rom.basis.transpose() * nl.full)));
      }
    }
    check_finite(z, mu, k);
    traj.states.col(k) = z;
  }
  traj.outputs = rom.cr * traj.states;
  return traj;
}

Enrichment pod_enrich(const ReducedBasis &v, const Matrix &snapshots, Index r_pod)
{
  if (r_pod < 1)
    throw InvalidArgument("pod_enrich: r_pod must be at least 1");
  if (snapshots.rows() != v.ambient_dim())
    throw InvalidArgument("pod_enrich: snapshot dimension does not match the basis");

  Matrix projected = snapshots;
  if (!v.empty())
  {
    const Matrix &vm = v.matrix();
    for (int pass = 0; pass < 2; ++pass)
      projected -= vm * (vm.transpose() * projected);
  }
  const double scale = snapshots.norm();
  Index keep = 0;
  Matrix modes;
  if (scale > 0.0 && projected.cols() > 0)
  {
    const Index width = r_pod + kPodOversample;
    const dense::SvdResult dec = std::min(projected.rows(), projected.cols()) <= std::max(kExactSvdLimit, 2 * width)
                                     ? dense::left_svd(projected)
                                     : dense::randomized_svd(projected, 0.0, width, width, kPodSketchSeed, 2);
    const Index limit = std::min<Index>(r_pod, dec.singular_values.size());
    while (keep < limit && dec.singular_values[keep] > kPodKeepRelative * scale)
      ++keep;
    modes = dec.left_vectors.leftCols(keep);
  }
  Enrichment out{v, 0, r_pod};
  if (keep == 0)
    return out;
  dense::Orthonormalized grown = dense::orthonormalize_against(v, modes);
  out.added = grown.basis.dim() - v.dim();
  out.dropped = r_pod - out.added;
  out.basis = std::move(grown.basis);
  return out;
}

Vector output_row(const Matrix &outputs, Index stride)
{
  if (stride < 1)
    throw InvalidArgument("output_row: stride must be at least 1");
  const Index q = outputs.rows();
  const Index blocks = (outputs.cols() - 1) / stride + 1;
  Vector row(q * blocks);
  for (Index b = 0; b < blocks; ++b)
    row.segment(b * q, q) = outputs.col(b * stride);
  return row;
}

Vector approximate_row(const ParametricFOM &fom, const RomOperators &rom, const ReducedTrajectory &traj,
                       Index stride)
{
  if (fom.steady && fom.num_outputs() == 1)
  {
    if (rom.dim() == 0)
      return Vector::Zero(fom.n);
    return rom.basis * traj.states.col(0);
  }
  return output_row(traj.outputs, stride);
}

OutputSnapshotMatrix assemble_output_matrix(const ParametricFOM &fom, const RomOperators *rom,
                                            const TrainingSet &train, Index stride)
{
  if (stride < 1)
    throw InvalidArgument("assemble_output_matrix: stride must be at least 1");
  OutputSnapshotMatrix out;
  out.source = rom ? OutputSource::Approximate : OutputSource::True;
  out.stride = stride;
  const Index q = fom.num_outputs();
  const Index blocks = (fom.num_times() - 1) / stride + 1;
  // A steady single-output problem has a 1-column output row; its state
  // snapshot is used instead so the selector sees spatial variation.
  const bool state_rows = fom.steady && q == 1;
  const Index cols = state_rows ? fom.n : q * blocks;
  out.values.resize(static_cast<Index>(train.size()), cols);

  parallel_for(train.size(), [&](std::size_t i) {
    try
    {
      if (rom)
      {
        const ReducedTrajectory t = rom_solve(*rom, fom, train[i]);
        out.values.row(static_cast<Index>(i)) = approximate_row(fom, *rom, t, stride).transpose();
      }
      else
      {
        FomSolver solver(fom, 1);
        const Trajectory t = solver.solve(train[i]);
        if (state_rows)
          out.values.row(static_cast<Index>(i)) = t.states.col(0).transpose();
        else
          out.values.row(static_cast<Index>(i)) = output_row(t.outputs, stride).transpose();
      }
    }
    catch (const NumericalError &e)
    {
      throw NumericalError("training sample " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

std::vector<double> residual_norms(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                                   const ReducedTrajectory &traj)
{
  if (!rom.residual)
    throw InvalidArgument("residual_norms: ROM was projected without a residual factor");
  return factor_norms(*rom.residual, rom.dim(), fom, mu, traj);
}

std::vector<double> energy_residual_norms(const RomOperators &rom, const ParametricFOM &fom,
                                          const ParameterSample &mu, const ReducedTrajectory &traj)
{
  if (!rom.energy)
    throw InvalidArgument("energy_residual_norms: ROM was projected without an energy norm");
  if (rom.energy_residual)
    return factor_norms(*rom.energy_residual, rom.dim(), fom, mu, traj);
  const auto &llt = rom.energy->x_factor;
  return direct_norms(rom, fom, mu, traj, [&](const Vector &rho) {
    Vector g = llt.permutationP() * rho;
    llt.matrixL().solveInPlace(g);
    return g.norm();
  });
}

std::vector<double> residual_norms_direct(const RomOperators &rom, const ParametricFOM &fom,
                                          const ParameterSample &mu, const ReducedTrajectory &traj)
{
  return direct_norms(rom, fom, mu, traj, [](const Vector &rho) { return rho.norm(); });
}

double mean_output_error(const Matrix &y, const Matrix &y_rom)
{
  if (y.rows() != y_rom.rows() || y.cols() != y_rom.cols())
    throw InvalidArgument("mean_output_error: output shapes differ");
  double sum = 0.0;
  for (Index k = 0; k < y.cols(); ++k)
    sum += (y.col(k) - y_rom.col(k)).norm();
  return sum / static_cast<double>(y.cols());
}

ErrorEstimate error_indicator(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                              IndicatorMode mode)
{
  const ReducedTrajectory traj = rom_solve(rom, fom, mu);
  ErrorEstimate est;
  if (mode == IndicatorMode::TrueError)
  {
    FomSolver solver(fom, 1);
    const Trajectory full = solver.solve(mu);
    est.value = mean_output_error(full.outputs, traj.outputs);
    est.breakdown.reserve(full.outputs.cols());
    for (Index k = 0; k < full.outputs.cols(); ++k)
      est.breakdown.push_back((full.outputs.col(k) - traj.outputs.col(k)).norm());
    return est;
  }
  return estimate_from_trajectory(rom, fom, mu, traj, mode);
}

ErrorEstimate estimate_from_trajectory(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                                       const ReducedTrajectory &traj, IndicatorMode mode)
{
  if (mode == IndicatorMode::Energy)
    return energy_estimate(rom, fom, mu, traj);
  if (mode == IndicatorMode::Residual)
    return residual_estimate(rom, fom, mu, traj);
  throw InvalidArgument("estimate_from_trajectory: true-error mode needs a full-order solve");
}

ErrorEstimate energy_estimate(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                              const ReducedTrajectory &traj)
{
  if (!rom.energy)
    throw InvalidArgument("energy_estimate: ROM was projected without an energy norm");
  const EnergyNorm &en = *rom.energy;
  const std::vector<double> theta = fom.stiffness.theta(mu);
  double alpha = 1.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    alpha = std::min(alpha, theta[i] / en.reference_theta[i]);
  if (!(alpha > 0.0))
    throw NumericalError("energy_estimate: no coercivity bound at " + describe(mu));

  ErrorEstimate est;
  est.breakdown = energy_residual_norms(rom, fom, mu, traj);
  if (fom.steady)
  {
    est.value = en.output_dual_energy * est.breakdown[0] / alpha;
    return est;
  }
  double energy = rom.initial_error * rom.initial_error;
  double sum = en.output_dual_mass * std::sqrt(energy);
  const double weight = 1.0 / (fom.dt * alpha);
  for (double rho : est.breakdown)
  {
    energy += weight * rho * rho;
    sum += en.output_dual_mass * std::sqrt(energy);
  }
  est.value = sum / static_cast<double>(fom.num_times());
  return est;
}

ErrorEstimate residual_estimate(const RomOperators &rom, const ParametricFOM &fom, const ParameterSample &mu,
                                const ReducedTrajectory &traj)
{
  ErrorEstimate est;
  est.breakdown = rom.residual ? residual_norms(rom, fom, mu, traj) : residual_norms_direct(rom, fom, mu, traj);
  double sum = 0.0;
  for (double v : est.breakdown)
    sum += v;
  est.value = sum / static_cast<double>(fom.num_times()) * rom.output_norm;
  return est;
}

TestSetError true_output_error(const ParametricFOM &fom, const RomOperators &rom, const TrainingSet &test)
{
  TestSetError out;
  out.per_parameter.assign(test.size(), 0.0);
  parallel_for(test.size(), [&](std::size_t i) {
    FomSolver solver(fom, 1);
    const Trajectory full = solver.solve(test[i]);
    const ReducedTrajectory red = rom_solve(rom, fom, test[i]);
    out.per_parameter[i] = mean_output_error(full.outputs, red.outputs);
  });
  for (double e : out.per_parameter)
    out.max_error = std::max(out.max_error, e);
  return out;
}

std::vector<Matrix> fom_outputs(const ParametricFOM &fom, const TrainingSet &test)
{
  std::vector<Matrix> out(test.size());
  parallel_for(test.size(), [&](std::size_t i) {
    FomSolver solver(fom, 1);
    out[i] = solver.solve(test[i]).outputs;
  });
  return out;
}

TestSetError true_output_error(const ParametricFOM &fom, const RomOperators &rom, const TrainingSet &test,
                               const std::vector<Matrix> &reference)
{
  if (reference.size() != test.size())
    throw InvalidArgument("true_output_error: one reference trajectory per test parameter required");
  TestSetError out;
  out.per_parameter.assign(test.size(), 0.0);
  parallel_for(test.size(), [&](std::size_t i) {
    out.per_parameter[i] = mean_output_error(reference[i], rom_solve(rom, fom, test[i]).outputs);
  });
  for (double e : out.per_parameter)
    out.max_error = std::max(out.max_error, e);
  return out;
}

}  // namespace rbm::reduce
