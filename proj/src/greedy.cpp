// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include "rbm/greedy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "rbm/dense.hpp"
#include "rbm/error.hpp"
#include "rbm/parallel.hpp"
#include "rbm/random.hpp"

namespace rbm::greedy
{

namespace
{

constexpr double kHistoryKeepRelative = 1e-14;
constexpr double kDeimSketchTol = 1e-13;
constexpr Index kDeimSketchBlock = 16;

using Clock = std::chrono::steady_clock;

struct Sweep
{
  std::vector<double> raw;  // indicator per active parameter
  Matrix rows;              // approximate output rows, when requested
};

class Driver
{
public:
  Driver(Scheme scheme, const ParametricFOM &fom, const TrainingSet &fine, const GreedyConfig &cfg)
      : scheme_(scheme), fom_(fom), fine_(fine), cfg_(cfg), basis_(fom.n)
  {
    if (fine.empty())
      throw InvalidArgument("greedy: training set is empty");
    if (fom.n <= 0)
      throw InvalidArgument("greedy: FOM has no unknowns");
    cfg.validate(scheme);
    for (std::size_t i = 0; i < fine.size(); ++i)
      active_.push_back(static_cast<Index>(i));
    if (cfg.indicator == reduce::IndicatorMode::Energy)
      projection_.energy = reduce::make_energy_norm(fom);
    rom_ = reduce::galerkin_project(fom_, basis_, nullptr, projection_);
    trace_.seed = cfg.seed;
  }

  GreedyResult run()
  {
    const auto start = Clock::now();
    Rng rng(cfg_.seed);
    Index current = active_[static_cast<std::size_t>(rng.index(static_cast<std::uint64_t>(active_.size())))];
    double raw_star = -1.0;  // unknown for the first pick
    bool forced_pending = false;
    int stage = 1;
    Index iter = 0;
    std::optional<select::InterpolationSelection> prev_selection;

    while (true)
    {
      ++iter;
      if (iter > cfg_.max_iterations)
      {
        --iter;
        break;
      }
      IterationRecord rec;
      rec.iteration = iter;
      rec.stage = stage;
      rec.fine_index = current;
      rec.mu = fine_[static_cast<std::size_t>(current)];
      rec.forced = forced_pending;

      FomSolver solver(fom_, 1);
      Matrix nonlinear_snapshots;
      const Trajectory truth = solver.solve(rec.mu, fom_.nonlinearity ? &nonlinear_snapshots : nullptr);
      const reduce::ReducedTrajectory before = reduce::rom_solve(rom_, fom_, rec.mu);
      rec.true_error = reduce::mean_output_error(truth.outputs, before.outputs);
      if (raw_star < 0.0)
        raw_star = cfg_.indicator == reduce::IndicatorMode::TrueError
                       ? rec.true_error
                       : reduce::estimate_from_trajectory(rom_, fom_, rec.mu, before, cfg_.indicator).value;
      observe(rec.true_error, raw_star);
      const double estimate_star = scale_ * raw_star;
      rec.estimate = estimate_star;

      rec.r_pod = estimate_star > 0.0 ? adaptive_mode_count(estimate_star, cfg_.tol) : 1;
      const reduce::Enrichment grown = reduce::pod_enrich(basis_, truth.states, rec.r_pod);
      basis_ = grown.basis;
      rec.added = grown.added;
      if (fom_.nonlinearity)
        update_deim(nonlinear_snapshots);
      rom_ = reduce::galerkin_project(fom_, basis_, deim_ ? &*deim_ : nullptr, projection_);
      rec.r = basis_.dim();
      rec.orthonormality = basis_.orthonormality_defect();
      rec.r_ei = deim_ ? deim_->basis.cols() : 0;

      const bool need_rows = stage == 1 && scheme_ != Scheme::Fixed;
      Sweep sweep = estimate_all(need_rows);
      std::size_t best = argmax(sweep.raw, -1);
      double eps = scale_ * sweep.raw[best];
      rec.max_estimate = eps;

      // A re-selected parameter that added nothing would be picked forever.
      forced_pending = false;
      if (rec.added == 0 && active_[best] == current)
      {
        if (rec.forced || active_.size() < 2)
        {
          trace_.stagnated = true;
          finish_record(rec, start);
          break;
        }
        best = argmax(sweep.raw, static_cast<Index>(best));
        forced_pending = true;
      }
      finish_record(rec, start);

      bool done = false;
      if (stage == 1)
      {
        if (scheme_ == Scheme::Fixed)
        {
          done = eps <= cfg_.tol;
        }
        else if (scheme_ == Scheme::Scheme1)
        {
          if (eps <= cfg_.tol_coarse)
          {
            switch_stage(select_on(sweep.rows), sweep, iter, best, eps, forced_pending);
            stage = 2;
            done = eps <= cfg_.tol;
          }
        }
        else
        {
          select::InterpolationSelection sel = select_on(sweep.rows);
          trace_.selection_lengths.push_back(sel.size());
          const bool stagnant = stagnation_check(prev_selection ? &*prev_selection : nullptr, sel);
          const bool out_of_budget = iter >= std::max<Index>(1, cfg_.max_iterations / 2);
          if (stagnant || out_of_budget)
          {
            trace_.fallback = !stagnant;
            switch_stage(std::move(sel), sweep, iter, best, eps, forced_pending);
            stage = 2;
            done = eps <= cfg_.tol;
          }
          else if (eps <= cfg_.tol)
          {
            trace_.stage1_iterations = iter;
            trace_.subsampled = select::subsample_training_set(fine_, sel);
            trace_.selection = std::move(sel);
            done = true;
          }
          else
          {
            prev_selection = std::move(sel);
          }
        }
      }
      else
      {
        done = eps <= cfg_.tol;
      }

      trace_.final_estimate = eps;
      if (done)
      {
        trace_.converged = true;
        break;
      }
      current = active_[best];
      raw_star = sweep.raw[best];
    }

    trace_.iterations = iter;
    if (scheme_ == Scheme::Fixed)
    {
      trace_.stage1_iterations = iter;
      trace_.subsampled = fine_;
    }
    else if (stage == 1 && trace_.subsampled.empty())
    {
      trace_.stage1_iterations = iter;
    }
    trace_.effectivity = scale_;
    trace_.offline_s = std::chrono::duration<double>(Clock::now() - start).count();

    return GreedyResult{basis_, deim_, std::move(rom_), std::move(trace_)};
  }

private:
  void finish_record(IterationRecord &rec, Clock::time_point start)
  {
    rec.wall_s = std::chrono::duration<double>(Clock::now() - start).count();
    trace_.records.push_back(rec);
  }

  void observe(double true_error, double raw)
  {
    if (cfg_.effectivity_window < 1 || cfg_.indicator == reduce::IndicatorMode::TrueError)
      return;
    if (!(raw > 0.0) || !std::isfinite(true_error / raw))
      return;
    ratios_.push_back(true_error / raw);
    if (static_cast<Index>(ratios_.size()) > cfg_.effectivity_window)
      ratios_.pop_front();
    scale_ = std::max(1.0, *std::max_element(ratios_.begin(), ratios_.end()));
  }

  // Grows the nonlinear-term basis from the compressed history plus the new
  // snapshots, then reselects DEIM points.
  void update_deim(const Matrix &snapshots)
  {
    Matrix stacked(fom_.n, history_.cols() + snapshots.cols());
    stacked << history_, snapshots;
    const dense::SvdResult dec =
        dense::randomized_svd(stacked, kDeimSketchTol, stacked.rows(), kDeimSketchBlock, cfg_.seed + 1);
    if (dec.singular_values.size() == 0 || !(dec.singular_values[0] > 0.0))
      return;
    const Index l = dense::rank_from_energy(dec.singular_values, cfg_.eps_deim);
    Index keep = l;
    while (keep < dec.singular_values.size() &&
           dec.singular_values[keep] > kHistoryKeepRelative * dec.singular_values[0])
      ++keep;
    history_ = dec.left_vectors.leftCols(keep) * dec.singular_values.head(keep).asDiagonal();
    select::InterpolationSelection sel;
    sel.basis = dec.left_vectors.leftCols(l);
    sel.indices = select::deim_indices(sel.basis);
    sel.method = select::Method::Deim;
    deim_ = std::move(sel);
  }

  Sweep estimate_all(bool need_rows)
  {
    Sweep out;
    out.raw.assign(active_.size(), 0.0);
    if (need_rows)
    {
      const Index q = fom_.num_outputs();
      const Index cols = fom_.steady && q == 1 ? fom_.n : q * ((fom_.num_times() - 1) / cfg_.stride + 1);
      out.rows.resize(static_cast<Index>(active_.size()), cols);
    }
    parallel_for(active_.size(), [&](std::size_t i) {
      const ParameterSample &mu = fine_[static_cast<std::size_t>(active_[i])];
      const reduce::ReducedTrajectory traj = reduce::rom_solve(rom_, fom_, mu);
      if (cfg_.indicator == reduce::IndicatorMode::TrueError)
      {
        FomSolver solver(fom_, 1);
        out.raw[i] = reduce::mean_output_error(solver.solve(mu).outputs, traj.outputs);
      }
      else
      {
        out.raw[i] = reduce::estimate_from_trajectory(rom_, fom_, mu, traj, cfg_.indicator).value;
      }
      if (need_rows)
        out.rows.row(static_cast<Index>(i)) = reduce::approximate_row(fom_, rom_, traj, cfg_.stride).transpose();
    });
    return out;
  }

  // Position of the largest value, lowest position on ties, skipping `skip`.
  static std::size_t argmax(const std::vector<double> &v, Index skip)
  {
    std::size_t best = v.size();
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      if (static_cast<Index>(i) == skip)
        continue;
      if (best == v.size() || v[i] > v[best])
        best = i;
    }
    return best;
  }

  select::InterpolationSelection select_on(const Matrix &rows) const
  {
    select::InterpolationSelection sel = select::select_parameters(rows, cfg_.selector);
    if (sel.indices.empty())
      throw NumericalError("selector returned no indices");
    return sel;
  }

  // Restricts the active set to the subsample and re-picks mu* inside it.
  void switch_stage(select::InterpolationSelection sel, Sweep &sweep, Index iter, std::size_t &best, double &eps,
                    bool &forced_pending)
  {
    trace_.stage1_iterations = iter;
    trace_.subsampled = select::subsample_training_set(fine_, sel);
    trace_.selection = std::move(sel);
    std::vector<Index> next;
    std::vector<double> raw;
    for (std::size_t i = 0; i < active_.size(); ++i)
    {
      if (trace_.subsampled.find(fine_[static_cast<std::size_t>(active_[i])]) >= 0)
      {
        next.push_back(active_[i]);
        raw.push_back(sweep.raw[i]);
      }
    }
    active_ = std::move(next);
    sweep.raw = std::move(raw);
    best = argmax(sweep.raw, -1);
    eps = scale_ * sweep.raw[best];
    forced_pending = false;
  }

  Scheme scheme_;
  const ParametricFOM &fom_;
  const TrainingSet &fine_;
  GreedyConfig cfg_;
  ReducedBasis basis_;
  Matrix history_;
  std::optional<select::InterpolationSelection> deim_;
  reduce::ProjectionOptions projection_;
  reduce::RomOperators rom_;
  std::vector<Index> active_;
  std::deque<double> ratios_;
  double scale_ = 1.0;
  GreedyTrace trace_;
};

}  // namespace

std::string_view to_string(Scheme s)
{
  switch (s)
  {
  case Scheme::Fixed:
    return "fixed";
  case Scheme::Scheme1:
    return "scheme1";
  case Scheme::Scheme2:
    return "scheme2";
  }
  return "unknown";
}

Scheme scheme_from_string(std::string_view name)
{
  for (Scheme s : {Scheme::Fixed, Scheme::Scheme1, Scheme::Scheme2})
    if (to_string(s) == name)
      return s;
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

void GreedyConfig::validate(Scheme scheme) const
{
  if (!(tol > 0.0))
    throw InvalidArgument("greedy: tol must be positive");
  if (scheme == Scheme::Scheme1 && !(tol_coarse >= tol))
    throw InvalidArgument("greedy: tol_coarse must not be below tol");
  if (!(selector.eps_svd > 0.0 && selector.eps_svd < 1.0) || !(selector.eps_qr > 0.0 && selector.eps_qr < 1.0))
    throw InvalidArgument("greedy: truncation tolerances must lie in (0, 1)");
  if (max_iterations < 1)
    throw InvalidArgument("greedy: max_iterations must be at least 1");
  if (stride < 1)
    throw InvalidArgument("greedy: stride must be at least 1");
  if (!(eps_deim > 0.0 && eps_deim < 1.0))
    throw InvalidArgument("greedy: eps_deim must lie in (0, 1)");
}

Index adaptive_mode_count(double delta_star, double tol)
{
  if (!(delta_star > 0.0) || !(tol > 0.0))
    throw InvalidArgument("adaptive_mode_count: arguments must be positive");
  const double c = std::ceil(std::log10(delta_star / tol));
  return static_cast<Index>(std::clamp(c, 1.0, 5.0));
}

bool stagnation_check(const select::InterpolationSelection *prev, const select::InterpolationSelection &curr)
{
  return prev != nullptr && prev->size() == curr.size();
}

GreedyResult pod_greedy_fixed(const ParametricFOM &fom, const TrainingSet &train, const GreedyConfig &cfg)
{
  return Driver(Scheme::Fixed, fom, train, cfg).run();
}

GreedyResult scheme1(const ParametricFOM &fom, const TrainingSet &fine, const GreedyConfig &cfg)
{
  return Driver(Scheme::Scheme1, fom, fine, cfg).run();
}

GreedyResult scheme2(const ParametricFOM &fom, const TrainingSet &fine, const GreedyConfig &cfg)
{
  return Driver(Scheme::Scheme2, fom, fine, cfg).run();
}

GreedyResult run(Scheme scheme, const ParametricFOM &fom, const TrainingSet &fine, const GreedyConfig &cfg)
{
  return Driver(scheme, fom, fine, cfg).run();
}

}  // namespace rbm::greedy
