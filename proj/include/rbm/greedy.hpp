// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_GREEDY_HPP
#define RBM_GREEDY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rbm/basis.hpp"
#include "rbm/benchmarks.hpp"
#include "rbm/reduction.hpp"
#include "rbm/selector.hpp"

namespace rbm::greedy
{

enum class Scheme
{
  Fixed,
  Scheme1,
  Scheme2
};

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view name);

struct GreedyConfig
{
  double tol = 1e-6;
  double tol_coarse = 1.0;
  select::SelectorConfig selector;
  Index max_iterations = 200;  // n_max / n_g
  Index stride = 1;
  std::uint64_t seed = 0;
  reduce::IndicatorMode indicator = reduce::IndicatorMode::Energy;
  // Residual indicator safeguard: the indicator is multiplied by
  // max(1, true/indicator) over the last `effectivity_window` selected
  // parameters, where the true error is known from the snapshot solve.
  // 0 disables the safeguard.
  Index effectivity_window = 3;
  // Energy tolerance of the nonlinear-term (DEIM) basis.
  double eps_deim = 1e-10;

  void validate(Scheme scheme) const;
};

struct IterationRecord
{
  Index iteration = 0;
  int stage = 1;
  Index fine_index = -1;  // position of mu* in the fine training set
  ParameterSample mu;
  double estimate = 0.0;    // indicator value that selected mu*
  double true_error = 0.0;  // error of the pre-enrichment ROM at mu*
  Index r_pod = 0;          // modes requested
  Index added = 0;          // modes kept after deflation
  Index r = 0;              // basis size after enrichment
  Index r_ei = 0;           // DEIM basis size after enrichment
  double max_estimate = 0.0;  // max indicator over the active set after enrichment
  double orthonormality = 0.0;  // ||V^T V - I||_max after enrichment
  double wall_s = 0.0;        // elapsed since the start of the run
  bool forced = false;        // second-best pick after full deflation
};

struct GreedyTrace
{
  std::vector<IterationRecord> records;
  TrainingSet subsampled;
  select::InterpolationSelection selection;
  std::vector<Index> selection_lengths;  // Scheme 2: |I_iter| per Stage-1 iteration
  Index iterations = 0;
  Index stage1_iterations = 0;
  double offline_s = 0.0;
  double final_estimate = 0.0;
  double effectivity = 1.0;  // final safeguard factor
  bool converged = false;
  bool fallback = false;    // Scheme 2 switched without stagnation
  bool stagnated = false;   // stopped on repeated full deflation
  std::uint64_t seed = 0;
};

struct GreedyResult
{
  ReducedBasis basis;
  std::optional<select::InterpolationSelection> deim;
  reduce::RomOperators rom;
  GreedyTrace trace;
};

// clamp(ceil(log10(delta_star / tol)), 1, 5).
Index adaptive_mode_count(double delta_star, double tol);

bool stagnation_check(const select::InterpolationSelection *prev, const select::InterpolationSelection &curr);

GreedyResult pod_greedy_fixed(const ParametricFOM &fom, const TrainingSet &train, const GreedyConfig &cfg);
GreedyResult scheme1(const ParametricFOM &fom, const TrainingSet &fine, const GreedyConfig &cfg);
GreedyResult scheme2(const ParametricFOM &fom, const TrainingSet &fine, const GreedyConfig &cfg);

GreedyResult run(Scheme scheme, const ParametricFOM &fom, const TrainingSet &fine, const GreedyConfig &cfg);

}  // namespace rbm::greedy

#endif  // RBM_GREEDY_HPP
