// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "rbm/benchmarks.hpp"
#include "rbm/error.hpp"
#include "rbm/greedy.hpp"

using namespace rbm;
using namespace rbm::greedy;

namespace
{

select::InterpolationSelection of_length(Index n)
{
  select::InterpolationSelection s;
  for (Index i = 0; i < n; ++i)
    s.indices.push_back(i);
  return s;
}

void check_trace_invariants(const GreedyResult &g, const TrainingSet &fine, const GreedyConfig &cfg)
{
  const GreedyTrace &t = g.trace;
  REQUIRE(static_cast<Index>(t.records.size()) == t.iterations);
  Index prev_r = 0;
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    const IterationRecord &rec = t.records[i];
    CHECK(rec.iteration == static_cast<Index>(i) + 1);
    CHECK(rec.orthonormality <= 1e-10);
    CHECK(fine.find(rec.mu) == rec.fine_index);
    if (rec.stage == 2) {
      CHECK(t.subsampled.find(rec.mu) >= 0);
    }
    if (rec.added == 0) {
      CHECK(rec.r == prev_r);
    } else {
      CHECK(rec.r >= prev_r + 1);
    }
    prev_r = rec.r;
  }
  if (t.converged) {
    CHECK(t.final_estimate <= cfg.tol);
  }
  CHECK(g.basis.orthonormality_defect() <= 1e-10);
}

void check_same_trace(const GreedyTrace &a, const GreedyTrace &b)
{
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto &x = a.records[i], &y = b.records[i];
    CHECK(x.fine_index == y.fine_index);
    CHECK(x.stage == y.stage);
    CHECK(x.estimate == y.estimate);
    CHECK(x.true_error == y.true_error);
    CHECK(x.r == y.r);
    CHECK(x.r_ei == y.r_ei);
    CHECK(x.max_estimate == y.max_estimate);
  }
  CHECK(a.selection.indices == b.selection.indices);
  CHECK(a.converged == b.converged);
}

GreedyConfig thermal_cfg()
{
  GreedyConfig cfg;
  cfg.tol = 1e-3;
  cfg.selector.eps_svd = 1e-10;
  cfg.selector.eps_qr = 1e-10;
  return cfg;
}

}  // namespace

TEST_CASE("adaptive_mode_count")
{
  CHECK(adaptive_mode_count(1e-6, 1e-6) == 1);
  CHECK(adaptive_mode_count(1e-3, 1e-6) == 3);
  CHECK(adaptive_mode_count(1e3, 1e-6) == 5);
  CHECK(adaptive_mode_count(0.5e-6, 1e-6) == 1);
  CHECK(adaptive_mode_count(1.5e-5, 1e-6) == 2);
  double prev = 0;
  for (double d = 1e-8; d < 1e4; d *= 1.7) {
    const double c = static_cast<double>(adaptive_mode_count(d, 1e-6));
    CHECK(c >= prev);
    prev = c;
  }
  CHECK_THROWS_AS(adaptive_mode_count(0.0, 1e-6), InvalidArgument);
  CHECK_THROWS_AS(adaptive_mode_count(1.0, -1.0), InvalidArgument);
}

TEST_CASE("stagnation_check")
{
  const auto a = of_length(12), b = of_length(12), c = of_length(15);
  CHECK_FALSE(stagnation_check(nullptr, a));
  CHECK(stagnation_check(&a, b));
  CHECK_FALSE(stagnation_check(&a, c));
}

TEST_CASE("scheme names and config validation")
{
  for (Scheme s : {Scheme::Fixed, Scheme::Scheme1, Scheme::Scheme2})
    CHECK(scheme_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(scheme_from_string("scheme3"), InvalidArgument);

  GreedyConfig cfg;
  CHECK_NOTHROW(cfg.validate(Scheme::Scheme1));
  cfg.tol_coarse = 1e-8;
  CHECK_THROWS_AS(cfg.validate(Scheme::Scheme1), InvalidArgument);
  CHECK_NOTHROW(cfg.validate(Scheme::Fixed));
  cfg = GreedyConfig{};
  cfg.selector.eps_svd = 1.0;
  CHECK_THROWS_AS(cfg.validate(Scheme::Fixed), InvalidArgument);
  cfg = GreedyConfig{};
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(Scheme::Fixed), InvalidArgument);
  cfg = GreedyConfig{};
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(Scheme::Fixed), InvalidArgument);
  CHECK(GreedyConfig{}.max_iterations == 200);

  const ParametricFOM th = build_thermal(8);
  CHECK_THROWS_AS(pod_greedy_fixed(th, TrainingSet{}, GreedyConfig{}), InvalidArgument);
}

TEST_CASE("singleton training set: converges and the basis spans the snapshots")
{
  const ParametricFOM th = build_thermal(8);
  const ParameterSample mu{{3e-3, 2e-3, 0.4}};
  const TrainingSet one({mu}, Provenance::Fine);
  GreedyConfig cfg = thermal_cfg();
  cfg.tol = 1e-8;
  const GreedyResult g = pod_greedy_fixed(th, one, cfg);
  CHECK(g.trace.converged);
  CHECK(g.trace.final_estimate <= cfg.tol);
  check_trace_invariants(g, one, cfg);
  const Matrix x = solve_thermal(th, mu).states;
  const Matrix v = g.basis.matrix();
  CHECK((x - v * (v.transpose() * x)).norm() <= 1e-6 * x.norm());
}

TEST_CASE("fixed greedy on a small thermal grid: invariants and determinism")
{
  const ParametricFOM th = build_thermal(8);
  const TrainingSet train = thermal_training_set(3);
  const GreedyConfig cfg = thermal_cfg();
  const GreedyResult a = pod_greedy_fixed(th, train, cfg);
  CHECK(a.trace.converged);
  check_trace_invariants(a, train, cfg);
  CHECK(a.trace.subsampled.size() == train.size());
  CHECK_FALSE(a.deim.has_value());
  const GreedyResult b = pod_greedy_fixed(th, train, cfg);
  check_same_trace(a.trace, b.trace);
  CHECK(a.basis.matrix() == b.basis.matrix());

  GreedyConfig other = cfg;
  other.seed = 5;
  CHECK(pod_greedy_fixed(th, train, other).trace.seed == 5);
}

TEST_CASE("scheme1 with tol_coarse = tol follows the fixed greedy")
{
  const ParametricFOM th = build_thermal(8);
  const TrainingSet train = thermal_training_set(3);
  GreedyConfig cfg = thermal_cfg();
  cfg.tol_coarse = cfg.tol;
  cfg.selector.method = select::Method::Qr;
  const GreedyResult fixed = pod_greedy_fixed(th, train, cfg);
  const GreedyResult s1 = scheme1(th, train, cfg);
  REQUIRE(s1.trace.converged);
  CHECK(s1.trace.iterations == fixed.trace.iterations);
  CHECK(s1.trace.stage1_iterations == s1.trace.iterations);
  for (std::size_t i = 0; i < s1.trace.records.size(); ++i) {
    CHECK(s1.trace.records[i].stage == 1);
    CHECK(s1.trace.records[i].fine_index == fixed.trace.records[i].fine_index);
  }
  check_trace_invariants(s1, train, cfg);
}

TEST_CASE("scheme1 coarse switch: stage-2 parameters come from the subsample")
{
  const ParametricFOM th = build_thermal(8);
  const TrainingSet train = thermal_training_set(4);
  GreedyConfig cfg = thermal_cfg();
  cfg.tol_coarse = 1.0;
  cfg.selector.method = select::Method::Qdeim;
  const GreedyResult g = scheme1(th, train, cfg);
  CHECK(g.trace.converged);
  CHECK(g.trace.stage1_iterations >= 1);
  CHECK(static_cast<Index>(g.trace.subsampled.size()) == g.trace.selection.size());
  CHECK(g.trace.subsampled.size() < train.size());
  std::vector<Index> sorted = g.trace.selection.indices;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < g.trace.subsampled.size(); ++i)
    CHECK(g.trace.subsampled[i] == train[static_cast<std::size_t>(sorted[i])]);
  check_trace_invariants(g, train, cfg);
  check_same_trace(g.trace, scheme1(th, train, cfg).trace);
}

TEST_CASE("scheme2: constant-size selections switch at the second iteration")
{
  const ParametricFOM th = build_thermal(8);
  const TrainingSet train = thermal_training_set(3);
  GreedyConfig cfg = thermal_cfg();
  cfg.selector.method = select::Method::Qr;
  cfg.selector.eps_qr = 0.999;  // keeps only the first pivot
  const GreedyResult g = scheme2(th, train, cfg);
  REQUIRE(g.trace.selection_lengths.size() >= 2);
  CHECK(g.trace.selection_lengths[0] == 1);
  CHECK(g.trace.selection_lengths[1] == 1);
  CHECK(g.trace.stage1_iterations == 2);
  CHECK_FALSE(g.trace.fallback);
  CHECK(g.trace.subsampled.size() == 1);
  for (const auto &rec : g.trace.records)
    CHECK(rec.stage == (rec.iteration <= 2 ? 1 : 2));
  check_trace_invariants(g, train, cfg);
}

TEST_CASE("scheme2: falls back at half the iteration cap and flags it")
{
  const ParametricFOM th = build_thermal(8);
  const TrainingSet train = thermal_training_set(3);
  GreedyConfig cfg = thermal_cfg();
  cfg.selector.method = select::Method::Qdeim;
  cfg.max_iterations = 2;
  const GreedyResult g = scheme2(th, train, cfg);
  CHECK(g.trace.fallback);
  CHECK(g.trace.stage1_iterations == 1);
  CHECK(g.trace.selection_lengths.size() == 1);
  CHECK(g.trace.iterations <= 2);
  check_trace_invariants(g, train, cfg);
}

TEST_CASE("non-convergence at the cap is reported, not thrown")
{
  const ParametricFOM th = build_thermal(8);
  const TrainingSet train = thermal_training_set(3);
  GreedyConfig cfg = thermal_cfg();
  cfg.tol = 1e-14;
  cfg.max_iterations = 2;
  const GreedyResult g = pod_greedy_fixed(th, train, cfg);
  CHECK_FALSE(g.trace.converged);
  CHECK(g.trace.iterations == 2);
}

TEST_CASE("true-error indicator drives the same loop")
{
  const ParametricFOM th = build_thermal(8);
  const TrainingSet train = thermal_training_set(2);
  GreedyConfig cfg = thermal_cfg();
  cfg.indicator = reduce::IndicatorMode::TrueError;
  const GreedyResult g = pod_greedy_fixed(th, train, cfg);
  CHECK(g.trace.converged);
  check_trace_invariants(g, train, cfg);
  CHECK(g.trace.effectivity == 1.0);
}

TEST_CASE("burgers: DEIM basis grows with the reduced basis" * doctest::timeout(120))
{
  const ParametricFOM b = build_burgers(200, 1e-3, 0.5);
  const TrainingSet train = burgers_training_set(12);
  GreedyConfig cfg;
  cfg.tol = 1e-6;
  cfg.stride = 25;
  const GreedyResult g = pod_greedy_fixed(b, train, cfg);
  CHECK(g.trace.converged);
  check_trace_invariants(g, train, cfg);
  REQUIRE(g.deim.has_value());
  CHECK(g.deim->size() == g.trace.records.back().r_ei);
  for (std::size_t i = 1; i < g.trace.records.size(); ++i)
    CHECK(g.trace.records[i].r_ei >= g.trace.records[i - 1].r_ei);

  GreedyConfig s2 = cfg;
  s2.selector.method = select::Method::Kdeim;
  const GreedyResult k = scheme2(b, train, s2);
  check_trace_invariants(k, train, s2);
  check_same_trace(k.trace, scheme2(b, train, s2).trace);
}
