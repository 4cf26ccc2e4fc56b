// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_HARNESS_HPP
#define RBM_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rbm/basis.hpp"
#include "rbm/greedy.hpp"
#include "rbm/reduction.hpp"
#include "rbm/selector.hpp"

namespace rbm::harness
{

// ---------------------------------------------------------------- matrix files

// "RBMSMAT1", u64 LE rows, u64 LE cols, f64 LE values column-major.
void write_matrix(const std::filesystem::path &path, const Matrix &m);
Matrix read_matrix(const std::filesystem::path &path);

// Writes `contents` to a temporary sibling and renames it over `path`.
void atomic_write(const std::filesystem::path &path, const std::string &contents);

// ---------------------------------------------------------------- reports

struct ResultRow
{
  std::string method;
  double n_train = 0.0;
  double eps_t_max = 0.0;
  double r_pod = 0.0;
  double r_ei = 0.0;
  double iterations = 0.0;
  double offline_s = 0.0;
  double speedup = 0.0;

  bool operator==(const ResultRow &) const = default;
};

inline constexpr const char *kReportHeader = "method,n_train,eps_t_max,r_pod,r_ei,iterations,offline_s,speedup";

// Six significant digits; NaN as "nan".
std::string format_number(double v);

std::string render_report(const std::vector<ResultRow> &rows);
void emit_report(const std::vector<ResultRow> &rows, const std::filesystem::path &path);
std::vector<ResultRow> parse_report(const std::string &text);

// Trace CSV. Timing lives in the last column only.
std::string render_trace(const greedy::GreedyTrace &trace);

// ---------------------------------------------------------------- experiments

enum class Benchmark
{
  Burgers,
  Thermal,
  Toy
};

std::string_view to_string(Benchmark b);
Benchmark benchmark_from_string(std::string_view name);

struct ExperimentConfig
{
  Benchmark benchmark = Benchmark::Burgers;
  greedy::Scheme scheme = greedy::Scheme::Scheme1;
  select::Method selector = select::Method::Qdeim;
  reduce::IndicatorMode indicator = reduce::IndicatorMode::Energy;
  double eps_svd = 1e-6;
  double eps_qr = 1e-6;
  double tol = 1e-6;
  double tol_coarse = 1.0;
  double oversample = 2.0;
  std::uint64_t seed = 0;
  Index repeats = 1;
  Index max_iterations = 200;
  Index stride = 25;
  Index train_per_dim = 100;  // toy: parameter grid points per axis
  Index space_per_dim = 50;   // toy only
  Index test_size = 300;
  std::optional<std::uint64_t> test_seed;  // derived from seed when unset
  Index mesh_density = 32;  // thermal only
  bool baseline = true;     // run the fixed-set baseline for the speedup column
  std::optional<std::filesystem::path> baseline_file;
  std::filesystem::path out_dir = "rbm-out";

  // Published defaults: Burgers 100 viscosities, tol 1e-6, stride 25, 300 tests;
  // thermal 6^3 grid, tol 1e-3, tol_c 1, eps 1e-10, stride 1, 100 tests.
  static ExperimentConfig defaults(Benchmark b);

  greedy::GreedyConfig greedy_config() const;
  void validate() const;
};

struct RunOutcome
{
  greedy::GreedyResult result;
  double test_error = 0.0;
  double offline_s = 0.0;  // median over repeats
};

struct ExperimentResult
{
  std::vector<ResultRow> rows;  // baseline first when present
  std::optional<RunOutcome> run;
  std::optional<RunOutcome> baseline;
  std::vector<RunOutcome> sweep;  // run_sweep only, in row order
  bool converged = true;
};

// Builds the benchmark, runs the configured scheme (and baseline), validates
// on the test set and writes trace.csv, selection.csv, basis.bin and
// report.csv into cfg.out_dir. The toy benchmark writes DEIM point lists
// instead.
ExperimentResult run_experiment(const ExperimentConfig &cfg);

// Runs every (eps, selector) cell against one shared baseline and test set.
// eps sets both eps_svd and eps_qr. Cell artifacts go to
// out_dir/<scheme>-<selector>-<eps>/, the combined report to out_dir.
ExperimentResult run_sweep(const ExperimentConfig &cfg, const std::vector<double> &eps,
                           const std::vector<select::Method> &selectors);

// Machine-readable error record for a failed run.
void write_error_record(const std::filesystem::path &dir, const std::string &stage, const std::string &message);

}  // namespace rbm::harness

#endif  // RBM_HARNESS_HPP
