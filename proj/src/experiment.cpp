// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rbm/error.hpp"
#include "rbm/harness.hpp"

namespace rbm::harness
{

namespace
{

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string label(const ExperimentConfig &cfg)
{
  if (cfg.scheme == greedy::Scheme::Fixed)
    return "fixed";
  return std::string(greedy::to_string(cfg.scheme)) + "-" + std::string(select::to_string(cfg.selector));
}

std::string render_selection(const TrainingSet &fine, const greedy::GreedyTrace &trace)
{
  std::string out = "position,mu\n";
  for (std::size_t i = 0; i < trace.subsampled.size(); ++i) {
    const auto &mu = trace.subsampled[i];
    std::ostringstream line;
    line.precision(17);
    line << fine.find(mu) << ',';
    for (std::size_t d = 0; d < mu.size(); ++d)
      line << (d ? ";" : "") << mu[d];
    out += line.str() + '\n';
  }
  return out;
}

struct Problem
{
  ParametricFOM fom;
  TrainingSet train;
  TrainingSet test;
  std::vector<Matrix> test_outputs;
};

Problem build_problem(const ExperimentConfig &cfg)
{
  Problem p;
  if (cfg.benchmark == Benchmark::Burgers) {
    p.fom = build_burgers();
    p.train = burgers_training_set(cfg.train_per_dim);
  } else {
    p.fom = build_thermal(cfg.mesh_density);
    p.train = thermal_training_set(cfg.train_per_dim);
  }
  const std::uint64_t test_seed = cfg.test_seed.value_or(cfg.seed + 1);
  p.test = random_test_set(p.fom.domain, cfg.test_size, test_seed, p.train);
  p.test_outputs = reduce::fom_outputs(p.fom, p.test);
  return p;
}

RunOutcome run_repeated(greedy::Scheme scheme, const Problem &p, const greedy::GreedyConfig &gc, Index repeats)
{
  std::vector<double> times;
  std::optional<greedy::GreedyResult> first;
  for (Index k = 0; k < repeats; ++k) {
    auto res = greedy::run(scheme, p.fom, p.train, gc);
    times.push_back(res.trace.offline_s);
    if (!first)
      first.emplace(std::move(res));
  }
  const double err = reduce::true_output_error(p.fom, first->rom, p.test, p.test_outputs).max_error;
  return RunOutcome{std::move(*first), err, median(std::move(times))};
}

ResultRow make_row(const std::string &method, const RunOutcome &o, std::size_t n_train, double baseline_s)
{
  ResultRow row;
  row.method = method;
  row.n_train = static_cast<double>(n_train);
  row.eps_t_max = o.test_error;
  row.r_pod = static_cast<double>(o.result.basis.dim());
  row.r_ei = o.result.deim ? static_cast<double>(o.result.deim->basis.cols()) : 0.0;
  row.iterations = static_cast<double>(o.result.trace.iterations);
  row.offline_s = o.offline_s;
  row.speedup = baseline_s / o.offline_s;
  return row;
}

double baseline_from_file(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError(IoError::Kind::Open, "cannot open baseline report '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  for (const auto &row : parse_report(ss.str()))
    if (row.method == "fixed")
      return row.offline_s;
  throw InvalidArgument("baseline report '" + path.string() + "' has no 'fixed' row");
}

std::string point_csv(const std::string &header, const std::vector<Index> &idx,
                      const std::function<std::array<double, 2>(Index)> &coords)
{
  std::ostringstream out;
  out.precision(17);
  out << "order,index," << header << '\n';
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto c = coords(idx[k]);
    out << k << ',' << idx[k] << ',' << c[0] << ',' << c[1] << '\n';
  }
  return out.str();
}

ExperimentResult run_toy(const ExperimentConfig &cfg, std::string &stage)
{
  stage = "snapshots";
  const auto snap = toy_snapshots(cfg.space_per_dim, cfg.train_per_dim);
  stage = "deim";
  const auto space = select::deim(snap.values, cfg.eps_svd);
  const Matrix ft = snap.values.transpose();
  const auto params = select::deim(ft, cfg.eps_svd);
  stage = "write";
  atomic_write(cfg.out_dir / "toy_space_points.csv",
               point_csv("x1,x2", space.indices, [&](Index i) { return snap.row_points[static_cast<std::size_t>(i)]; }));
  atomic_write(cfg.out_dir / "toy_parameter_points.csv", point_csv("mu1,mu2", params.indices, [&](Index j) {
                 const auto &mu = snap.column_params[static_cast<std::size_t>(j)];
                 return std::array<double, 2>{mu[0], mu[1]};
               }));
  const double nan = std::nan("");
  ExperimentResult out;
  out.rows.push_back({"deim-space", nan, nan, nan, static_cast<double>(space.size()), nan, nan, nan});
  out.rows.push_back({"deim-parameter", nan, nan, nan, static_cast<double>(params.size()), nan, nan, nan});
  emit_report(out.rows, cfg.out_dir / "report.csv");
  return out;
}

}  // namespace

std::string_view to_string(Benchmark b)
{
  switch (b) {
  case Benchmark::Burgers:
    return "burgers";
  case Benchmark::Thermal:
    return "thermal";
  case Benchmark::Toy:
    return "toy";
  }
  return "?";
}

Benchmark benchmark_from_string(std::string_view name)
{
  if (name == "burgers")
    return Benchmark::Burgers;
  if (name == "thermal")
    return Benchmark::Thermal;
  if (name == "toy")
    return Benchmark::Toy;
  throw InvalidArgument("unknown benchmark '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::defaults(Benchmark b)
{
  ExperimentConfig c;
  c.benchmark = b;
  switch (b) {
  case Benchmark::Burgers:
    break;
  case Benchmark::Thermal:
    c.eps_svd = 1e-10;
    c.eps_qr = 1e-10;
    c.tol = 1e-3;
    c.stride = 1;
    c.train_per_dim = 6;
    c.test_size = 100;
    break;
  case Benchmark::Toy:
    c.eps_svd = 1e-10;
    c.train_per_dim = 40;
    c.baseline = false;
    break;
  }
  return c;
}

greedy::GreedyConfig ExperimentConfig::greedy_config() const
{
  greedy::GreedyConfig g;
  g.tol = tol;
  g.tol_coarse = tol_coarse;
  g.selector.method = selector;
  g.selector.eps_svd = eps_svd;
  g.selector.eps_qr = eps_qr;
  g.selector.oversample_factor = oversample;
  g.selector.seed = seed;
  g.max_iterations = max_iterations;
  g.stride = stride;
  g.seed = seed;
  g.indicator = indicator;
  return g;
}

void ExperimentConfig::validate() const
{
  const auto positive = [](double v, const char *what) {
    if (!(v > 0.0))
      throw InvalidArgument(std::string(what) + " must be positive");
  };
  positive(eps_svd, "eps_svd");
  positive(eps_qr, "eps_qr");
  positive(tol, "tol");
  positive(tol_coarse, "tol_coarse");
  if (!(oversample >= 1.0))
    throw InvalidArgument("oversample must be at least 1");
  if (repeats < 1)
    throw InvalidArgument("repeats must be at least 1");
  if (train_per_dim < 2)
    throw InvalidArgument("training grid needs at least 2 points per axis");
  if (benchmark == Benchmark::Toy) {
    if (space_per_dim < 2)
      throw InvalidArgument("toy spatial grid needs at least 2 points per axis");
    return;
  }
  if (test_size < 1)
    throw InvalidArgument("test_size must be at least 1");
  if (benchmark == Benchmark::Thermal && mesh_density < 2)
    throw InvalidArgument("mesh_density must be at least 2");
  greedy_config().validate(scheme);
}

void write_error_record(const std::filesystem::path &dir, const std::string &stage, const std::string &message)
{
  nlohmann::json j;
  j["status"] = "error";
  j["stage"] = stage;
  j["message"] = message;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  atomic_write(dir / "error.json", j.dump(2) + "\n");
}

namespace
{

std::string sweep_label(const ExperimentConfig &cfg)
{
  char eps[16];
  std::snprintf(eps, sizeof eps, "%.0e", cfg.selector == select::Method::Qr ? cfg.eps_qr : cfg.eps_svd);
  return label(cfg) + "-" + eps;
}

// Runs the fixed baseline when the scheme needs one and returns its offline
// seconds (NaN when there is none).
double prepare_baseline(const ExperimentConfig &cfg, const Problem &p, ExperimentResult &out, std::string &stage)
{
  if (cfg.scheme == greedy::Scheme::Fixed)
    return std::nan("");
  if (cfg.baseline_file) {
    stage = "baseline";
    return baseline_from_file(*cfg.baseline_file);
  }
  if (!cfg.baseline)
    return std::nan("");
  stage = "baseline";
  out.baseline = run_repeated(greedy::Scheme::Fixed, p, cfg.greedy_config(), cfg.repeats);
  out.rows.push_back(make_row("fixed", *out.baseline, p.train.size(), out.baseline->offline_s));
  atomic_write(cfg.out_dir / "baseline_trace.csv", render_trace(out.baseline->result.trace));
  return out.baseline->offline_s;
}

// One scheme run with its artifacts in `dir`.
std::pair<ResultRow, RunOutcome> run_one(const ExperimentConfig &cfg, const Problem &p, double baseline_s,
                                         const std::string &method, const std::filesystem::path &dir,
                                         std::string &stage)
{
  stage = "greedy";
  RunOutcome run = run_repeated(cfg.scheme, p, cfg.greedy_config(), cfg.repeats);
  const auto &trace = run.result.trace;
  if (cfg.scheme == greedy::Scheme::Fixed)
    baseline_s = run.offline_s;
  const std::size_t n_train = cfg.scheme == greedy::Scheme::Fixed ? p.train.size() : trace.subsampled.size();
  ResultRow row = make_row(method, run, n_train, baseline_s);

  stage = "write";
  std::filesystem::create_directories(dir);
  atomic_write(dir / "trace.csv", render_trace(trace));
  if (cfg.scheme != greedy::Scheme::Fixed)
    atomic_write(dir / "selection.csv", render_selection(p.train, trace));
  write_matrix(dir / "basis.bin", run.result.basis.matrix());
  return {std::move(row), std::move(run)};
}

template <class Body>
ExperimentResult guarded(const ExperimentConfig &cfg, Body body)
{
  std::string stage = "config";
  try {
    return body(stage);
  } catch (const std::exception &e) {
    try {
      write_error_record(cfg.out_dir, stage, e.what());
    } catch (...) {
    }
    throw;
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig &cfg)
{
  return guarded(cfg, [&](std::string &stage) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.benchmark == Benchmark::Toy)
      return run_toy(cfg, stage);

    stage = "build";
    const Problem p = build_problem(cfg);
    ExperimentResult out;
    const double baseline_s = prepare_baseline(cfg, p, out, stage);
    auto [row, run] = run_one(cfg, p, baseline_s, label(cfg), cfg.out_dir, stage);
    out.rows.push_back(std::move(row));
    out.converged = run.result.trace.converged;
    out.run = std::move(run);
    emit_report(out.rows, cfg.out_dir / "report.csv");
    return out;
  });
}

ExperimentResult run_sweep(const ExperimentConfig &cfg, const std::vector<double> &eps,
                           const std::vector<select::Method> &selectors)
{
  return guarded(cfg, [&](std::string &stage) {
    if (cfg.benchmark == Benchmark::Toy || cfg.scheme == greedy::Scheme::Fixed)
      throw InvalidArgument("sweep needs a subsampling scheme on burgers or thermal");
    if (eps.empty() || selectors.empty())
      throw InvalidArgument("sweep needs at least one tolerance and one selector");
    std::vector<ExperimentConfig> cells;
    for (double e : eps)
      for (select::Method m : selectors) {
        ExperimentConfig c = cfg;
        c.eps_svd = e;
        c.eps_qr = e;
        c.selector = m;
        c.validate();
        cells.push_back(std::move(c));
      }
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);

    stage = "build";
    const Problem p = build_problem(cfg);
    ExperimentResult out;
    const double baseline_s = prepare_baseline(cfg, p, out, stage);
    for (const auto &c : cells) {
      const std::string name = sweep_label(c);
      auto [row, run] = run_one(c, p, baseline_s, name, cfg.out_dir / name, stage);
      out.rows.push_back(std::move(row));
      out.converged = out.converged && run.result.trace.converged;
      out.sweep.push_back(std::move(run));
    }
    stage = "write";
    emit_report(out.rows, cfg.out_dir / "report.csv");
    return out;
  });
}

}  // namespace rbm::harness
