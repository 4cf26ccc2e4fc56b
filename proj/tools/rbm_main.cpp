// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbm/error.hpp"
#include "rbm/harness.hpp"

namespace
{

// Section headers group keys for readability only; every key is global.
class SectionedIni : public CLI::ConfigINI
{
public:
  std::vector<CLI::ConfigItem> from_config(std::istream &input) const override
  {
    std::vector<CLI::ConfigItem> flat;
    for (auto item : CLI::ConfigINI::from_config(input)) {
      if (item.name == "++" || item.name == "--")
        continue;
      item.parents.clear();
      flat.push_back(std::move(item));
    }
    return flat;
  }
};

template <class T>
void take(const CLI::Option *opt, const std::optional<T> &v, T &dst)
{
  if (opt->count() > 0 && v)
    dst = *v;
}

}  // namespace

int main(int argc, char **argv)
{
  using namespace rbm;

  CLI::App app{"Reduced basis training-set subsampling experiments"};
  app.set_config("--config", "", "INI file; sections [experiment], [greedy], [selector], [output]");
  app.get_config_ptr()->check(CLI::ExistingFile);
  app.config_formatter(std::make_shared<SectionedIni>());

  std::string benchmark;
  app.add_option("benchmark", benchmark, "burgers | thermal | toy")
      ->required()
      ->check(CLI::IsMember({"burgers", "thermal", "toy"}));

  auto *exp = app.add_option_group("experiment", "experiment setup");
  std::optional<Index> repeats, train, test, mesh, space;
  std::optional<std::uint64_t> seed, test_seed;
  auto *o_seed = exp->add_option("--seed", seed, "master seed");
  auto *o_repeats = exp->add_option("--repeats", repeats, "runs per configuration; offline time is the median");
  auto *o_train = exp->add_option("--train-per-dim", train, "training grid points per parameter axis");
  auto *o_test = exp->add_option("--test-size", test, "random test parameters");
  auto *o_test_seed = exp->add_option("--test-seed", test_seed, "test-set seed (default: seed + 1)");
  auto *o_mesh = exp->add_option("--mesh", mesh, "thermal mesh density");
  auto *o_space = exp->add_option("--space-per-dim", space, "toy spatial grid points per axis");

  auto *grd = app.add_option_group("greedy", "greedy driver");
  std::string scheme = "scheme1", indicator = "energy";
  std::optional<double> tol, tol_coarse;
  std::optional<Index> stride, max_iter;
  grd->add_option("--scheme", scheme, "fixed | scheme1 | scheme2")
      ->check(CLI::IsMember({"fixed", "scheme1", "scheme2"}))
      ->capture_default_str();
  auto *o_tol = grd->add_option("--tol", tol, "greedy tolerance");
  auto *o_tol_c = grd->add_option("--tol-coarse", tol_coarse, "Stage-1 tolerance (scheme1)");
  auto *o_stride = grd->add_option("--stride", stride, "time stride of the output snapshot rows");
  auto *o_max = grd->add_option("--max-iterations", max_iter, "iteration cap");
  grd->add_option("--indicator", indicator, "energy | residual | true-error")
      ->check(CLI::IsMember({"energy", "residual", "true-error"}))
      ->capture_default_str();

  auto *sel = app.add_option_group("selector", "parameter selector");
  std::string selector = "qdeim";
  std::optional<double> eps_svd, eps_qr, oversample;
  sel->add_option("--selector", selector, "qr | deim | qdeim | kdeim | gappy-eig | gappy-clust")
      ->check(CLI::IsMember({"qr", "deim", "qdeim", "kdeim", "gappy-eig", "gappy-clust"}))
      ->capture_default_str();
  auto *o_eps_svd = sel->add_option("--eps-svd", eps_svd, "SVD energy tolerance");
  auto *o_eps_qr = sel->add_option("--eps-qr", eps_qr, "pivoted-QR truncation tolerance");
  auto *o_over = sel->add_option("--oversample", oversample, "gappy oversampling factor");
  std::vector<double> sweep_eps;
  std::vector<std::string> sweep_selectors;
  sel->add_option("--sweep-eps", sweep_eps, "sweep: tolerances applied to both eps-svd and eps-qr")->delimiter(',');
  sel->add_option("--sweep-selectors", sweep_selectors, "sweep: selectors (default: --selector)")
      ->delimiter(',')
      ->check(CLI::IsMember({"qr", "deim", "qdeim", "kdeim", "gappy-eig", "gappy-clust"}));

  auto *outg = app.add_option_group("output", "artifacts");
  std::string out_dir = "rbm-out";
  std::string baseline_file;
  bool no_baseline = false;
  outg->add_option("--out", out_dir, "output directory")->capture_default_str();
  auto *o_base_file = outg->add_option("--baseline-file", baseline_file, "report.csv with a 'fixed' row");
  outg->add_flag("--no-baseline", no_baseline, "skip the fixed-set baseline run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string stage = "config";
  try {
    auto cfg = harness::ExperimentConfig::defaults(harness::benchmark_from_string(benchmark));
    cfg.scheme = greedy::scheme_from_string(scheme);
    cfg.selector = select::method_from_string(selector);
    cfg.indicator = reduce::indicator_from_string(indicator);
    cfg.out_dir = out_dir;
    take(o_seed, seed, cfg.seed);
    take(o_repeats, repeats, cfg.repeats);
    take(o_train, train, cfg.train_per_dim);
    take(o_test, test, cfg.test_size);
    take(o_mesh, mesh, cfg.mesh_density);
    take(o_space, space, cfg.space_per_dim);
    if (o_test_seed->count() > 0)
      cfg.test_seed = test_seed;
    take(o_tol, tol, cfg.tol);
    take(o_tol_c, tol_coarse, cfg.tol_coarse);
    take(o_stride, stride, cfg.stride);
    take(o_max, max_iter, cfg.max_iterations);
    take(o_eps_svd, eps_svd, cfg.eps_svd);
    take(o_eps_qr, eps_qr, cfg.eps_qr);
    take(o_over, oversample, cfg.oversample);
    if (o_base_file->count() > 0)
      cfg.baseline_file = baseline_file;
    if (no_baseline)
      cfg.baseline = false;
    cfg.validate();

    stage = "run";
    std::vector<select::Method> methods;
    for (const auto &name : sweep_selectors)
      methods.push_back(select::method_from_string(name));
    if (!sweep_eps.empty() && methods.empty())
      methods.push_back(cfg.selector);
    if (sweep_eps.empty() && !methods.empty())
      sweep_eps.push_back(cfg.selector == select::Method::Qr ? cfg.eps_qr : cfg.eps_svd);
    const auto result =
        methods.empty() ? harness::run_experiment(cfg) : harness::run_sweep(cfg, sweep_eps, methods);
    std::cout << harness::render_report(result.rows);
    return result.converged ? 0 : 2;
  } catch (const std::exception &e) {
    std::cerr << "rbm: " << e.what() << '\n';
    if (stage == "config") {
      try {
        harness::write_error_record(out_dir, stage, e.what());
      } catch (...) {
      }
    }
    return 1;
  }
}
