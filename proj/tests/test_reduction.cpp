// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <numeric>

#include "rbm/benchmarks.hpp"
#include "rbm/dense.hpp"
#include "rbm/error.hpp"
#include "rbm/greedy.hpp"
#include "rbm/random.hpp"
#include "rbm/reduction.hpp"
#include "rbm/selector.hpp"

using namespace rbm;
using namespace rbm::reduce;

namespace
{

Matrix random_matrix(Index m, Index n, std::uint64_t seed)
{
  Rng rng(seed);
  Matrix a(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      a(i, j) = rng.normal();
  return a;
}

Matrix orthonormal(Index m, Index n, std::uint64_t seed)
{
  return Eigen::HouseholderQR<Matrix>(random_matrix(m, n, seed)).householderQ() * Matrix::Identity(m, n);
}

std::vector<double> ranks(const std::vector<double> &v)
{
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
      ++j;
    for (std::size_t k = i; k <= j; ++k)
      r[order[k]] = 0.5 * static_cast<double>(i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double> &a, const std::vector<double> &b)
{
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Small Burgers model with a POD basis and a DEIM selection built from a
// handful of snapshots.
struct BurgersRom
{
  ParametricFOM fom;
  ReducedBasis v{1};
  select::InterpolationSelection deim;
};

BurgersRom burgers_rom(Index n, double horizon, std::vector<double> nus, Index r, Index l)
{
  BurgersRom out{build_burgers(n, 1e-3, horizon), ReducedBasis(n), {}};
  Matrix xs(n, 0), fs(n, 0);
  for (double nu : nus) {
    FomSolver solver(out.fom, 1);
    Matrix f;
    const Trajectory tr = solver.solve(ParameterSample{{nu}}, &f);
    xs.conservativeResize(n, xs.cols() + tr.states.cols());
    xs.rightCols(tr.states.cols()) = tr.states;
    fs.conservativeResize(n, fs.cols() + f.cols());
    fs.rightCols(f.cols()) = f;
  }
  const auto sx = dense::left_svd(xs);
  out.v = ReducedBasis(Matrix(sx.left_vectors.leftCols(r)));
  const auto sf = dense::left_svd(fs);
  out.deim.basis = sf.left_vectors.leftCols(l);
  out.deim.indices = select::deim_indices(out.deim.basis);
  return out;
}

}  // namespace

TEST_CASE("indicator names round trip")
{
  for (auto m : {IndicatorMode::Residual, IndicatorMode::Energy, IndicatorMode::TrueError})
    CHECK(indicator_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(indicator_from_string("oracle"), InvalidArgument);
}

TEST_CASE("galerkin_project: errors")
{
  const ParametricFOM th = build_thermal(8);
  CHECK_THROWS_AS(galerkin_project(th, ReducedBasis(th.n + 1)), InvalidArgument);
  select::InterpolationSelection sel;
  sel.basis = Matrix::Identity(th.n, 1);
  sel.indices = {0};
  CHECK_THROWS_AS(galerkin_project(th, ReducedBasis(th.n), &sel), InvalidArgument);
}

TEST_CASE("galerkin_project: canonical column and triple products")
{
  const ParametricFOM th = build_thermal(8);
  const RomOperators e1 = galerkin_project(th, ReducedBasis(Matrix(Matrix::Identity(th.n, 1))));
  CHECK(e1.er(0, 0) == doctest::Approx(th.mass.coeff(0, 0)));
  CHECK(e1.br(0, 0) == doctest::Approx(th.input_map(0, 0)));

  const Matrix v = orthonormal(th.n, 3, 4);
  const RomOperators rom = galerkin_project(th, ReducedBasis(v));
  const Matrix e = Matrix(th.mass);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (Index a = 0; a < th.n; ++a)
        for (Index b = 0; b < th.n; ++b)
          s += v(a, i) * e(a, b) * v(b, j);
      CHECK(rom.er(i, j) == doctest::Approx(s).epsilon(1e-12));
    }
  const Matrix k1 = Matrix(th.stiffness.terms[0]);
  CHECK((rom.kr_terms[0] - v.transpose() * k1 * v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((rom.cr - th.output_map * v).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("galerkin_project: identity projection of a reduced system is idempotent")
{
  const ParametricFOM th = build_thermal(8);
  const RomOperators rom = galerkin_project(th, ReducedBasis(orthonormal(th.n, 4, 8)));
  ParametricFOM red = th;
  red.n = 4;
  red.mass = rom.er.sparseView();
  red.stiffness.constant = rom.kr_constant.sparseView();
  red.stiffness.terms.clear();
  for (const auto &t : rom.kr_terms)
    red.stiffness.terms.push_back(t.sparseView());
  red.input_map = rom.br;
  red.output_map = rom.cr;
  red.initial_state = Vector::Zero(4);
  const RomOperators again = galerkin_project(red, ReducedBasis(Matrix(Matrix::Identity(4, 4))));
  CHECK((again.er - rom.er).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((again.kr_terms[2] - rom.kr_terms[2]).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((again.br - rom.br).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rom_solve: identity basis reproduces the FOM")
{
  SUBCASE("thermal")
  {
    const ParametricFOM th = build_thermal(8);
    const RomOperators rom = galerkin_project(th, ReducedBasis(Matrix(Matrix::Identity(th.n, th.n))));
    const ParameterSample mu{{2e-3, 5e-3, 0.2}};
    const ReducedTrajectory z = rom_solve(rom, th, mu);
    const Trajectory x = solve_thermal(th, mu);
    CHECK((z.outputs - x.outputs).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("burgers, full nonlinearity")
  {
    const ParametricFOM b = build_burgers(40, 1e-3, 0.3);
    const RomOperators rom = galerkin_project(b, ReducedBasis(Matrix(Matrix::Identity(40, 40))));
    const ParameterSample mu{{0.02}};
    CHECK((rom_solve(rom, b, mu).outputs - solve_burgers(b, mu).outputs).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("burgers, identity interpolation")
  {
    const ParametricFOM b = build_burgers(40, 1e-3, 0.3);
    select::InterpolationSelection sel;
    sel.basis = Matrix::Identity(40, 40);
    for (Index i = 0; i < 40; ++i)
      sel.indices.push_back(i);
    const RomOperators rom = galerkin_project(b, ReducedBasis(Matrix(Matrix::Identity(40, 40))), &sel);
    REQUIRE(rom.hyper);
    const ParameterSample mu{{0.3}};
    CHECK((rom_solve(rom, b, mu).outputs - solve_burgers(b, mu).outputs).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(error_indicator(rom, b, mu).value <= 1e-8);
  }
}

TEST_CASE("rom_solve: one-dimensional thermal ROM follows the scalar recurrence")
{
  const ParametricFOM th = build_thermal(8);
  Vector v = Vector::Ones(th.n) / std::sqrt(static_cast<double>(th.n));
  const RomOperators rom = galerkin_project(th, ReducedBasis(Matrix(v)));
  const ParameterSample mu{{1e-3, 4e-3, 0.6}};
  const auto theta = th.stiffness.theta(mu);
  double a = rom.kr_constant(0, 0);
  for (std::size_t i = 0; i < theta.size(); ++i)
    a += theta[i] * rom.kr_terms[i](0, 0);
  const double e = rom.er(0, 0), b = rom.br(0, 0);
  const ReducedTrajectory z = rom_solve(rom, th, mu);
  double zk = 0.0;
  for (Index k = 1; k <= th.steps; ++k) {
    zk = (e * zk + th.dt * b) / (e + th.dt * a);
    CHECK(z.states(0, k) == doctest::Approx(zk).epsilon(1e-12));
  }
}

TEST_CASE("pod_enrich")
{
  const Matrix x = random_matrix(30, 12, 3) * Eigen::VectorXd::LinSpaced(12, 1.0, 1e-3).asDiagonal();
  SUBCASE("cold start gives the leading POD modes")
  {
    const Enrichment en = pod_enrich(ReducedBasis(30), x, 3);
    CHECK(en.added == 3);
    const Matrix u = Eigen::JacobiSVD<Matrix>(x, Eigen::ComputeThinU).matrixU().leftCols(3);
    CHECK((en.basis.matrix() * en.basis.matrix().transpose() - u * u.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("snapshots in the span change nothing")
  {
    const ReducedBasis v(orthonormal(30, 4, 9));
    const Matrix inside = v.matrix() * random_matrix(4, 6, 10);
    const Enrichment en = pod_enrich(v, inside, 2);
    CHECK(en.added == 0);
    CHECK(en.dropped == 2);
    CHECK(en.basis.dim() == 4);
  }
  SUBCASE("enriched span captures the two leading residual directions")
  {
    const ReducedBasis v(orthonormal(30, 3, 11));
    const Enrichment en = pod_enrich(v, x, 2);
    CHECK(en.basis.dim() == 5);
    CHECK(en.basis.orthonormality_defect() <= 1e-12);
    const Matrix xbar = x - v.matrix() * (v.matrix().transpose() * x);
    const auto s = Eigen::JacobiSVD<Matrix>(xbar, Eigen::ComputeThinU);
    const Matrix lead = s.matrixU().leftCols(2);
    const Matrix w = en.basis.matrix();
    CHECK((lead - w * (w.transpose() * lead)).norm() < 1e-10);
    // projection error equals the SVD tail
    const Matrix rest = x - w * (w.transpose() * x);
    const Vector sv = s.singularValues();
    CHECK(rest.norm() == doctest::Approx(std::sqrt(sv.tail(sv.size() - 2).squaredNorm())).epsilon(1e-10));
  }
}

TEST_CASE("assemble_output_matrix: shapes and rows")
{
  const ParametricFOM b = build_burgers(60, 1e-3, 2.0);
  const TrainingSet train = burgers_training_set(100);
  const OutputSnapshotMatrix y = assemble_output_matrix(b, nullptr, train, 25);
  CHECK(y.values.rows() == 100);
  CHECK(y.values.cols() == 81);
  CHECK(y.source == OutputSource::True);
  const Trajectory t7 = solve_burgers(b, train[7]);
  for (Index j = 0; j < 81; ++j)
    CHECK(y.values(7, j) == t7.outputs(0, 25 * j));
  CHECK(output_row(t7.outputs, 25) == y.values.row(7).transpose());

  const ParametricFOM th = build_thermal(8);
  const OutputSnapshotMatrix yt = assemble_output_matrix(th, nullptr, thermal_training_set(6), 1);
  CHECK(yt.values.rows() == 216);
  CHECK(yt.values.cols() == 101);
}

TEST_CASE("assemble_output_matrix: identity-basis ROM equals the true source")
{
  const ParametricFOM th = build_thermal(8);
  const TrainingSet train = thermal_training_set(3);
  const RomOperators rom = galerkin_project(th, ReducedBasis(Matrix(Matrix::Identity(th.n, th.n))));
  const auto yt = assemble_output_matrix(th, nullptr, train, 4);
  const auto yr = assemble_output_matrix(th, &rom, train, 4);
  CHECK(yr.source == OutputSource::Approximate);
  CHECK((yt.values - yr.values).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("hyper-reduction is exact when the nonlinear snapshot lies in the interpolation span")
{
  const ParametricFOM b = build_burgers(50);
  const Matrix v = orthonormal(50, 4, 2).cwiseAbs();
  const Matrix vq = Eigen::HouseholderQR<Matrix>(v).householderQ() * Matrix::Identity(50, 4);
  const ReducedBasis basis(vq);
  const Vector z = Vector::LinSpaced(4, 0.5, 1.0);
  Vector x = vq * z;
  x = x.cwiseAbs();  // keep the upwind direction
  const ParameterSample mu{{0.1}};
  const Vector f = b.nonlinearity->evaluate(x, mu);
  Matrix span(50, 3);
  span << f, random_matrix(50, 2, 5);
  select::InterpolationSelection sel;
  sel.basis = Eigen::HouseholderQR<Matrix>(span).householderQ() * Matrix::Identity(50, 3);
  sel.indices = select::deim_indices(sel.basis);
  const RomOperators rom = galerkin_project(b, basis, &sel);
  REQUIRE(rom.hyper);
  Vector xd(static_cast<Index>(rom.hyper->deps.size()));
  for (std::size_t j = 0; j < rom.hyper->deps.size(); ++j)
    xd[static_cast<Index>(j)] = x[rom.hyper->deps[j]];
  const Vector fm = b.nonlinearity->evaluate_at(rom.hyper->mask, rom.hyper->deps, xd, mu);
  CHECK((rom.hyper->projector * fm - vq.transpose() * f).norm() <= 1e-10 * f.norm());
  // H consistent with its selection
  const Matrix pu = select::selected_rows(sel.basis, sel.indices);
  CHECK((rom.hyper->projector - vq.transpose() * sel.basis * pu.inverse()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("residual norms from the factor match the assembled residual")
{
  SUBCASE("burgers with DEIM")
  {
    const BurgersRom br = burgers_rom(200, 0.4, {0.01, 0.3}, 6, 8);
    const ParametricFOM &fom = br.fom;
    const RomOperators rom = galerkin_project(fom, br.v, &br.deim);
    REQUIRE(rom.residual);
    const ParameterSample mu{{0.05}};
    const ReducedTrajectory z = rom_solve(rom, fom, mu);
    const auto fast = residual_norms(rom, fom, mu, z);
    const auto slow = residual_norms_direct(rom, fom, mu, z);
    REQUIRE(fast.size() == slow.size());
    const double scale = *std::max_element(slow.begin(), slow.end());
    for (std::size_t k = 0; k < fast.size(); ++k)
      CHECK(std::abs(fast[k] - slow[k]) <= 1e-8 * scale);
  }
  SUBCASE("thermal, energy dual norms")
  {
    const ParametricFOM th = build_thermal(8);
    ProjectionOptions with;
    with.energy = make_energy_norm(th);
    ProjectionOptions without = with;
    without.residual_factor = false;
    const ReducedBasis v(orthonormal(th.n, 5, 3));
    const RomOperators a = galerkin_project(th, v, nullptr, with);
    const RomOperators b = galerkin_project(th, v, nullptr, without);
    REQUIRE(a.energy_residual);
    CHECK_FALSE(b.energy_residual);
    const ParameterSample mu{{4e-3, 1e-4, 0.8}};
    const ReducedTrajectory z = rom_solve(a, th, mu);
    const auto fa = energy_residual_norms(a, th, mu, z);
    const auto fb = energy_residual_norms(b, th, mu, z);
    const double scale = *std::max_element(fb.begin(), fb.end());
    for (std::size_t k = 0; k < fa.size(); ++k)
      CHECK(std::abs(fa[k] - fb[k]) <= 1e-8 * scale);
    CHECK(energy_estimate(a, th, mu, z).value == doctest::Approx(energy_estimate(b, th, mu, z).value).epsilon(1e-8));
  }
}

TEST_CASE("energy indicator bounds the true output error on thermal")
{
  const ParametricFOM th = build_thermal(8);
  ProjectionOptions opt;
  opt.energy = make_energy_norm(th);
  Matrix snaps = solve_thermal(th, ParameterSample{{5e-3, 5e-3, 0.5}}).states;
  const Enrichment en = pod_enrich(ReducedBasis(th.n), snaps, 3);
  const RomOperators rom = galerkin_project(th, en.basis, nullptr, opt);
  const TrainingSet test = random_test_set(th.domain, 10, 4, TrainingSet{});
  for (const auto &mu : test.samples()) {
    const double est = error_indicator(rom, th, mu, IndicatorMode::Energy).value;
    const double tru = error_indicator(rom, th, mu, IndicatorMode::TrueError).value;
    CHECK(est >= tru);
  }
}

TEST_CASE("true_output_error: empty basis and true-error indicator agree with direct norms")
{
  const ParametricFOM th = build_thermal(8);
  const TrainingSet test = random_test_set(th.domain, 4, 2, TrainingSet{});
  const RomOperators empty = galerkin_project(th, ReducedBasis(th.n));
  const TestSetError err = true_output_error(th, empty, test);
  double best = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Trajectory t = solve_thermal(th, test[i]);
    double mean = 0.0;
    for (Index k = 0; k < t.outputs.cols(); ++k)
      mean += t.outputs.col(k).norm();
    mean /= static_cast<double>(t.outputs.cols());
    CHECK(err.per_parameter[i] == doctest::Approx(mean).epsilon(1e-14));
    best = std::max(best, mean);
  }
  CHECK(err.max_error == best);

  const RomOperators small = galerkin_project(th, ReducedBasis(orthonormal(th.n, 2, 7)));
  const TestSetError e2 = true_output_error(th, small, test);
  for (std::size_t i = 0; i < test.size(); ++i)
    CHECK(error_indicator(small, th, test[i], IndicatorMode::TrueError).value == e2.per_parameter[i]);

  const RomOperators id = galerkin_project(th, ReducedBasis(Matrix(Matrix::Identity(th.n, th.n))));
  CHECK(true_output_error(th, id, test).max_error <= 1e-10);
}

TEST_CASE("mean_output_error")
{
  Matrix y(2, 3), z = Matrix::Zero(2, 3);
  y << 3, 0, 1, 4, 1, 0;
  CHECK(mean_output_error(y, z) == doctest::Approx((5.0 + 1.0 + 1.0) / 3.0));
}

TEST_CASE("indicators rank Burgers errors at an intermediate basis size" * doctest::timeout(300))
{
  const ParametricFOM fom = build_burgers(1000);
  greedy::GreedyConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iterations = 3;
  cfg.stride = 25;
  const greedy::GreedyResult g = greedy::pod_greedy_fixed(fom, burgers_training_set(30), cfg);
  REQUIRE(g.basis.dim() == 15);
  ProjectionOptions opt;
  opt.energy = make_energy_norm(fom);
  const RomOperators rom = galerkin_project(fom, g.basis, g.deim ? &*g.deim : nullptr, opt);
  const TrainingSet val = random_test_set(fom.domain, 20, 11, burgers_training_set(100));
  std::vector<double> res, energy, tru;
  for (const auto &mu : val.samples()) {
    const ReducedTrajectory z = rom_solve(rom, fom, mu);
    res.push_back(residual_estimate(rom, fom, mu, z).value);
    energy.push_back(energy_estimate(rom, fom, mu, z).value);
    tru.push_back(mean_output_error(solve_burgers(fom, mu).outputs, z.outputs));
  }
  const double s_res = spearman(res, tru);
  const double s_en = spearman(energy, tru);
  MESSAGE("spearman residual " << s_res << ", energy " << s_en);
  CHECK(s_res >= 0.8);
  CHECK(s_en >= 0.8);
}
