#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "nlpde/solver.hpp"

using namespace nlpde;

namespace {

CauchyExteriorProblem small_problem() {
  CauchyExteriorProblem p;
  p.kernel = make_holder_modulated(1, 1.3, 1.0, 2.0, 0.5, HolderModulation{0.4, false});
  p.rhs = nullptr;
  p.domain_radius = 1.0;
  p.t_start = -0.2;
  p.t_end = 0.0;
  p.exterior = ExteriorRule::zero();
  return p;
}

SolveOptions small_opts() {
  SolveOptions o;
  o.h = 1.0 / 16;
  o.dt = 0.01;
  return o;
}

}  // namespace

TEST_CASE("zero data stays zero") {
  const SpaceTimeSolution u = solve(small_problem(), small_opts());
  for (const auto& s : u.slices) CHECK(s.max_abs() == doctest::Approx(0.0));
}

TEST_CASE("constants are invariant: g = c, f = 0 gives u = c") {
  CauchyExteriorProblem p = small_problem();
  p.exterior = ExteriorRule::constant_value(1.7);
  const SpaceTimeSolution u = solve(p, small_opts());
  for (const auto& s : u.slices) {
    for (double v : s.values()) CHECK(v == doctest::Approx(1.7).epsilon(1e-12));
  }
}

TEST_CASE("adding a constant to the data shifts the solution exactly") {
  CauchyExteriorProblem p1 = small_problem();
  p1.exterior = ExteriorRule::callable(
      [](const Point& x, double) { return 0.3 * std::exp(-x[0] * x[0]); });
  CauchyExteriorProblem p2 = p1;
  p2.exterior = ExteriorRule::callable(
      [](const Point& x, double) { return 0.3 * std::exp(-x[0] * x[0]) + 1.0; });
  const SpaceTimeSolution u1 = solve(p1, small_opts());
  const SpaceTimeSolution u2 = solve(p2, small_opts());
  for (std::size_t s = 0; s < u1.slices.size(); ++s) {
    for (std::size_t i = 0; i < u1.slices[s].values().size(); ++i) {
      CHECK(u2.slices[s].values()[i] - u1.slices[s].values()[i] ==
            doctest::Approx(1.0).epsilon(1e-11));
    }
  }
}

TEST_CASE("exact cosine mode: decay rate 2 pi at sigma = 1") {
  CauchyExteriorProblem p;
  p.kernel = make_fractional_laplacian(1, 1.0, 1.0);
  p.domain_radius = M_PI;
  p.t_start = -1.0;
  p.t_end = 0.0;
  p.exterior = ExteriorRule::periodic();
  p.initial = [](const Point& x) { return std::cos(x[0]); };
  SolveOptions o;
  o.h = 2.0 * M_PI / 256;
  o.dt = 1e-3;
  o.box_halfwidth = M_PI;
  o.static_data = true;
  const SpaceTimeSolution u = solve(p, o);
  double err = 0.0;
  for (std::size_t s = 0; s < u.slices.size(); ++s) {
    const double decay = std::exp(-2.0 * M_PI * (u.times[s] - p.t_start));
    for (int i = 0; i < u.slices[s].nodes_per_axis(); ++i) {
      err = std::max(err,
                     std::abs(u.slices[s].at(i) - decay * std::cos(u.slices[s].node(i)[0])));
    }
  }
  CHECK(err <= 1e-2);
}

TEST_CASE("discrete comparison principle over random ordered data") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = unif(rng), b = unif(rng), c = unif(rng), d = unif(rng);
    CauchyExteriorProblem p1 = small_problem();
    p1.rhs = [a, b](const Point& x, double) { return a * std::sin(3.0 * x[0]) - b; };
    p1.exterior = ExteriorRule::callable(
        [c](const Point& x, double) { return c * std::cos(x[0]); });
    CauchyExteriorProblem p2 = p1;
    p2.rhs = [a, b, d](const Point& x, double) {
      return a * std::sin(3.0 * x[0]) - b + d * (1.2 + std::cos(5.0 * x[0]));
    };
    p2.exterior = ExteriorRule::callable(
        [c, d](const Point& x, double) { return c * std::cos(x[0]) + 0.5 * d; });
    const ComparisonReport rep = compare(p1, p2, small_opts());
    CHECK(rep.max_violation <= 1e-10);
    CHECK(rep.ordered);
  }
}

TEST_CASE("compare rejects unordered data") {
  CauchyExteriorProblem p1 = small_problem();
  p1.rhs = [](const Point&, double) { return 1.0; };
  CauchyExteriorProblem p2 = small_problem();
  p2.rhs = [](const Point&, double) { return 0.0; };
  CHECK_THROWS_AS(compare(p1, p2, small_opts()), std::invalid_argument);
}

TEST_CASE("sup norm contracts with zero data") {
  CauchyExteriorProblem p = small_problem();
  p.initial = [](const Point& x) { return std::cos(2.0 * x[0]); };
  p.t_start = -0.5;
  const SpaceTimeSolution u = solve(p, small_opts());
  double prev = u.slices.front().max_abs();
  for (std::size_t s = 1; s < u.slices.size(); ++s) {
    const double cur = u.slices[s].max_abs();
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("steady residual vanishes and perturbations spike") {
  CauchyExteriorProblem p = small_problem();
  p.rhs = [](const Point& x, double t) { return std::cos(x[0]) * (1.0 + 0.5 * t); };
  p.exterior = ExteriorRule::callable(
      [](const Point& x, double) { return 0.2 / (1.0 + x[0] * x[0]); });
  const SolveOptions o = small_opts();
  SpaceTimeSolution u = solve(p, o);
  const ResidualReport rep = steady_residual(u, p);
  CHECK(rep.max_abs <= 1e-9);

  u.slices[u.slices.size() / 2].at(8) += 1e-3;
  const ResidualReport bad = steady_residual(u, p);
  CHECK(bad.max_abs >= 0.5 * 1e-3 / o.dt);
}

TEST_CASE("scaling covariance of the rescaled problem") {
  // Pure power kernel is scale invariant: solving the rescaled problem and
  // mapping back reproduces the original within the two grids' errors.
  const double sigma = 1.3, r = 0.5;
  CauchyExteriorProblem p;
  p.kernel = make_fractional_laplacian(1, sigma, 1.0);
  p.rhs = [](const Point& x, double) { return std::cos(2.0 * x[0]); };
  p.domain_radius = 1.0;
  p.t_start = -0.5;
  p.t_end = 0.0;
  p.exterior = ExteriorRule::callable(
      [](const Point& x, double) { return 0.3 * std::exp(-4.0 * x[0] * x[0]); });

  CauchyExteriorProblem ps;
  ps.kernel = rescale_kernel(p.kernel, r);
  const double rs = std::pow(r, sigma);
  ps.rhs = [&, rs](const Point& x, double t) { return rs * p.rhs(x * r, t * rs); };
  ps.domain_radius = p.domain_radius / r;
  ps.t_start = p.t_start / rs;
  ps.t_end = 0.0;
  ps.exterior = ExteriorRule::callable(
      [&, rs](const Point& x, double t) { return p.exterior.fn(x * r, t * rs); });

  SolveOptions o;
  o.h = 1.0 / 32;
  o.dt = 0.01;
  SolveOptions os = o;
  os.h = o.h / r;
  os.dt = o.dt / rs;
  const SpaceTimeSolution u = solve(p, o);
  const SpaceTimeSolution us = solve(ps, os);

  // grid-error estimates by h -> h/2 refinement
  SolveOptions o2 = o;
  o2.h /= 2;
  o2.dt /= 2;
  const SpaceTimeSolution u2 = solve(p, o2);
  double est = 0.0;
  for (int i = 0; i < u.slices.back().nodes_per_axis(); ++i) {
    const Point x = u.slices.back().node(i);
    est = std::max(est, std::abs(u.slices.back().at(i) - u2.value(x, 0.0)));
  }
  double dev = 0.0;
  for (int i = 0; i < u.slices.back().nodes_per_axis(); ++i) {
    const Point x = u.slices.back().node(i);
    dev = std::max(dev, std::abs(u.slices.back().at(i) - us.value(x * (1.0 / r), 0.0)));
  }
  CHECK(dev <= 4.0 * est + 1e-12);
}

TEST_CASE("input validation") {
  CauchyExteriorProblem p = small_problem();
  p.t_start = 0.0;
  CHECK_THROWS_AS(solve(p, small_opts()), std::invalid_argument);

  CauchyExteriorProblem nan_p = small_problem();
  nan_p.initial = [](const Point&) { return std::nan(""); };
  CHECK_THROWS_AS(solve(nan_p, small_opts()), std::invalid_argument);

  CauchyExteriorProblem per2d;
  per2d.kernel = make_fractional_laplacian(2, 1.0, 1.0);
  per2d.domain_radius = 1.0;
  per2d.t_start = -0.1;
  per2d.exterior = ExteriorRule::periodic();
  per2d.initial = [](const Point&) { return 0.0; };
  CHECK_THROWS_AS(solve(per2d, small_opts()), std::invalid_argument);
}

TEST_CASE("binary snapshots round-trip and feed the scheme loader") {
  CauchyExteriorProblem p = small_problem();
  p.rhs = [](const Point& x, double) { return std::cos(x[0]); };
  const SpaceTimeSolution u = solve(p, small_opts());
  const std::string path = "test_out/solution.bin";
  std::filesystem::create_directories("test_out");
  save_snapshot(u, path);
  const SpaceTimeSolution v = load_snapshot(path, p.kernel.sigma, p.exterior);
  REQUIRE(v.slices.size() == u.slices.size());
  CHECK(v.dt_marched == doctest::Approx(u.dt_marched));
  CHECK(v.slices.front().spacing() == doctest::Approx(u.slices.front().spacing()));
  for (std::size_t s = 0; s < u.slices.size(); ++s) {
    CHECK(v.times[s] == u.times[s]);
    for (std::size_t i = 0; i < u.slices[s].values().size(); ++i) {
      CHECK(v.slices[s].values()[i] == u.slices[s].values()[i]);  // bit exact
    }
  }
  CHECK(v.value(point1(0.3), -0.07) == doctest::Approx(u.value(point1(0.3), -0.07)));
  CHECK_THROWS_AS(load_snapshot("test_out/definitely-missing.bin", 1.3, ExteriorRule::zero()),
                  std::runtime_error);
}

TEST_CASE("2d solve keeps constants and respects comparison") {
  CauchyExteriorProblem p;
  p.kernel = make_fractional_laplacian(2, 1.1, 1.0);
  p.domain_radius = 1.0;
  p.t_start = -0.1;
  p.t_end = 0.0;
  p.exterior = ExteriorRule::constant_value(0.8);
  SolveOptions o;
  o.h = 1.0 / 8;
  o.dt = 0.02;
  const SpaceTimeSolution u = solve(p, o);
  for (const auto& s : u.slices) {
    for (double v : s.values()) CHECK(v == doctest::Approx(0.8).epsilon(1e-11));
  }
}
