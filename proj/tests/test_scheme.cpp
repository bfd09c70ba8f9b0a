#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "nlpde/scheme.hpp"

using namespace nlpde;

namespace {

// Coarse base problem covering the B_4 cylinder; cheap enough for unit tests.
struct SmallScheme {
  CauchyExteriorProblem problem;
  SolveOptions opts;
  SchemeConfig cfg;
};

SmallScheme small_setup(bool translation_invariant) {
  SmallScheme s;
  const double sigma = 1.3, alpha = 0.5;
  if (translation_invariant) {
    s.problem.kernel = make_fractional_laplacian(1, sigma, 1.0, alpha);
    s.problem.rhs = [](const Point&, double) { return 0.5; };
    s.problem.rhs_bound = 0.5;
  } else {
    s.problem.kernel =
        make_holder_modulated(1, sigma, 1.0, 2.0, alpha, HolderModulation{0.35, false});
    s.problem.rhs = [alpha](const Point& x, double) {
      return 0.5 + 0.5 * std::min(1.0, std::pow(std::abs(x[0]), alpha));
    };
    s.problem.rhs_bound = 1.0;
  }
  s.problem.domain_radius = 4.5;
  s.problem.t_start = -std::pow(4.5, sigma);
  s.problem.t_end = 0.0;
  s.problem.exterior = ExteriorRule::callable(
      [](const Point& x, double) { return 0.4 * std::exp(-(x[0] - 0.7) * (x[0] - 0.7) / 2.0); });
  s.opts.h = 9.0 / 576;
  s.opts.dt = 1e-2;
  s.opts.box_halfwidth = 4.5;
  s.opts.static_data = true;
  s.cfg.i_max = 2;
  s.cfg.scale_h = 1.0 / 32;
  return s;
}

}  // namespace

TEST_CASE("fit_decay_rate recovers exact geometric decay") {
  std::vector<double> e;
  for (int i = 0; i < 5; ++i) e.push_back(std::pow(5.0, -1.8 * (i + 1)));
  const ExponentFit f = fit_decay_rate(e, 0.2);
  CHECK(f.exponent == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(f.constant == doctest::Approx(std::pow(5.0, -1.8)).epsilon(1e-10));
  CHECK(f.fit_residual < 1e-12);
}

TEST_CASE("fit_decay_rate tolerates one perturbed entry") {
  std::vector<double> e;
  for (int i = 0; i < 5; ++i) e.push_back(std::pow(5.0, -1.8 * (i + 1)));
  e[2] *= 1.5;
  const ExponentFit f = fit_decay_rate(e, 0.2);
  CHECK(std::abs(f.exponent - 1.8) <= 0.15);
  CHECK(f.fit_residual > 0.0);
}

TEST_CASE("fit_decay_rate degenerate inputs") {
  const ExponentFit flat = fit_decay_rate({0.3, 0.3, 0.3, 0.3}, 0.2);
  CHECK(flat.exponent == doctest::Approx(0.0));
  CHECK_THROWS_AS(fit_decay_rate({1.0, 0.1}, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay_rate({1.0, 0.0, 0.1}, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay_rate({1.0, 0.5, 0.1}, 1.5), std::invalid_argument);
}

TEST_CASE("zero problem produces zero corrections, also from a reloaded snapshot") {
  SmallScheme s = small_setup(true);
  s.problem.rhs = nullptr;
  s.problem.exterior = ExteriorRule::zero();
  s.cfg.i_max = 1;
  const SpaceTimeSolution u = solve(s.problem, s.opts);
  const CorrectionSequence seq = run_scheme(u, s.problem, s.cfg);
  for (const auto& t : seq.terms) CHECK(t.sup_norm <= 1e-11);
  for (double e : seq.residual_norms) CHECK(e <= 1e-11);

  std::filesystem::create_directories("test_out");
  save_snapshot(u, "test_out/scheme_base.bin");
  const SpaceTimeSolution loaded =
      load_snapshot("test_out/scheme_base.bin", s.problem.kernel.sigma, s.problem.exterior);
  const CorrectionSequence seq2 = run_scheme(loaded, s.problem, s.cfg);
  for (const auto& t : seq2.terms) CHECK(t.sup_norm <= 1e-11);
}

TEST_CASE("degenerate exactness and the maximum-principle cascade") {
  SmallScheme s = small_setup(true);
  const SpaceTimeSolution u = solve(s.problem, s.opts);
  const CorrectionSequence seq = run_scheme(u, s.problem, s.cfg);
  REQUIRE(seq.terms.size() == 3);
  // w_0 reproduces u up to discretization; later corrections live at that
  // error scale, and each is bounded by the previous residual.
  CHECK(seq.residual_norms[0] <= 5e-2);
  for (std::size_t i = 1; i < seq.terms.size(); ++i) {
    CHECK(seq.terms[i].sup_norm <= 1.1 * seq.residual_norms[i - 1] + 1e-9);
    CHECK(seq.residual_norms[i] <= 1.05 * seq.residual_norms[i - 1] + 1e-12);
  }
}

TEST_CASE("telescoping: the residual vanishes outside the scale ball") {
  SmallScheme s = small_setup(false);
  s.cfg.i_max = 1;
  const SpaceTimeSolution u = solve(s.problem, s.opts);
  const CorrectionSequence seq = run_scheme(u, s.problem, s.cfg);

  // Recompute u - w_0 - w_1 directly (no zero-outside shortcut) at points
  // beyond the scale-1 ball: pinned data makes it vanish up to interpolation.
  const double ball = 4.0 * 0.2;
  for (double x : {ball * 1.02, 1.3, 2.5}) {
    for (double t : {-0.05, -0.2}) {
      double val = u.value(point1(x), t);
      for (const auto& term : seq.terms) val -= term.eval(point1(x), t);
      CHECK(std::abs(val) <= 0.1 * seq.residual_norms[0] + 1e-8);
    }
  }

  ResidualField resid(u, s.problem.kernel.sigma, s.cfg.rho, s.cfg.base_radius);
  resid.push(&seq.terms[0]);
  resid.push(&seq.terms[1]);
  CHECK(resid(point1(ball * 1.01), -0.05) == 0.0);
  CHECK(resid(point1(0.5 * ball), -std::pow(ball, s.problem.kernel.sigma)) == 0.0);
}

TEST_CASE("jet readouts refine with the derivative step") {
  SmallScheme s = small_setup(false);
  const SpaceTimeSolution u = solve(s.problem, s.opts);
  ResidualField resid(u, s.problem.kernel.sigma, s.cfg.rho, s.cfg.base_radius);
  SchemeConfig coarse = s.cfg;
  coarse.derivative_step = 8.0 * s.cfg.scale_h;
  SchemeConfig fine = s.cfg;
  fine.derivative_step = 4.0 * s.cfg.scale_h;
  const CorrectionTerm w_coarse = build_correction(0, resid, s.problem.kernel, 0.5, coarse);
  const CorrectionTerm w_fine = build_correction(0, resid, s.problem.kernel, 0.5, fine);
  // second-order central differences: the step-halving change bounds the
  // truncation error of the finer readout (factor-4 reduction)
  const double change = std::abs(w_coarse.gradient[0] - w_fine.gradient[0]);
  CHECK(change <= 1e-2 * (1.0 + std::abs(w_fine.gradient[0])));
  CHECK(w_coarse.value == doctest::Approx(w_fine.value));  // nodal value, step-free
}

TEST_CASE("scale exhaustion raises the dedicated error") {
  SmallScheme s = small_setup(true);
  s.cfg.i_max = 6;  // scale-4 ball holds fewer than 8 base cells at this h
  const SpaceTimeSolution u = solve(s.problem, s.opts);
  CHECK_THROWS_AS(run_scheme(u, s.problem, s.cfg), ScaleExhaustedError);
}

TEST_CASE("configuration and dimension guards") {
  SmallScheme s = small_setup(true);
  const SpaceTimeSolution u = solve(s.problem, s.opts);
  SchemeConfig bad = s.cfg;
  bad.rho = 1.2;
  CHECK_THROWS_AS(run_scheme(u, s.problem, bad), std::invalid_argument);
  bad = s.cfg;
  bad.i_max = 0;
  CHECK_THROWS_AS(run_scheme(u, s.problem, bad), std::invalid_argument);
}

TEST_CASE("taylor degree follows [sigma+alpha] and warns near integers") {
  CorrectionSequence seq;
  seq.rho = 0.2;
  CHECK(taylor_at_origin(seq, 0.6, 0.3).degree == 0);
  CHECK(taylor_at_origin(seq, 1.3, 0.5).degree == 1);
  CHECK(taylor_at_origin(seq, 1.7, 0.45).degree == 2);
  CHECK(taylor_at_origin(seq, 1.3, 0.5).warning.empty());
  CHECK(!taylor_at_origin(seq, 1.5, 0.48).warning.empty());
  CHECK(!taylor_at_origin(seq, 1.95, 0.08).warning.empty());
}

TEST_CASE("taylor coefficients match direct differences in the degenerate case") {
  SmallScheme s = small_setup(true);
  const SpaceTimeSolution u = solve(s.problem, s.opts);
  const CorrectionSequence seq = run_scheme(u, s.problem, s.cfg);
  const TaylorExpansion P = taylor_at_origin(seq, seq.sigma, seq.alpha);
  const GridFunction& top = u.final_slice();
  const int c = (top.nodes_per_axis() - 1) / 2;
  const double h = top.spacing();
  const double grad_fd =
      (-top.at(c + 2) + 8 * top.at(c + 1) - 8 * top.at(c - 1) + top.at(c - 2)) / (12 * h);
  CHECK(std::abs(P.value - top.at(c)) <= 2.0 * seq.residual_norms.back() + 1e-9);
  CHECK(std::abs(P.gradient[0] - grad_fd) <= 0.05 * (1.0 + std::abs(grad_fd)));
  CHECK(P.truncation_bound[0] >= 0.0);
  CHECK(std::isfinite(P.eval(point1(0.3))));
}

TEST_CASE("run_scheme rejects 2d base problems") {
  CauchyExteriorProblem p;
  p.kernel = make_fractional_laplacian(2, 1.3, 1.0);
  p.domain_radius = 4.5;
  p.t_start = -7.0;
  p.exterior = ExteriorRule::zero();
  SpaceTimeSolution dummy;
  dummy.times = {-7.0, 0.0};
  dummy.slices = {GridFunction(2, 4.5, 0.5, ExteriorRule::zero()),
                  GridFunction(2, 4.5, 0.5, ExteriorRule::zero())};
  CHECK_THROWS_AS(run_scheme(dummy, p, SchemeConfig{}), std::invalid_argument);
}
