#include "nlpde/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace nlpde {

namespace {

int origin_index(const GridFunction& g) {
  const int n = g.nodes_per_axis() - 1;
  if (n % 2 != 0) throw std::invalid_argument("scheme: grid must have a node at the origin");
  return n / 2;
}

}  // namespace

double CorrectionTerm::eval(const Point& z, double s) const {
  const double ts = std::pow(scale, v.sigma);
  return amplitude * v.value(z * (1.0 / scale), s / ts);
}

ResidualField::ResidualField(const SpaceTimeSolution& base, double sigma, double rho,
                             double base_radius)
    : base_(&base),
      dim_(base.slices.front().dim()),
      sigma_(sigma),
      rho_(rho),
      base_radius_(base_radius),
      zero_radius_(std::numeric_limits<double>::infinity()),
      zero_time_(-std::numeric_limits<double>::infinity()) {}

void ResidualField::push(const CorrectionTerm* term) {
  terms_.push_back(term);
  const double r = base_radius_ * std::pow(rho_, static_cast<double>(terms_.size() - 1));
  zero_radius_ = r;
  zero_time_ = -std::pow(r, sigma_);
}

double ResidualField::operator()(const Point& z, double s) const {
  if (!terms_.empty()) {
    if (norm(z, dim_) >= zero_radius_ * (1.0 - 1e-12)) return 0.0;
    if (s < zero_time_ - 1e-9) {
      throw std::logic_error("residual queried before its initial slice");
    }
    if (s <= zero_time_) return 0.0;
  }
  double acc = base_->value(z, s);
  for (const CorrectionTerm* t : terms_) acc -= t->eval(z, s);
  return acc;
}

double TaylorExpansion::eval(const Point& x) const {
  double acc = value;
  if (degree >= 1) {
    acc += gradient[0] * x[0] + gradient[1] * x[1];
  }
  if (degree >= 2) {
    acc += 0.5 * (hessian[0] * x[0] * x[0] + 2.0 * hessian[1] * x[0] * x[1] +
                  hessian[2] * x[1] * x[1]);
  }
  return acc;
}

CorrectionTerm build_correction(int i, const ResidualField& resid, const KernelSpec& k,
                                double f00, const SchemeConfig& cfg) {
  if (i != resid.corrections()) {
    throw std::invalid_argument("build_correction: residual holds a different scale count");
  }
  const double scale = std::pow(cfg.rho, i);
  const double order = k.sigma + k.holder_alpha;
  const double amplitude = std::pow(scale, order);
  const double tscale = std::pow(scale, k.sigma);
  const double R = cfg.base_radius;

  CauchyExteriorProblem p;
  p.kernel = freeze_kernel(rescale_kernel(k, scale));
  const double rhs_value = i == 0 ? f00 : 0.0;
  p.rhs = [rhs_value](const Point&, double) { return rhs_value; };
  p.rhs_bound = std::abs(rhs_value);
  p.domain_radius = R;
  p.t_start = -std::pow(R, k.sigma);
  p.t_end = 0.0;
  // Exterior and initial data: the rescaled residual W(x,s). The stored
  // correction keeps evaluating its own data beyond the solve box, so it
  // captures an immutable snapshot of the residual at this stage rather than
  // the caller's field (which keeps accumulating corrections).
  const auto snapshot = std::make_shared<const ResidualField>(resid);
  p.exterior = ExteriorRule::callable([snapshot, scale, tscale, amplitude](const Point& x,
                                                                           double s) {
    return (*snapshot)(x * scale, s * tscale) / amplitude;
  });

  SolveOptions opts;
  opts.h = cfg.scale_h;
  opts.dt = cfg.scale_dt;
  opts.box_halfwidth = R;
  opts.threads = cfg.threads;
  opts.store.stride = 1;

  CorrectionTerm term;
  term.scale_index = i;
  term.scale = scale;
  term.amplitude = amplitude;
  term.v = solve(p, opts);

  // Origin jet of v by central differences on the unit grid, then unscaled:
  // each gradient order picks up a factor 1/scale.
  const GridFunction& top = term.v.final_slice();
  const int c = origin_index(top);
  const double h = top.spacing();
  int step_nodes = cfg.derivative_step > 0.0
                       ? std::max(1, static_cast<int>(std::round(cfg.derivative_step / h)))
                       : 4;
  const double s = step_nodes * h;
  term.value = amplitude * top.at(c, top.dim() == 2 ? c : 0);
  if (top.dim() == 1) {
    const double vp = top.at(c + step_nodes), vm = top.at(c - step_nodes), v0 = top.at(c);
    term.gradient[0] = amplitude / scale * (vp - vm) / (2.0 * s);
    term.hessian[0] = amplitude / (scale * scale) * (vp - 2.0 * v0 + vm) / (s * s);
  } else {
    const double v0 = top.at(c, c);
    const double xp = top.at(c + step_nodes, c), xm = top.at(c - step_nodes, c);
    const double yp = top.at(c, c + step_nodes), ym = top.at(c, c - step_nodes);
    const double pp = top.at(c + step_nodes, c + step_nodes);
    const double pm = top.at(c + step_nodes, c - step_nodes);
    const double mp = top.at(c - step_nodes, c + step_nodes);
    const double mm = top.at(c - step_nodes, c - step_nodes);
    term.gradient[0] = amplitude / scale * (xp - xm) / (2.0 * s);
    term.gradient[1] = amplitude / scale * (yp - ym) / (2.0 * s);
    term.hessian[0] = amplitude / (scale * scale) * (xp - 2.0 * v0 + xm) / (s * s);
    term.hessian[2] = amplitude / (scale * scale) * (yp - 2.0 * v0 + ym) / (s * s);
    term.hessian[1] = amplitude / (scale * scale) * (pp - pm - mp + mm) / (4.0 * s * s);
  }

  double sup_v = 0.0;
  for (const auto& sl : term.v.slices) sup_v = std::max(sup_v, sl.max_abs());
  term.sup_norm = amplitude * sup_v;
  return term;
}

CorrectionSequence run_scheme(const SpaceTimeSolution& u, const CauchyExteriorProblem& p,
                              const SchemeConfig& cfg) {
  const KernelSpec& k = p.kernel;
  if (k.dim != 1) {
    throw std::invalid_argument("run_scheme: multiscale runs are 1d at desk scale");
  }
  if (!(cfg.rho > 0.0 && cfg.rho < 1.0) || cfg.i_max < 1 || !(cfg.tau > 0.0 && cfg.tau < 1.0)) {
    throw std::invalid_argument("run_scheme: invalid scheme configuration");
  }
  const GridFunction& g0 = u.slices.front();
  const double R = cfg.base_radius;
  if (g0.box_halfwidth() + 1e-9 < R || u.times.front() > -std::pow(R, k.sigma) + 1e-9) {
    throw std::invalid_argument("run_scheme: base solution does not cover the base cylinder");
  }

  CorrectionSequence seq;
  seq.sigma = k.sigma;
  seq.alpha = k.holder_alpha;
  seq.rho = cfg.rho;
  seq.notes =
      "exterior closeness on growing balls is approximated by the base-box extension rule";
  // The residual field keeps pointers into seq.terms; the reserve pins them.
  seq.terms.reserve(static_cast<std::size_t>(cfg.i_max) + 1);

  ResidualField resid(u, k.sigma, cfg.rho, R);
  const double f00 = p.rhs ? p.rhs(Point{}, 0.0) : 0.0;
  const double h_base = g0.spacing();

  for (int i = 0; i <= cfg.i_max; ++i) {
    const double ball = R * std::pow(cfg.rho, i);
    if (2.0 * ball / h_base < 8.0) {
      throw ScaleExhaustedError("run_scheme: scale " + std::to_string(i) +
                                " is below the base grid resolution");
    }
    seq.terms.push_back(build_correction(i, resid, k, f00, cfg));
    resid.push(&seq.terms.back());

    // e_i: sup of the residual over the scale-i cylinder, taken at base grid
    // nodes (where u needs no spatial interpolation) and stored slice times.
    const double depth = std::pow(ball, k.sigma);
    double e = 0.0;
    std::size_t slices_used = 0;
    for (std::size_t sl = 0; sl < u.slices.size(); ++sl) {
      const double t = u.times[sl];
      if (t < -depth - 1e-12) continue;
      ++slices_used;
      const GridFunction& slice = u.slices[sl];
      const int per_axis = slice.nodes_per_axis();
      for (int ii = 0; ii < per_axis; ++ii) {
        const Point x = slice.node(ii);
        if (std::abs(x[0]) >= ball) continue;
        e = std::max(e, std::abs(resid(x, t)));
      }
    }
    if (slices_used < 2) {
      throw ScaleExhaustedError("run_scheme: scale " + std::to_string(i) +
                                " is below the stored time resolution");
    }
    seq.residual_norms.push_back(e);
  }
  return seq;
}

TaylorExpansion taylor_at_origin(const CorrectionSequence& seq, double sigma, double alpha) {
  const double order = sigma + alpha;
  if (order >= 3.0) throw std::logic_error("taylor_at_origin: order >= 3 cannot occur");
  TaylorExpansion P;
  P.dim = seq.terms.empty() ? 1 : seq.terms.front().v.slices.front().dim();
  P.degree = static_cast<int>(std::floor(order));
  const double dist = std::abs(order - std::round(order));
  if (dist < 0.05) {
    P.warning = "sigma+alpha is within 0.05 of an integer; expansion constants degrade";
  }
  for (const auto& t : seq.terms) {
    P.value += t.value;
    if (P.degree >= 1) {
      P.gradient[0] += t.gradient[0];
      P.gradient[1] += t.gradient[1];
    }
    if (P.degree >= 2) {
      for (int m = 0; m < 3; ++m) P.hessian[m] += t.hessian[m];
    }
  }
  if (!seq.terms.empty()) {
    const auto& last = seq.terms.back();
    const double grad_mag = std::hypot(last.gradient[0], last.gradient[1]);
    const double hess_mag = std::max({std::abs(last.hessian[0]), std::abs(last.hessian[1]),
                                      std::abs(last.hessian[2])});
    const double mags[3] = {std::abs(last.value), grad_mag, hess_mag};
    for (int d = 0; d <= P.degree; ++d) {
      const double ratio = std::pow(seq.rho, order - d);
      P.truncation_bound[d] = ratio < 1.0 ? mags[d] * ratio / (1.0 - ratio)
                                          : std::numeric_limits<double>::infinity();
    }
  }
  return P;
}

ExponentFit fit_decay_rate(const std::vector<double>& errors, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("fit_decay_rate: rho in (0,1)");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) {
      throw std::invalid_argument("fit_decay_rate: errors must be positive");
    }
    x.push_back(static_cast<double>(i) * std::log(1.0 / rho));
    y.push_back(std::log(errors[i]));
  }
  if (x.size() < 3) throw std::invalid_argument("fit_decay_rate: need at least 3 entries");
  const LineFit lf = fit_line(x, y);
  ExponentFit out;
  out.exponent = -lf.slope;
  out.constant = std::exp(lf.intercept);
  out.fit_residual = lf.max_residual;
  out.abscissae = x;
  out.values = errors;
  return out;
}

}  // namespace nlpde
