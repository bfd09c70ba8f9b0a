#include "nlpde/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace nlpde {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line: need at least 2 points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    f.max_residual = std::max(f.max_residual, std::abs(y[i] - (f.intercept + f.slope * x[i])));
  }
  return f;
}

ExponentFit fit_power_law(const std::vector<double>& x, const std::vector<double>& m) {
  if (x.size() != m.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  ExponentFit out;
  std::vector<double> lx, lm;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (m[i] > 0.0 && x[i] > 0.0 && std::isfinite(m[i])) {
      lx.push_back(std::log(x[i]));
      lm.push_back(std::log(m[i]));
      out.abscissae.push_back(x[i]);
      out.values.push_back(m[i]);
    } else {
      ++dropped;
    }
  }
  if (dropped > 0) out.note = std::to_string(dropped) + " nonpositive point(s) dropped";
  if (lx.size() < 2) {
    out.degenerate = true;
    if (out.note.empty()) out.note = "too few usable points";
    return out;
  }
  if (lx.size() < 3 && out.note.empty()) out.note = "fit on fewer than 3 points";
  const LineFit lf = fit_line(lx, lm);
  out.exponent = lf.slope;
  out.constant = std::exp(lf.intercept);
  out.fit_residual = lf.max_residual;
  return out;
}

}  // namespace nlpde
