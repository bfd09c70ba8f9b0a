#pragma once

#include <string>
#include <vector>

namespace nlpde {

/// A fitted power law m ~ constant * x^exponent from log-log least squares.
/// `degenerate` marks inputs with too few usable points (all-zero moduli,
/// steady solutions); such reports carry no exponent claim.
struct ExponentFit {
  double exponent = 0.0;
  double constant = 0.0;      // amplitude at x = 1
  double fit_residual = 0.0;  // max |log m - fitted log m| over used points
  std::vector<double> abscissae;  // x values actually used
  std::vector<double> values;     // m values actually used
  bool degenerate = false;
  std::string note;
};

/// Least squares of log(m) against log(x). Nonpositive m entries are dropped
/// and recorded in `note`; fewer than 2 surviving points yields a degenerate
/// report, fewer than 3 a note.
ExponentFit fit_power_law(const std::vector<double>& x, const std::vector<double>& m);

/// Plain least-squares line y = a + b*x; returns {a, b, max_abs_residual}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double max_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlpde
