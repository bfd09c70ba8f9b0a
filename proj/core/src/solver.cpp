#include "nlpde/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "nlpde/util.hpp"

namespace nlpde {

namespace {

struct Discretization {
  GridFunction proto;      // grid geometry + exterior rule, values unused
  QuadratureTable table;
  std::vector<int> unknown_of_node;  // flat node index -> unknown index or -1
  std::vector<std::pair<int, int>> node_of_unknown;
  bool periodic = false;
  int per_axis = 0;
};

int flat_index(const Discretization& d, int i, int j) {
  return d.proto.dim() == 1 ? i : i * d.per_axis + j;
}

Discretization discretize(const CauchyExteriorProblem& p, const SolveOptions& opts) {
  const int dim = p.kernel.dim;
  const double box = opts.box_halfwidth > 0.0 ? opts.box_halfwidth : p.domain_radius;
  if (box + 1e-12 < p.domain_radius) {
    throw std::invalid_argument("solve: grid box must contain the solve ball");
  }
  Discretization d{GridFunction(dim, box, opts.h, p.exterior), {}, {}, {}, false, 0};
  d.periodic = p.exterior.kind == ExteriorKind::Periodic;
  if (d.periodic && dim != 1) {
    throw std::invalid_argument("solve: periodic exterior is supported in 1d only");
  }
  d.table = build_quadrature_table(d.proto, p.kernel.sigma);
  d.per_axis = d.proto.nodes_per_axis();
  const int n = d.per_axis - 1;
  d.unknown_of_node.assign(d.proto.size(), -1);
  if (d.periodic) {
    for (int i = 0; i < n; ++i) {  // node n duplicates node 0
      d.unknown_of_node[static_cast<std::size_t>(i)] = i;
      d.node_of_unknown.emplace_back(i, 0);
    }
  } else {
    for (int i = 0; i <= n; ++i) {
      if (dim == 1) {
        if (std::abs(d.proto.node(i)[0]) < p.domain_radius - 1e-12) {
          d.unknown_of_node[static_cast<std::size_t>(i)] =
              static_cast<int>(d.node_of_unknown.size());
          d.node_of_unknown.emplace_back(i, 0);
        }
      } else {
        for (int j = 0; j <= n; ++j) {
          if (norm(d.proto.node(i, j), 2) < p.domain_radius - 1e-12) {
            d.unknown_of_node[static_cast<std::size_t>(flat_index(d, i, j))] =
                static_cast<int>(d.node_of_unknown.size());
            d.node_of_unknown.emplace_back(i, j);
          }
        }
      }
    }
  }
  if (d.node_of_unknown.empty()) throw std::invalid_argument("solve: no interior nodes");
  return d;
}

double exterior_value(const CauchyExteriorProblem& p, const Point& x, double t) {
  switch (p.exterior.kind) {
    case ExteriorKind::Zero: return 0.0;
    case ExteriorKind::Constant: return p.exterior.constant;
    case ExteriorKind::Callable: return p.exterior.fn(x, t);
    case ExteriorKind::Periodic: break;
  }
  throw std::logic_error("exterior_value: periodic problems have no exterior data");
}

/// Assembles M = I - dt A(t) on the unknowns and the exterior-data vector
/// b(t)[r] = sum of couplings into prescribed values (the rhs f is sampled
/// separately each step). For periodic problems the beyond-image remainder
/// couples every row to the grid mean.
void assemble(const CauchyExteriorProblem& p, const Discretization& d, double dt, double t,
              int threads, Eigen::MatrixXd* M, Eigen::VectorXd* b) {
  const int nu = static_cast<int>(d.node_of_unknown.size());
  const int n = d.per_axis - 1;
  const auto& q = d.table;
  const auto& k = p.kernel;
  const bool separable = static_cast<bool>(k.separable_modulation);
  M->setZero(nu, nu);
  b->setZero(nu);

  // Lattice targets outside the unknown set are exterior/pinned data;
  // cache g at the lattice points shared across rows (1d only; 2d rows
  // evaluate directly).
  std::vector<double> lattice_cache;
  int cache_lo = 0;
  if (d.proto.dim() == 1 && !d.periodic) {
    cache_lo = -n;
    lattice_cache.resize(static_cast<std::size_t>(3 * n) + 1);
    for (int i = -n; i <= 2 * n; ++i) {
      const int u = (i >= 0 && i <= n) ? d.unknown_of_node[static_cast<std::size_t>(i)] : -1;
      lattice_cache[static_cast<std::size_t>(i - cache_lo)] =
          (u >= 0) ? 0.0 : exterior_value(p, d.proto.node(i), t);
    }
  }

  parallel_for(static_cast<std::size_t>(nu), threads, [&](std::size_t rr) {
    const int r = static_cast<int>(rr);
    const auto [i, j] = d.node_of_unknown[rr];
    const Point x = d.proto.node(i, j);
    const double row_mod = separable ? k.separable_modulation(x, t) : 0.0;
    double diag = 0.0;
    double data = 0.0;

    auto couple = [&](int ti, int tj, double w) {
      // target node (ti,tj) with weight w (already modulated)
      diag += w;  // the -2u(x) part, folded as +2w on (I - dt A)'s diagonal
      if (d.periodic) {
        int wi = ti % n;
        if (wi < 0) wi += n;
        (*M)(r, d.unknown_of_node[static_cast<std::size_t>(wi)]) -= dt * w;
        return;
      }
      const bool inside = ti >= 0 && ti <= n && (d.proto.dim() == 1 || (tj >= 0 && tj <= n));
      const int u = inside ? d.unknown_of_node[static_cast<std::size_t>(flat_index(d, ti, tj))]
                           : -1;
      if (u >= 0) {
        (*M)(r, u) -= dt * w;
      } else if (!lattice_cache.empty() && d.proto.dim() == 1) {
        data += w * lattice_cache[static_cast<std::size_t>(ti - cache_lo)];
      } else {
        data += w * exterior_value(p, d.proto.node(ti, tj), t);
      }
    };

    if (d.periodic) {
      for (std::size_t c = 1; c < q.folded.size(); ++c) {
        const double w0 = q.folded[c];
        if (w0 == 0.0) continue;
        const int off = static_cast<int>(c);
        const double mod = separable ? row_mod : k.modulation(x, point1(off * q.h), t);
        couple(i + off, j, w0 * mod);
        couple(i - off, j, w0 * mod);
      }
    } else {
      for (const auto& c : q.lattice) {
        const double mod =
            separable ? row_mod : k.modulation(x, point2(c.j0 * q.h, c.j1 * q.h), t);
        const double w = c.power_weight * mod;
        couple(i + c.j0, j + c.j1, w);
        couple(i - c.j0, j - c.j1, w);
      }
      for (const auto& f : q.far) {
        const double mod = separable ? row_mod : k.modulation(x, f.y, t);
        const double w = f.power_weight * mod;
        diag += 2.0 * w;
        data += w * (exterior_value(p, x + f.y, t) + exterior_value(p, x - f.y, t));
      }
    }

    // Power-law remainder beyond the outer radius.
    {
      const double mod = separable ? row_mod : k.modulation(x, point1(q.outer_radius), t);
      const double w = q.remainder_weight * mod;
      diag += 2.0 * w;
      if (d.periodic) {
        for (int c = 0; c < nu; ++c) (*M)(r, c) -= dt * w * 2.0 / nu;
      } else if (p.exterior.kind == ExteriorKind::Constant) {
        data += 2.0 * w * p.exterior.constant;
      } else if (p.exterior.kind == ExteriorKind::Callable) {
        if (d.proto.dim() == 1) {
          data += w * (exterior_value(p, x + point1(q.outer_radius), t) +
                       exterior_value(p, x - point1(q.outer_radius), t));
        } else {
          double acc = 0.0;
          for (int a = 0; a < 4; ++a) {
            const double th = 2.0 * M_PI * (a + 0.5) / 4;
            const Point dd = point2(q.outer_radius * std::cos(th),
                                    q.outer_radius * std::sin(th));
            acc += exterior_value(p, x + dd, t) + exterior_value(p, x - dd, t);
          }
          data += w * acc / 4.0;
        }
      }
    }

    (*M)(r, r) += 1.0 + dt * diag;  // diag already counts both targets of each pair
    (*b)(r) = data;
  });
}

}  // namespace

double SpaceTimeSolution::value(const Point& p, double t) const {
  if (slices.empty()) throw std::logic_error("SpaceTimeSolution: empty");
  if (t <= times.front()) return slices.front().interp(p);
  if (t >= times.back()) return slices.back().interp(p);
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double span = times[hi] - times[lo];
  const double theta = span > 0.0 ? (t - times[lo]) / span : 0.0;
  return (1.0 - theta) * slices[lo].interp(p) + theta * slices[hi].interp(p);
}

std::size_t SpaceTimeSolution::slice_index_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t + 1e-14);
  if (it == times.begin()) return 0;
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

bool SpaceTimeSolution::fully_stored() const {
  if (times.size() < 2) return false;
  const double step = times[1] - times[0];
  for (std::size_t k = 1; k + 1 < times.size(); ++k) {
    if (std::abs((times[k + 1] - times[k]) - step) > 1e-9 * std::max(1.0, step)) return false;
  }
  return true;
}

SpaceTimeSolution solve(const CauchyExteriorProblem& p, const SolveOptions& opts) {
  if (!(p.t_start < p.t_end)) throw std::invalid_argument("solve: need t_start < t_end");
  if (!(opts.h > 0.0)) throw std::invalid_argument("solve: h must be positive");
  const double dt =
      opts.dt > 0.0 ? opts.dt : std::pow(opts.h, std::min(p.kernel.sigma, 1.0));
  const bool periodic = p.exterior.kind == ExteriorKind::Periodic;
  if (periodic && !p.initial) {
    throw std::invalid_argument("solve: periodic problems need initial data");
  }

  Discretization d = discretize(p, opts);
  const int nu = static_cast<int>(d.node_of_unknown.size());
  const double span = p.t_end - p.t_start;
  const int steps = std::max(1, static_cast<int>(std::round(span / dt)));
  const double dt_eff = span / steps;

  // Initial slice: data everywhere.
  GridFunction slice = d.proto;
  slice.set_time(p.t_start);
  const int per_axis = d.per_axis;
  for (int i = 0; i < per_axis; ++i) {
    for (int j = 0; j < (slice.dim() == 2 ? per_axis : 1); ++j) {
      const Point x = slice.node(i, j);
      slice.at(i, j) = p.initial ? p.initial(x) : exterior_value(p, x, p.t_start);
    }
  }
  if (!slice.all_finite()) throw std::invalid_argument("solve: non-finite initial data");

  SpaceTimeSolution out;
  out.dt_marched = dt_eff;
  out.sigma = p.kernel.sigma;
  out.times.push_back(p.t_start);
  out.slices.push_back(slice);

  Eigen::MatrixXd M;
  Eigen::VectorXd b;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool factored = false;
  bool data_ready = false;

  Eigen::VectorXd u(nu), rhs(nu);
  for (int r = 0; r < nu; ++r) {
    const auto [i, j] = d.node_of_unknown[static_cast<std::size_t>(r)];
    u(r) = slice.at(i, j);
  }

  for (int step = 1; step <= steps; ++step) {
    const double t1 = step == steps ? p.t_end : p.t_start + step * dt_eff;
    if (!factored || !p.kernel.time_invariant) {
      assemble(p, d, dt_eff, t1, opts.threads, &M, &b);
      lu.compute(M);
      factored = true;
      data_ready = true;
    } else if (!data_ready || !opts.static_data) {
      Eigen::MatrixXd dummy;  // data refresh only: reassemble b cheaply
      assemble(p, d, dt_eff, t1, opts.threads, &dummy, &b);
      data_ready = opts.static_data;
    }
    rhs = u + dt_eff * b;
    if (p.rhs) {
      for (int r = 0; r < nu; ++r) {
        const auto [i, j] = d.node_of_unknown[static_cast<std::size_t>(r)];
        rhs(r) += dt_eff * p.rhs(d.proto.node(i, j), t1);
      }
    }
    u = lu.solve(rhs);
    if (step == 1) {
      const double res = (M.size() > 0 ? (M * u - rhs).cwiseAbs().maxCoeff() : 0.0);
      if (!(res <= 1e-8 * (rhs.cwiseAbs().maxCoeff() + 1.0))) {
        throw std::runtime_error("solve: implicit system solve failed (singular matrix?)");
      }
      if (p.kernel.time_invariant) M.resize(0, 0);  // factor retains its own copy
    }
    if (!u.allFinite()) {
      throw std::runtime_error("solve: non-finite state at t = " + std::to_string(t1));
    }

    slice.set_time(t1);
    for (int r = 0; r < nu; ++r) {
      const auto [i, j] = d.node_of_unknown[static_cast<std::size_t>(r)];
      slice.at(i, j) = u(r);
    }
    if (periodic) {
      slice.at(per_axis - 1) = slice.at(0);  // duplicate seam node
    } else {
      for (int i = 0; i < per_axis; ++i) {
        for (int j = 0; j < (slice.dim() == 2 ? per_axis : 1); ++j) {
          if (d.unknown_of_node[static_cast<std::size_t>(flat_index(d, i, j))] < 0) {
            slice.at(i, j) = exterior_value(p, slice.node(i, j), t1);
          }
        }
      }
    }

    const bool keep = step == steps || step % std::max(1, opts.store.stride) == 0 ||
                      p.t_end - t1 <= opts.store.fine_window;
    if (keep) {
      out.times.push_back(t1);
      out.slices.push_back(slice);
    }
  }
  return out;
}

ComparisonReport compare(const CauchyExteriorProblem& p1, const CauchyExteriorProblem& p2,
                         const SolveOptions& opts) {
  if (p1.kernel.dim != p2.kernel.dim || std::abs(p1.kernel.sigma - p2.kernel.sigma) > 1e-14 ||
      std::abs(p1.t_start - p2.t_start) > 1e-14 || std::abs(p1.t_end - p2.t_end) > 1e-14 ||
      std::abs(p1.domain_radius - p2.domain_radius) > 1e-14) {
    throw std::invalid_argument("compare: problems must share kernel order, domain and times");
  }
  // Sampled precondition: f1 <= f2 and g1 <= g2.
  const double box = opts.box_halfwidth > 0.0 ? opts.box_halfwidth : p1.domain_radius;
  for (int i = 0; i <= 32; ++i) {
    const double xx = -2.0 * box + 4.0 * box * i / 32.0;
    const Point x = p1.kernel.dim == 1 ? point1(xx) : point2(xx, xx / 2);
    for (int kt = 0; kt <= 4; ++kt) {
      const double t = p1.t_start + (p1.t_end - p1.t_start) * kt / 4.0;
      const double f1 = p1.rhs ? p1.rhs(x, t) : 0.0;
      const double f2 = p2.rhs ? p2.rhs(x, t) : 0.0;
      if (f1 > f2 + 1e-12) throw std::invalid_argument("compare: f1 <= f2 violated");
      if (p1.exterior.kind != ExteriorKind::Periodic) {
        if (exterior_value(p1, x, t) > exterior_value(p2, x, t) + 1e-12) {
          throw std::invalid_argument("compare: g1 <= g2 violated");
        }
      }
    }
  }
  const SpaceTimeSolution u1 = solve(p1, opts);
  const SpaceTimeSolution u2 = solve(p2, opts);
  ComparisonReport rep;
  for (std::size_t s = 0; s < u1.slices.size(); ++s) {
    for (std::size_t v = 0; v < u1.slices[s].values().size(); ++v) {
      rep.max_violation =
          std::max(rep.max_violation, u1.slices[s].values()[v] - u2.slices[s].values()[v]);
    }
  }
  rep.ordered = rep.max_violation <= 1e-10;
  return rep;
}

void save_snapshot(const SpaceTimeSolution& u, const std::string& path) {
  if (u.slices.empty()) throw std::invalid_argument("save_snapshot: empty solution");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_snapshot: cannot open " + path);
  const GridFunction& g = u.slices.front();
  const std::int32_t n = g.dim();
  const double h = g.spacing();
  const double r_box = g.box_halfwidth();
  const double dt = u.dt_marched;
  const std::int64_t count = static_cast<std::int64_t>(u.slices.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&h), sizeof h);
  out.write(reinterpret_cast<const char*>(&r_box), sizeof r_box);
  out.write(reinterpret_cast<const char*>(&dt), sizeof dt);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (std::size_t s = 0; s < u.slices.size(); ++s) {
    out.write(reinterpret_cast<const char*>(&u.times[s]), sizeof(double));
    const auto& v = u.slices[s].values();
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("save_snapshot: write failed for " + path);
}

SpaceTimeSolution load_snapshot(const std::string& path, double sigma, ExteriorRule exterior) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_snapshot: cannot open " + path);
  std::int32_t n = 0;
  double h = 0, r_box = 0, dt = 0;
  std::int64_t count = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&h), sizeof h);
  in.read(reinterpret_cast<char*>(&r_box), sizeof r_box);
  in.read(reinterpret_cast<char*>(&dt), sizeof dt);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || count <= 0) throw std::runtime_error("load_snapshot: bad header in " + path);
  SpaceTimeSolution u;
  u.dt_marched = dt;
  u.sigma = sigma;
  for (std::int64_t s = 0; s < count; ++s) {
    double t = 0;
    in.read(reinterpret_cast<char*>(&t), sizeof t);
    GridFunction g(n, r_box, h, exterior, t);
    in.read(reinterpret_cast<char*>(g.values().data()),
            static_cast<std::streamsize>(g.size() * sizeof(double)));
    if (!in) throw std::runtime_error("load_snapshot: truncated slice data in " + path);
    u.times.push_back(t);
    u.slices.push_back(std::move(g));
  }
  return u;
}

ResidualReport steady_residual(const SpaceTimeSolution& u, const CauchyExteriorProblem& p) {
  if (!u.fully_stored()) {
    throw std::invalid_argument("steady_residual: needs a fully stored solution (stride 1)");
  }
  const GridFunction& g0 = u.slices.front();
  QuadratureTable q = build_quadrature_table(g0, p.kernel.sigma);
  ResidualReport rep;
  const int per_axis = g0.nodes_per_axis();
  rep.per_node_max.assign(g0.size(), 0.0);
  for (std::size_t s = 1; s < u.slices.size(); ++s) {
    const double dt = u.times[s] - u.times[s - 1];
    const double t = u.times[s];
    for (int i = 0; i < per_axis; ++i) {
      for (int j = 0; j < (g0.dim() == 2 ? per_axis : 1); ++j) {
        const Point x = u.slices[s].node(i, j);
        const bool interior =
            p.exterior.kind == ExteriorKind::Periodic
                ? i < per_axis - 1
                : norm(x, g0.dim()) < p.domain_radius - 1e-12;
        if (!interior) continue;
        const double ut = (u.slices[s].at(i, j) - u.slices[s - 1].at(i, j)) / dt;
        const double lu = apply_L(u.slices[s], p.kernel, i, j, t, q);
        const double f = p.rhs ? p.rhs(x, t) : 0.0;
        const double r = std::abs(ut - lu - f);
        auto& cell = rep.per_node_max[static_cast<std::size_t>(
            g0.dim() == 1 ? i : i * per_axis + j)];
        cell = std::max(cell, r);
        rep.max_abs = std::max(rep.max_abs, r);
      }
    }
  }
  return rep;
}

}  // namespace nlpde
