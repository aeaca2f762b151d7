#include "shelltrace/oracle_fd.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace shelltrace {

namespace {

std::string model_name(OracleModel model) {
  switch (model) {
    case OracleModel::free_op:
      return "free";
    case OracleModel::neumann_split:
      return "neumann-split";
    case OracleModel::delta:
      return "delta";
    case OracleModel::delta_prime:
      return "delta-prime";
  }
  return "?";
}

double resolve_r_max(const Geometry& geom, const OracleConfig& cfg) {
  return cfg.r_max > 0.0 ? cfg.r_max : 40.0 * geom.radius;
}

struct GridSpec {
  int j = 0;       // interface node index; h*j == R exactly
  int np = 0;      // Dirichlet wall at node np (u = 0 there, row dropped)
  double h = 0.0;
};

GridSpec make_grid(const Geometry& geom, double r_max, int n_points) {
  GridSpec grid;
  // Choose h so that R is a grid node: j = round(N / (r_max/R)).
  grid.j = static_cast<int>(
      std::llround(static_cast<double>(n_points) * geom.radius / r_max));
  if (grid.j < 2) {
    throw usage_error(
        "oracle grid too coarse: fewer than two cells inside the interface "
        "radius; raise grid_points or lower r_max");
  }
  grid.h = geom.radius / grid.j;
  grid.np = static_cast<int>(std::ceil(r_max / grid.h - 1e-9));
  return grid;
}

void validate_config(const Geometry& geom, const OracleConfig& cfg) {
  if (cfg.grid_points < 100) {
    throw usage_error("oracle grid_points must be at least 100");
  }
  const double r_max = resolve_r_max(geom, cfg);
  if (!(r_max > 3.0 * geom.radius)) {
    throw usage_error("oracle r_max must exceed 3 * radius");
  }
  if (cfg.mode_cap < 0) {
    throw usage_error("oracle mode_cap must be non-negative");
  }
  make_grid(geom, r_max, cfg.grid_points);  // throws if the node count is bad
}

// Finite-volume assembly in the u variable with exact cell weights
// w_i = integral r^{d-1} over the cell, then the similarity transform
// T = W^{-1/2} A W^{-1/2} which is symmetric tridiagonal with the same
// spectrum. Node 0 carries the natural (regularity) condition and exists
// only for the zero mode; higher modes get a Dirichlet pin at the origin
// from the centrifugal term. The wall at r_max is Dirichlet for every model
// so the truncation error cancels inside each difference.
RadialOperator assemble(OracleModel model, const ModeSpec& mode,
                        const Geometry& geom, double strength,
                        const GridSpec& grid) {
  const int d = geom.dim;
  const double h = grid.h;
  const int j = grid.j;
  const double c = (d == 2)
                       ? static_cast<double>(mode.index) * mode.index
                       : static_cast<double>(mode.index) * (mode.index + 1);
  const bool include0 = (mode.index == 0);
  const bool split = (model == OracleModel::neumann_split ||
                      model == OracleModel::delta_prime);

  auto g = [d](double r) { return d == 2 ? r : r * r; };
  auto cellint = [d](double a, double b) {
    return d == 2 ? 0.5 * (b * b - a * a) : (b * b * b - a * a * a) / 3.0;
  };
  // centrifugal factor c * r^{d-3}
  auto cent = [d, c](double r) { return d == 2 ? c / r : c; };

  // Node layout: [0]?, 1..j-1, interface (one node, or an L/R pair when the
  // model splits the flux there), j+1..np-1.
  struct Node {
    int i;
    int side;  // 0 plain, 1 left interface row, 2 right interface row
  };
  std::vector<Node> nodes;
  nodes.reserve(static_cast<size_t>(grid.np) + 2);
  if (include0) nodes.push_back({0, 0});
  for (int i = 1; i < j; ++i) nodes.push_back({i, 0});
  if (split) {
    nodes.push_back({j, 1});
    nodes.push_back({j, 2});
  } else {
    nodes.push_back({j, 0});
  }
  for (int i = j + 1; i < grid.np; ++i) nodes.push_back({i, 0});

  const int n = static_cast<int>(nodes.size());
  RadialOperator op;
  op.model = model;
  op.mode = mode;
  op.h = h;
  op.diag.assign(n, 0.0);
  op.off.assign(n - 1, 0.0);
  std::vector<double> w(n, 0.0);

  for (int p = 0; p < n; ++p) {
    const Node nd = nodes[p];
    const double r = nd.i * h;
    if (nd.i == 0) {
      w[p] = cellint(0.0, 0.5 * h);
      op.diag[p] = g(0.5 * h) / h;  // flux toward node 1 only
    } else if (nd.side == 1) {
      // half cell [R-h/2, R]; the interface surface term lands here and on
      // the twin row below, with the coupling handled on the off-diagonal
      w[p] = cellint(r - 0.5 * h, r);
      op.diag[p] = g(r - 0.5 * h) / h + cent(r) * (0.5 * h) - strength * g(r);
      op.interface_pos = p;
    } else if (nd.side == 2) {
      w[p] = cellint(r, r + 0.5 * h);
      op.diag[p] = g(r + 0.5 * h) / h + cent(r) * (0.5 * h) - strength * g(r);
    } else {
      w[p] = cellint(r - 0.5 * h, r + 0.5 * h);
      op.diag[p] = (g(r - 0.5 * h) + g(r + 0.5 * h)) / h + cent(r) * h;
      if (nd.i == j) {
        op.interface_pos = p;
        if (model == OracleModel::delta) op.diag[p] -= strength * g(r);
      }
    }
  }
  for (int p = 0; p + 1 < n; ++p) {
    const Node a = nodes[p];
    const Node b = nodes[p + 1];
    if (a.side == 1 && b.side == 2) {
      op.off[p] = strength * g(j * h);  // omega * R^{d-1} across the split
    } else {
      op.off[p] = -g(0.5 * (a.i + b.i) * h) / h;
    }
  }
  for (int p = 0; p < n; ++p) op.diag[p] /= w[p];
  for (int p = 0; p + 1 < n; ++p) op.off[p] /= std::sqrt(w[p] * w[p + 1]);
  return op;
}

std::vector<double> eig_tridiag(const RadialOperator& op) {
  std::vector<double> d = op.diag;
  std::vector<double> e = op.off;
  const lapack_int info =
      LAPACKE_dsterf(static_cast<lapack_int>(d.size()), d.data(), e.data());
  if (info != 0) {
    throw numeric_error("tridiagonal eigensolve failed (info " +
                        std::to_string(info) + ") for the " +
                        model_name(op.model) + " operator at mode " +
                        std::to_string(op.mode.index));
  }
  return d;  // ascending
}

double effective_strength(OracleModel model, const Coupling& coupling) {
  return (model == OracleModel::delta || model == OracleModel::delta_prime)
             ? coupling.strength
             : 0.0;
}

// Spectra depend on (model, geometry, mode, strength, grid) but not on
// lambda or m, so lambda sweeps and Richardson pairs re-use every solve.
struct SpectrumKey {
  int model;
  int dim;
  int index;
  int grid_points;
  double radius;
  double strength;
  double r_max;

  bool operator<(const SpectrumKey& o) const {
    return std::tie(model, dim, index, grid_points, radius, strength, r_max) <
           std::tie(o.model, o.dim, o.index, o.grid_points, o.radius,
                    o.strength, o.r_max);
  }
};

std::map<SpectrumKey, std::vector<double>> g_spectra;
std::mutex g_spectra_mutex;

const std::vector<double>& cached_spectrum(OracleModel model,
                                           const ModeSpec& mode,
                                           const Geometry& geom,
                                           double strength, double r_max,
                                           int n_points) {
  const SpectrumKey key{static_cast<int>(model), geom.dim,  mode.index,
                        n_points,               geom.radius, strength,
                        r_max};
  {
    std::lock_guard<std::mutex> lock(g_spectra_mutex);
    auto it = g_spectra.find(key);
    if (it != g_spectra.end()) return it->second;
  }
  const RadialOperator op =
      assemble(model, mode, geom, strength, make_grid(geom, r_max, n_points));
  std::vector<double> eig = eig_tridiag(op);
  std::lock_guard<std::mutex> lock(g_spectra_mutex);
  // map node addresses are stable, so handing out references is safe
  return g_spectra.try_emplace(key, std::move(eig)).first->second;
}

struct OpPair {
  OracleModel a;
  double sa;
  OracleModel b;
  double sb;
};

OpPair op_pair(FormulaId which, const Coupling& coupling) {
  switch (which) {
    case FormulaId::delta_vs_free:
      if (coupling.model != Model::delta) {
        throw usage_error("formula " + formula_name(which) +
                          " requires a delta coupling (alpha)");
      }
      return {OracleModel::delta, coupling.strength, OracleModel::free_op,
              0.0};
    case FormulaId::deltaprime_vs_neumann:
      if (coupling.model != Model::delta_prime) {
        throw usage_error("formula " + formula_name(which) +
                          " requires a delta-prime coupling (omega)");
      }
      return {OracleModel::delta_prime, coupling.strength,
              OracleModel::neumann_split, 0.0};
    case FormulaId::deltaprime_vs_free:
      if (coupling.model != Model::delta_prime) {
        throw usage_error("formula " + formula_name(which) +
                          " requires a delta-prime coupling (omega)");
      }
      return {OracleModel::delta_prime, coupling.strength,
              OracleModel::free_op, 0.0};
    case FormulaId::neumann_vs_free:
      return {OracleModel::neumann_split, 0.0, OracleModel::free_op, 0.0};
  }
  throw usage_error("oracle_trace: unknown formula id");
}

double inv_pow(double base, int m) {
  double p = base;
  for (int i = 1; i < m; ++i) p *= base;
  return 1.0 / p;
}

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// One mode at one grid: pair eigenvalues by sort order and sum the
// resolvent-power difference with compensated summation. The leading
// eigenvalues largely cancel pairwise; leftovers of the longer spectrum
// (the split models have one extra row) enter with their own sign.
double mode_term(const OpPair& pr, const ModeSpec& mode, const Geometry& geom,
                 int m, double lambda0, double r_max, int n_points) {
  const auto& ea =
      cached_spectrum(pr.a, mode, geom, pr.sa, r_max, n_points);
  const auto& eb =
      cached_spectrum(pr.b, mode, geom, pr.sb, r_max, n_points);
  for (const auto* ev : {&ea, &eb}) {
    if (!ev->empty() && ev->front() <= lambda0) {
      throw domain_error(
          "lambda0 = " + std::to_string(lambda0) +
          " is at or above the lowest discrete eigenvalue at mode " +
          std::to_string(mode.index) +
          "; the trace is defined only below the spectrum. Locate the "
          "eigenvalue with the eigenvalue search (eigs) and move lambda0 "
          "below it");
    }
  }
  KahanSum s;
  const size_t k = std::min(ea.size(), eb.size());
  for (size_t i = 0; i < k; ++i) {
    s.add(inv_pow(ea[i] - lambda0, m) - inv_pow(eb[i] - lambda0, m));
  }
  for (size_t i = k; i < ea.size(); ++i) s.add(inv_pow(ea[i] - lambda0, m));
  for (size_t i = k; i < eb.size(); ++i) s.add(-inv_pow(eb[i] - lambda0, m));
  return s.sum;
}

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

RadialOperator build_radial(OracleModel model, const ModeSpec& mode,
                            const Geometry& geom, const Coupling& coupling,
                            const OracleConfig& cfg) {
  check_geometry(geom);
  if (mode.index < 0) throw usage_error("mode index must be non-negative");
  validate_config(geom, cfg);
  const double r_max = resolve_r_max(geom, cfg);
  return assemble(model, mode, geom, effective_strength(model, coupling),
                  make_grid(geom, r_max, cfg.grid_points));
}

OracleTrace oracle_trace(FormulaId which, const Geometry& geom,
                         const Coupling& coupling, int m, double lambda0,
                         const OracleConfig& cfg) {
  check_geometry(geom);
  if (m < 1) throw usage_error("resolvent power m must be at least 1");
  if (!(lambda0 < 0.0)) {
    throw domain_error("evaluation point lambda0 must be negative");
  }
  validate_config(geom, cfg);
  const double r_max = resolve_r_max(geom, cfg);
  const OpPair pr = op_pair(which, coupling);

  double acc = 0.0;
  double acc_n = 0.0;
  double acc_half = 0.0;
  double last_signed = 0.0;
  double tail_est = 0.0;
  std::vector<std::pair<int, double>> terms;  // (mode index, |weighted term|)
  int used = 0;
  for (int idx = 0; idx <= cfg.mode_cap; ++idx) {
    const ModeSpec mode = make_mode(geom, idx);
    const double tn =
        mode.weight * mode_term(pr, mode, geom, m, lambda0, r_max,
                                cfg.grid_points);
    double t = tn;
    if (cfg.use_richardson) {
      const double th =
          mode.weight * mode_term(pr, mode, geom, m, lambda0, r_max,
                                  cfg.grid_points / 2);
      t = tn + (tn - th) / 3.0;  // second-order scheme: h^2 error cancels
      acc_half += th;
    }
    acc_n += tn;
    acc += t;
    last_signed = t;
    used = idx + 1;
    terms.emplace_back(idx, std::fabs(t));
    // Power-law tail: fit ln|t| against ln(idx + 0.5) over the last 8 modes
    // and integrate the fitted decay past the last one. Mode indices start
    // counting from 8 so the pre-asymptotic head never enters the fit.
    if (idx >= 8) {
      std::vector<double> xs, ys;
      const size_t lo = terms.size() - 8;
      for (size_t i = lo; i < terms.size(); ++i) {
        xs.push_back(std::log(terms[i].first + 0.5));
        ys.push_back(std::log(std::max(terms[i].second, 1e-300)));
      }
      const double p = -ls_slope(xs, ys);
      if (p > 1.2) {
        const double nlast = terms.back().first + 0.5;
        const double cval = terms.back().second * std::pow(nlast, p);
        tail_est = cval * std::pow(nlast, 1.0 - p) / (p - 1.0);
        if (tail_est < 2e-4 * std::fabs(acc)) break;
      }
    }
  }
  // The fitted tail is part of the value on every exit path, including
  // mode_cap exhaustion; dropping it would bias long-tailed sums low.
  acc += std::copysign(tail_est, last_signed);

  const double kappa = std::sqrt(-lambda0);
  const double grid_err =
      cfg.use_richardson ? std::fabs(acc_n - acc_half) / 3.0 : 0.0;
  const double box_err = std::exp(-2.0 * kappa * (r_max - geom.radius));

  OracleTrace out;
  out.value = acc;
  out.error_estimate = grid_err + box_err + 0.3 * tail_est;
  out.modes_used = used;
  return out;
}

std::vector<double> oracle_eigenvalues(OracleModel model, const ModeSpec& mode,
                                       const Geometry& geom,
                                       const Coupling& coupling,
                                       const OracleConfig& cfg) {
  check_geometry(geom);
  if (mode.index < 0) throw usage_error("mode index must be non-negative");
  validate_config(geom, cfg);
  const double r_max = resolve_r_max(geom, cfg);
  const double s = effective_strength(model, coupling);

  auto negatives = [](const std::vector<double>& ev) {
    std::vector<double> out;
    for (double e : ev) {  // ascending, so the negatives are a prefix
      if (e >= 0.0) break;
      out.push_back(e);
    }
    return out;
  };

  std::vector<double> fine =
      negatives(cached_spectrum(model, mode, geom, s, r_max, cfg.grid_points));
  if (cfg.use_richardson) {
    const std::vector<double> half = negatives(
        cached_spectrum(model, mode, geom, s, r_max, cfg.grid_points / 2));
    const size_t k = std::min(fine.size(), half.size());
    for (size_t i = 0; i < k; ++i) {
      fine[i] += (fine[i] - half[i]) / 3.0;
    }
    // a count mismatch means a state right at the edge; keep the fine-grid
    // extras unextrapolated rather than inventing a partner
  }
  std::erase_if(fine, [](double e) { return e >= 0.0; });
  std::sort(fine.begin(), fine.end());
  return fine;
}

}  // namespace shelltrace
