// Acceptance suite. Each criterion prints exactly one PASS/FAIL line with
// its pinned tolerance and the measured quantity; the process exit code is
// the number of failed criteria. Runs standalone (no test framework) so the
// output reads as a checklist.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shelltrace/bs_eigs.hpp"
#include "shelltrace/errors.hpp"
#include "shelltrace/geometry.hpp"
#include "shelltrace/jets.hpp"
#include "shelltrace/ntd.hpp"
#include "shelltrace/oracle_fd.hpp"
#include "shelltrace/trace_engine.hpp"

using namespace shelltrace;

namespace {

const Geometry kCircle{2, 1.0};
const Geometry kSphere{3, 1.0};

int g_failures = 0;

using clk = std::chrono::steady_clock;

void report(const char* id, bool pass, const std::string& detail,
            clk::time_point started) {
  const double secs =
      std::chrono::duration<double>(clk::now() - started).count();
  std::printf("%-4s %s  %s  [%.1fs]\n", id, pass ? "PASS" : "FAIL",
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

template <typename Fn>
void criterion(const char* id, Fn fn) {
  const auto t0 = clk::now();
  try {
    std::string detail;
    const bool ok = fn(detail);
    report(id, ok, detail, t0);
  } catch (const std::exception& e) {
    report(id, false, std::string("unexpected exception: ") + e.what(), t0);
  }
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------- A1

struct ExprCase {
  double a, b, c, d, e, f;
  int shape;
};

double eval_scalar(const ExprCase& x, double lam) {
  const double k = std::sqrt(-lam);
  switch (x.shape) {
    case 0:
      return ((x.a * k + x.b) * (x.c * lam + x.d) + x.e) / (k + x.f);
    case 1:
      return (x.a * lam * lam + x.b * k + x.c) / (k * k + x.d) + x.e * k;
    default:
      return ((x.a * k + x.b) / (x.c * k + x.d) + x.e * lam) * (k + x.f);
  }
}

Jet eval_jet(const ExprCase& x, double lam0, int order) {
  const Jet k = jet_kappa(lam0, order);
  const Jet l = jet_var(lam0, order);
  auto cst = [&](double v) { return jet_const(v, lam0, order); };
  switch (x.shape) {
    case 0:
      return jet_div(
          jet_add(jet_mul(jet_add(jet_scale(k, x.a), cst(x.b)),
                          jet_add(jet_scale(l, x.c), cst(x.d))),
                  cst(x.e)),
          jet_add(k, cst(x.f)));
    case 1:
      return jet_add(
          jet_div(jet_add(jet_add(jet_scale(jet_mul(l, l), x.a),
                                  jet_scale(k, x.b)),
                          cst(x.c)),
                  jet_add(jet_mul(k, k), cst(x.d))),
          jet_scale(k, x.e));
    default:
      return jet_mul(
          jet_add(jet_div(jet_add(jet_scale(k, x.a), cst(x.b)),
                          jet_add(jet_scale(k, x.c), cst(x.d))),
                  jet_scale(l, x.e)),
          jet_add(k, cst(x.f)));
  }
}

bool a1(std::string& detail) {
  const double kSlopeTol = 1e-6;   // slope vs central differences, relative
  const double kAxiomTol = 1e-13;  // ring axioms, relative to coefficient size
  std::mt19937_64 rng(20260814);
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  std::uniform_real_distribution<double> lam_pick(-9.0, -0.3);

  double worst_slope = 0.0;
  for (int i = 0; i < 200; ++i) {
    const ExprCase x{coef(rng), coef(rng), coef(rng),
                     coef(rng), coef(rng), coef(rng), i % 3};
    const double lam0 = lam_pick(rng);
    const int order = 1 + i % 4;
    const Jet j = eval_jet(x, lam0, order);
    const double h = 1e-5 * std::max(1.0, std::fabs(lam0));
    const double fd =
        (eval_scalar(x, lam0 + h) - eval_scalar(x, lam0 - h)) / (2.0 * h);
    const double rel =
        std::fabs(j.coeffs[1] - fd) / std::max(std::fabs(fd), 1e-12);
    worst_slope = std::max(worst_slope, rel);
  }

  std::uniform_real_distribution<double> any(-2.0, 2.0);
  auto rand_jet = [&](double lam0) {
    Jet j = jet_const(0.0, lam0, 4);
    for (double& c : j.coeffs) c = any(rng);
    return j;
  };
  double worst_axiom = 0.0;
  auto gap = [&](const Jet& p, const Jet& q) {
    double scale = 1.0, g = 0.0;
    for (int k = 0; k <= p.order(); ++k) {
      scale += std::fabs(p.coeffs[k]) + std::fabs(q.coeffs[k]);
      g = std::max(g, std::fabs(p.coeffs[k] - q.coeffs[k]));
    }
    return g / scale;
  };
  for (int i = 0; i < 50; ++i) {
    const double lam0 = lam_pick(rng);
    const Jet x = rand_jet(lam0), y = rand_jet(lam0), z = rand_jet(lam0);
    worst_axiom = std::max(worst_axiom, gap(jet_add(x, y), jet_add(y, x)));
    worst_axiom = std::max(worst_axiom, gap(jet_mul(x, y), jet_mul(y, x)));
    worst_axiom = std::max(
        worst_axiom, gap(jet_mul(jet_mul(x, y), z), jet_mul(x, jet_mul(y, z))));
    worst_axiom = std::max(
        worst_axiom,
        gap(jet_mul(x, jet_add(y, z)), jet_add(jet_mul(x, y), jet_mul(x, z))));
  }

  detail = fmt("jet slope vs central differences: max rel err %.2e <= %.0e "
               "over 200 expressions; ring axioms max rel dev %.2e <= %.0e",
               worst_slope, kSlopeTol, worst_axiom, kAxiomTol);
  return worst_slope <= kSlopeTol && worst_axiom <= kAxiomTol;
}

// ------------------------------------------------------------ A2 A3 A4

struct GridOutcome {
  int checked = 0;
  int skipped = 0;
  double max_gap = 0.0;
  bool all_converged = true;
};

GridOutcome engine_vs_oracle(FormulaId which, Model model,
                             const std::vector<double>& strengths,
                             const std::vector<int>& powers,
                             const std::vector<double>& lambdas,
                             const OracleConfig& cfg, double engine_rel_tol) {
  GridOutcome out;
  for (int m : powers) {
    for (double s : strengths) {
      for (double lam : lambdas) {
        EnginePlan plan;
        plan.m = m;
        plan.lambda0 = lam;
        plan.rel_tol = engine_rel_tol;
        plan.abs_tol = 0.0;
        const Coupling c{model, s};
        TraceResult eng;
        try {
          eng = trace_formula(which, kCircle, c, plan);
        } catch (const domain_error&) {
          // lambda at or above the lowest eigenvalue; the protocol only
          // covers points below the whole spectrum
          ++out.skipped;
          continue;
        }
        out.all_converged = out.all_converged && eng.converged;
        const OracleTrace orc = oracle_trace(which, kCircle, c, m, lam, cfg);
        out.max_gap =
            std::max(out.max_gap, std::fabs(orc.value - eng.value) /
                                      std::fabs(eng.value));
        ++out.checked;
      }
    }
  }
  return out;
}

bool a2(std::string& detail) {
  const double kTol = 5e-3;
  OracleConfig cfg;
  cfg.grid_points = 8000;
  cfg.r_max = 40.0;
  cfg.mode_cap = 60;
  const GridOutcome r =
      engine_vs_oracle(FormulaId::delta_vs_free, Model::delta,
                       {0.8, -0.5, 2.0}, {1, 2}, {-1.0, -2.0, -4.0}, cfg,
                       1e-6);
  detail = fmt("interface-vs-free cross-check: max rel gap %.2e <= %.0e over "
               "%d (m, alpha, lambda) points, %d skipped above the ground "
               "state, engine converged on all",
               r.max_gap, kTol, r.checked, r.skipped);
  return r.max_gap <= kTol && r.checked == 16 && r.skipped == 2 &&
         r.all_converged;
}

bool a3(std::string& detail) {
  const double kTol = 5e-3;
  OracleConfig cfg;
  cfg.grid_points = 8000;
  cfg.r_max = 40.0;
  cfg.mode_cap = 60;
  const GridOutcome r =
      engine_vs_oracle(FormulaId::deltaprime_vs_neumann, Model::delta_prime,
                       {0.5, -0.7}, {1, 2}, {-1.0, -2.0, -4.0}, cfg, 1e-6);
  detail = fmt("transmission-vs-decoupled cross-check: max rel gap %.2e <= "
               "%.0e over %d (m, omega, lambda) points, %d skipped above the "
               "ground state",
               r.max_gap, kTol, r.checked, r.skipped);
  return r.max_gap <= kTol && r.checked == 10 && r.skipped == 2 &&
         r.all_converged;
}

bool a4(std::string& detail) {
  const double kTol = 5e-3;
  OracleConfig cfg;
  cfg.grid_points = 8000;
  cfg.r_max = 40.0;
  cfg.mode_cap = 60;
  // the decoupling comparison converges slowly (terms ~ 1/n^2), so the
  // engine runs with a loose internal target (lambda = -4 needs ~4100
  // modes even at 3e-4); the cross-check tolerance dominates either way
  const GridOutcome r =
      engine_vs_oracle(FormulaId::neumann_vs_free, Model::delta_prime, {0.0},
                       {1}, {-1.0, -4.0}, cfg, 3e-4);
  detail = fmt("decoupled-vs-free cross-check (m = 1): max rel gap %.2e <= "
               "%.0e at lambda in {-1, -4}",
               r.max_gap, kTol);
  return r.max_gap <= kTol && r.checked == 2 && r.skipped == 0 &&
         r.all_converged;
}

// ---------------------------------------------------------------- A5

struct SplitGap {
  double per_mode = 0.0;
  double summed = 0.0;
};

SplitGap split_identity_gap(const Geometry& geom, int m, double omega,
                            double lam, int window) {
  const Coupling c{Model::delta_prime, omega};
  double s_dpf = 0.0, s_dpn = 0.0, s_nvf = 0.0;
  SplitGap g;
  for (int n = 0; n <= window; ++n) {
    const ModeSpec mode = make_mode(geom, n);
    const double dpf =
        per_mode_term(FormulaId::deltaprime_vs_free, mode, geom, c, m, lam);
    const double dpn =
        per_mode_term(FormulaId::deltaprime_vs_neumann, mode, geom, c, m, lam);
    const double nvf =
        per_mode_term(FormulaId::neumann_vs_free, mode, geom, c, m, lam);
    const double denom = std::max(
        {std::fabs(dpf), std::fabs(dpn) + std::fabs(nvf), 1e-300});
    g.per_mode = std::max(g.per_mode, std::fabs(dpn + nvf - dpf) / denom);
    s_dpf += mode.weight * dpf;
    s_dpn += mode.weight * dpn;
    s_nvf += mode.weight * nvf;
  }
  g.summed = std::fabs(s_dpn + s_nvf - s_dpf) / std::fabs(s_dpf);
  return g;
}

bool a5(std::string& detail) {
  const double kTol = 1e-10;
  const std::array<std::pair<int, int>, 4> dims{{{2, 1}, {2, 2}, {3, 2},
                                                 {3, 3}}};
  double worst_pm = 0.0, worst_sum = 0.0;
  int combos = 0;
  for (const auto& [d, m] : dims) {
    const Geometry geom{d, 1.0};
    for (double omega : {0.5, -0.5, 2.0}) {
      for (double lam : {-1.0, -4.0}) {
        const SplitGap g = split_identity_gap(geom, m, omega, lam, 150);
        worst_pm = std::max(worst_pm, g.per_mode);
        worst_sum = std::max(worst_sum, g.summed);
        ++combos;
      }
    }
  }
  detail = fmt("interface + decoupling = free split: per-mode max rel gap "
               "%.2e, summed max rel gap %.2e, both <= %.0e over %d combos "
               "(modes 0..150)",
               worst_pm, worst_sum, kTol, combos);
  return worst_pm <= kTol && worst_sum <= kTol && combos == 24;
}

// ---------------------------------------------------------------- A6

bool a6(std::string& detail) {
  struct Probe {
    NtdKind which;
    int k;
    int lo, hi;
    double want, band;
  };
  // the k = 2 coefficient at high modes drowns in cancellation noise, so
  // that probe runs on a low-mode window where the signal is clean
  const std::array<Probe, 4> probes{{{NtdKind::m_tilde, 0, 100, 1000, -1.0,
                                      0.05},
                                     {NtdKind::m_tilde, 1, 100, 1000, -3.0,
                                      0.1},
                                     {NtdKind::m_tilde, 2, 10, 40, -5.0, 0.2},
                                     {NtdKind::m_hat, 0, 100, 1000, -1.0,
                                      0.05}}};
  bool ok = true;
  std::ostringstream ss;
  ss << "singular-value decay exponents:";
  for (const Probe& p : probes) {
    const double slope =
        schatten_decay_probe(p.which, p.k, kCircle, -1.0, p.lo, p.hi);
    const bool hit = std::fabs(slope - p.want) <= p.band;
    ok = ok && hit;
    ss << fmt(" k=%d %.4f (want %.0f +- %.2f)", p.k, slope, p.want, p.band);
  }
  detail = ss.str();
  return ok;
}

// ---------------------------------------------------------------- A7

bool a7(std::string& detail) {
  const double kTol = 1e-3;  // absolute, on each eigenvalue
  OracleConfig cfg;          // defaults: N=8000, r_max=40R, extrapolated
  double worst = 0.0;
  int matched = 0;
  bool counts_ok = true;
  for (double alpha : {1.0, 2.0}) {
    const auto bracket = default_bs_bracket(kCircle, alpha);
    for (int n = 0; n <= 3; ++n) {
      const ModeSpec mode = make_mode(kCircle, n);
      const auto roots = bs_root_find(Model::delta, mode, kCircle, alpha,
                                      bracket.first, bracket.second);
      const auto eigs =
          oracle_eigenvalues(OracleModel::delta, mode, kCircle,
                             Coupling{Model::delta, alpha}, cfg);
      if (roots.size() != eigs.size()) {
        counts_ok = false;
        continue;
      }
      for (size_t i = 0; i < roots.size(); ++i) {
        worst = std::max(worst, std::fabs(roots[i].lambda - eigs[i]));
        ++matched;
      }
    }
  }
  detail = fmt("eigenvalue-search roots vs discretized spectra: counts agree "
               "on all 8 (alpha, mode) pairs%s, %d roots matched, max abs gap "
               "%.2e <= %.0e",
               counts_ok ? "" : " FAILED", matched, worst, kTol);
  return counts_ok && matched == 2 && worst <= kTol;
}

// ---------------------------------------------------------------- A8

bool a8(std::string& detail) {
  EnginePlan plan;
  plan.m = 1;
  plan.lambda0 = -1.0;
  const TraceResult za = trace_formula(FormulaId::delta_vs_free, kCircle,
                                       Coupling{Model::delta, 0.0}, plan);
  const TraceResult zw =
      trace_formula(FormulaId::deltaprime_vs_neumann, kCircle,
                    Coupling{Model::delta_prime, 0.0}, plan);

  OracleConfig cfg;
  cfg.grid_points = 800;
  cfg.r_max = 20.0;
  const ModeSpec mode1 = make_mode(kCircle, 1);
  const RadialOperator fo = build_radial(OracleModel::free_op, mode1, kCircle,
                                         Coupling{Model::delta, 0.0}, cfg);
  const RadialOperator dz = build_radial(OracleModel::delta, mode1, kCircle,
                                         Coupling{Model::delta, 0.0}, cfg);
  const RadialOperator ns =
      build_radial(OracleModel::neumann_split, mode1, kCircle,
                   Coupling{Model::delta_prime, 0.0}, cfg);
  const RadialOperator pz =
      build_radial(OracleModel::delta_prime, mode1, kCircle,
                   Coupling{Model::delta_prime, 0.0}, cfg);
  const bool matrices_equal = fo.diag == dz.diag && fo.off == dz.off &&
                              ns.diag == pz.diag && ns.off == pz.off;

  EnginePlan win;
  win.m = 1;
  win.lambda0 = -1.0;
  win.mode_cap = 400;
  win.abs_tol = 0.0;
  win.rel_tol = 0.0;
  const double dpf0 =
      trace_formula(FormulaId::deltaprime_vs_free, kCircle,
                    Coupling{Model::delta_prime, 0.0}, win)
          .value;
  const double nvf =
      trace_formula(FormulaId::neumann_vs_free, kCircle,
                    Coupling{Model::delta_prime, 0.0}, win)
          .value;
  const double rel = std::fabs(dpf0 - nvf) / std::fabs(nvf);

  detail = fmt("degenerations: zero-coupling traces %.1g and %.1g (exact "
               "zeros), oracle matrices identical: %s, free comparison at "
               "omega = 0 matches decoupling comparison to rel %.2e <= 1e-12",
               za.value, zw.value, matrices_equal ? "yes" : "NO", rel);
  return za.value == 0.0 && za.converged && zw.value == 0.0 && zw.converged &&
         matrices_equal && rel <= 1e-12;
}

// ---------------------------------------------------------------- A9

bool a9(std::string& detail) {
  EnginePlan plan;
  plan.m = 1;
  const Coupling c{Model::delta, 0.8};
  std::vector<double> values;
  bool decreasing = true;
  for (int j = 0; j <= 6; ++j) {
    plan.lambda0 = -std::pow(2.0, j);
    const TraceResult r = trace_formula(FormulaId::delta_vs_free, kCircle, c,
                                        plan);
    if (!values.empty() && std::fabs(r.value) >= std::fabs(values.back())) {
      decreasing = false;
    }
    values.push_back(r.value);
  }
  const double ratio = std::fabs(values.back()) / std::fabs(values.front());
  detail = fmt("large-|lambda| falloff: |value| decreasing along lambda = "
               "-2^j, j=0..6: %s; final/first = %.3e (needs < 1e-3)",
               decreasing ? "yes" : "NO", ratio);
  return decreasing && ratio < 1e-3;
}

// ---------------------------------------------------------------- A10

bool a10(std::string& detail) {
  bool rejected = false;
  try {
    EnginePlan bad;
    bad.m = 1;
    bad.lambda0 = -1.0;
    validate_plan(bad, kSphere, FormulaId::deltaprime_vs_free);
  } catch (const domain_error&) {
    rejected = true;
  }

  EnginePlan plan;
  plan.m = 2;
  plan.lambda0 = -3.0;  // below the omega = 0.5 ground state near -2.135
  const TraceResult run = trace_formula(FormulaId::deltaprime_vs_neumann,
                                        kSphere,
                                        Coupling{Model::delta_prime, 0.5},
                                        plan);

  const SplitGap g = split_identity_gap(kSphere, 2, 0.5, -4.0, 120);

  EnginePlan ep;
  ep.m = 2;
  ep.lambda0 = -2.0;
  const TraceResult eng = trace_formula(FormulaId::delta_vs_free, kSphere,
                                        Coupling{Model::delta, 0.8}, ep);
  OracleConfig cfg;
  cfg.grid_points = 4000;
  cfg.r_max = 30.0;
  cfg.mode_cap = 40;
  const OracleTrace orc = oracle_trace(FormulaId::delta_vs_free, kSphere,
                                       Coupling{Model::delta, 0.8}, 2, -2.0,
                                       cfg);
  const double gap = std::fabs(orc.value - eng.value) / std::fabs(eng.value);

  detail = fmt("sphere smoke: m = 1 free comparison rejected: %s; m = 2 "
               "engine converged: %s; split identity per-mode %.2e / summed "
               "%.2e <= 1e-10; reduced-grid cross-check rel gap %.2e <= 1e-2",
               rejected ? "yes" : "NO", run.converged ? "yes" : "NO",
               g.per_mode, g.summed, gap);
  return rejected && run.converged && g.per_mode <= 1e-10 &&
         g.summed <= 1e-10 && gap <= 1e-2;
}

}  // namespace

int main() {
  std::printf("acceptance checks, circle and sphere interface traces\n");
  criterion("A1", a1);
  criterion("A2", a2);
  criterion("A3", a3);
  criterion("A4", a4);
  criterion("A5", a5);
  criterion("A6", a6);
  criterion("A7", a7);
  criterion("A8", a8);
  criterion("A9", a9);
  criterion("A10", a10);
  std::printf("%d of 10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
