#include "shelltrace/trace_engine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "shelltrace/errors.hpp"
#include "shelltrace/ntd.hpp"

namespace shelltrace {

namespace {

void check_model(FormulaId which, const Coupling& coupling) {
  if (which == FormulaId::delta_vs_free && coupling.model != Model::delta) {
    throw usage_error("formula " + formula_name(which) +
                      " requires a delta coupling (alpha)");
  }
  if ((which == FormulaId::deltaprime_vs_neumann ||
       which == FormulaId::deltaprime_vs_free) &&
      coupling.model != Model::delta_prime) {
    throw usage_error("formula " + formula_name(which) +
                      " requires a delta-prime coupling (omega)");
  }
}

// 1 - s * map as a jet truncated to order m-1. When enforce_below_spectrum
// is set (the summed trace), a non-positive constant term means lambda0 is
// not below the lowest eigenvalue and the request is refused. Without it the
// rational jet expression is evaluated wherever the division is nonsingular:
// both sides of a trace formula are meromorphic in lambda, so per-mode
// identity checks remain meaningful past the first eigenvalue.
Jet resolvent_denominator(const Jet& map_jet, double strength, int m,
                          FormulaId which, const ModeSpec& mode,
                          bool enforce_below_spectrum) {
  Jet den = jet_sub(jet_const(1.0, map_jet.base_point, map_jet.order()),
                    jet_scale(map_jet, strength));
  if (enforce_below_spectrum && den.coeffs[0] <= 0.0) {
    throw domain_error(
        "formula " + formula_name(which) + ": 1 - strength*map = " +
        std::to_string(den.coeffs[0]) + " at mode " +
        std::to_string(mode.index) +
        "; lambda0 is at or above the lowest eigenvalue of the interacting "
        "operator. Locate it with the eigenvalue search (eigs) and evaluate "
        "below it.");
  }
  return jet_truncate(den, m - 1);
}

double term_impl(FormulaId which, const ModeSpec& mode, const Geometry& geom,
                 const Coupling& coupling, int m, double lambda0,
                 bool enforce_below_spectrum) {
  check_model(which, coupling);
  const double s = coupling.strength;
  try {
    switch (which) {
      case FormulaId::delta_vs_free: {
        if (s == 0.0) return 0.0;
        const Jet mt = m_tilde(mode, geom, lambda0, m);
        const Jet num = jet_scale(jet_shift_derivative(mt), s);
        const Jet den = resolvent_denominator(mt, s, m, which, mode,
                                              enforce_below_spectrum);
        return jet_div(num, den).coeffs[m - 1];
      }
      case FormulaId::deltaprime_vs_neumann: {
        if (s == 0.0) return 0.0;
        const Jet mh = m_hat(mode, geom, lambda0, m);
        const Jet num = jet_scale(jet_shift_derivative(mh), s);
        const Jet den = resolvent_denominator(mh, s, m, which, mode,
                                              enforce_below_spectrum);
        return jet_div(num, den).coeffs[m - 1];
      }
      case FormulaId::deltaprime_vs_free: {
        const Jet mh = m_hat(mode, geom, lambda0, m);
        const Jet ratio =
            jet_div(jet_shift_derivative(mh), jet_truncate(mh, m - 1));
        const Jet den = resolvent_denominator(mh, s, m, which, mode,
                                              enforce_below_spectrum);
        return jet_div(ratio, den).coeffs[m - 1];
      }
      case FormulaId::neumann_vs_free: {
        const Jet mh = m_hat(mode, geom, lambda0, m);
        return jet_div(jet_shift_derivative(mh), jet_truncate(mh, m - 1))
            .coeffs[m - 1];
      }
    }
  } catch (const singularity_error& e) {
    throw singularity_error("mode " + std::to_string(mode.index) + ": " +
                            e.what());
  }
  throw usage_error("per_mode_term: unknown formula id");
}

}  // namespace

double per_mode_term(FormulaId which, const ModeSpec& mode,
                     const Geometry& geom, const Coupling& coupling, int m,
                     double lambda0) {
  EnginePlan plan;
  plan.m = m;
  plan.lambda0 = lambda0;
  validate_plan(plan, geom, which);
  return term_impl(which, mode, geom, coupling, m, lambda0,
                   /*enforce_below_spectrum=*/false);
}

namespace {

// power-law tail: fit ln|wt| = ln c - p ln n over the retained terms and
// bound the remainder by the integral of c x^-p past the last mode. The
// bound is only trusted once the fit is clearly summable (p > 1.5);
// otherwise it reports infinity (not yet in the asymptotic regime).
double fit_tail_bound(const std::vector<std::pair<int, double>>& recent) {
  if (recent.empty()) return 0.0;  // identically zero tail (zero coupling)
  if (recent.size() < 3) return recent.back().second;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, w] : recent) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(w);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double cnt = static_cast<double>(recent.size());
  const double denom = cnt * sxx - sx * sx;
  const double slope = (cnt * sxy - sx * sy) / denom;
  const double p = -slope;
  if (!(p > 1.5)) return std::numeric_limits<double>::infinity();
  const double lnc = (sy - slope * sx) / cnt;
  const double n_last = static_cast<double>(recent.back().first);
  return std::exp(lnc) * std::pow(n_last, 1.0 - p) / (p - 1.0);
}

}  // namespace

TraceResult trace_formula(FormulaId which, const Geometry& geom,
                          const Coupling& coupling, const EnginePlan& plan) {
  validate_plan(plan, geom, which);
  check_model(which, coupling);

  TraceResult out;
  double sum = 0.0, comp = 0.0;  // Kahan accumulator
  int streak = 0;
  bool stop_fired = false;
  // ring of the last nonzero weighted terms for the tail fit
  std::vector<std::pair<int, double>> recent;
  recent.reserve(16);

  for (int n = 0; n <= plan.mode_cap; ++n) {
    const ModeSpec mode = make_mode(geom, n);
    const double t = term_impl(which, mode, geom, coupling, plan.m,
                               plan.lambda0, /*enforce_below_spectrum=*/true);
    const double wt = mode.weight * t;

    const double y = wt - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    out.modes_used = n + 1;
    if (plan.keep_per_mode) out.per_mode.push_back({n, mode.weight, t});

    if (n >= 1 && std::fabs(wt) > 0.0) {
      recent.emplace_back(n, std::fabs(wt));
      if (recent.size() > 10) recent.erase(recent.begin());
    }

    const double threshold = plan.abs_tol + plan.rel_tol * std::fabs(sum);
    if (std::fabs(wt) < threshold) {
      ++streak;
    } else {
      streak = 0;
    }
    // Small terms alone do not certify a small remainder: for slowly
    // decaying sums the streak fires while the extrapolated tail is still
    // orders of magnitude above tolerance, so both must agree before the
    // sum may stop.
    if (streak >= 3) {
      out.tail_bound = fit_tail_bound(recent);
      if (out.tail_bound <= threshold) {
        stop_fired = true;
        break;
      }
    }
  }

  out.value = sum;
  if (!stop_fired) out.tail_bound = fit_tail_bound(recent);
  out.converged =
      stop_fired &&
      out.tail_bound <= plan.rel_tol * std::fabs(out.value) + plan.abs_tol;
  return out;
}

std::vector<SweepPoint> sweep(FormulaId which, const Geometry& geom,
                              const Coupling& coupling, const EnginePlan& plan,
                              const std::vector<double>& lambda_grid) {
  std::vector<SweepPoint> out;
  out.reserve(lambda_grid.size());
  for (const double lam : lambda_grid) {
    SweepPoint pt;
    pt.lambda0 = lam;
    EnginePlan local = plan;
    local.lambda0 = lam;
    try {
      pt.result = trace_formula(which, geom, coupling, local);
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace shelltrace
