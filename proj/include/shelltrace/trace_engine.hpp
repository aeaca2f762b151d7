// Trace formulas as convergent mode sums.
//
// Each supported resolvent-power-difference trace is diagonal in the angular
// mode basis, so the trace is a multiplicity-weighted sum over modes of a
// scalar function of the per-mode boundary maps:
//   delta_vs_free:         (1 - a m_tilde)^-1 a m_tilde'
//   deltaprime_vs_neumann: (1 - w m_hat)^-1 w m_hat'
//   deltaprime_vs_free:    (1 - w m_hat)^-1 m_hat^-1 m_hat'
//   neumann_vs_free:       m_hat^-1 m_hat'
// with the (m-1)-fold lambda-derivative divided by (m-1)! read off as jet
// coefficient m-1. Summation is adaptive with compensated accumulation and a
// fitted power-law tail bound.
#pragma once

#include <string>
#include <vector>

#include "shelltrace/geometry.hpp"

namespace shelltrace {

struct PerModeTerm {
  int index = 0;
  int weight = 1;
  double term = 0.0;  // unweighted scalar term for this mode
};

struct TraceResult {
  double value = 0.0;
  int modes_used = 0;
  double tail_bound = 0.0;
  bool converged = false;
  std::vector<PerModeTerm> per_mode;  // filled when plan.keep_per_mode
};

// Scalar term of one mode. Both sides of each formula are meromorphic in
// lambda, so this evaluates the rational jet expression wherever the
// division is nonsingular, even when 1 - strength * map < 0 (lambda0 past
// the lowest eigenvalue); per-mode identity checks rely on that. Only an
// actual pole raises singularity_error, tagged with the mode.
double per_mode_term(FormulaId which, const ModeSpec& mode,
                     const Geometry& geom, const Coupling& coupling, int m,
                     double lambda0);

// Adaptive weighted mode sum. Unlike per_mode_term this refuses
// (domain_error) when 1 - strength * map is nonpositive at some mode,
// since a summed trace is only meaningful with lambda0 below the whole
// spectrum; the message points at the eigenvalue search. Stops once three
// consecutive weighted terms fall below abs_tol + rel_tol * |partial sum|;
// the tail bound fits c * n^-p to the last ten weighted terms and
// integrates it past the last mode (accepted only for p > 1.5). Hitting
// mode_cap without the stop rule firing yields converged = false, not an
// exception.
TraceResult trace_formula(FormulaId which, const Geometry& geom,
                          const Coupling& coupling, const EnginePlan& plan);

struct SweepPoint {
  double lambda0 = 0.0;
  TraceResult result;
  std::string error;  // empty on success; failures do not stop the sweep
};

std::vector<SweepPoint> sweep(FormulaId which, const Geometry& geom,
                              const Coupling& coupling, const EnginePlan& plan,
                              const std::vector<double>& lambda_grid);

}  // namespace shelltrace
