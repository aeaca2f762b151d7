// Discrete eigenvalues located as roots of the per-mode Birman-Schwinger
// condition: lambda < 0 is an eigenvalue of the delta (resp. delta-prime)
// operator on mode n exactly when 1 = strength * m_tilde_n(lambda)
// (resp. strength * m_hat_n(lambda)). The maps are increasing in lambda, so
// each mode carries at most one root; the finder scans for a sign change and
// polishes it to |1 - strength*M| <= 1e-12.
#pragma once

#include <utility>
#include <vector>

#include "shelltrace/geometry.hpp"

namespace shelltrace {

struct EigResult {
  ModeSpec mode;
  double lambda = 0.0;     // root, strictly inside the bracket
  int multiplicity = 1;    // mode weight, not expanded into repeats
  double residual = 0.0;   // |1 - strength * M(lambda)| at the root
};

// Heuristic bracket [-max(10, strength^2)/R^2, -1e-8] covering the
// one-dimensional binding-energy scale with room to spare.
std::pair<double, double> default_bs_bracket(const Geometry& geom,
                                             double strength);

// All Birman-Schwinger roots for one mode inside [bracket_lo, bracket_hi].
// No sign change yields an empty list (not an error). Bracket endpoints must
// not themselves be roots and strength must be nonzero. A non-monotone
// scan profile triggers numeric_error since it would mean the underlying
// map evaluation is broken.
std::vector<EigResult> bs_root_find(Model model, const ModeSpec& mode,
                                    const Geometry& geom, double strength,
                                    double bracket_lo, double bracket_hi);

}  // namespace shelltrace
