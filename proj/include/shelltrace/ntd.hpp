// Per-mode scalar realizations of the interior and exterior
// Neumann-to-Dirichlet maps of -Delta - lambda on a circle (d=2) or sphere
// (d=3) of radius R, as jets in lambda, together with the combined maps
//   m_tilde = harmonic sum of the two one-sided maps (the delta coupling
//             building block) and
//   m_hat   = their plain sum (the delta-prime building block),
// plus a probe that fits the power-law decay of mode coefficients against
// singular-value rank.
//
// Sign conventions: the interior normal points radially outward, the
// exterior normal radially inward. With lambda0 < 0 all four maps are
// strictly positive on every mode.
#pragma once

#include "shelltrace/geometry.hpp"
#include "shelltrace/jets.hpp"

namespace shelltrace {

struct NtdModeValue {
  Jet m_minus;
  Jet m_plus;
  Jet m_tilde;
  Jet m_hat;
};

enum class NtdKind { m_tilde, m_hat };

// Interior map on one mode: d=2 jet of I_n(kappa R) / (kappa I_n'(kappa R)),
// d=3 the analog with modified spherical i_l. Requires lambda0 < 0.
Jet ntd_interior(const ModeSpec& mode, const Geometry& geom, double lambda0,
                 int order);

// Exterior map on one mode: d=2 jet of -K_n(kappa R) / (kappa K_n'(kappa R)),
// positive because K_n' < 0.
Jet ntd_exterior(const ModeSpec& mode, const Geometry& geom, double lambda0,
                 int order);

// Combined map for the delta coupling. d=2 uses the closed form
// m_tilde = R I_n(kappa R) K_n(kappa R), which follows from the Wronskian
// at argument kappa R and is verified against the harmonic-sum route by the
// test suite; d=3 always uses the harmonic sum of interior and exterior.
Jet m_tilde(const ModeSpec& mode, const Geometry& geom, double lambda0,
            int order);

// Combined map for the delta-prime coupling: plain sum of the two sides.
Jet m_hat(const ModeSpec& mode, const Geometry& geom, double lambda0,
          int order);

// All four maps at once (single pass over the special-function tables).
NtdModeValue ntd_mode(const ModeSpec& mode, const Geometry& geom,
                      double lambda0, int order);

// Least-squares slope of log|coefficient k of the chosen map's jet| against
// log(singular-value rank) over modes n_lo..n_hi. Mode multiplicities (the
// spherical weight 2l+1, or 2 for nonzero circle modes) inflate the rank, so
// the fitted exponent matches the Schatten-class prediction in either
// dimension. Requires n_hi > n_lo >= 10 and at least 5 modes.
double schatten_decay_probe(NtdKind which, int k, const Geometry& geom,
                            double lambda0, int n_lo, int n_hi);

}  // namespace shelltrace
