// Exponentially scaled modified Bessel functions, cylindrical and spherical,
// on real arguments, plus their lifts to jets in lambda through kappa(lambda).
//
// Scaling convention: i_scaled = e^(-x) I_n(x), k_scaled = e^(x) K_n(x), and
// the derivative fields are the plain argument-derivatives under the same
// scaling, di_scaled = e^(-x) I_n'(x), dk_scaled = e^(x) K_n'(x). With that
// choice the unscaled Wronskian I'K - IK' = 1/x is checkable directly from
// the stored fields, and the three-term derivative relations hold verbatim:
//   I_n' = (I_{n-1} + I_{n+1})/2,   K_n' = -(K_{n-1} + K_{n+1})/2.
// Spherical analog (i_0 = sinh(x)/x, k_0 = e^(-x)/x normalization):
//   i_l' = (l i_{l-1} + (l+1) i_{l+1})/(2l+1), k_l' likewise with a minus,
// and the Wronskian reads i k' - i' k = -1/x^2.
#pragma once

#include "shelltrace/errors.hpp"
#include "shelltrace/jets.hpp"

namespace shelltrace {

// Order cap and argument window accepted by every entry point below.
// Out-of-range input raises domain_error.
inline constexpr int kMaxBesselOrder = 10000;
inline constexpr double kMinBesselArg = 1e-8;
inline constexpr double kMaxBesselArg = 1e6;

struct BesselPair {
  double i_scaled = 0.0;
  double k_scaled = 0.0;
  double di_scaled = 0.0;
  double dk_scaled = 0.0;
};

// Scaled cylindrical pair at integer order n >= 0. Backward (Miller)
// recurrence for I normalized by a direct series/asymptotic e^(-x)I_0,
// forward recurrence for K from Temme-series or Steed continued-fraction
// seeds. Raises domain_error when a scaled value cannot be represented in
// double (possible at large order with small argument, or vice versa).
BesselPair bessel_pair(int n, double x);

// Scaled modified spherical pair at integer order l >= 0, implemented with
// its own recurrences (closed-form seeds i_0 = -expm1(-2x)/(2x) scaled,
// k_0 = 1/x, k_1 = 1/x + 1/x^2 scaled).
BesselPair sph_bessel_pair(int l, double x);

// Jets in lambda of the four scaled functions, evaluated at the argument jet
// x(lambda) = kappa(lambda) * r formed by the caller. arg_jet.coeffs[0] must
// be positive and inside the argument window.
struct BesselJets {
  Jet i;
  Jet k;
  Jet di;
  Jet dk;
};

BesselJets bessel_pair_jet(int n, const Jet& arg_jet);
BesselJets sph_bessel_pair_jet(int l, const Jet& arg_jet);

// Exponent-carrying variant for consumers that only ever form ratios and
// cross-products in which the scale cancels (the boundary-operator maps).
// True jet = stored jet * 2^exp2_*, with i/di sharing exp2_i and k/dk
// sharing exp2_k. Never raises for representability: the mantissa jets are
// kept near unit scale regardless of order and argument.
struct ScaledBesselJets {
  Jet i;
  Jet k;
  Jet di;
  Jet dk;
  int exp2_i = 0;
  int exp2_k = 0;
};

ScaledBesselJets bessel_pair_jet_scaled(int n, const Jet& arg_jet);
ScaledBesselJets sph_bessel_pair_jet_scaled(int l, const Jet& arg_jet);

}  // namespace shelltrace
