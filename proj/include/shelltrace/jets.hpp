// Truncated Taylor expansions ("jets") in the spectral parameter lambda.
// coeffs[k] = f^(k)(lambda0) / k!, so reading coefficient m-1 of a jet is the
// (m-1)-fold derivative divided by (m-1)! with no factorial round trip.
#pragma once

#include <cstddef>
#include <vector>

#include "shelltrace/errors.hpp"

namespace shelltrace {

inline constexpr int kMaxJetOrder = 8;

struct Jet {
  double base_point = 0.0;
  std::vector<double> coeffs;  // size order()+1

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

enum class JetOp { add, sub, mul, div };

Jet jet_const(double c, double lambda0, int order);
Jet jet_var(double lambda0, int order);
Jet jet_arith(const Jet& a, const Jet& b, JetOp op);
Jet jet_shift_derivative(const Jet& a);  // jet of f', order drops by one
Jet jet_kappa(double lambda0, int order);  // kappa(lambda) = sqrt(-lambda)

// convenience wrappers
inline Jet jet_add(const Jet& a, const Jet& b) { return jet_arith(a, b, JetOp::add); }
inline Jet jet_sub(const Jet& a, const Jet& b) { return jet_arith(a, b, JetOp::sub); }
inline Jet jet_mul(const Jet& a, const Jet& b) { return jet_arith(a, b, JetOp::mul); }
inline Jet jet_div(const Jet& a, const Jet& b) { return jet_arith(a, b, JetOp::div); }
Jet jet_scale(const Jet& a, double c);
Jet jet_truncate(const Jet& a, int order);  // drop coefficients above `order`

}  // namespace shelltrace
