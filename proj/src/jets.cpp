#include "shelltrace/jets.hpp"

#include <cmath>
#include <string>

namespace shelltrace {

namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw usage_error("jet order must be in [0, " + std::to_string(kMaxJetOrder) +
                      "], got " + std::to_string(order));
  }
}

void check_compatible(const Jet& a, const Jet& b) {
  if (a.base_point != b.base_point) {
    throw usage_error("jet base points differ");
  }
  if (a.coeffs.size() != b.coeffs.size()) {
    throw usage_error("jet orders differ");
  }
}

}  // namespace

Jet jet_const(double c, double lambda0, int order) {
  check_order(order);
  Jet j;
  j.base_point = lambda0;
  j.coeffs.assign(static_cast<size_t>(order) + 1, 0.0);
  j.coeffs[0] = c;
  return j;
}

Jet jet_var(double lambda0, int order) {
  if (order < 1) {
    throw usage_error("jet_var needs order >= 1 to represent the identity");
  }
  check_order(order);
  Jet j = jet_const(lambda0, lambda0, order);
  j.coeffs[1] = 1.0;
  return j;
}

Jet jet_arith(const Jet& a, const Jet& b, JetOp op) {
  check_compatible(a, b);
  const size_t n = a.coeffs.size();
  Jet out;
  out.base_point = a.base_point;
  out.coeffs.assign(n, 0.0);
  switch (op) {
    case JetOp::add:
      for (size_t k = 0; k < n; ++k) out.coeffs[k] = a.coeffs[k] + b.coeffs[k];
      break;
    case JetOp::sub:
      for (size_t k = 0; k < n; ++k) out.coeffs[k] = a.coeffs[k] - b.coeffs[k];
      break;
    case JetOp::mul:
      for (size_t i = 0; i < n; ++i) {
        if (a.coeffs[i] == 0.0) continue;
        for (size_t j = 0; j + i < n; ++j) {
          out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
        }
      }
      break;
    case JetOp::div: {
      double norm = 0.0;
      for (double c : b.coeffs) norm += std::abs(c);
      if (std::abs(b.coeffs[0]) < 1e-13 * norm || b.coeffs[0] == 0.0) {
        throw singularity_error(
            "jet division by (near-)vanishing constant term: base point sits at "
            "a pole (an eigenvalue of the interacting operator)");
      }
      // long division: out[k] = (a[k] - sum_{j>=1} b[j] out[k-j]) / b[0]
      for (size_t k = 0; k < n; ++k) {
        double s = a.coeffs[k];
        for (size_t j = 1; j <= k; ++j) s -= b.coeffs[j] * out.coeffs[k - j];
        out.coeffs[k] = s / b.coeffs[0];
      }
      break;
    }
  }
  return out;
}

Jet jet_shift_derivative(const Jet& a) {
  if (a.order() < 1) {
    throw usage_error("jet_shift_derivative needs order >= 1");
  }
  Jet out;
  out.base_point = a.base_point;
  out.coeffs.resize(a.coeffs.size() - 1);
  for (size_t k = 0; k + 1 < a.coeffs.size(); ++k) {
    out.coeffs[k] = static_cast<double>(k + 1) * a.coeffs[k + 1];
  }
  return out;
}

Jet jet_kappa(double lambda0, int order) {
  if (!(lambda0 < 0.0)) {
    throw domain_error("kappa(lambda)=sqrt(-lambda) needs lambda < 0");
  }
  check_order(order);
  Jet j;
  j.base_point = lambda0;
  j.coeffs.assign(static_cast<size_t>(order) + 1, 0.0);
  // kappa^2 = -lambda. Differentiate: 2 kappa kappa' = -1, then recursively
  // 2*sum_{j} s_j s_{k-j} = 0 for k >= 2 solved for s_k.
  const double s0 = std::sqrt(-lambda0);
  j.coeffs[0] = s0;
  if (order >= 1) j.coeffs[1] = -1.0 / (2.0 * s0);
  for (int k = 2; k <= order; ++k) {
    double acc = 0.0;
    for (int i = 1; i < k; ++i) acc += j.coeffs[i] * j.coeffs[k - i];
    j.coeffs[k] = -acc / (2.0 * s0);
  }
  return j;
}

Jet jet_scale(const Jet& a, double c) {
  Jet out = a;
  for (double& v : out.coeffs) v *= c;
  return out;
}

Jet jet_truncate(const Jet& a, int order) {
  if (order < 0 || order > a.order()) {
    throw usage_error("jet_truncate target order out of range");
  }
  Jet out;
  out.base_point = a.base_point;
  out.coeffs.assign(a.coeffs.begin(), a.coeffs.begin() + order + 1);
  return out;
}

}  // namespace shelltrace
