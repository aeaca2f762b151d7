// Scaled modified Bessel functions and their jet lifts.
//
// Evaluation strategy, chosen for stability rather than speed:
//   K seeds   Temme-type log series for x <= 2, Steed continued fraction
//             above; both produce the scaled pair (e^x K_0, e^x K_1).
//   K family  forward three-term recurrence (the stable direction for K),
//             with power-of-two rescaling once magnitudes pass 1e250.
//   I family  Miller backward recurrence from a trial seed, normalized by a
//             directly summed e^(-x) I_0 (series below x = 25, asymptotic
//             expansion above). Same rescaling discipline.
//   spherical identical structure with its own coefficients and closed-form
//             seeds; no half-integer cylindrical detour.
//
// Every stored table entry is a mantissa in [0.5, 1) with an explicit
// base-two exponent, so order 10000 at x near 1e-8 stays finite even though
// the actual scaled values leave the double range by thousands of decades.
// Public entry points convert back to plain doubles and refuse (domain
// error) when that conversion would overflow or lose all precision.
//
// Jet lift: for f one of the four scaled functions, the jet of
// f(x(lambda)) about lambda0 is assembled from two factors. The first is
// the Taylor polynomial of the frozen-scale function e^(-x0) I (resp.
// e^(x0) K) around x0, whose x-derivatives come from the three-term
// derivative relations applied to a window of neighboring orders. The
// second factor is the exact truncated series of e^(-(x-x0)) (resp.
// e^(+(x-x0))) as a jet, which restores the running exponential scale.
// Both factors are composed with the argument jet by Horner evaluation in
// the truncated polynomial ring.

#include "shelltrace/specfun.hpp"

#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace shelltrace {

namespace {

constexpr double kRescaleLimit = 1e250;
constexpr int kRescaleShift = 1000;

// factorials through 9! (jet order cap is 8, derivative tables go one deeper)
constexpr double kFact[10] = {1.0,    1.0,     2.0,      6.0,     24.0,
                              120.0,  720.0,   5040.0,   40320.0, 362880.0};

struct Scaled {
  double m = 0.0;  // mantissa
  int e2 = 0;      // value = m * 2^e2
};

Scaled normalized(double m, int e2) {
  if (m == 0.0) return {0.0, 0};
  int ex = 0;
  double mant = std::frexp(m, &ex);
  return {mant, e2 + ex};
}

double to_double_checked(const Scaled& s, int order, double x, const char* what) {
  double r = std::ldexp(s.m, s.e2);
  if (!std::isfinite(r) || (s.m != 0.0 && std::fabs(r) < DBL_MIN)) {
    throw domain_error(std::string(what) + " at order " + std::to_string(order) +
                       ", argument " + std::to_string(x) +
                       " is not representable in double precision");
  }
  return r;
}

// wa * a + wb * b in scaled form
Scaled scaled_lincomb(double wa, const Scaled& a, double wb, const Scaled& b) {
  int e = std::max(a.e2, b.e2);
  double m = wa * std::ldexp(a.m, a.e2 - e) + wb * std::ldexp(b.m, b.e2 - e);
  return normalized(m, e);
}

// ---------------------------------------------------------------- seeds --

void k_seeds_series(double x, double& k0, double& k1) {
  // valid for 0 < x <= 2; returns e^x K_0, e^x K_1
  const double t = x * x / 4.0;
  double i0 = 1.0, i1 = 0.5 * x;
  double term0 = 1.0, term1 = 0.5 * x;
  for (int k = 1;; ++k) {
    term0 *= t / (static_cast<double>(k) * k);
    term1 *= t / (static_cast<double>(k) * (k + 1));
    i0 += term0;
    i1 += term1;
    if (term0 < 1e-19 * i0) break;
  }
  double s = 0.0, term = 1.0, hk = 0.0;
  for (int k = 1;; ++k) {
    term *= t / (static_cast<double>(k) * k);
    hk += 1.0 / k;
    const double add = term * hk;
    s += add;
    if (add < 1e-19 * std::max(s, 1.0)) break;
  }
  const double k0u = -(std::log(x / 2.0) + std::numbers::egamma) * i0 + s;
  const double k1u = (1.0 / x - i1 * k0u) / i0;
  const double es = std::exp(x);
  k0 = k0u * es;
  k1 = k1u * es;
}

void k_seeds_cf2(double x, double& k0, double& k1) {
  // Steed's continued fraction for x > 2 (mu = 0 normalization)
  const double eps = 1e-17;
  const double a1 = 0.25;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0, q2 = 1.0;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= 10000; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < eps) break;
  }
  h = a1 * h;
  k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

double i0_scaled_direct(double x) {
  // e^(-x) I_0(x); series is safe below 25 (I_0(25) ~ 5.7e9), the
  // alternating asymptotic tail takes over above
  if (x < 25.0) {
    const double t = x * x / 4.0;
    double s = 1.0, term = 1.0;
    for (int k = 1;; ++k) {
      term *= t / (static_cast<double>(k) * k);
      s += term;
      if (term < 1e-19 * s) break;
    }
    return s * std::exp(-x);
  }
  double s = 1.0, term = 1.0;
  for (int k = 1; k <= 200; ++k) {
    term *= static_cast<double>(2 * k - 1) * (2 * k - 1) / (8.0 * x * k);
    s += term;
    if (term < 1e-18) break;
  }
  return s / std::sqrt(2.0 * std::numbers::pi * x);
}

double sph_i0_scaled(double x) {
  // e^(-x) sinh(x)/x, written to survive both tiny and huge x
  return -std::expm1(-2.0 * x) / (2.0 * x);
}

// --------------------------------------------------------------- tables --

// Scaled I (or spherical i) for orders 0..n_top by Miller's backward
// recurrence, normalized against the directly computed order-0 value.
std::vector<Scaled> miller_i_table(int n_top, double x, bool spherical) {
  const int guard = 40 + static_cast<int>(std::ceil(std::sqrt(44.0 * x)));
  const int start = n_top + guard;
  double bp = 0.0;     // b_{nu+1}
  double bc = 1e-280;  // b_nu, arbitrary seed washed out by normalization
  std::vector<double> raw(n_top + 1, 0.0);
  std::vector<int> raw_e(n_top + 1, 0);
  int shift = 0;
  for (int nu = start; nu >= 1; --nu) {
    const double coef = spherical ? (2.0 * nu + 1.0) / x : 2.0 * nu / x;
    const double bm = bp + coef * bc;
    bp = bc;
    bc = bm;
    if (std::fabs(bc) > kRescaleLimit) {
      bc = std::ldexp(bc, -kRescaleShift);
      bp = std::ldexp(bp, -kRescaleShift);
      shift += kRescaleShift;
    }
    if (nu - 1 <= n_top) {
      raw[nu - 1] = bc;
      raw_e[nu - 1] = shift;
    }
  }
  const double norm = spherical ? sph_i0_scaled(x) : i0_scaled_direct(x);
  // true value = norm * b_m / b_0. The raw doubles can span far more than
  // the double range (tiny seed at the top, rescale limit at the bottom),
  // so never divide them directly: frexp both sides and divide mantissas,
  // which lie in [0.5, 1), carrying the difference in the exponents.
  const Scaled b0 = normalized(raw[0], raw_e[0]);
  std::vector<Scaled> out(n_top + 1);
  for (int m = 0; m <= n_top; ++m) {
    const Scaled bm = normalized(raw[m], raw_e[m]);
    out[m] = normalized(bm.m / b0.m * norm, bm.e2 - b0.e2);
  }
  return out;
}

// Scaled K (or spherical k) for orders 0..n_top by forward recurrence.
std::vector<Scaled> forward_k_table(int n_top, double x, bool spherical) {
  double k0 = 0.0, k1 = 0.0;
  if (spherical) {
    k0 = 1.0 / x;
    k1 = 1.0 / x + 1.0 / (x * x);
  } else if (x <= 2.0) {
    k_seeds_series(x, k0, k1);
  } else {
    k_seeds_cf2(x, k0, k1);
  }
  std::vector<Scaled> out(n_top + 1);
  out[0] = normalized(k0, 0);
  if (n_top == 0) return out;
  out[1] = normalized(k1, 0);
  double km = k0, kc = k1;
  int shift = 0;
  for (int nu = 1; nu + 1 <= n_top; ++nu) {
    const double coef = spherical ? (2.0 * nu + 1.0) / x : 2.0 * nu / x;
    const double kn = km + coef * kc;
    km = kc;
    kc = kn;
    if (std::fabs(kc) > kRescaleLimit) {
      km = std::ldexp(km, -kRescaleShift);
      kc = std::ldexp(kc, -kRescaleShift);
      shift += kRescaleShift;
    }
    out[nu + 1] = normalized(kc, shift);
  }
  return out;
}

// ----------------------------------------------------------- validation --

void check_args(const char* who, int n, double x) {
  if (n < 0 || n > kMaxBesselOrder) {
    throw domain_error(std::string(who) + ": order " + std::to_string(n) +
                       " outside [0, " + std::to_string(kMaxBesselOrder) + "]");
  }
  if (!(x > kMinBesselArg) || !(x < kMaxBesselArg)) {
    throw domain_error(std::string(who) + ": argument " + std::to_string(x) +
                       " outside (1e-8, 1e6)");
  }
}

// -------------------------------------------------------------- tables -> jets

// Central x-derivatives of orders 0..depth of the scaled family member at
// order n, from a window of same-exponent neighbor values base[j + w]
// holding orders n-w..n+w. One application of the three-term derivative
// relation per step; for I-type families sign = +1, for K-type sign = -1.
std::vector<double> central_derivs(const std::vector<double>& base, int w,
                                   int depth, int n, bool spherical,
                                   double sign) {
  std::vector<double> cur = base;
  std::vector<double> derivs(depth + 1, 0.0);
  derivs[0] = cur[w];
  std::vector<double> nxt(2 * w + 1, 0.0);
  for (int s = 1; s <= depth; ++s) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int j = -(w - s); j <= w - s; ++j) {
      if (spherical) {
        const int m = n + j;
        if (m < 0) continue;  // zero weight below order 0
        const double left = (m == 0) ? 0.0 : cur[j - 1 + w] * m;
        nxt[j + w] = sign * (left + (m + 1.0) * cur[j + 1 + w]) / (2.0 * m + 1.0);
      } else {
        nxt[j + w] = sign * 0.5 * (cur[j - 1 + w] + cur[j + 1 + w]);
      }
    }
    cur.swap(nxt);
    derivs[s] = cur[w];
  }
  return derivs;
}

// P(dx) = sum_m c[m] dx^m evaluated by Horner in the truncated jet ring;
// dx must have zero constant coefficient.
Jet polynomial_of_jet(const std::vector<double>& c, const Jet& dx) {
  const int order = dx.order();
  Jet p = jet_const(c[order], dx.base_point, order);
  for (int m = order - 1; m >= 0; --m) {
    p = jet_mul(p, dx);
    p.coeffs[0] += c[m];
  }
  return p;
}

Jet exp_of_jet(const Jet& dx, double sign) {
  const int order = dx.order();
  std::vector<double> c(order + 1);
  double s = 1.0;
  for (int m = 0; m <= order; ++m) {
    c[m] = s / kFact[m];
    s *= sign;
  }
  return polynomial_of_jet(c, dx);
}

ScaledBesselJets make_scaled_jets(int n, const Jet& arg, bool spherical) {
  const char* who = spherical ? "sph_bessel_pair_jet" : "bessel_pair_jet";
  const int order = arg.order();
  if (order > kMaxJetOrder) {
    throw usage_error(std::string(who) + ": jet order above cap");
  }
  if (!spherical) n = std::abs(n);
  const double x0 = arg.coeffs[0];
  if (!(x0 > 0.0)) {
    throw domain_error(std::string(who) + ": argument jet has nonpositive value");
  }
  check_args(who, n, x0);

  const int w = order + 1;  // window radius; derivative depth is order+1
  const int n_top = n + w;
  const auto itab = miller_i_table(n_top, x0, spherical);
  const auto ktab = forward_k_table(n_top, x0, spherical);
  const int ei = itab[n].e2;
  const int ek = ktab[n].e2;

  std::vector<double> base_i(2 * w + 1, 0.0), base_k(2 * w + 1, 0.0);
  for (int j = -w; j <= w; ++j) {
    const int o = n + j;
    if (spherical) {
      if (o < 0) continue;  // never combined with nonzero weight
      base_i[j + w] = std::ldexp(itab[o].m, itab[o].e2 - ei);
      base_k[j + w] = std::ldexp(ktab[o].m, ktab[o].e2 - ek);
    } else {
      const int oa = std::abs(o);  // reflection I_{-m} = I_m, K_{-m} = K_m
      base_i[j + w] = std::ldexp(itab[oa].m, itab[oa].e2 - ei);
      base_k[j + w] = std::ldexp(ktab[oa].m, ktab[oa].e2 - ek);
    }
  }
  const auto di = central_derivs(base_i, w, order + 1, n, spherical, 1.0);
  const auto dk = central_derivs(base_k, w, order + 1, n, spherical, -1.0);

  Jet dx = arg;
  dx.coeffs[0] = 0.0;

  std::vector<double> ci(order + 1), cdi(order + 1), ck(order + 1), cdk(order + 1);
  for (int m = 0; m <= order; ++m) {
    ci[m] = di[m] / kFact[m];
    cdi[m] = di[m + 1] / kFact[m];
    ck[m] = dk[m] / kFact[m];
    cdk[m] = dk[m + 1] / kFact[m];
  }
  const Jet em = exp_of_jet(dx, -1.0);  // e^{-(x - x0)}
  const Jet ep = exp_of_jet(dx, 1.0);   // e^{+(x - x0)}

  ScaledBesselJets out;
  out.i = jet_mul(polynomial_of_jet(ci, dx), em);
  out.di = jet_mul(polynomial_of_jet(cdi, dx), em);
  out.k = jet_mul(polynomial_of_jet(ck, dx), ep);
  out.dk = jet_mul(polynomial_of_jet(cdk, dx), ep);
  out.exp2_i = ei;
  out.exp2_k = ek;
  return out;
}

Jet unscale_jet(const Jet& a, int e2, const char* who) {
  Jet out = a;
  for (std::size_t idx = 0; idx < out.coeffs.size(); ++idx) {
    const double r = std::ldexp(out.coeffs[idx], e2);
    const bool value_lost =
        idx == 0 && out.coeffs[0] != 0.0 && std::fabs(r) < DBL_MIN;
    if (!std::isfinite(r) || value_lost) {
      throw domain_error(std::string(who) +
                         ": scaled jet coefficient not representable in "
                         "double precision");
    }
    out.coeffs[idx] = r;
  }
  return out;
}

BesselPair pair_from_tables(int n, double x, bool spherical, const char* who) {
  check_args(who, n, x);
  const auto itab = miller_i_table(n + 1, x, spherical);
  const auto ktab = forward_k_table(n + 1, x, spherical);
  Scaled dis, dks;
  if (spherical) {
    if (n == 0) {
      dis = itab[1];         // i_0' = i_1
      dks = ktab[1];         // k_0' = -k_1
      dks.m = -dks.m;
    } else {
      const double wl = n / (2.0 * n + 1.0);
      const double wr = (n + 1.0) / (2.0 * n + 1.0);
      dis = scaled_lincomb(wl, itab[n - 1], wr, itab[n + 1]);
      dks = scaled_lincomb(-wl, ktab[n - 1], -wr, ktab[n + 1]);
    }
  } else {
    const int below = (n == 0) ? 1 : n - 1;  // reflection at order zero
    dis = scaled_lincomb(0.5, itab[below], 0.5, itab[n + 1]);
    dks = scaled_lincomb(-0.5, ktab[below], -0.5, ktab[n + 1]);
  }
  BesselPair out;
  out.i_scaled = to_double_checked(itab[n], n, x, "scaled I value");
  out.k_scaled = to_double_checked(ktab[n], n, x, "scaled K value");
  out.di_scaled = to_double_checked(dis, n, x, "scaled I derivative");
  out.dk_scaled = to_double_checked(dks, n, x, "scaled K derivative");
  return out;
}

}  // namespace

BesselPair bessel_pair(int n, double x) {
  return pair_from_tables(n, x, false, "bessel_pair");
}

BesselPair sph_bessel_pair(int l, double x) {
  return pair_from_tables(l, x, true, "sph_bessel_pair");
}

ScaledBesselJets bessel_pair_jet_scaled(int n, const Jet& arg_jet) {
  return make_scaled_jets(n, arg_jet, false);
}

ScaledBesselJets sph_bessel_pair_jet_scaled(int l, const Jet& arg_jet) {
  if (l < 0) throw domain_error("sph_bessel_pair_jet: negative order");
  return make_scaled_jets(l, arg_jet, true);
}

BesselJets bessel_pair_jet(int n, const Jet& arg_jet) {
  const auto q = bessel_pair_jet_scaled(n, arg_jet);
  BesselJets out;
  out.i = unscale_jet(q.i, q.exp2_i, "bessel_pair_jet");
  out.di = unscale_jet(q.di, q.exp2_i, "bessel_pair_jet");
  out.k = unscale_jet(q.k, q.exp2_k, "bessel_pair_jet");
  out.dk = unscale_jet(q.dk, q.exp2_k, "bessel_pair_jet");
  return out;
}

BesselJets sph_bessel_pair_jet(int l, const Jet& arg_jet) {
  const auto q = sph_bessel_pair_jet_scaled(l, arg_jet);
  BesselJets out;
  out.i = unscale_jet(q.i, q.exp2_i, "sph_bessel_pair_jet");
  out.di = unscale_jet(q.di, q.exp2_i, "sph_bessel_pair_jet");
  out.k = unscale_jet(q.k, q.exp2_k, "sph_bessel_pair_jet");
  out.dk = unscale_jet(q.dk, q.exp2_k, "sph_bessel_pair_jet");
  return out;
}

}  // namespace shelltrace
