// Neumann-to-Dirichlet mode maps built on the scaled Bessel jets.
//
// Everything here works with the exponent-carrying Bessel interface: the
// one-sided maps are ratios within one function family, so the binary
// exponents cancel identically and only the closed-form product route needs
// an explicit ldexp.

#include "shelltrace/ntd.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "shelltrace/errors.hpp"
#include "shelltrace/specfun.hpp"

namespace shelltrace {

namespace {

struct ModeJets {
  ScaledBesselJets q;
  Jet kappa;
};

ModeJets mode_jets(const ModeSpec& mode, const Geometry& geom, double lambda0,
                   int order) {
  if (!(lambda0 < 0.0)) {
    throw domain_error("ntd: lambda0 = " + std::to_string(lambda0) +
                       " must be negative (below the essential spectrum)");
  }
  check_geometry(geom);
  ModeJets out;
  out.kappa = jet_kappa(lambda0, order);
  const Jet arg = jet_scale(out.kappa, geom.radius);
  out.q = (geom.dim == 2) ? bessel_pair_jet_scaled(mode.index, arg)
                          : sph_bessel_pair_jet_scaled(mode.index, arg);
  return out;
}

Jet interior_from(const ModeJets& mj) {
  // exponent of i and di cancels in the ratio
  return jet_div(mj.q.i, jet_mul(mj.kappa, mj.q.di));
}

Jet exterior_from(const ModeJets& mj) {
  return jet_scale(jet_div(mj.q.k, jet_mul(mj.kappa, mj.q.dk)), -1.0);
}

Jet tilde_from(const ModeJets& mj, const Geometry& geom) {
  if (geom.dim == 2) {
    // m_tilde = R I_n(kappa R) K_n(kappa R); restore the cancelled scale
    const double factor = std::ldexp(geom.radius, mj.q.exp2_i + mj.q.exp2_k);
    return jet_scale(jet_mul(mj.q.i, mj.q.k), factor);
  }
  const Jet mm = interior_from(mj);
  const Jet mp = exterior_from(mj);
  return jet_div(jet_mul(mp, mm), jet_add(mp, mm));
}

}  // namespace

Jet ntd_interior(const ModeSpec& mode, const Geometry& geom, double lambda0,
                 int order) {
  return interior_from(mode_jets(mode, geom, lambda0, order));
}

Jet ntd_exterior(const ModeSpec& mode, const Geometry& geom, double lambda0,
                 int order) {
  return exterior_from(mode_jets(mode, geom, lambda0, order));
}

Jet m_tilde(const ModeSpec& mode, const Geometry& geom, double lambda0,
            int order) {
  return tilde_from(mode_jets(mode, geom, lambda0, order), geom);
}

Jet m_hat(const ModeSpec& mode, const Geometry& geom, double lambda0,
          int order) {
  const ModeJets mj = mode_jets(mode, geom, lambda0, order);
  return jet_add(interior_from(mj), exterior_from(mj));
}

NtdModeValue ntd_mode(const ModeSpec& mode, const Geometry& geom,
                      double lambda0, int order) {
  const ModeJets mj = mode_jets(mode, geom, lambda0, order);
  NtdModeValue out;
  out.m_minus = interior_from(mj);
  out.m_plus = exterior_from(mj);
  out.m_tilde = tilde_from(mj, geom);
  out.m_hat = jet_add(out.m_minus, out.m_plus);
  return out;
}

double schatten_decay_probe(NtdKind which, int k, const Geometry& geom,
                            double lambda0, int n_lo, int n_hi) {
  if (k < 0 || k > kMaxJetOrder) {
    throw usage_error("schatten_decay_probe: derivative order out of range");
  }
  if (n_lo < 10 || n_hi <= n_lo) {
    throw usage_error(
        "schatten_decay_probe: mode range must satisfy n_hi > n_lo >= 10");
  }
  if (n_hi - n_lo + 1 < 5) {
    throw usage_error("schatten_decay_probe: fewer than 5 modes, fit would "
                      "be degenerate");
  }
  std::vector<double> lx, ly;
  lx.reserve(n_hi - n_lo + 1);
  ly.reserve(n_hi - n_lo + 1);
  // The abscissa is the global sorted singular-value rank, so the cumulative
  // multiplicity must count every mode below the window, not restart at zero.
  double rank = 0.0;
  for (int n = 0; n < n_lo; ++n) rank += make_mode(geom, n).weight;
  for (int n = n_lo; n <= n_hi; ++n) {
    const ModeSpec mode = make_mode(geom, n);
    const Jet jet = (which == NtdKind::m_tilde)
                        ? m_tilde(mode, geom, lambda0, k)
                        : m_hat(mode, geom, lambda0, k);
    const double value = std::fabs(jet.coeffs[k]);
    if (value == 0.0) {
      throw numeric_error("schatten_decay_probe: zero coefficient at mode " +
                          std::to_string(n));
    }
    // midpoint rank of this mode's multiplicity block; values decrease with
    // n, so ranks in sorted order follow the mode order
    lx.push_back(std::log(rank + (mode.weight + 1.0) / 2.0));
    ly.push_back(std::log(value));
    rank += mode.weight;
  }
  const double count = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t idx = 0; idx < lx.size(); ++idx) {
    sx += lx[idx];
    sy += ly[idx];
    sxx += lx[idx] * lx[idx];
    sxy += lx[idx] * ly[idx];
  }
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) {
    throw numeric_error("schatten_decay_probe: degenerate abscissa spread");
  }
  return (count * sxy - sx * sy) / denom;
}

}  // namespace shelltrace
