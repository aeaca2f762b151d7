#include "shelltrace/bs_eigs.hpp"

#include <cmath>
#include <string>

#include "shelltrace/errors.hpp"
#include "shelltrace/ntd.hpp"

namespace shelltrace {

namespace {

double bs_function(Model model, const ModeSpec& mode, const Geometry& geom,
                   double strength, double lambda) {
  const Jet map = (model == Model::delta) ? m_tilde(mode, geom, lambda, 0)
                                          : m_hat(mode, geom, lambda, 0);
  return 1.0 - strength * map.coeffs[0];
}

}  // namespace

std::pair<double, double> default_bs_bracket(const Geometry& geom,
                                             double strength) {
  check_geometry(geom);
  const double scale = std::max(10.0, strength * strength);
  return {-scale / (geom.radius * geom.radius), -1e-8};
}

std::vector<EigResult> bs_root_find(Model model, const ModeSpec& mode,
                                    const Geometry& geom, double strength,
                                    double bracket_lo, double bracket_hi) {
  check_geometry(geom);
  if (strength == 0.0) {
    throw usage_error("bs_root_find: zero coupling strength has no "
                      "Birman-Schwinger condition");
  }
  if (!(bracket_lo < bracket_hi) || !(bracket_hi < 0.0)) {
    throw usage_error("bs_root_find: bracket must satisfy lo < hi < 0");
  }

  // geometric scan in |lambda|; the map is increasing in lambda, so g is
  // strictly monotone and at most one sign change can appear
  constexpr int kScanPoints = 48;
  const double la = std::log(-bracket_lo);
  const double lb = std::log(-bracket_hi);
  std::vector<double> grid(kScanPoints), gval(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    const double f = static_cast<double>(i) / (kScanPoints - 1);
    grid[i] = -std::exp(la + (lb - la) * f);
    gval[i] = bs_function(model, mode, geom, strength, grid[i]);
  }
  if (gval.front() == 0.0 || gval.back() == 0.0) {
    throw usage_error("bs_root_find: bracket endpoint is itself a root");
  }

  // monotonicity post-check (direction set by the coupling sign)
  const double dir = (strength > 0.0) ? -1.0 : 1.0;
  int sign_changes = 0;
  for (int i = 1; i < kScanPoints; ++i) {
    const double step = gval[i] - gval[i - 1];
    if (step * dir < -1e-10 * (std::fabs(gval[i]) + std::fabs(gval[i - 1]))) {
      throw numeric_error(
          "bs_root_find: non-monotone Birman-Schwinger profile at mode " +
          std::to_string(mode.index) + " (map evaluation is inconsistent)");
    }
    if (gval[i - 1] * gval[i] < 0.0) ++sign_changes;
  }
  if (sign_changes == 0) return {};
  if (sign_changes > 1) {
    throw numeric_error("bs_root_find: multiple sign changes at mode " +
                        std::to_string(mode.index));
  }

  double a = 0.0, b = 0.0, ga = 0.0, gb = 0.0;
  for (int i = 1; i < kScanPoints; ++i) {
    if (gval[i - 1] * gval[i] < 0.0) {
      a = grid[i - 1];
      b = grid[i];
      ga = gval[i - 1];
      gb = gval[i];
      break;
    }
  }

  // bisection to machine width, which drives |g| far below the 1e-12 target
  // because dg/dlambda is order one near the root
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double gm = bs_function(model, mode, geom, strength, mid);
    if (gm == 0.0) {
      a = b = mid;
      ga = gb = gm;
      break;
    }
    if (ga * gm < 0.0) {
      b = mid;
      gb = gm;
    } else {
      a = mid;
      ga = gm;
    }
  }
  const double root = (std::fabs(ga) <= std::fabs(gb)) ? a : b;
  const double residual =
      std::fabs(bs_function(model, mode, geom, strength, root));
  if (residual > 1e-12) {
    throw numeric_error("bs_root_find: residual " + std::to_string(residual) +
                        " above tolerance at mode " +
                        std::to_string(mode.index));
  }

  EigResult res;
  res.mode = mode;
  res.lambda = root;
  res.multiplicity = mode.weight;
  res.residual = residual;
  return {res};
}

}  // namespace shelltrace
