#include "shelltrace/geometry.hpp"

#include <cstdio>
#include <string>

namespace shelltrace {

std::string formula_name(FormulaId id) {
  switch (id) {
    case FormulaId::delta_vs_free: return "delta-vs-free";
    case FormulaId::deltaprime_vs_neumann: return "deltaprime-vs-neumann";
    case FormulaId::deltaprime_vs_free: return "deltaprime-vs-free";
    case FormulaId::neumann_vs_free: return "neumann-vs-free";
  }
  throw usage_error("unreachable formula id");
}

FormulaId formula_from_name(const std::string& name) {
  if (name == "delta-vs-free") return FormulaId::delta_vs_free;
  if (name == "deltaprime-vs-neumann") return FormulaId::deltaprime_vs_neumann;
  if (name == "deltaprime-vs-free") return FormulaId::deltaprime_vs_free;
  if (name == "neumann-vs-free") return FormulaId::neumann_vs_free;
  throw usage_error("unknown formula '" + name +
                    "' (expected delta-vs-free, deltaprime-vs-neumann, "
                    "deltaprime-vs-free or neumann-vs-free)");
}

void check_geometry(const Geometry& geom) {
  if (geom.dim != 2 && geom.dim != 3) {
    throw domain_error("dimension must be 2 or 3");
  }
  if (!(geom.radius >= 1e-3 && geom.radius <= 1e3)) {
    throw domain_error("radius outside the sanity window [1e-3, 1e3]");
  }
}

ModeSpec make_mode(const Geometry& geom, int index) {
  if (index < 0) throw usage_error("mode index must be >= 0");
  ModeSpec m;
  m.index = index;
  if (geom.dim == 2) {
    m.weight = (index == 0) ? 1 : 2;
  } else {
    m.weight = 2 * index + 1;
  }
  return m;
}

std::vector<ModeSpec> enumerate_modes(const Geometry& geom, int cap) {
  check_geometry(geom);
  if (cap < 0) throw usage_error("mode cap must be >= 0");
  std::vector<ModeSpec> out;
  out.reserve(static_cast<size_t>(cap) + 1);
  for (int n = 0; n <= cap; ++n) out.push_back(make_mode(geom, n));
  return out;
}

void validate_plan(const EnginePlan& plan, const Geometry& geom, FormulaId which) {
  check_geometry(geom);
  if (plan.m < 1) throw domain_error("resolvent power m must be >= 1");
  if (!(plan.lambda0 < 0.0)) {
    throw domain_error("evaluation point lambda must be < 0");
  }
  if (plan.mode_cap < 0 || plan.mode_cap > 10000) {
    throw domain_error("mode_cap must lie in [0, 10000]");
  }
  const double d = geom.dim;
  const double m = plan.m;
  const bool needs_strict = (which == FormulaId::deltaprime_vs_free ||
                             which == FormulaId::neumann_vs_free);
  const auto half = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  if (needs_strict) {
    if (!(m > (d - 1.0) / 2.0)) {
      throw domain_error(formula_name(which) + " requires m > (d-1)/2 = " +
                         half((d - 1.0) / 2.0) + "; got m = " +
                         std::to_string(plan.m));
    }
  } else {
    if (!(m > (d - 2.0) / 2.0)) {
      throw domain_error(formula_name(which) + " requires m > (d-2)/2 = " +
                         half((d - 2.0) / 2.0) + "; got m = " +
                         std::to_string(plan.m));
    }
  }
}

}  // namespace shelltrace
