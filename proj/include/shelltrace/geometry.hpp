// Shared configuration: the interaction surface (circle or sphere), angular
// mode enumeration with multiplicities, coupling constants, and the evaluation
// plan with its trace-class validity thresholds.
#pragma once

#include <string>
#include <vector>

#include "shelltrace/errors.hpp"

namespace shelltrace {

struct Geometry {
  int dim = 2;          // 2: circle in the plane, 3: sphere in space
  double radius = 1.0;  // sanity window [1e-3, 1e3]
};

struct ModeSpec {
  int index = 0;   // n (d=2) or l (d=3)
  int weight = 1;  // 1 or 2 (d=2), 2l+1 (d=3)
};

enum class Model { delta, delta_prime };

struct Coupling {
  Model model = Model::delta;
  double strength = 0.0;  // alpha (delta) or omega (delta_prime), units 1/length
};

// which resolvent-power-difference trace is being evaluated
enum class FormulaId {
  delta_vs_free,          // delta interaction against the free operator
  deltaprime_vs_neumann,  // delta' against the decoupled Neumann operator
  deltaprime_vs_free,     // delta' against the free operator
  neumann_vs_free,        // decoupled Neumann against the free operator
};

std::string formula_name(FormulaId id);
FormulaId formula_from_name(const std::string& name);  // usage_error on unknown

struct EnginePlan {
  int m = 1;                // resolvent power
  double lambda0 = -1.0;    // evaluation point, < 0
  int mode_cap = 10000;     // hard ceiling on the adaptive mode sum
  double abs_tol = 1e-12;
  double rel_tol = 1e-6;
  bool keep_per_mode = false;  // retain the per-mode terms in the result
  int jet_order() const { return m; }
};

void check_geometry(const Geometry& geom);  // domain_error outside sanity window

// modes 0..cap inclusive, ascending, with multiplicities
std::vector<ModeSpec> enumerate_modes(const Geometry& geom, int cap);

ModeSpec make_mode(const Geometry& geom, int index);

// Enforces the m-vs-d trace-class thresholds: m > (d-2)/2 for delta_vs_free
// and deltaprime_vs_neumann, m > (d-1)/2 for deltaprime_vs_free and
// neumann_vs_free. Throws domain_error naming the violated inequality.
void validate_plan(const EnginePlan& plan, const Geometry& geom, FormulaId which);

}  // namespace shelltrace
