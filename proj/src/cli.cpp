#include "shelltrace/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shelltrace/bs_eigs.hpp"
#include "shelltrace/errors.hpp"
#include "shelltrace/geometry.hpp"
#include "shelltrace/ntd.hpp"
#include "shelltrace/oracle_fd.hpp"
#include "shelltrace/trace_engine.hpp"

namespace shelltrace {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// %.17g survives a parse round trip, as the output contract requires
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no literal for infinities; non-finite diagnostics become null
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

// Upper bound on worker threads, from the environment. Every kernel is
// currently serial and deterministic, so the value is validated and echoed
// in diagnostics but does not change results.
int thread_budget() {
  const char* env = std::getenv("SHELLTRACE_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || v < 1 || v > 1024) {
    throw usage_error(
        "SHELLTRACE_THREADS must be a positive integer (at most 1024)");
  }
  return static_cast<int>(v);
}

// "lo..hi" with integer endpoints, e.g. --modes 0..5
void parse_range(const std::string& text, int& lo, int& hi,
                 const char* flag) {
  const auto pos = text.find("..");
  bool ok = pos != std::string::npos;
  if (ok) {
    try {
      size_t used = 0;
      lo = std::stoi(text.substr(0, pos), &used);
      ok = used == pos;
      const std::string rest = text.substr(pos + 2);
      hi = std::stoi(rest, &used);
      ok = ok && used == rest.size() && !rest.empty();
    } catch (const std::exception&) {
      ok = false;
    }
  }
  if (!ok || lo > hi) {
    throw usage_error(std::string(flag) + " expects a range lo..hi with lo <= hi, got '" +
                      text + "'");
  }
}

struct CommonFlags {
  std::string formula;
  int dim = 2;
  double radius = 1.0;
  double alpha = 0.0;
  double omega = 0.0;
  bool has_alpha = false;
  bool has_omega = false;
  int m = 1;
  double lambda = -1.0;
  int mode_cap = 10000;
  double abs_tol = 1e-12;
  double rel_tol = 1e-6;
  std::string format = "human";
};

Coupling resolve_coupling(FormulaId which, const CommonFlags& f) {
  switch (which) {
    case FormulaId::delta_vs_free:
      if (f.has_omega) {
        throw usage_error("delta-vs-free takes --alpha, not --omega");
      }
      return {Model::delta, f.alpha};
    case FormulaId::deltaprime_vs_neumann:
    case FormulaId::deltaprime_vs_free:
      if (f.has_alpha) {
        throw usage_error(formula_name(which) +
                          " takes --omega, not --alpha");
      }
      return {Model::delta_prime, f.omega};
    case FormulaId::neumann_vs_free:
      if (f.has_alpha || f.has_omega) {
        throw usage_error("neumann-vs-free takes no coupling flag");
      }
      return {Model::delta, 0.0};
  }
  throw usage_error("unknown formula id");
}

EnginePlan make_plan(const CommonFlags& f) {
  EnginePlan plan;
  plan.m = f.m;
  plan.lambda0 = f.lambda;
  plan.mode_cap = f.mode_cap;
  plan.abs_tol = f.abs_tol;
  plan.rel_tol = f.rel_tol;
  return plan;
}

json request_json(const char* subcommand, const CommonFlags& f,
                  const Coupling& cpl) {
  json req;
  req["subcommand"] = subcommand;
  req["formula"] = f.formula;
  req["dim"] = f.dim;
  req["radius"] = f.radius;
  req["coupling"] = {
      {"model", cpl.model == Model::delta ? "delta" : "delta-prime"},
      {"strength", cpl.strength}};
  req["m"] = f.m;
  req["lambda"] = f.lambda;
  return req;
}

// ---- trace ----------------------------------------------------------------

int do_trace(const CommonFlags& f, std::ostream& out) {
  const FormulaId which = formula_from_name(f.formula);
  const Geometry geom{f.dim, f.radius};
  const Coupling cpl = resolve_coupling(which, f);
  const EnginePlan plan = make_plan(f);

  const auto t0 = Clock::now();
  const TraceResult res = trace_formula(which, geom, cpl, plan);
  const double ms = elapsed_ms(t0);

  if (f.format == "json") {
    json j;
    j["request"] = request_json("trace", f, cpl);
    j["result"] = {{"value", res.value}, {"converged", res.converged}};
    j["diagnostics"] = {{"modes_used", res.modes_used},
                        {"tail_bound", finite_or_null(res.tail_bound)},
                        {"wall_time_ms", ms},
                        {"threads", thread_budget()}};
    out << j.dump(2) << "\n";
  } else if (f.format == "csv") {
    out << "value,modes_used,tail_bound,converged\n"
        << fmt(res.value) << "," << res.modes_used << ","
        << fmt(res.tail_bound) << "," << (res.converged ? "true" : "false")
        << "\n";
  } else {
    out << "formula    = " << f.formula << "\n"
        << "value      = " << fmt(res.value) << "\n"
        << "modes used = " << res.modes_used << "\n"
        << "tail bound = " << fmt(res.tail_bound) << "\n"
        << "converged  = " << (res.converged ? "yes" : "no") << "\n";
  }
  return res.converged ? 0 : 3;
}

// ---- verify ---------------------------------------------------------------

struct VerifyFlags {
  CommonFlags common;
  double tol = -1.0;  // <0: pick per mode of operation below
  int grid_points = 8000;
  double r_max = 0.0;
  int oracle_mode_cap = 60;
  std::string identity;  // empty or "split"
  bool has_mode_cap = false;
};

int do_verify_crosscheck(const VerifyFlags& vf, std::ostream& out) {
  const CommonFlags& f = vf.common;
  const double tol = vf.tol >= 0.0 ? vf.tol : 5e-3;
  const FormulaId which = formula_from_name(f.formula);
  const Geometry geom{f.dim, f.radius};
  const Coupling cpl = resolve_coupling(which, f);
  const EnginePlan plan = make_plan(f);

  OracleConfig cfg;
  cfg.grid_points = vf.grid_points;
  cfg.r_max = vf.r_max;
  cfg.mode_cap = vf.oracle_mode_cap;

  const auto t0 = Clock::now();
  const TraceResult engine = trace_formula(which, geom, cpl, plan);
  const OracleTrace oracle =
      oracle_trace(which, geom, cpl, f.m, f.lambda, cfg);
  const double ms = elapsed_ms(t0);

  const double gap = std::fabs(engine.value - oracle.value);
  const double scale = std::max(std::fabs(engine.value),
                                std::fabs(oracle.value));
  const double rel = scale > 0.0 ? gap / scale : 0.0;
  const bool pass = gap <= tol * scale + 1e-14;

  if (f.format == "json") {
    json j;
    j["request"] = request_json("verify", f, cpl);
    j["request"]["tol"] = tol;
    j["result"] = {{"engine_value", engine.value},
                   {"oracle_value", oracle.value},
                   {"abs_gap", gap},
                   {"rel_gap", rel},
                   {"pass", pass}};
    j["diagnostics"] = {
        {"modes_used", engine.modes_used},
        {"tail_bound", finite_or_null(engine.tail_bound)},
        {"oracle_modes_used", oracle.modes_used},
        {"oracle_error_estimate", oracle.error_estimate},
        {"wall_time_ms", ms},
        {"threads", thread_budget()}};
    out << j.dump(2) << "\n";
  } else if (f.format == "csv") {
    out << "engine_value,oracle_value,abs_gap,rel_gap,pass\n"
        << fmt(engine.value) << "," << fmt(oracle.value) << "," << fmt(gap)
        << "," << fmt(rel) << "," << (pass ? "true" : "false") << "\n";
  } else {
    out << "engine value    = " << fmt(engine.value) << "  (modes "
        << engine.modes_used << ")\n"
        << "oracle value    = " << fmt(oracle.value) << "  (modes "
        << oracle.modes_used << ", est. err " << fmt(oracle.error_estimate)
        << ")\n"
        << "absolute gap    = " << fmt(gap) << "\n"
        << "relative gap    = " << fmt(rel) << "\n"
        << "tolerance       = " << fmt(tol) << "\n"
        << "verdict         = " << (pass ? "pass" : "FAIL") << "\n";
  }
  if (!engine.converged) return 3;
  return pass ? 0 : 4;
}

// deltaprime_vs_free = deltaprime_vs_neumann + neumann_vs_free, checked both
// per mode and summed over a common fixed mode window (two independently
// truncated adaptive sums could differ by more than the identity tolerance
// just by stopping at different modes).
int do_verify_identity(const VerifyFlags& vf, std::ostream& out) {
  const CommonFlags& f = vf.common;
  const double tol = vf.tol >= 0.0 ? vf.tol : 1e-10;
  if (f.has_alpha) {
    throw usage_error("--identity split checks the delta-prime formulas; "
                      "use --omega, not --alpha");
  }
  const Geometry geom{f.dim, f.radius};
  const Coupling cpl{Model::delta_prime, f.omega};
  // the strict m > (d-1)/2 threshold applies to both split pieces
  validate_plan(make_plan(f), geom, FormulaId::deltaprime_vs_free);

  const int window =
      vf.has_mode_cap ? f.mode_cap : (f.dim == 2 ? 200 : 120);

  const auto t0 = Clock::now();
  double lhs = 0.0, rhs = 0.0, max_rel = 0.0;
  for (int n = 0; n <= window; ++n) {
    const ModeSpec mode = make_mode(geom, n);
    const double tf = per_mode_term(FormulaId::deltaprime_vs_free, mode, geom,
                                    cpl, f.m, f.lambda);
    const double tn = per_mode_term(FormulaId::deltaprime_vs_neumann, mode,
                                    geom, cpl, f.m, f.lambda);
    const double tv = per_mode_term(FormulaId::neumann_vs_free, mode, geom,
                                    cpl, f.m, f.lambda);
    lhs += mode.weight * tf;
    rhs += mode.weight * (tn + tv);
    const double denom = std::max({std::fabs(tf), std::fabs(tn + tv), 1e-300});
    max_rel = std::max(max_rel, std::fabs(tf - (tn + tv)) / denom);
  }
  const double ms = elapsed_ms(t0);
  const double sum_rel =
      std::fabs(lhs - rhs) / std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
  const bool pass = max_rel <= tol && sum_rel <= tol;

  if (f.format == "json") {
    json j;
    j["request"] = request_json("verify", f, cpl);
    j["request"]["identity"] = "split";
    j["request"]["tol"] = tol;
    j["request"]["mode_window"] = window;
    j["result"] = {{"free_comparison", lhs},
                   {"interface_plus_neumann", rhs},
                   {"summed_rel_gap", sum_rel},
                   {"per_mode_max_rel_gap", max_rel},
                   {"pass", pass}};
    j["diagnostics"] = {{"wall_time_ms", ms}, {"threads", thread_budget()}};
    out << j.dump(2) << "\n";
  } else if (f.format == "csv") {
    out << "free_comparison,interface_plus_neumann,summed_rel_gap,"
           "per_mode_max_rel_gap,pass\n"
        << fmt(lhs) << "," << fmt(rhs) << "," << fmt(sum_rel) << ","
        << fmt(max_rel) << "," << (pass ? "true" : "false") << "\n";
  } else {
    out << "free comparison         = " << fmt(lhs) << "\n"
        << "interface + neumann     = " << fmt(rhs) << "\n"
        << "summed rel gap          = " << fmt(sum_rel) << "\n"
        << "per-mode max rel gap    = " << fmt(max_rel) << "\n"
        << "mode window             = 0.." << window << "\n"
        << "verdict                 = " << (pass ? "pass" : "FAIL") << "\n";
  }
  return pass ? 0 : 4;
}

// ---- eigs -----------------------------------------------------------------

struct EigsFlags {
  std::string model = "delta";
  double alpha = 0.0;
  double omega = 0.0;
  bool has_alpha = false;
  bool has_omega = false;
  int dim = 2;
  double radius = 1.0;
  std::string modes = "0..5";
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool has_bracket_lo = false;
  bool has_bracket_hi = false;
  bool cross_check = false;
  int grid_points = 8000;
  double r_max = 0.0;
  std::string format = "human";
};

int do_eigs(const EigsFlags& f, std::ostream& out) {
  const Model model =
      f.model == "delta" ? Model::delta : Model::delta_prime;
  double strength = 0.0;
  if (model == Model::delta) {
    if (f.has_omega) throw usage_error("--model delta takes --alpha");
    strength = f.alpha;
  } else {
    if (f.has_alpha) throw usage_error("--model delta-prime takes --omega");
    strength = f.omega;
  }
  const Geometry geom{f.dim, f.radius};
  int mode_lo = 0, mode_hi = 0;
  parse_range(f.modes, mode_lo, mode_hi, "--modes");
  if (mode_lo < 0) throw usage_error("--modes indices must be >= 0");

  auto bracket = default_bs_bracket(geom, strength);
  if (f.has_bracket_lo) bracket.first = f.bracket_lo;
  if (f.has_bracket_hi) bracket.second = f.bracket_hi;

  OracleConfig cfg;
  cfg.grid_points = f.grid_points;
  cfg.r_max = f.r_max;

  struct Row {
    EigResult eig;
    double oracle_lambda = 0.0;
    bool has_oracle = false;
  };

  const auto t0 = Clock::now();
  std::vector<Row> rows;
  std::map<int, std::pair<int, int>> counts;  // mode -> (roots, oracle negs)
  for (int n = mode_lo; n <= mode_hi; ++n) {
    const ModeSpec mode = make_mode(geom, n);
    const auto roots = bs_root_find(model, mode, geom, strength,
                                    bracket.first, bracket.second);
    std::vector<double> oracle_evs;
    if (f.cross_check) {
      const OracleModel omodel = model == Model::delta
                                     ? OracleModel::delta
                                     : OracleModel::delta_prime;
      oracle_evs = oracle_eigenvalues(omodel, mode, geom,
                                      Coupling{model, strength}, cfg);
      counts[n] = {static_cast<int>(roots.size()),
                   static_cast<int>(oracle_evs.size())};
    }
    for (const EigResult& r : roots) {
      Row row;
      row.eig = r;
      if (!oracle_evs.empty()) {
        double best = oracle_evs.front();
        for (const double ev : oracle_evs) {
          if (std::fabs(ev - r.lambda) < std::fabs(best - r.lambda)) best = ev;
        }
        row.oracle_lambda = best;
        row.has_oracle = true;
      }
      rows.push_back(row);
    }
  }
  const double ms = elapsed_ms(t0);

  if (f.format == "json") {
    json j;
    j["request"] = {{"subcommand", "eigs"},
                    {"model", f.model},
                    {"strength", strength},
                    {"dim", f.dim},
                    {"radius", f.radius},
                    {"modes", f.modes},
                    {"bracket", {bracket.first, bracket.second}},
                    {"cross_check", f.cross_check}};
    json arr = json::array();
    for (const Row& row : rows) {
      json r = {{"mode", row.eig.mode.index},
                {"multiplicity", row.eig.multiplicity},
                {"lambda", row.eig.lambda},
                {"residual", row.eig.residual}};
      if (f.cross_check) {
        r["oracle_lambda"] =
            row.has_oracle ? json(row.oracle_lambda) : json();
        r["oracle_gap"] = row.has_oracle
                              ? json(std::fabs(row.oracle_lambda -
                                               row.eig.lambda))
                              : json();
      }
      arr.push_back(r);
    }
    j["result"] = arr;
    if (f.cross_check) {
      json cj = json::array();
      for (const auto& [n, c] : counts) {
        cj.push_back({{"mode", n},
                      {"bs_roots", c.first},
                      {"oracle_negative_eigenvalues", c.second}});
      }
      j["counts"] = cj;
    }
    j["diagnostics"] = {{"wall_time_ms", ms}, {"threads", thread_budget()}};
    out << j.dump(2) << "\n";
  } else if (f.format == "csv") {
    out << "mode,multiplicity,lambda,residual";
    if (f.cross_check) out << ",oracle_lambda,oracle_gap";
    out << "\n";
    for (const Row& row : rows) {
      out << row.eig.mode.index << "," << row.eig.multiplicity << ","
          << fmt(row.eig.lambda) << "," << fmt(row.eig.residual);
      if (f.cross_check) {
        if (row.has_oracle) {
          out << "," << fmt(row.oracle_lambda) << ","
              << fmt(std::fabs(row.oracle_lambda - row.eig.lambda));
        } else {
          out << ",,";
        }
      }
      out << "\n";
    }
  } else {
    if (rows.empty()) {
      out << "no discrete eigenvalues in [" << fmt(bracket.first) << ", "
          << fmt(bracket.second) << "]\n";
    }
    for (const Row& row : rows) {
      out << "mode " << row.eig.mode.index << " (x" << row.eig.multiplicity
          << "): lambda = " << fmt(row.eig.lambda)
          << "  residual = " << fmt(row.eig.residual);
      if (row.has_oracle) {
        out << "  oracle = " << fmt(row.oracle_lambda) << "  gap = "
            << fmt(std::fabs(row.oracle_lambda - row.eig.lambda));
      }
      out << "\n";
    }
    if (f.cross_check) {
      for (const auto& [n, c] : counts) {
        if (c.first != c.second) {
          out << "mode " << n << ": COUNT MISMATCH bs roots " << c.first
              << " vs oracle negative eigenvalues " << c.second << "\n";
        }
      }
    }
  }
  return 0;
}

// ---- decay ----------------------------------------------------------------

struct DecayFlags {
  std::string which = "m-tilde";
  int k = 0;
  int dim = 2;
  double radius = 1.0;
  double lambda = -1.0;
  std::string range = "100..1000";
  std::string format = "human";
};

int do_decay(const DecayFlags& f, std::ostream& out) {
  const NtdKind kind =
      f.which == "m-tilde" ? NtdKind::m_tilde : NtdKind::m_hat;
  const Geometry geom{f.dim, f.radius};
  int n_lo = 0, n_hi = 0;
  parse_range(f.range, n_lo, n_hi, "--n");

  const auto t0 = Clock::now();
  const double exponent =
      schatten_decay_probe(kind, f.k, geom, f.lambda, n_lo, n_hi);
  const double ms = elapsed_ms(t0);

  if (f.format == "json") {
    json j;
    j["request"] = {{"subcommand", "decay"}, {"which", f.which},
                    {"k", f.k},             {"dim", f.dim},
                    {"radius", f.radius},   {"lambda", f.lambda},
                    {"n", f.range}};
    j["result"] = {{"exponent", exponent}};
    j["diagnostics"] = {{"wall_time_ms", ms}, {"threads", thread_budget()}};
    out << j.dump(2) << "\n";
  } else if (f.format == "csv") {
    out << "exponent\n" << fmt(exponent) << "\n";
  } else {
    out << "fitted rank-decay exponent of " << f.which << " jet coefficient "
        << f.k << " over modes " << f.range << ": " << fmt(exponent) << "\n";
  }
  return 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepFlags {
  CommonFlags common;
  double lambda_from = 0.0;
  double lambda_to = 0.0;
  int points = 0;
  // sweeps default to csv since they are consumed by plotting scripts
};

int do_sweep(const SweepFlags& sf, std::ostream& out) {
  const CommonFlags& f = sf.common;
  const FormulaId which = formula_from_name(f.formula);
  const Geometry geom{f.dim, f.radius};
  const Coupling cpl = resolve_coupling(which, f);
  const EnginePlan plan = make_plan(f);
  if (sf.points < 0) throw usage_error("--points must be >= 0");

  std::vector<double> grid;
  grid.reserve(static_cast<size_t>(sf.points));
  for (int i = 0; i < sf.points; ++i) {
    const double frac =
        sf.points == 1 ? 0.0
                       : static_cast<double>(i) / (sf.points - 1);
    grid.push_back(sf.lambda_from + frac * (sf.lambda_to - sf.lambda_from));
  }

  const auto t0 = Clock::now();
  const std::vector<SweepPoint> pts = sweep(which, geom, cpl, plan, grid);
  const double ms = elapsed_ms(t0);

  bool all_ok = true;
  for (const SweepPoint& pt : pts) {
    if (!pt.error.empty() || !pt.result.converged) all_ok = false;
  }

  if (pts.empty()) return 0;  // empty range, empty output

  if (f.format == "json") {
    json j;
    j["request"] = request_json("sweep", f, cpl);
    j["request"]["lambda_from"] = sf.lambda_from;
    j["request"]["lambda_to"] = sf.lambda_to;
    j["request"]["points"] = sf.points;
    json arr = json::array();
    for (const SweepPoint& pt : pts) {
      arr.push_back({{"lambda", pt.lambda0},
                     {"value", pt.result.value},
                     {"modes_used", pt.result.modes_used},
                     {"tail_bound", finite_or_null(pt.result.tail_bound)},
                     {"converged", pt.result.converged},
                     {"error", pt.error}});
    }
    j["result"] = arr;
    j["diagnostics"] = {{"wall_time_ms", ms}, {"threads", thread_budget()}};
    out << j.dump(2) << "\n";
  } else {
    // csv and human share the tabular layout; human pads with spaces
    const char* sep = f.format == "csv" ? "," : "  ";
    out << "lambda" << sep << "value" << sep << "modes_used" << sep
        << "tail_bound" << sep << "converged" << sep << "error\n";
    for (const SweepPoint& pt : pts) {
      out << fmt(pt.lambda0) << sep << fmt(pt.result.value) << sep
          << pt.result.modes_used << sep << fmt(pt.result.tail_bound) << sep
          << (pt.result.converged ? "true" : "false") << sep << pt.error
          << "\n";
    }
  }
  return all_ok ? 0 : 3;
}

void add_common_options(CLI::App* cmd, CommonFlags& f, CLI::Option*& alpha_opt,
                        CLI::Option*& omega_opt) {
  cmd->add_option("--formula", f.formula,
                  "delta-vs-free | deltaprime-vs-neumann | "
                  "deltaprime-vs-free | neumann-vs-free")
      ->required();
  cmd->add_option("--dim", f.dim, "surface dimension: 2 (circle) or 3 (sphere)");
  cmd->add_option("--radius", f.radius, "interface radius R");
  alpha_opt = cmd->add_option("--alpha", f.alpha,
                              "delta coupling strength");
  omega_opt = cmd->add_option("--omega", f.omega,
                              "delta-prime coupling strength");
  cmd->add_option("--m", f.m, "resolvent power");
  cmd->add_option("--lambda", f.lambda, "spectral point (negative)");
  cmd->add_option("--mode-cap", f.mode_cap, "mode sum hard ceiling");
  cmd->add_option("--abs-tol", f.abs_tol, "absolute stop tolerance");
  cmd->add_option("--rel-tol", f.rel_tol, "relative stop tolerance");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "shelltrace: trace formulas for delta and delta-prime interactions "
      "supported on a circle or sphere, with an independent finite-volume "
      "cross-check"};
  app.require_subcommand(1);

  const std::vector<std::string> formats{"human", "json", "csv"};

  // trace
  CommonFlags tf;
  CLI::Option *tf_alpha, *tf_omega;
  CLI::App* trace_cmd =
      app.add_subcommand("trace", "evaluate one trace formula");
  add_common_options(trace_cmd, tf, tf_alpha, tf_omega);
  trace_cmd->add_option("--format", tf.format, "human | json | csv")
      ->check(CLI::IsMember(formats));

  // verify
  VerifyFlags vf;
  CLI::Option *vf_alpha, *vf_omega;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "engine vs finite-volume oracle, or the split identity");
  add_common_options(verify_cmd, vf.common, vf_alpha, vf_omega);
  verify_cmd->add_option("--format", vf.common.format, "human | json | csv")
      ->check(CLI::IsMember(formats));
  CLI::Option* vf_tol = verify_cmd->add_option(
      "--tol", vf.tol,
      "pass tolerance (default 5e-3 cross-check, 1e-10 identity)");
  verify_cmd->add_option("--grid-points", vf.grid_points,
                         "oracle radial grid points");
  verify_cmd->add_option("--r-max", vf.r_max,
                         "oracle truncation radius (0: 40*R)");
  verify_cmd->add_option("--oracle-mode-cap", vf.oracle_mode_cap,
                         "oracle mode ceiling");
  verify_cmd
      ->add_option("--identity", vf.identity,
                   "'split': check free comparison = interface part + "
                   "Neumann part instead of the oracle")
      ->check(CLI::IsMember(std::vector<std::string>{"split"}));

  // eigs
  EigsFlags ef;
  CLI::App* eigs_cmd =
      app.add_subcommand("eigs", "Birman-Schwinger eigenvalue search");
  eigs_cmd->add_option("--model", ef.model, "delta | delta-prime")
      ->check(CLI::IsMember(std::vector<std::string>{"delta", "delta-prime"}));
  CLI::Option* ef_alpha =
      eigs_cmd->add_option("--alpha", ef.alpha, "delta coupling strength");
  CLI::Option* ef_omega = eigs_cmd->add_option("--omega", ef.omega,
                                               "delta-prime coupling strength");
  eigs_cmd->add_option("--dim", ef.dim, "2 or 3");
  eigs_cmd->add_option("--radius", ef.radius, "interface radius R");
  eigs_cmd->add_option("--modes", ef.modes, "mode range lo..hi");
  CLI::Option* ef_blo =
      eigs_cmd->add_option("--bracket-lo", ef.bracket_lo, "bracket lower end");
  CLI::Option* ef_bhi =
      eigs_cmd->add_option("--bracket-hi", ef.bracket_hi, "bracket upper end");
  eigs_cmd->add_flag("--cross-check", ef.cross_check,
                     "compare against oracle eigenvalues");
  eigs_cmd->add_option("--grid-points", ef.grid_points,
                       "oracle radial grid points (cross-check)");
  eigs_cmd->add_option("--r-max", ef.r_max,
                       "oracle truncation radius (cross-check)");
  eigs_cmd->add_option("--format", ef.format, "human | json | csv")
      ->check(CLI::IsMember(formats));

  // decay
  DecayFlags df;
  CLI::App* decay_cmd = app.add_subcommand(
      "decay", "fitted power-law decay of a boundary-map jet coefficient");
  decay_cmd->add_option("--which", df.which, "m-tilde | m-hat")
      ->check(CLI::IsMember(std::vector<std::string>{"m-tilde", "m-hat"}));
  decay_cmd->add_option("--k", df.k, "jet coefficient index (0..2)");
  decay_cmd->add_option("--dim", df.dim, "2 or 3");
  decay_cmd->add_option("--radius", df.radius, "interface radius R");
  decay_cmd->add_option("--lambda", df.lambda, "spectral point (negative)");
  decay_cmd->add_option("--n", df.range, "mode range lo..hi");
  decay_cmd->add_option("--format", df.format, "human | json | csv")
      ->check(CLI::IsMember(formats));

  // sweep
  SweepFlags sf;
  sf.common.format = "csv";
  CLI::Option *sf_alpha, *sf_omega;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "trace values over a lambda grid");
  add_common_options(sweep_cmd, sf.common, sf_alpha, sf_omega);
  sweep_cmd->add_option("--format", sf.common.format, "human | json | csv")
      ->check(CLI::IsMember(formats));
  sweep_cmd->add_option("--lambda-from", sf.lambda_from, "grid start")
      ->required();
  sweep_cmd->add_option("--lambda-to", sf.lambda_to, "grid end")->required();
  sweep_cmd->add_option("--points", sf.points, "number of grid points")
      ->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("shelltrace");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    thread_budget();  // reject malformed SHELLTRACE_THREADS up front
    if (app.got_subcommand(trace_cmd)) {
      tf.has_alpha = tf_alpha->count() > 0;
      tf.has_omega = tf_omega->count() > 0;
      return do_trace(tf, out);
    }
    if (app.got_subcommand(verify_cmd)) {
      vf.common.has_alpha = vf_alpha->count() > 0;
      vf.common.has_omega = vf_omega->count() > 0;
      vf.has_mode_cap = verify_cmd->count("--mode-cap") > 0;
      if (vf_tol->count() == 0) vf.tol = -1.0;
      return vf.identity == "split" ? do_verify_identity(vf, out)
                                    : do_verify_crosscheck(vf, out);
    }
    if (app.got_subcommand(eigs_cmd)) {
      ef.has_alpha = ef_alpha->count() > 0;
      ef.has_omega = ef_omega->count() > 0;
      ef.has_bracket_lo = ef_blo->count() > 0;
      ef.has_bracket_hi = ef_bhi->count() > 0;
      return do_eigs(ef, out);
    }
    if (app.got_subcommand(decay_cmd)) return do_decay(df, out);
    if (app.got_subcommand(sweep_cmd)) {
      sf.common.has_alpha = sf_alpha->count() > 0;
      sf.common.has_omega = sf_omega->count() > 0;
      return do_sweep(sf, out);
    }
    err << "no subcommand given\n";
    return 2;
  } catch (const usage_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const singularity_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace shelltrace
