#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// End-to-end checks against the installed binary. The path comes in through
// SHELLTRACE_BIN so the suite works from any build directory.

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args, const std::string& env_prefix = "") {
  const char* bin = std::getenv("SHELLTRACE_BIN");
  REQUIRE(bin != nullptr);
  const std::string out_path =
      "/tmp/shelltrace_cli_" + std::to_string(getpid()) + ".out";
  const std::string err_path =
      "/tmp/shelltrace_cli_" + std::to_string(getpid()) + ".err";
  const std::string cmd = env_prefix + "'" + std::string(bin) + "' " + args +
                          " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("trace emits the frozen anchor values") {
  const RunResult a = run(
      "trace --formula delta-vs-free --dim 2 --alpha 0.8 --m 1 --lambda -1 "
      "--format csv");
  CHECK(a.exit_code == 0);
  CHECK(a.out ==
        "value,modes_used,tail_bound,converged\n"
        "0.61356930979809265,573,6.1148814836538099e-07,true\n");

  const RunResult b = run(
      "trace --formula delta-vs-free --dim 2 --alpha 0.8 --m 1 --lambda -2 "
      "--format csv");
  CHECK(b.exit_code == 0);
  CHECK(contains(b.out, "0.26148869712146239,876,2.6128364762635028e-07,true"));
}

TEST_CASE("repeated invocations are bit-identical") {
  // lambda below the omega = 0.5 ground state near -2.135; csv carries no
  // wall-clock field, so the bytes must repeat exactly
  const std::string args =
      "trace --formula deltaprime-vs-neumann --dim 3 --omega 0.5 --m 2 "
      "--lambda -3 --format csv";
  const RunResult a = run(args);
  const RunResult b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());
}

TEST_CASE("json output carries the request echo and diagnostics") {
  const RunResult r = run(
      "trace --formula delta-vs-free --dim 2 --alpha 0.8 --m 1 --lambda -2 "
      "--format json");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc["request"]["subcommand"] == "trace");
  CHECK(doc["request"]["formula"] == "delta-vs-free");
  CHECK(doc["request"]["dim"] == 2);
  CHECK(doc["request"]["radius"] == 1.0);
  CHECK(doc["request"]["m"] == 1);
  CHECK(doc["request"]["lambda"] == -2.0);
  CHECK(doc["request"]["coupling"]["model"] == "delta");
  CHECK(doc["request"]["coupling"]["strength"] == 0.8);
  CHECK(doc["result"]["converged"] == true);
  CHECK(doc["result"]["value"].get<double>() ==
        doctest::Approx(0.26148869712146239).epsilon(1e-15));
  CHECK(doc["diagnostics"]["modes_used"] == 876);
  CHECK(doc["diagnostics"]["threads"].get<int>() >= 1);
  CHECK(doc["diagnostics"]["wall_time_ms"].get<double>() >= 0.0);
  CHECK(doc["diagnostics"]["tail_bound"].get<double>() > 0.0);
}

TEST_CASE("zero coupling gives an exactly zero trace") {
  const RunResult r = run(
      "trace --formula delta-vs-free --dim 2 --alpha 0 --m 1 --lambda -1 "
      "--format csv");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "\n0,"));
  CHECK(contains(r.out, ",true"));
}

TEST_CASE("exit codes separate usage, spectrum and convergence failures") {
  SUBCASE("trace-class threshold refusal") {
    const RunResult r = run(
        "trace --formula deltaprime-vs-free --dim 3 --omega 0.5 --m 1 "
        "--lambda -1");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "m > (d-1)/2"));
    CHECK(r.out.empty());
  }
  SUBCASE("lambda above the ground state") {
    const RunResult r = run(
        "trace --formula delta-vs-free --dim 2 --alpha 2 --m 1 --lambda -1");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "error: "));
    CHECK(contains(r.err, "eigenvalue search"));
  }
  SUBCASE("cap exhaustion reports but does not fail hard") {
    const RunResult r = run(
        "trace --formula delta-vs-free --dim 2 --alpha 0.8 --m 1 --lambda -1 "
        "--mode-cap 30");
    CHECK(r.exit_code == 3);
    CHECK(contains(r.out, "converged  = no"));
  }
  SUBCASE("unknown flag") {
    const RunResult r = run("trace --formula delta-vs-free --frobnicate");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("missing required formula") {
    const RunResult r = run("trace --dim 2 --alpha 0.8");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("malformed thread override") {
    const RunResult r = run(
        "trace --formula delta-vs-free --dim 2 --alpha 0.8 --m 1 --lambda -1",
        "SHELLTRACE_THREADS=abc ");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "must be a positive integer (at most 1024)"));
  }
}

TEST_CASE("verify compares the two independent routes") {
  // trimmed oracle grid keeps this test quick; the gap stays near 5e-5
  const RunResult r = run(
      "verify --formula delta-vs-free --dim 2 --alpha 0.8 --m 1 --lambda -2 "
      "--grid-points 1600 --r-max 25 --oracle-mode-cap 40");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "engine value"));
  CHECK(contains(r.out, "oracle value"));
  CHECK(contains(r.out, "verdict"));
  CHECK(contains(r.out, "pass"));
}

TEST_CASE("verify split identity holds even at the formally singular "
          "coupling") {
  const RunResult r = run(
      "verify --formula deltaprime-vs-free --dim 2 --omega 2 --m 1 "
      "--lambda -1 --identity split");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "interface + neumann"));
  CHECK(contains(r.out, "verdict"));
  CHECK(contains(r.out, "pass"));
}

TEST_CASE("eigs lists discrete eigenvalues or reports none") {
  SUBCASE("repulsive coupling binds nothing") {
    const RunResult r = run("eigs --model delta --dim 2 --alpha -1 "
                            "--modes 0..2");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "no discrete eigenvalues"));
  }
  SUBCASE("attractive coupling, frozen root") {
    const RunResult r = run("eigs --model delta --dim 2 --alpha 2 "
                            "--modes 0..1");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "mode 0 (x1): lambda = -1.1378876262194764"));
  }
  SUBCASE("cross-check against the discretized operator") {
    const RunResult r = run(
        "eigs --model delta --dim 2 --alpha 2 --modes 0..0 --cross-check "
        "--grid-points 2000 --r-max 30");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "oracle = "));
    CHECK(contains(r.out, "gap = "));
    // discretization error at this grid sits well under 1e-4
    const size_t pos = r.out.find("gap = ");
    REQUIRE(pos != std::string::npos);
    const double gap = std::strtod(r.out.c_str() + pos + 6, nullptr);
    CHECK(gap < 1e-4);
    CHECK(gap >= 0.0);
  }
}

TEST_CASE("sweep walks a lambda grid") {
  SUBCASE("clean grid") {
    const RunResult r = run(
        "sweep --formula delta-vs-free --dim 2 --alpha 0.8 --m 1 "
        "--lambda-from -1 --lambda-to -4 --points 3 --format csv");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out,
                   "lambda,value,modes_used,tail_bound,converged,error"));
    CHECK(contains(r.out, "-1,0.61356930979809265,573,"));
    CHECK(contains(r.out, "-2.5,"));
    CHECK(contains(r.out, "-4,"));
  }
  SUBCASE("a row inside the discrete spectrum is confined to that row") {
    const RunResult r = run(
        "sweep --formula delta-vs-free --dim 2 --alpha 2 --m 1 "
        "--lambda-from -0.5 --lambda-to -2 --points 3 --format csv");
    CHECK(r.exit_code == 3);
    CHECK(contains(r.out, "-0.5,0,0,0,false,"));
    CHECK(contains(r.out, "eigenvalue search"));
    CHECK(contains(r.out, "-1.25,"));
    CHECK(contains(r.out, "-2,1.374419426016942,"));
  }
  SUBCASE("empty grid") {
    const RunResult r = run(
        "sweep --formula delta-vs-free --dim 2 --alpha 0.8 --m 1 "
        "--lambda-from -1 --lambda-to -1 --points 0 --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
  }
}

TEST_CASE("decay reports the fitted exponent") {
  const RunResult r = run(
      "decay --which m-tilde --k 0 --dim 2 --lambda -1 --n 100..600 "
      "--format csv");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "exponent\n"));
  const size_t nl = r.out.find('\n');
  REQUIRE(nl != std::string::npos);
  const double slope = std::strtod(r.out.c_str() + nl + 1, nullptr);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.05));
}
