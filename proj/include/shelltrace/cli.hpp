// Command-line front end. Subcommands:
//   trace   evaluate one trace formula at one point
//   verify  engine vs finite-volume oracle on the same request, or the
//           split identity (free comparison = interface part + Neumann part)
//   eigs    Birman-Schwinger eigenvalue search, optional oracle cross-check
//   decay   fitted power-law decay exponent of a boundary-map jet coefficient
//   sweep   trace values over a lambda grid
//
// Exit codes: 0 success, 2 usage or domain error, 3 non-converged result,
// 4 numeric failure (including a verification gap beyond tolerance).
// Data goes to out, diagnostics to err. Identical arguments produce
// identical output.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shelltrace {

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace shelltrace
