// Error taxonomy shared by every module. Four categories, mirroring the CLI
// exit-code contract: usage (2), domain (2), non-convergence (3), numeric (4).
#pragma once

#include <stdexcept>
#include <string>

namespace shelltrace {

// malformed request: bad flag combination, mismatched jet bases, ...
class usage_error : public std::invalid_argument {
 public:
  explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

// request outside the supported domain: lambda >= 0, plan threshold violated,
// value not representable, evaluation point at/above an eigenvalue, ...
class domain_error : public std::domain_error {
 public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// jet division hit a (near-)zero constant term: the base point is a pole,
// which for the resolvent formulas means an eigenvalue of the interacting
// operator. Deliberately distinct from domain_error so callers can attach
// the offending mode.
class singularity_error : public std::domain_error {
 public:
  explicit singularity_error(const std::string& what) : std::domain_error(what) {}
};

// internal numeric failure (eigensolver breakdown, NaN surfaced, ...)
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shelltrace
