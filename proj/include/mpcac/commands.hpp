#pragma once

#include <string>

#include "mpcac/json_io.hpp"

namespace mpcac {

/// A loaded problem document with its relaxation.
struct ProblemDocument {
  json source;
  MpcacProblem problem;
  RelaxedProblem relaxed;
  std::string digest;  // SHA-256 of the raw text, hex
};

ProblemDocument load_problem_document(const std::string& text);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(const std::string& bytes);

/// Result of a command: the "results" object and whether it passed.
struct CommandResult {
  json results;
  bool pass = false;
};

/// request: {"condition": aw|wi|akkt|cakkt|pakkt, "point"?, "multipliers"?,
/// "index_set"? (1-based), "sequence"?, "tol", "pin_tol"?, "zero_tol"?}
CommandResult run_check(const ProblemDocument& doc, const json& request);

/// request: {"config", "anchor"?, "start"?}; pass means aw_tol was reached.
CommandResult run_solve(const ProblemDocument& doc, const json& request);

/// request: {"point", "k", "transform"?: cakkt-to-aw|tnlp-maps, "sequence"?,
/// "tol"?, "zero_tol"?}
CommandResult run_witness(const ProblemDocument& doc, const json& request);

/// request: {"wi_at"?: point, "tol"?}
CommandResult run_oracle(const ProblemDocument& doc, const json& request);

}  // namespace mpcac
