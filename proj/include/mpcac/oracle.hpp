#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpcac/stationarity.hpp"

namespace mpcac {

struct OracleConfig {
  Box box;
  int grid = 21;                 // points per axis
  int multistart = 8;            // polished seeds per support, from grid and random
  int polish_iters = 200;
  std::uint64_t seed = 0;
  double feas_tol = 1e-6;
  long long max_grid_points = 200000;  // per support; the axis count shrinks to fit

  /// Throws InvalidArgument unless lo < hi componentwise and grid >= 3.
  void validate(int n) const;
};

/// Defaults with the box taken from the problem. Throws SchemaError when the
/// problem has no box.
OracleConfig default_oracle_config(const MpcacProblem& p);

enum class OracleStatus { Bounded, SuspectedUnbounded, InfeasibleAtResolution };

const char* to_string(OracleStatus s);

struct OracleResult {
  OracleStatus status = OracleStatus::InfeasibleAtResolution;
  VectorXd x;                    // best candidate (empty if none)
  std::optional<double> value;   // absent unless bounded
  double candidate_value = 0;    // f at x when a candidate exists
  std::vector<int> support;      // 0-based
  double max_violation = 0;
  long long supports_checked = 0;
};

inline constexpr int kOracleMaxDimension = 12;

/// Global minimization by enumeration of every support |S| <= alpha: grid
/// scan of the box restricted to S, projected-gradient polish of the best
/// seeds on a quadratic penalty, and a final feasibility filter. Throws
/// LimitExceeded for n > kOracleMaxDimension.
OracleResult support_enumerate_solve(const MpcacProblem& p, const OracleConfig& cfg);

struct WiBruteForce {
  std::vector<int> best_I;
  double best_residual = 0;
  std::vector<std::pair<std::vector<int>, FitResult<MultiplierSet>>> per_set;
};

/// Fits W_I multipliers for every valid I and keeps the smallest residual
/// (first in enumeration order on ties).
WiBruteForce brute_force_wi(const RelaxedProblem& rp, const PointXY& pt,
                            const IndexPartition& part);

}  // namespace mpcac
