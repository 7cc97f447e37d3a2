#pragma once

#include <vector>

#include <Eigen/Core>

namespace mpcac {

/// Per-variable constraint for sign_lsq.
enum class VarSign { Free, Nonneg, Zero };

struct SignLsqResult {
  Eigen::VectorXd z;
  double residual_norm = 0;  // ||A z - b||_2
  int iterations = 0;
  bool converged = false;
};

/// minimize ||A z - b||_2 subject to z_i >= 0 (Nonneg) and z_i = 0 (Zero).
///
/// Lawson-Hanson active-set iteration with free variables kept in the passive
/// set from the start. Subproblems are solved in the minimum-norm sense, so
/// rank-deficient A is fine.
SignLsqResult sign_lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       const std::vector<VarSign>& signs);

}  // namespace mpcac
