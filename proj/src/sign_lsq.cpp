#include "mpcac/sign_lsq.hpp"

#include <Eigen/QR>
#include <cmath>

#include "mpcac/errors.hpp"

namespace mpcac {

namespace {

// Minimum-norm least-squares solution restricted to the columns in `cols`;
// returned as a full-length vector with zeros elsewhere.
Eigen::VectorXd restricted_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                 const std::vector<int>& cols) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(A.cols());
  if (cols.empty()) return s;
  Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) Ap.col(static_cast<Eigen::Index>(j)) = A.col(cols[j]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Ap);
  const Eigen::VectorXd sp = cod.solve(b);
  for (std::size_t j = 0; j < cols.size(); ++j) s[cols[j]] = sp[static_cast<Eigen::Index>(j)];
  return s;
}

}  // namespace

SignLsqResult sign_lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       const std::vector<VarSign>& signs) {
  const Eigen::Index nv = A.cols();
  if (static_cast<Eigen::Index>(signs.size()) != nv) {
    throw InvalidArgument("sign_lsq: one sign per column required");
  }
  if (b.size() != A.rows()) throw InvalidArgument("sign_lsq: b must have one entry per row");

  // passive[j]: j may be nonzero. blocked[j]: j refused to enter once already
  // at the current iterate (its unconstrained value came out nonpositive).
  std::vector<bool> passive(static_cast<std::size_t>(nv), false);
  std::vector<bool> blocked(static_cast<std::size_t>(nv), false);
  for (Eigen::Index j = 0; j < nv; ++j) passive[static_cast<std::size_t>(j)] = signs[static_cast<std::size_t>(j)] == VarSign::Free;

  auto passive_cols = [&] {
    std::vector<int> cols;
    for (Eigen::Index j = 0; j < nv; ++j)
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(static_cast<int>(j));
    return cols;
  };

  SignLsqResult out;
  Eigen::VectorXd z = restricted_solve(A, b, passive_cols());
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());
  const double wtol = 1e-13 * scale * static_cast<double>(std::max<Eigen::Index>(1, A.rows()));
  const int max_iters = 3 * static_cast<int>(nv) + 30;

  int it = 0;
  for (; it < max_iters; ++it) {
    const Eigen::VectorXd w = A.transpose() * (b - A * z);
    Eigen::Index enter = -1;
    double best = wtol;
    for (Eigen::Index j = 0; j < nv; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      if (signs[ju] != VarSign::Nonneg || passive[ju] || blocked[ju]) continue;
      if (w[j] > best) {
        best = w[j];
        enter = j;
      }
    }
    if (enter < 0) {
      out.converged = true;
      break;
    }
    passive[static_cast<std::size_t>(enter)] = true;

    for (int inner = 0; inner < max_iters; ++inner) {
      const Eigen::VectorXd s = restricted_solve(A, b, passive_cols());
      if (inner == 0 && s[enter] <= 0.0) {
        passive[static_cast<std::size_t>(enter)] = false;
        blocked[static_cast<std::size_t>(enter)] = true;
        break;
      }
      double step = 1.0;
      bool feasible = true;
      for (Eigen::Index j = 0; j < nv; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (!passive[ju] || signs[ju] != VarSign::Nonneg || s[j] > 0.0) continue;
        feasible = false;
        const double denom = z[j] - s[j];
        if (denom > 0.0) step = std::min(step, z[j] / denom);
      }
      if (feasible) {
        z = s;
        std::fill(blocked.begin(), blocked.end(), false);
        break;
      }
      z += step * (s - z);
      for (Eigen::Index j = 0; j < nv; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (passive[ju] && signs[ju] == VarSign::Nonneg && z[j] <= 1e-15 * std::max(1.0, z.cwiseAbs().maxCoeff())) {
          passive[ju] = false;
          z[j] = 0.0;
        }
      }
    }
  }

  for (Eigen::Index j = 0; j < nv; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (signs[ju] == VarSign::Zero || (signs[ju] == VarSign::Nonneg && z[j] < 0.0)) z[j] = 0.0;
  }
  out.z = z;
  out.residual_norm = (A * z - b).norm();
  out.iterations = it;
  return out;
}

}  // namespace mpcac
