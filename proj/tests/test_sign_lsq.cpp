#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <limits>

#include "mpcac/sign_lsq.hpp"
#include "support.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using mpcac::VarSign;

namespace {

// Enumerates which sign-constrained variables are held at zero, solves the
// unconstrained problem on the rest and keeps the best feasible residual.
double brute_force(const MatrixXd& A, const VectorXd& b, const std::vector<VarSign>& signs) {
  const int nv = static_cast<int>(A.cols());
  std::vector<int> nonneg;
  for (int j = 0; j < nv; ++j) {
    if (signs[static_cast<std::size_t>(j)] == VarSign::Nonneg) nonneg.push_back(j);
  }
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << nonneg.size()); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < nv; ++j) {
      if (signs[static_cast<std::size_t>(j)] == VarSign::Free) cols.push_back(j);
    }
    for (std::size_t t = 0; t < nonneg.size(); ++t) {
      if (mask & (1u << t)) cols.push_back(nonneg[t]);
    }
    VectorXd z = VectorXd::Zero(nv);
    if (!cols.empty()) {
      MatrixXd As(A.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) As.col(static_cast<Eigen::Index>(c)) = A.col(cols[c]);
      const VectorXd zs = As.completeOrthogonalDecomposition().solve(b);
      for (std::size_t c = 0; c < cols.size(); ++c) z[cols[c]] = zs[static_cast<Eigen::Index>(c)];
    }
    bool ok = true;
    for (int j : nonneg) ok = ok && z[j] >= -1e-12;
    if (ok) best = std::min(best, (A * z - b).norm());
  }
  return best;
}

std::vector<VarSign> random_signs(testing::Rng& rng, int nv) {
  std::vector<VarSign> s(static_cast<std::size_t>(nv));
  for (auto& v : s) {
    const int r = rng.integer(0, 5);
    v = r == 0 ? VarSign::Zero : r <= 2 ? VarSign::Free : VarSign::Nonneg;
  }
  return s;
}

}  // namespace

TEST_CASE("small hand-checked problems") {
  MatrixXd A = MatrixXd::Identity(2, 2);
  VectorXd b(2);
  b << -1, 2;
  const auto r = mpcac::sign_lsq(A, b, {VarSign::Nonneg, VarSign::Nonneg});
  CHECK(r.converged);
  CHECK(r.z[0] == 0.0);
  CHECK(r.z[1] == doctest::Approx(2.0));
  CHECK(r.residual_norm == doctest::Approx(1.0));

  const auto f = mpcac::sign_lsq(A, b, {VarSign::Free, VarSign::Zero});
  CHECK(f.z[0] == doctest::Approx(-1.0));
  CHECK(f.z[1] == 0.0);
  CHECK(f.residual_norm == doctest::Approx(2.0));

  // duplicated column: minimum-norm split
  MatrixXd D(1, 2);
  D << 1, 1;
  VectorXd d(1);
  d << 2;
  const auto m = mpcac::sign_lsq(D, d, {VarSign::Free, VarSign::Free});
  CHECK(m.residual_norm == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.z[0] == doctest::Approx(1.0));

  CHECK_THROWS(mpcac::sign_lsq(A, b, {VarSign::Free}));
}

TEST_CASE("property: agrees with brute force on full-rank problems") {
  testing::Rng rng(17);
  for (int t = 0; t < 400; ++t) {
    const int rows = rng.integer(2, 9);
    const int nv = rng.integer(1, std::min(rows, 8));
    MatrixXd A(rows, nv);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < nv; ++j) A(i, j) = rng.uniform(-1, 1);
    const VectorXd b = rng.vector(rows, -2, 2);
    const auto signs = random_signs(rng, nv);
    const auto r = mpcac::sign_lsq(A, b, signs);
    const double want = brute_force(A, b, signs);
    CHECK(r.converged);
    CHECK(r.residual_norm == doctest::Approx(want).epsilon(1e-9).scale(1.0));
    for (int j = 0; j < nv; ++j) {
      if (signs[static_cast<std::size_t>(j)] == VarSign::Nonneg) CHECK(r.z[j] >= 0.0);
      if (signs[static_cast<std::size_t>(j)] == VarSign::Zero) CHECK(r.z[j] == 0.0);
    }
    CHECK(r.residual_norm == doctest::Approx((A * r.z - b).norm()));
  }
}

TEST_CASE("property: no worse than brute force on rank-deficient problems") {
  testing::Rng rng(23);
  for (int t = 0; t < 300; ++t) {
    const int rows = rng.integer(2, 6);
    const int nv = rng.integer(2, 10);
    const int rank = rng.integer(1, std::min(rows, nv));
    const MatrixXd L = MatrixXd::NullaryExpr(rows, rank, [&] { return rng.uniform(-1, 1); });
    const MatrixXd R = MatrixXd::NullaryExpr(rank, nv, [&] { return rng.uniform(-1, 1); });
    const MatrixXd A = L * R;
    const VectorXd b = rng.vector(rows, -2, 2);
    const auto signs = random_signs(rng, nv);
    const auto r = mpcac::sign_lsq(A, b, signs);
    CHECK(r.residual_norm <= brute_force(A, b, signs) + 1e-9);
    for (int j = 0; j < nv; ++j) {
      if (signs[static_cast<std::size_t>(j)] == VarSign::Nonneg) CHECK(r.z[j] >= 0.0);
      if (signs[static_cast<std::size_t>(j)] == VarSign::Zero) CHECK(r.z[j] == 0.0);
    }
  }
}
