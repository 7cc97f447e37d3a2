#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mpcac/expr.hpp"

namespace mpcac {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kDefaultZeroTol = 1e-8;

struct Box {
  VectorXd lo;
  VectorXd hi;
};

/// minimize f(x) s.t. g(x) <= 0, h(x) = 0, ||x||_0 <= alpha.
struct MpcacProblem {
  int n = 0;
  int alpha = 0;
  SmoothFunction f;
  std::vector<SmoothFunction> g;
  std::vector<SmoothFunction> h;
  std::optional<Box> box;
  std::string name;

  int m() const { return static_cast<int>(g.size()); }
  int p() const { return static_cast<int>(h.size()); }

  VectorXd g_at(const VectorXd& x) const;
  VectorXd h_at(const VectorXd& x) const;
  /// Rows are constraint gradients (m x n and p x n).
  MatrixXd jac_g(const VectorXd& x) const;
  MatrixXd jac_h(const VectorXd& x) const;
};

/// Parses and validates; throws ParseError or InvalidArgument.
MpcacProblem make_problem(int n, int alpha, const std::string& objective,
                          const std::vector<std::string>& ineq,
                          const std::vector<std::string>& eq);

struct PointXY {
  VectorXd x;
  VectorXd y;
};

/// Continuous relaxation: constraints of the base problem plus
/// theta(y) = n - alpha - e'y <= 0, H(y) = -y <= 0, Htilde(y) = y - e <= 0 and
/// xi(x, y) = G(x) * H(y) = 0 with G(x) = x.
struct RelaxedProblem {
  MpcacProblem base;

  int n() const { return base.n; }
  double theta(const VectorXd& y) const;
  VectorXd G(const VectorXd& x) const { return x; }
  VectorXd H(const VectorXd& y) const { return -y; }
  VectorXd Htilde(const VectorXd& y) const;
  VectorXd xi(const VectorXd& x, const VectorXd& y) const;

  /// Throws InvalidArgument unless x and y have length n and are finite.
  void check_point(const PointXY& pt) const;
};

RelaxedProblem build_relaxed(const MpcacProblem& p);

struct RelaxedFeasibility {
  double g_plus = 0;
  double h_abs = 0;
  double theta_plus = 0;
  double y_below = 0;  // max (-y)^+
  double y_above = 0;  // max (y - e)^+
  double complementarity = 0;  // max |x_i y_i|
  double max_violation = 0;
  bool feasible = false;
};

RelaxedFeasibility is_feasible_relaxed(const RelaxedProblem& rp, const PointXY& pt, double tol);

struct MpcacFeasibility {
  int cardinality = 0;
  double max_violation = 0;  // over g^+ and |h|
  bool feasible = false;
};

MpcacFeasibility is_feasible_mpcac(const MpcacProblem& p, const VectorXd& x, double tol);

/// Index classes at a point, 0-based and sorted.
struct IndexPartition {
  int n = 0;
  double zero_tol = kDefaultZeroTol;
  std::vector<int> i00;   // x = 0, y = 0
  std::vector<int> i_pm0; // x != 0, y = 0
  std::vector<int> i0p;   // x = 0, 0 < y < 1
  std::vector<int> i01;   // x = 0, y = 1
  std::vector<int> i0;    // i00 + i0p + i01
  std::vector<int> i0gt;  // i0p + i01
};

/// Throws InvalidArgument for an index that violates the relaxation
/// (y outside [0, 1] or |x_i y_i| > zero_tol).
IndexPartition classify_indices(const PointXY& pt, double zero_tol = kDefaultZeroTol);

inline constexpr int kMaxEnumeratedI00 = 20;

/// Every I with i0gt <= I <= i0, in lexicographic order of the sorted sets.
/// Throws LimitExceeded when |i00| > kMaxEnumeratedI00.
std::vector<std::vector<int>> enumerate_index_sets(const IndexPartition& part);

/// Throws InvalidArgument unless I is sorted, duplicate free and
/// i0gt <= I <= i0.
void validate_index_set(const IndexPartition& part, const std::vector<int>& I);

/// Tightened problem at a point for an index set I.
struct TnlpProblem {
  RelaxedProblem source;
  IndexPartition part;
  std::vector<int> I;
  std::vector<int> G_eq;   // x_i = 0, i in I
  std::vector<int> H_eq;   // y_i = 0, i in i00 + i_pm0
  std::vector<int> H_ineq; // -y_i <= 0, i in i0p + i01
};

TnlpProblem build_tnlp(const RelaxedProblem& rp, const IndexPartition& part,
                       const std::vector<int>& I);

struct TnlpFeasibility {
  double G_eq = 0;
  double H_eq = 0;
  double H_ineq = 0;
  double theta_plus = 0;
  double Htilde_plus = 0;
  double g_plus = 0;
  double h_abs = 0;
  double max_violation = 0;
  bool feasible = false;
};

TnlpFeasibility is_feasible_tnlp(const TnlpProblem& t, const PointXY& pt, double tol);

}  // namespace mpcac
