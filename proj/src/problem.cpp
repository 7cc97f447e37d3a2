#include "mpcac/problem.hpp"

#include <algorithm>
#include <cmath>

#include "mpcac/errors.hpp"

namespace mpcac {

namespace {

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double max_plus(const VectorXd& v) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) r = std::max(r, v[i]);
  return r;
}

std::vector<int> merge(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

VectorXd MpcacProblem::g_at(const VectorXd& x) const {
  VectorXd v(m());
  for (int i = 0; i < m(); ++i) v[i] = g[static_cast<std::size_t>(i)](x);
  return v;
}

VectorXd MpcacProblem::h_at(const VectorXd& x) const {
  VectorXd v(p());
  for (int i = 0; i < p(); ++i) v[i] = h[static_cast<std::size_t>(i)](x);
  return v;
}

MatrixXd MpcacProblem::jac_g(const VectorXd& x) const {
  MatrixXd J(m(), n);
  for (int i = 0; i < m(); ++i) J.row(i) = g[static_cast<std::size_t>(i)].grad_at(x).transpose();
  return J;
}

MatrixXd MpcacProblem::jac_h(const VectorXd& x) const {
  MatrixXd J(p(), n);
  for (int i = 0; i < p(); ++i) J.row(i) = h[static_cast<std::size_t>(i)].grad_at(x).transpose();
  return J;
}

MpcacProblem make_problem(int n, int alpha, const std::string& objective,
                          const std::vector<std::string>& ineq,
                          const std::vector<std::string>& eq) {
  if (n < 1) throw InvalidArgument("n must be positive");
  if (alpha <= 0 || alpha >= n) {
    throw InvalidArgument("alpha must satisfy 0 < alpha < n (got alpha=" +
                          std::to_string(alpha) + ", n=" + std::to_string(n) + ")");
  }
  MpcacProblem p;
  p.n = n;
  p.alpha = alpha;
  p.f = SmoothFunction(parse_expr(objective, n), n);
  for (const auto& s : ineq) p.g.emplace_back(parse_expr(s, n), n);
  for (const auto& s : eq) p.h.emplace_back(parse_expr(s, n), n);
  return p;
}

double RelaxedProblem::theta(const VectorXd& y) const {
  return static_cast<double>(base.n - base.alpha) - y.sum();
}

VectorXd RelaxedProblem::Htilde(const VectorXd& y) const {
  return y.array() - 1.0;
}

VectorXd RelaxedProblem::xi(const VectorXd& x, const VectorXd& y) const {
  return G(x).cwiseProduct(H(y));
}

void RelaxedProblem::check_point(const PointXY& pt) const {
  if (pt.x.size() != n() || pt.y.size() != n()) {
    throw InvalidArgument("point must have x and y of length " + std::to_string(n()));
  }
  if (!pt.x.allFinite() || !pt.y.allFinite()) throw InvalidArgument("point has nonfinite entries");
}

RelaxedProblem build_relaxed(const MpcacProblem& p) { return RelaxedProblem{p}; }

RelaxedFeasibility is_feasible_relaxed(const RelaxedProblem& rp, const PointXY& pt, double tol) {
  if (tol < 0) throw InvalidArgument("tol must be nonnegative");
  rp.check_point(pt);
  RelaxedFeasibility r;
  r.g_plus = max_plus(rp.base.g_at(pt.x));
  r.h_abs = inf_norm(rp.base.h_at(pt.x));
  r.theta_plus = std::max(0.0, rp.theta(pt.y));
  r.y_below = max_plus(-pt.y);
  r.y_above = max_plus(rp.Htilde(pt.y));
  r.complementarity = inf_norm(pt.x.cwiseProduct(pt.y));
  r.max_violation = std::max({r.g_plus, r.h_abs, r.theta_plus, r.y_below, r.y_above,
                              r.complementarity});
  r.feasible = r.max_violation <= tol;
  return r;
}

MpcacFeasibility is_feasible_mpcac(const MpcacProblem& p, const VectorXd& x, double tol) {
  if (tol < 0) throw InvalidArgument("tol must be nonnegative");
  if (x.size() != p.n) throw InvalidArgument("x must have length " + std::to_string(p.n));
  MpcacFeasibility r;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > tol) ++r.cardinality;
  }
  r.max_violation = std::max(max_plus(p.g_at(x)), inf_norm(p.h_at(x)));
  r.feasible = r.cardinality <= p.alpha && r.max_violation <= tol;
  return r;
}

IndexPartition classify_indices(const PointXY& pt, double zero_tol) {
  if (pt.x.size() != pt.y.size()) throw InvalidArgument("x and y differ in length");
  if (!(zero_tol >= 0)) throw InvalidArgument("zero_tol must be nonnegative");
  IndexPartition part;
  part.n = static_cast<int>(pt.x.size());
  part.zero_tol = zero_tol;
  for (int i = 0; i < part.n; ++i) {
    const double xi = pt.x[i];
    const double yi = pt.y[i];
    if (yi < -zero_tol || yi > 1.0 + zero_tol) {
      throw InvalidArgument("index " + std::to_string(i + 1) + " has y outside [0, 1]");
    }
    bool x_zero = std::abs(xi) <= zero_tol;
    bool y_zero = std::abs(yi) <= zero_tol;
    if (!x_zero && !y_zero) {
      if (std::abs(xi * yi) > zero_tol) {
        throw InvalidArgument("index " + std::to_string(i + 1) +
                              " violates complementarity: x*y = " + std::to_string(xi * yi));
      }
      // Both small but nonzero: the smaller one is taken as the zero.
      if (std::abs(xi) <= std::abs(yi)) {
        x_zero = true;
      } else {
        y_zero = true;
      }
    }
    if (x_zero && y_zero) {
      part.i00.push_back(i);
    } else if (y_zero) {
      part.i_pm0.push_back(i);
    } else if (yi >= 1.0 - zero_tol) {
      part.i01.push_back(i);
    } else {
      part.i0p.push_back(i);
    }
  }
  part.i0gt = merge(part.i0p, part.i01);
  part.i0 = merge(part.i00, part.i0gt);
  return part;
}

std::vector<std::vector<int>> enumerate_index_sets(const IndexPartition& part) {
  const std::size_t k = part.i00.size();
  if (k > static_cast<std::size_t>(kMaxEnumeratedI00)) {
    throw LimitExceeded("|I00| = " + std::to_string(k) + " exceeds the enumeration cap of " +
                        std::to_string(kMaxEnumeratedI00));
  }
  std::vector<std::vector<int>> sets;
  sets.reserve(std::size_t{1} << k);
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<int> I = part.i0gt;
    for (std::size_t j = 0; j < k; ++j) {
      if (mask & (std::size_t{1} << j)) I.push_back(part.i00[j]);
    }
    std::sort(I.begin(), I.end());
    sets.push_back(std::move(I));
  }
  std::sort(sets.begin(), sets.end());
  return sets;
}

void validate_index_set(const IndexPartition& part, const std::vector<int>& I) {
  if (!std::is_sorted(I.begin(), I.end()) ||
      std::adjacent_find(I.begin(), I.end()) != I.end()) {
    throw InvalidArgument("index set must be sorted and free of duplicates");
  }
  if (!std::includes(I.begin(), I.end(), part.i0gt.begin(), part.i0gt.end())) {
    throw InvalidArgument("index set must contain every index of I0+ and I01");
  }
  if (!std::includes(part.i0.begin(), part.i0.end(), I.begin(), I.end())) {
    throw InvalidArgument("index set must be contained in I0");
  }
}

TnlpProblem build_tnlp(const RelaxedProblem& rp, const IndexPartition& part,
                       const std::vector<int>& I) {
  if (part.n != rp.n()) throw InvalidArgument("partition dimension does not match problem");
  validate_index_set(part, I);
  TnlpProblem t{rp, part, I, I, merge(part.i00, part.i_pm0), part.i0gt};
  return t;
}

TnlpFeasibility is_feasible_tnlp(const TnlpProblem& t, const PointXY& pt, double tol) {
  if (tol < 0) throw InvalidArgument("tol must be nonnegative");
  t.source.check_point(pt);
  TnlpFeasibility r;
  for (int i : t.G_eq) r.G_eq = std::max(r.G_eq, std::abs(pt.x[i]));
  for (int i : t.H_eq) r.H_eq = std::max(r.H_eq, std::abs(pt.y[i]));
  for (int i : t.H_ineq) r.H_ineq = std::max(r.H_ineq, -pt.y[i]);
  r.theta_plus = std::max(0.0, t.source.theta(pt.y));
  r.Htilde_plus = max_plus(t.source.Htilde(pt.y));
  r.g_plus = max_plus(t.source.base.g_at(pt.x));
  r.h_abs = inf_norm(t.source.base.h_at(pt.x));
  r.max_violation = std::max({r.G_eq, r.H_eq, r.H_ineq, r.theta_plus, r.Htilde_plus, r.g_plus,
                              r.h_abs});
  r.feasible = r.max_violation <= tol;
  return r;
}

}  // namespace mpcac
