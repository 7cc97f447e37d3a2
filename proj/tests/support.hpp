#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mpcac/commands.hpp"
#include "mpcac/expr.hpp"
#include "mpcac/problem.hpp"

#ifndef MPCAC_CORPUS_DIR
#error "MPCAC_CORPUS_DIR must point at the corpus directory"
#endif

namespace testing {

using Eigen::VectorXd;

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string& file) {
  return std::string(MPCAC_CORPUS_DIR) + "/" + file;
}

inline mpcac::ProblemDocument load_corpus(const std::string& file) {
  return mpcac::load_problem_document(read_text(corpus_path(file)));
}

inline mpcac::json corpus_json(const std::string& file) {
  return mpcac::parse_json(read_text(corpus_path(file)));
}

inline VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  VectorXd vector(int n, double lo, double hi) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Random smooth expression over x1..xn. Only operations that stay finite
/// and differentiable on the whole of R^n are generated (log and sqrt are
/// applied to strictly positive arguments) so that gradients can be checked
/// at arbitrary points.
inline mpcac::Expr random_expr(Rng& rng, int n, int depth) {
  using mpcac::Expr;
  using K = Expr::Kind;
  if (depth <= 0 || rng.coin(0.25)) {
    if (rng.coin(0.6)) return Expr::variable(rng.integer(0, n - 1));
    return Expr::constant(std::round(rng.uniform(-3.0, 3.0) * 4.0) / 4.0);
  }
  switch (rng.integer(0, 9)) {
    case 0: return Expr::binary(K::Add, random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
    case 1: return Expr::binary(K::Sub, random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
    case 2: return Expr::binary(K::Mul, random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
    case 3: {
      // u / (1 + v^2)
      const Expr den = Expr::binary(K::Add, Expr::constant(1.0), Expr::power(random_expr(rng, n, depth - 1), 2));
      return Expr::binary(K::Div, random_expr(rng, n, depth - 1), den);
    }
    case 4: return Expr::power(random_expr(rng, n, depth - 1), rng.integer(0, 4));
    case 5: return Expr::unary(K::Neg, random_expr(rng, n, depth - 1));
    case 6: return Expr::unary(rng.coin() ? K::Sin : K::Cos, random_expr(rng, n, depth - 1));
    case 7: {
      // exp of a bounded argument
      return Expr::unary(K::Exp, Expr::unary(K::Sin, random_expr(rng, n, depth - 1)));
    }
    case 8: {
      const Expr arg = Expr::binary(K::Add, Expr::constant(2.0), Expr::power(random_expr(rng, n, depth - 1), 2));
      return Expr::unary(K::Log, arg);
    }
    default: {
      const Expr arg = Expr::binary(K::Add, Expr::constant(0.5), Expr::power(random_expr(rng, n, depth - 1), 2));
      return Expr::unary(K::Sqrt, arg);
    }
  }
}

/// Central difference of a scalar function of a vector.
template <class F>
VectorXd central_difference(F&& f, const VectorXd& x, double h = 1e-6) {
  VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// A random instance with a random smooth objective and, optionally, a ball
/// inequality that is slack on [-2, 2]^n.
inline mpcac::MpcacProblem random_instance(Rng& rng, int n, int alpha, bool with_ball = true) {
  const mpcac::Expr f = random_expr(rng, n, 3);
  std::vector<std::string> ineq;
  if (with_ball) {
    std::string ball;
    for (int i = 1; i <= n; ++i) ball += (i > 1 ? " + " : "") + std::string("x") + std::to_string(i) + "^2";
    ineq.push_back(ball + " - " + std::to_string(4 * n + 1));
  }
  return mpcac::make_problem(n, alpha, f.to_string(), ineq, {});
}

/// A point feasible for the relaxation: a random support of size <= alpha
/// carries nonzero x with y = 0; off the support x = 0 and y is drawn from
/// {0, interior, 1} and then raised until sum(y) >= n - alpha.
inline mpcac::PointXY random_feasible_point(Rng& rng, int n, int alpha, double xmax = 1.5) {
  mpcac::PointXY pt{VectorXd::Zero(n), VectorXd::Zero(n)};
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  const int s = rng.integer(0, alpha);
  for (int j = 0; j < n; ++j) {
    const int i = idx[static_cast<std::size_t>(j)];
    if (j < s) {
      double v = rng.uniform(0.2, xmax);
      pt.x[i] = rng.coin() ? v : -v;
    } else {
      const int kind = rng.integer(0, 2);
      pt.y[i] = kind == 0 ? 0.0 : kind == 1 ? rng.uniform(0.1, 0.9) : 1.0;
    }
  }
  double deficit = (n - alpha) - pt.y.sum();
  for (int j = s; j < n && deficit > 0; ++j) {
    const int i = idx[static_cast<std::size_t>(j)];
    const double room = 1.0 - pt.y[i];
    const double add = std::min(room, deficit);
    pt.y[i] += add;
    deficit -= add;
  }
  return pt;
}

}  // namespace testing
