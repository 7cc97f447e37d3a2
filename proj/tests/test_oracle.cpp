#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>

#include "mpcac/errors.hpp"
#include "mpcac/json_io.hpp"
#include "mpcac/oracle.hpp"
#include "support.hpp"

using namespace mpcac;
using testing::vec;

namespace {

OracleResult run(const char* file) {
  const auto doc = testing::load_corpus(file);
  return support_enumerate_solve(doc.problem, oracle_config_from_json(doc.source, doc.problem));
}

// Random point in the box with at most alpha nonzeros.
VectorXd sparse_sample(testing::Rng& rng, const MpcacProblem& p) {
  VectorXd x = VectorXd::Zero(p.n);
  const int s = rng.integer(0, p.alpha);
  for (int j = 0; j < s; ++j) {
    const int i = rng.integer(0, p.n - 1);
    x[i] = rng.uniform(p.box->lo[i], p.box->hi[i]);
  }
  return x;
}

}  // namespace

TEST_CASE("corpus minimizers") {
  const auto t0 = std::chrono::steady_clock::now();
  const OracleResult c = run("cubic.json");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(c.status == OracleStatus::Bounded);
  REQUIRE(c.value);
  CHECK(std::abs(*c.value - 1.0) <= 1e-4);
  CHECK((c.x - vec({1, 0, 0})).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK(c.support == std::vector<int>{0});
  CHECK(secs <= 10.0);

  const OracleResult q = run("quadratic.json");
  REQUIRE(q.value);
  CHECK(*q.value <= 1e-12);
  CHECK(q.support.empty());

  const OracleResult lb = run("linear_box.json");
  REQUIRE(lb.value);
  CHECK(*lb.value == doctest::Approx(3.0).epsilon(1e-6));
  CHECK((lb.x - vec({1, 0, 0})).cwiseAbs().maxCoeff() <= 1e-4);

  const OracleResult tr = run("trig.json");
  REQUIRE(tr.value);
  CHECK(*tr.value == doctest::Approx(-1.0).epsilon(1e-6));

  // square: x1^2 <= 0 forces x1 = 0 and the objective x2 runs to the box edge.
  const OracleResult sq = run("square.json");
  CHECK(sq.status == OracleStatus::SuspectedUnbounded);
  CHECK_FALSE(sq.value);
  CHECK(sq.candidate_value == doctest::Approx(-2.0));
}

TEST_CASE("oracle is deterministic") {
  const OracleResult a = run("trig.json");
  const OracleResult b = run("trig.json");
  CHECK(a.x == b.x);
  CHECK(a.value == b.value);
  CHECK(a.supports_checked == b.supports_checked);
  CHECK(oracle_result_to_json(a).dump() == oracle_result_to_json(b).dump());
}

TEST_CASE("property: the oracle value is no worse than random sparse feasible samples") {
  testing::Rng rng(606);
  int bounded = 0;
  for (int t = 0; t < 12; ++t) {
    const int n = rng.integer(2, 3);
    const int alpha = rng.integer(1, n - 1);
    MpcacProblem p = testing::random_instance(rng, n, alpha);
    p.box = Box{VectorXd::Constant(n, -2), VectorXd::Constant(n, 2)};
    OracleConfig cfg = default_oracle_config(p);
    const OracleResult r = support_enumerate_solve(p, cfg);
    INFO(p.f.value.to_string() << " status " << to_string(r.status));
    if (r.status != OracleStatus::Bounded) continue;
    ++bounded;
    for (int s = 0; s < 300; ++s) {
      const VectorXd x = sparse_sample(rng, p);
      if (!is_feasible_mpcac(p, x, 0.0).feasible) continue;
      CHECK(*r.value <= p.f(x) + 1e-6);
    }
    CHECK(is_feasible_mpcac(p, r.x, cfg.feas_tol).feasible);
  }
  CHECK(bounded >= 6);
}

TEST_CASE("brute-force W_I") {
  const auto doc = testing::load_corpus("cubic.json");
  const PointXY pt{vec({1, 0, 0}), vec({0, 1, 0})};
  const IndexPartition part = classify_indices(pt);
  const WiBruteForce bf = brute_force_wi(doc.relaxed, pt, part);
  REQUIRE(bf.per_set.size() == 2);
  CHECK(std::abs(bf.best_residual - 1.0) <= 1e-8);
  double mn = INFINITY;
  for (const auto& [I, fit] : bf.per_set) mn = std::min(mn, fit.report.overall);
  CHECK(bf.best_residual == mn);
  CHECK(bf.best_I == std::vector<int>{1});

  const auto lb = testing::load_corpus("linear_box.json");
  const PointXY lp{vec({1, 0, 0}), vec({0, 1, 1})};
  CHECK(brute_force_wi(lb.relaxed, lp, classify_indices(lp)).best_residual <= 1e-12);

  const RelaxedProblem flat = build_relaxed(make_problem(4, 2, "3", {}, {}));
  const PointXY fp{vec({0, 0, 2, 0}), vec({0, 0, 0, 0})};
  const WiBruteForce f = brute_force_wi(flat, fp, classify_indices({fp.x, vec({0, 0, 0, 1})}));
  CHECK(f.best_residual == 0.0);
}

TEST_CASE("oracle limits and configuration errors") {
  MpcacProblem big = make_problem(kOracleMaxDimension + 1, 2, "x1", {}, {});
  big.box = Box{VectorXd::Constant(big.n, -1), VectorXd::Constant(big.n, 1)};
  CHECK_THROWS_AS(support_enumerate_solve(big, default_oracle_config(big)), LimitExceeded);

  const MpcacProblem nobox = make_problem(2, 1, "x1", {}, {});
  CHECK_THROWS_AS(default_oracle_config(nobox), SchemaError);

  MpcacProblem p = make_problem(2, 1, "x1", {}, {});
  p.box = Box{vec({-1, -1}), vec({1, 1})};
  OracleConfig cfg = default_oracle_config(p);
  cfg.grid = 2;
  CHECK_THROWS_AS(support_enumerate_solve(p, cfg), InvalidArgument);
  cfg = default_oracle_config(p);
  cfg.box.hi[0] = -1;
  CHECK_THROWS_AS(support_enumerate_solve(p, cfg), InvalidArgument);
}
