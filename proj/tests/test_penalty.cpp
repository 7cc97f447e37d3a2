#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mpcac/errors.hpp"
#include "mpcac/penalty.hpp"
#include "support.hpp"

using namespace mpcac;
using testing::vec;

namespace {

RelaxedProblem cubic() { return testing::load_corpus("cubic.json").relaxed; }

const PointXY kCubicMin{vec({1, 0, 0}), vec({0, 1, 0})};

// Two-branch brute force for one component.
std::pair<double, double> nearest_in_W(double aG, double aH) {
  const double costA = aH * aH;
  const double costB = aG * aG + std::min(aH, 0.0) * std::min(aH, 0.0);
  if (costA <= costB) return {aG, 0.0};
  return {0.0, std::max(aH, 0.0)};
}

AugmentedPoint random_augmented(testing::Rng& rng, int n) {
  return {rng.vector(n, -2, 2), rng.vector(n, -1, 2), rng.vector(n, -2, 2), rng.vector(n, -1, 2)};
}

// Root of -1 + t + 3 rho t^5 on [0, 1].
double cubic_root(double rho) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (-1 + mid + 3 * rho * std::pow(mid, 5) > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double dist(const AugmentedPoint& a, const PointXY& b) {
  return std::sqrt((a.x - b.x).squaredNorm() + (a.y - b.y).squaredNorm());
}

SolverConfig certify_config() { return solver_config_from_json(testing::corpus_json("certify.json")); }

}  // namespace

TEST_CASE("project_W examples") {
  auto [g1, h1] = project_W(vec({2}), vec({-1}));
  CHECK(g1[0] == 2.0);
  CHECK(h1[0] == 0.0);
  auto [g2, h2] = project_W(vec({0.1}), vec({3}));
  CHECK(g2[0] == 0.0);
  CHECK(h2[0] == 3.0);
  auto [g3, h3] = project_W(vec({0}), vec({0}));
  CHECK(g3[0] == 0.0);
  CHECK(h3[0] == 0.0);
  // tie goes to keeping wG
  auto [g4, h4] = project_W(vec({1}), vec({1}));
  CHECK(g4[0] == 1.0);
  CHECK(h4[0] == 0.0);
  CHECK_THROWS_AS(project_W(vec({1, 2}), vec({1})), InvalidArgument);
}

TEST_CASE("property: project_W matches the two-branch brute force and lands in W") {
  testing::Rng rng(101);
  const VectorXd aG = rng.vector(1000, -3, 3);
  VectorXd aH = rng.vector(1000, -3, 3);
  for (int i = 0; i < 50; ++i) aH[i] = aG[i];
  const auto [wG, wH] = project_W(aG, aH);
  for (int i = 0; i < 1000; ++i) {
    const auto [eg, eh] = nearest_in_W(aG[i], aH[i]);
    CHECK(wG[i] == eg);
    CHECK(wH[i] == eh);
    CHECK(wH[i] >= 0.0);
    CHECK(wG[i] * wH[i] == 0.0);
  }
}

TEST_CASE("infeasibility examples") {
  const RelaxedProblem rp = cubic();
  const AugmentedPoint at_min = with_projected_w(kCubicMin.x, kCubicMin.y);
  CHECK(infeasibility(rp, at_min) == 0.0);
  const auto g0 = grad_infeasibility(rp, at_min);
  CHECK(g0.gwG.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g0.gwH.cwiseAbs().maxCoeff() == 0.0);

  const AugmentedPoint ap{VectorXd::Zero(3), vec({0, 1, 0}), VectorXd::Zero(3), VectorXd::Zero(3)};
  CHECK(infeasibility(rp, ap) == doctest::Approx(1.0));
}

TEST_CASE("property: infeasibility gradients match central differences") {
  testing::Rng rng(9);
  double worst = 0.0;
  for (const char* file : {"cubic.json", "square.json", "linear_box.json", "trig.json"}) {
    const RelaxedProblem rp = testing::load_corpus(file).relaxed;
    const int n = rp.n();
    for (int t = 0; t < 100; ++t) {
      const AugmentedPoint ap = random_augmented(rng, n);
      VectorXd z(4 * n);
      z << ap.x, ap.y, ap.wG, ap.wH;
      auto phi = [&](const VectorXd& v) {
        return infeasibility(rp, {v.segment(0, n), v.segment(n, n), v.segment(2 * n, n), v.segment(3 * n, n)});
      };
      const VectorXd fd = testing::central_difference(phi, z);
      const auto gr = grad_infeasibility(rp, ap);
      VectorXd sym(4 * n);
      sym << gr.gx, gr.gy, gr.gwG, gr.gwH;
      for (int i = 0; i < 4 * n; ++i) worst = std::max(worst, testing::rel_err(sym[i], fd[i]));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("recovered multipliers") {
  const RelaxedProblem rp = cubic();
  const MultiplierSet zero = recover_multipliers(rp, with_projected_w(kCubicMin.x, kCubicMin.y), 1e3);
  CHECK(zero.lam_g.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.lam_G.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.lam_H.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.lam_Htilde.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.lam_theta == 0.0);

  for (double t : {0.1, 0.01}) {
    const AugmentedPoint ap = with_projected_w(vec({1 - t, 0, 0}), kCubicMin.y);
    const MultiplierSet lam = recover_multipliers(rp, ap, 100);
    CHECK(lam.lam_g[0] == doctest::Approx(100 * t * t * t).epsilon(1e-12));
  }
  const MultiplierSet neg = recover_multipliers(rp, with_projected_w(vec({1.5, 0, 0}), kCubicMin.y), 100);
  CHECK(neg.lam_g[0] == 0.0);
}

TEST_CASE("property: recovered multipliers have the right signs and gradient identity") {
  testing::Rng rng(202);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = rng.integer(2, 5);
    const RelaxedProblem rp = build_relaxed(testing::random_instance(rng, n, rng.integer(1, n - 1)));
    const AugmentedPoint ap = random_augmented(rng, n);
    const double rho = std::pow(10.0, rng.uniform(-2, 6));
    const MultiplierSet lam = recover_multipliers(rp, ap, rho);
    CHECK(lam.lam_g.minCoeff() >= 0.0);
    CHECK(lam.lam_theta >= 0.0);
    CHECK(lam.lam_Htilde.minCoeff() >= 0.0);

    const VectorXd L = aw_lagrangian_gradient(rp, {ap.x, ap.y}, lam);
    const auto gphi = grad_infeasibility(rp, ap);
    VectorXd want(2 * n);
    want << rp.base.f.grad_at(ap.x) + rho * gphi.gx, rho * gphi.gy;
    worst = std::max(worst, (L - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff()));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("inner solve on the cubic problem follows the one-dimensional reduction") {
  const RelaxedProblem rp = cubic();
  const SolverConfig cfg = certify_config();
  for (double rho : {1e2, 1e4}) {
    const InnerResult r = inner_solve(rp, cfg, rho, kCubicMin, with_projected_w(kCubicMin.x, kCubicMin.y));
    const double t = cubic_root(rho);
    INFO("rho = " << rho << " termination " << r.termination);
    CHECK(dist(r.point, kCubicMin) == doctest::Approx(t).epsilon(1e-6));
    CHECK(r.point.x[0] == doctest::Approx(1 - t).epsilon(1e-6));
    CHECK(r.phi == doctest::Approx(std::pow(t, 6) / 2).epsilon(1e-4));
    CHECK(r.phi <= 10 / rho);
    CHECK_FALSE(r.ball_active);
  }
}

TEST_CASE("inner solve fixed point and monotone objective") {
  const RelaxedProblem q = testing::load_corpus("quadratic.json").relaxed;
  const PointXY origin{VectorXd::Zero(4), VectorXd::Ones(4)};
  const AugmentedPoint start = with_projected_w(origin.x, origin.y);
  const InnerResult r = inner_solve(q, certify_config(), 1e3, origin, start);
  CHECK(r.termination == "converged");
  CHECK(r.point.x == start.x);
  CHECK(r.point.y == start.y);
  CHECK(r.phi == 0.0);

  testing::Rng rng(303);
  SolverConfig explore = certify_config();
  explore.mode = SolveMode::Explore;
  explore.inner.max_iters = 400;
  for (int t = 0; t < 30; ++t) {
    const int n = rng.integer(2, 5);
    const int alpha = rng.integer(1, n - 1);
    const RelaxedProblem rp = build_relaxed(testing::random_instance(rng, n, alpha));
    const PointXY anchor = testing::random_feasible_point(rng, n, alpha);
    const AugmentedPoint s0 = with_projected_w(anchor.x + rng.vector(n, -0.3, 0.3), anchor.y);
    for (bool certify : {true, false}) {
      const InnerResult ir = certify ? inner_solve(rp, certify_config(), 10.0, anchor, s0)
                                     : inner_solve(rp, explore, 10.0, std::nullopt, s0);
      for (std::size_t i = 1; i < ir.objective_history.size(); ++i) {
        CHECK(ir.objective_history[i] <= ir.objective_history[i - 1]);
      }
      CHECK(ir.point.wH.minCoeff() >= 0.0);
      CHECK(ir.point.wG.cwiseProduct(ir.point.wH).cwiseAbs().maxCoeff() == 0.0);
      if (certify) CHECK(dist(ir.point, anchor) <= certify_config().ball_radius + 1e-12);
    }
  }
  CHECK_THROWS_AS(inner_solve(q, certify_config(), 0.0, origin, start), InvalidArgument);
  CHECK_THROWS_AS(inner_solve(q, certify_config(), 1.0, std::nullopt, start), InvalidArgument);
}

TEST_CASE("solve at an interior stationary anchor stops at once") {
  const RelaxedProblem q = testing::load_corpus("quadratic.json").relaxed;
  const PointXY origin{VectorXd::Zero(4), VectorXd::Ones(4)};
  const CertificateSequence seq = solve(q, certify_config(), origin, std::nullopt);
  REQUIRE(seq.iterates.size() == 1);
  CHECK(seq.reached_tol);
  CHECK(seq.termination == "aw_tol_reached");
  CHECK(seq.residual_history[0] == 0.0);
}

TEST_CASE("certify solve on the cubic problem") {
  const RelaxedProblem rp = cubic();
  const CertificateSequence seq = solve(rp, certify_config(), kCubicMin, std::nullopt);
  REQUIRE(seq.iterates.size() == 9);
  CHECK(seq.termination == "max_outer");
  for (std::size_t k = 0; k < seq.iterates.size(); ++k) {
    const auto& it = seq.iterates[k];
    const double rho = std::pow(10.0, static_cast<double>(k));
    CHECK(*it.iterate.rho == doctest::Approx(rho));
    CHECK(it.phi <= 10 / rho);
    const double t = cubic_root(rho);
    CHECK(dist(it.point, kCubicMin) == doctest::Approx(t).epsilon(1e-5));
    CHECK(it.point.wH.minCoeff() >= 0.0);
    CHECK(it.point.wG.cwiseProduct(it.point.wH).cwiseAbs().maxCoeff() == 0.0);
  }
  for (std::size_t k = 2; k < seq.residual_history.size(); ++k) {
    CHECK(seq.residual_history[k] < seq.residual_history[k - 1]);
  }
  // The residual is the prox gradient t itself, which decays like rho^(-1/5).
  CHECK(seq.residual_history.back() == doctest::Approx(cubic_root(1e8)).epsilon(1e-4));
}

TEST_CASE("explore mode from random starts") {
  testing::Rng rng(404);
  SolverConfig cfg = solver_config_from_json(testing::corpus_json("explore.json"));
  cfg.inner.max_iters = 1000;
  for (int t = 0; t < 10; ++t) {
    const int n = rng.integer(2, 4);
    const int alpha = rng.integer(1, n - 1);
    const RelaxedProblem rp = build_relaxed(testing::random_instance(rng, n, alpha));
    const PointXY start{rng.vector(n, -1, 1), rng.vector(n, 0, 1)};
    const CertificateSequence seq = solve(rp, cfg, std::nullopt, start);
    CHECK_FALSE(seq.iterates.empty());
    for (const auto& it : seq.iterates) {
      CHECK(std::isfinite(it.aw.overall));
      CHECK(it.point.wG.cwiseProduct(it.point.wH).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("solver errors") {
  const RelaxedProblem rp = cubic();
  CHECK_THROWS_AS(solve(rp, certify_config(), PointXY{vec({1, 1, 1}), vec({0, 0, 0})}, std::nullopt),
                  InfeasiblePoint);
  CHECK_THROWS_AS(solve(rp, certify_config(), std::nullopt, std::nullopt), InvalidArgument);
  SolverConfig explore = certify_config();
  explore.mode = SolveMode::Explore;
  CHECK_THROWS_AS(solve(rp, explore, std::nullopt, std::nullopt), InvalidArgument);

  SolverConfig bad = certify_config();
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = certify_config();
  bad.rho0 = -1;
  CHECK_THROWS_AS(solve(rp, bad, kCubicMin, std::nullopt), InvalidArgument);
  bad = certify_config();
  bad.ball_radius = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
