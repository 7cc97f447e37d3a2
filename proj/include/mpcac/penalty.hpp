#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpcac/stationarity.hpp"

namespace mpcac {

/// (x, y) together with w = (wG, wH) in W = {wH >= 0, wG * wH = 0}.
struct AugmentedPoint {
  VectorXd x;
  VectorXd y;
  VectorXd wG;
  VectorXd wH;
};

enum class SolveMode { Certify, Explore };

struct InnerConfig {
  int max_iters = 5000;
  double grad_tol = 1e-12;
  double c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
};

struct SolverConfig {
  SolveMode mode = SolveMode::Certify;
  double rho0 = 1.0;
  double gamma = 10.0;
  int max_outer = 9;
  double ball_radius = 1.0;
  double aw_tol = 1e-3;
  InnerConfig inner;

  /// Throws InvalidArgument for rho0 <= 0, gamma <= 1, ball_radius <= 0 and
  /// similar.
  void validate() const;
};

/// Componentwise nearest point of W to (aG, aH). Branch A keeps aG
/// (w = (aG, 0), cost aH^2); branch B keeps aH (w = (0, max(aH, 0)), cost
/// aG^2 + min(aH, 0)^2). Ties go to branch A.
std::pair<VectorXd, VectorXd> project_W(const VectorXd& aG, const VectorXd& aH);

/// phi = 1/2 (|g+|^2 + |h|^2 + (theta+)^2 + |wG - G(x)|^2 + |wH + H(y)|^2 + |Htilde+|^2)
double infeasibility(const RelaxedProblem& rp, const AugmentedPoint& ap);

struct InfeasibilityGradient {
  VectorXd gx;
  VectorXd gy;
  VectorXd gwG;
  VectorXd gwH;
};

InfeasibilityGradient grad_infeasibility(const RelaxedProblem& rp, const AugmentedPoint& ap);

/// w minimizing phi over W for fixed (x, y).
AugmentedPoint with_projected_w(const VectorXd& x, const VectorXd& y);

struct InnerResult {
  AugmentedPoint point;
  int iterations = 0;
  double objective = 0;
  double phi = 0;
  double grad_norm = 0;
  std::string termination;  // converged | max_iters | line_search_failed
  bool ball_active = false;
  std::vector<double> objective_history;
};

/// Minimizes f(x) + rho phi(x, y, w) over w in W, plus
/// 1/2 |(x, y) - anchor|^2 in certify mode. w is kept at its exact minimizer
/// project_W(x, y) while (x, y) follows Armijo gradient steps; in certify mode
/// trial points leaving the ball of radius cfg.ball_radius around
/// (anchor, w(anchor)) are pulled back along the segment to the anchor.
InnerResult inner_solve(const RelaxedProblem& rp, const SolverConfig& cfg, double rho,
                        const std::optional<PointXY>& anchor, const AugmentedPoint& start);

/// lam_g = rho g+, lam_h = rho h, lam_theta = rho theta+, lam_G = rho (G - wG),
/// lam_H = rho (wH + H), lam_Htilde = rho Htilde+.
MultiplierSet recover_multipliers(const RelaxedProblem& rp, const AugmentedPoint& ap, double rho);

struct CertificateIterate {
  WitnessIterate iterate;  // MultiplierSet, rho set
  AugmentedPoint point;
  ResidualReport aw;
  double phi = 0;
  int inner_iterations = 0;
  std::string inner_termination;
  bool ball_active = false;
};

struct CertificateSequence {
  std::vector<CertificateIterate> iterates;
  std::vector<double> residual_history;
  std::string termination;  // aw_tol_reached | max_outer
  bool reached_tol = false;
  bool ball_ever_active = false;
};

/// Outer loop over rho_k = rho0 gamma^(k-1), k = 1..max_outer. Certify mode
/// needs a feasible anchor (also the default start); explore mode needs a
/// start.
CertificateSequence solve(const RelaxedProblem& rp, const SolverConfig& cfg,
                          const std::optional<PointXY>& anchor,
                          const std::optional<PointXY>& start);

}  // namespace mpcac
