#include "mpcac/penalty.hpp"

#include <cmath>
#include <limits>

#include "mpcac/errors.hpp"

namespace mpcac {

namespace {

VectorXd plus(const VectorXd& v) { return v.cwiseMax(0.0); }

void check_aug(const RelaxedProblem& rp, const AugmentedPoint& ap) {
  const int n = rp.n();
  if (ap.x.size() != n || ap.y.size() != n || ap.wG.size() != n || ap.wH.size() != n) {
    throw InvalidArgument("augmented point must have x, y, wG, wH of length " + std::to_string(n));
  }
}

// Penalized objective over z = (x, y) with w eliminated through project_W.
class ReducedObjective {
 public:
  ReducedObjective(const RelaxedProblem& rp, double rho, const std::optional<PointXY>& anchor)
      : rp_(rp), rho_(rho), anchor_(anchor), n_(rp.n()) {}

  AugmentedPoint point(const VectorXd& z) const {
    return with_projected_w(z.head(n_), z.tail(n_));
  }

  // +inf outside the domain of f or the constraints.
  double value(const VectorXd& z) const {
    try {
      const AugmentedPoint ap = point(z);
      double v = rp_.base.f(ap.x) + rho_ * infeasibility(rp_, ap);
      if (anchor_) {
        v += 0.5 * ((ap.x - anchor_->x).squaredNorm() + (ap.y - anchor_->y).squaredNorm());
      }
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  VectorXd gradient(const VectorXd& z) const {
    const AugmentedPoint ap = point(z);
    const InfeasibilityGradient gp = grad_infeasibility(rp_, ap);
    VectorXd g(2 * n_);
    g.head(n_) = rp_.base.f.grad_at(ap.x) + rho_ * gp.gx;
    g.tail(n_) = rho_ * gp.gy;
    if (anchor_) {
      g.head(n_) += ap.x - anchor_->x;
      g.tail(n_) += ap.y - anchor_->y;
    }
    return g;
  }

 private:
  const RelaxedProblem& rp_;
  double rho_;
  const std::optional<PointXY>& anchor_;
  int n_;
};

double ball_distance(const AugmentedPoint& ap, const AugmentedPoint& center) {
  return std::sqrt((ap.x - center.x).squaredNorm() + (ap.y - center.y).squaredNorm() +
                   (ap.wG - center.wG).squaredNorm() + (ap.wH - center.wH).squaredNorm());
}

}  // namespace

void SolverConfig::validate() const {
  if (!(rho0 > 0)) throw InvalidArgument("rho0 must be positive");
  if (!(gamma > 1)) throw InvalidArgument("gamma must exceed 1");
  if (max_outer < 1) throw InvalidArgument("max_outer must be at least 1");
  if (!(ball_radius > 0)) throw InvalidArgument("ball_radius must be positive");
  if (!(aw_tol >= 0)) throw InvalidArgument("aw_tol must be nonnegative");
  if (inner.max_iters < 1) throw InvalidArgument("inner.max_iters must be at least 1");
  if (!(inner.grad_tol >= 0)) throw InvalidArgument("inner.grad_tol must be nonnegative");
  if (!(inner.c1 > 0 && inner.c1 < 1)) throw InvalidArgument("inner.c1 must lie in (0, 1)");
  if (!(inner.backtrack > 0 && inner.backtrack < 1)) {
    throw InvalidArgument("inner.backtrack must lie in (0, 1)");
  }
  if (inner.max_backtracks < 1) throw InvalidArgument("inner.max_backtracks must be at least 1");
}

std::pair<VectorXd, VectorXd> project_W(const VectorXd& aG, const VectorXd& aH) {
  if (aG.size() != aH.size()) throw InvalidArgument("project_W: length mismatch");
  VectorXd wG(aG.size()), wH(aH.size());
  for (Eigen::Index i = 0; i < aG.size(); ++i) {
    const double cost_a = aH[i] * aH[i];
    const double neg = std::min(aH[i], 0.0);
    const double cost_b = aG[i] * aG[i] + neg * neg;
    if (cost_a <= cost_b) {
      wG[i] = aG[i];
      wH[i] = 0.0;
    } else {
      wG[i] = 0.0;
      wH[i] = std::max(aH[i], 0.0);
    }
  }
  return {wG, wH};
}

AugmentedPoint with_projected_w(const VectorXd& x, const VectorXd& y) {
  auto [wG, wH] = project_W(x, y);
  return {x, y, std::move(wG), std::move(wH)};
}

double infeasibility(const RelaxedProblem& rp, const AugmentedPoint& ap) {
  check_aug(rp, ap);
  const double th = std::max(0.0, rp.theta(ap.y));
  return 0.5 * (plus(rp.base.g_at(ap.x)).squaredNorm() + rp.base.h_at(ap.x).squaredNorm() +
                th * th + (ap.wG - rp.G(ap.x)).squaredNorm() +
                (ap.wH + rp.H(ap.y)).squaredNorm() + plus(rp.Htilde(ap.y)).squaredNorm());
}

InfeasibilityGradient grad_infeasibility(const RelaxedProblem& rp, const AugmentedPoint& ap) {
  check_aug(rp, ap);
  const int n = rp.n();
  InfeasibilityGradient out;
  out.gx = ap.x - ap.wG;
  if (rp.base.m() > 0) out.gx += rp.base.jac_g(ap.x).transpose() * plus(rp.base.g_at(ap.x));
  if (rp.base.p() > 0) out.gx += rp.base.jac_h(ap.x).transpose() * rp.base.h_at(ap.x);
  const double th = std::max(0.0, rp.theta(ap.y));
  out.gy = -th * VectorXd::Ones(n) + plus(rp.Htilde(ap.y)) - (ap.wH - ap.y);
  out.gwG = ap.wG - ap.x;
  out.gwH = ap.wH - ap.y;
  return out;
}

InnerResult inner_solve(const RelaxedProblem& rp, const SolverConfig& cfg, double rho,
                        const std::optional<PointXY>& anchor, const AugmentedPoint& start) {
  cfg.validate();
  if (!(rho > 0)) throw InvalidArgument("rho must be positive");
  check_aug(rp, start);
  const bool certify = cfg.mode == SolveMode::Certify;
  if (certify && !anchor) throw InvalidArgument("certify mode needs an anchor");
  const std::optional<PointXY> prox = certify ? anchor : std::nullopt;
  if (prox) rp.check_point(*prox);

  const int n = rp.n();
  const ReducedObjective F(rp, rho, prox);
  const AugmentedPoint center =
      certify ? with_projected_w(anchor->x, anchor->y) : AugmentedPoint{};
  VectorXd anchor_z(2 * n);
  if (certify) anchor_z << anchor->x, anchor->y;

  InnerResult res;
  auto outside = [&](const VectorXd& z) {
    return certify && ball_distance(F.point(z), center) > cfg.ball_radius;
  };
  // Largest point of the segment anchor -> z inside the ball.
  auto retract = [&](const VectorXd& z) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (outside(anchor_z + mid * (z - anchor_z))) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return VectorXd(anchor_z + lo * (z - anchor_z));
  };

  VectorXd z(2 * n);
  z << start.x, start.y;
  if (outside(z)) {
    z = retract(z);
    res.ball_active = true;
  }
  double Fz = F.value(z);
  if (!std::isfinite(Fz)) throw DomainError("penalized objective is not finite at the start point");
  VectorXd g = F.gradient(z);
  res.objective_history.push_back(Fz);

  const double gtol = cfg.inner.grad_tol * std::max(1.0, rho);
  double t = 1.0 / std::max(1.0, g.cwiseAbs().maxCoeff());
  res.termination = "max_iters";
  int it = 0;
  for (; it < cfg.inner.max_iters; ++it) {
    if (g.cwiseAbs().maxCoeff() <= gtol) {
      res.termination = "converged";
      break;
    }
    const double gg = g.squaredNorm();
    bool accepted = false;
    VectorXd zt;
    double Ft = 0.0;
    for (int bt = 0; bt < cfg.inner.max_backtracks; ++bt) {
      zt = z - t * g;
      bool retracted = false;
      if (outside(zt)) {
        zt = retract(zt);
        retracted = true;
      }
      Ft = F.value(zt);
      const bool ok = retracted ? Ft < Fz : Ft <= Fz - cfg.inner.c1 * t * gg;
      if (ok) {
        accepted = true;
        res.ball_active = res.ball_active || retracted;
        break;
      }
      t *= cfg.inner.backtrack;
    }
    if (!accepted) {
      res.termination = "line_search_failed";
      break;
    }
    const VectorXd gt = F.gradient(zt);
    const VectorXd s = zt - z;
    const double sy = s.dot(gt - g);
    t = sy > 0 ? s.squaredNorm() / sy : 2.0 * t;
    if (!std::isfinite(t) || t <= 0) t = 1.0;
    z = zt;
    Fz = Ft;
    g = gt;
    res.objective_history.push_back(Fz);
  }
  if (it == cfg.inner.max_iters && g.cwiseAbs().maxCoeff() <= gtol) res.termination = "converged";

  res.point = F.point(z);
  res.iterations = it;
  res.objective = Fz;
  res.phi = infeasibility(rp, res.point);
  res.grad_norm = g.cwiseAbs().maxCoeff();
  return res;
}

MultiplierSet recover_multipliers(const RelaxedProblem& rp, const AugmentedPoint& ap, double rho) {
  if (!(rho > 0)) throw InvalidArgument("rho must be positive");
  check_aug(rp, ap);
  MultiplierSet lam;
  lam.lam_g = rho * plus(rp.base.g_at(ap.x));
  lam.lam_h = rho * rp.base.h_at(ap.x);
  lam.lam_theta = rho * std::max(0.0, rp.theta(ap.y));
  lam.lam_G = rho * (rp.G(ap.x) - ap.wG);
  lam.lam_H = rho * (ap.wH + rp.H(ap.y));
  lam.lam_Htilde = rho * plus(rp.Htilde(ap.y));
  return lam;
}

CertificateSequence solve(const RelaxedProblem& rp, const SolverConfig& cfg,
                          const std::optional<PointXY>& anchor,
                          const std::optional<PointXY>& start) {
  cfg.validate();
  const bool certify = cfg.mode == SolveMode::Certify;
  if (certify) {
    if (!anchor) throw InvalidArgument("certify mode needs an anchor point");
    rp.check_point(*anchor);
    const RelaxedFeasibility feas = is_feasible_relaxed(rp, *anchor, kDefaultZeroTol);
    if (!feas.feasible) {
      throw InfeasiblePoint("anchor is not feasible for the relaxation (max violation " +
                            std::to_string(feas.max_violation) + ")");
    }
  } else if (!start) {
    throw InvalidArgument("explore mode needs a start point");
  }
  const PointXY& s = start ? *start : *anchor;
  rp.check_point(s);

  CertificateSequence seq;
  AugmentedPoint current = with_projected_w(s.x, s.y);
  seq.termination = "max_outer";
  double rho = cfg.rho0;
  for (int k = 1; k <= cfg.max_outer; ++k, rho *= cfg.gamma) {
    const InnerResult inner = inner_solve(rp, cfg, rho, anchor, current);
    current = inner.point;
    CertificateIterate ci;
    ci.point = inner.point;
    ci.phi = inner.phi;
    ci.inner_iterations = inner.iterations;
    ci.inner_termination = inner.termination;
    ci.ball_active = inner.ball_active;
    ci.iterate.point = {inner.point.x, inner.point.y};
    ci.iterate.k = k;
    ci.iterate.rho = rho;
    const MultiplierSet lam = recover_multipliers(rp, inner.point, rho);
    ci.iterate.multipliers = lam;
    ci.aw = aw_residual(rp, ci.iterate.point, lam);
    seq.residual_history.push_back(ci.aw.overall);
    seq.ball_ever_active = seq.ball_ever_active || inner.ball_active;
    seq.iterates.push_back(std::move(ci));
    if (seq.residual_history.back() <= cfg.aw_tol) {
      seq.termination = "aw_tol_reached";
      seq.reached_tol = true;
      break;
    }
  }
  return seq;
}

}  // namespace mpcac
