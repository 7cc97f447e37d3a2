#include "mpcac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mpcac/errors.hpp"

namespace mpcac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kViolationFloor = 1e-15;

// max(g+, |h|), or +inf outside the constraint domain.
double violation(const MpcacProblem& p, const VectorXd& x) {
  try {
    double v = 0.0;
    for (const auto& g : p.g) v = std::max(v, g(x));
    for (const auto& h : p.h) v = std::max(v, std::abs(h(x)));
    return std::isfinite(v) ? v : kInf;
  } catch (const DomainError&) {
    return kInf;
  }
}

double objective(const MpcacProblem& p, const VectorXd& x) {
  try {
    const double v = p.f(x);
    return std::isfinite(v) ? v : kInf;
  } catch (const DomainError&) {
    return kInf;
  }
}

struct Candidate {
  VectorXd x;
  double f = kInf;
  double v = kInf;
};

class SupportPolisher {
 public:
  SupportPolisher(const MpcacProblem& p, const OracleConfig& cfg, const std::vector<int>& S)
      : p_(p), cfg_(cfg), S_(S) {}

  Candidate polish(VectorXd x) const {
    const int stages = 4;
    const int per_stage = std::max(1, cfg_.polish_iters / stages);
    double rho = 1e2;
    for (int st = 0; st < stages; ++st, rho *= 1e2) {
      double t = 1.0;
      double P = merit(x, rho);
      double v = violation(p_, x);
      for (int it = 0; it < per_stage && std::isfinite(P); ++it) {
        VectorXd g;
        try {
          g = merit_grad(x, rho);
        } catch (const DomainError&) {
          break;
        }
        bool accepted = false;
        for (int bt = 0; bt < 50; ++bt) {
          const VectorXd xt = project(x - t * g);
          const VectorXd step = xt - x;
          if (step.cwiseAbs().maxCoeff() == 0.0) break;
          const double Pt = merit(xt, rho);
          const double vt = violation(p_, xt);
          if (Pt <= P + 1e-4 * g.dot(step) && vt <= std::max(v, kViolationFloor)) {
            x = xt;
            P = Pt;
            v = vt;
            accepted = true;
            break;
          }
          t *= 0.5;
        }
        if (!accepted) break;
        t = std::min(2.0 * t, 1e6);
      }
    }
    return {x, objective(p_, x), violation(p_, x)};
  }

 private:
  double merit(const VectorXd& x, double rho) const {
    try {
      double pen = 0.0;
      for (const auto& g : p_.g) pen += std::pow(std::max(0.0, g(x)), 2);
      for (const auto& h : p_.h) pen += std::pow(h(x), 2);
      const double v = p_.f(x) + 0.5 * rho * pen;
      return std::isfinite(v) ? v : kInf;
    } catch (const DomainError&) {
      return kInf;
    }
  }

  VectorXd merit_grad(const VectorXd& x, double rho) const {
    VectorXd full = p_.f.grad_at(x);
    for (const auto& g : p_.g) {
      const double gv = g(x);
      if (gv > 0) full += rho * gv * g.grad_at(x);
    }
    for (const auto& h : p_.h) full += rho * h(x) * h.grad_at(x);
    VectorXd out = VectorXd::Zero(x.size());
    for (int i : S_) out[i] = full[i];
    return out;
  }

  VectorXd project(VectorXd x) const {
    for (int i : S_) x[i] = std::clamp(x[i], cfg_.box.lo[i], cfg_.box.hi[i]);
    return x;
  }

  const MpcacProblem& p_;
  const OracleConfig& cfg_;
  const std::vector<int>& S_;
};

bool better(const Candidate& a, const std::vector<int>& sa, const Candidate& b,
            const std::vector<int>& sb) {
  if (a.f < b.f - 1e-12) return true;
  if (std::abs(a.f - b.f) <= 1e-12) return sa < sb;
  return false;
}

// Outward descent that persists past the box while staying feasible.
bool unbounded_along_boundary(const MpcacProblem& p, const OracleConfig& cfg,
                              const Candidate& best, const std::vector<int>& S) {
  const VectorXd grad = p.f.grad_at(best.x);
  for (int i : S) {
    const double lo = cfg.box.lo[i], hi = cfg.box.hi[i];
    const double w = hi - lo;
    int dir = 0;
    if (std::abs(best.x[i] - lo) <= 1e-9 * w && grad[i] > 0) dir = -1;
    if (std::abs(best.x[i] - hi) <= 1e-9 * w && grad[i] < 0) dir = +1;
    if (dir == 0) continue;
    double prev = best.f;
    bool decreasing = true;
    for (double c : {1.0, 2.0, 4.0, 8.0}) {
      VectorXd x = best.x;
      x[i] += dir * c * w;
      const double fv = objective(p, x);
      if (!(violation(p, x) <= cfg.feas_tol) || !(fv < prev)) {
        decreasing = false;
        break;
      }
      prev = fv;
    }
    if (decreasing) return true;
  }
  return false;
}

}  // namespace

void OracleConfig::validate(int n) const {
  if (box.lo.size() != n || box.hi.size() != n) {
    throw InvalidArgument("box bounds must have length " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    if (!(box.lo[i] < box.hi[i]) || !std::isfinite(box.lo[i]) || !std::isfinite(box.hi[i])) {
      throw InvalidArgument("box needs finite lo < hi in every component");
    }
  }
  if (grid < 3) throw InvalidArgument("grid must be at least 3");
  if (multistart < 0) throw InvalidArgument("multistart must be nonnegative");
  if (polish_iters < 0) throw InvalidArgument("polish_iters must be nonnegative");
  if (!(feas_tol >= 0)) throw InvalidArgument("feas_tol must be nonnegative");
  if (max_grid_points < 1) throw InvalidArgument("max_grid_points must be positive");
}

OracleConfig default_oracle_config(const MpcacProblem& p) {
  if (!p.box) throw SchemaError("problem has no box; the oracle needs one");
  OracleConfig cfg;
  cfg.box = *p.box;
  return cfg;
}

const char* to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::Bounded: return "bounded";
    case OracleStatus::SuspectedUnbounded: return "suspected-unbounded";
    case OracleStatus::InfeasibleAtResolution: return "infeasible-at-resolution";
  }
  return "?";
}

OracleResult support_enumerate_solve(const MpcacProblem& p, const OracleConfig& cfg) {
  const int n = p.n;
  if (n > kOracleMaxDimension) {
    throw LimitExceeded("oracle enumeration is capped at n = " +
                        std::to_string(kOracleMaxDimension));
  }
  cfg.validate(n);

  OracleResult res;
  Candidate best;
  std::vector<int> best_S;
  long long support_index = 0;

  for (int size = 0; size <= p.alpha; ++size) {
    // Supports of this size in lexicographic order.
    std::vector<int> S(static_cast<std::size_t>(size));
    for (int j = 0; j < size; ++j) S[static_cast<std::size_t>(j)] = j;
    for (;;) {
      ++res.supports_checked;
      const SupportPolisher polisher(p, cfg, S);

      long long per_axis = cfg.grid;
      if (size > 0) {
        while (per_axis > 3 && std::pow(static_cast<double>(per_axis), size) >
                                   static_cast<double>(cfg.max_grid_points)) {
          --per_axis;
        }
      }
      const auto K = static_cast<std::size_t>(cfg.multistart);
      std::vector<Candidate> seeds;  // sorted by merit
      auto merit = [](const Candidate& c) {
        return c.v <= 0 ? c.f : c.f + 1e6 * c.v;
      };
      auto consider = [&](Candidate c) {
        if (c.v <= cfg.feas_tol && better(c, S, best, best_S)) {
          best = c;
          best_S = S;
        }
        if (K == 0 || !std::isfinite(merit(c))) return;
        auto pos = std::upper_bound(seeds.begin(), seeds.end(), c, [&](const Candidate& a, const Candidate& b) {
          return merit(a) < merit(b);
        });
        if (static_cast<std::size_t>(pos - seeds.begin()) >= K) return;
        seeds.insert(pos, std::move(c));
        if (seeds.size() > K) seeds.pop_back();
      };

      std::vector<long long> idx(static_cast<std::size_t>(size), 0);
      for (;;) {
        VectorXd x = VectorXd::Zero(n);
        for (int j = 0; j < size; ++j) {
          const int i = S[static_cast<std::size_t>(j)];
          const double frac = static_cast<double>(idx[static_cast<std::size_t>(j)]) /
                              static_cast<double>(per_axis - 1);
          x[i] = cfg.box.lo[i] + (cfg.box.hi[i] - cfg.box.lo[i]) * frac;
        }
        Candidate c{x, objective(p, x), violation(p, x)};
        consider(std::move(c));
        int j = 0;
        while (j < size && ++idx[static_cast<std::size_t>(j)] == per_axis) {
          idx[static_cast<std::size_t>(j)] = 0;
          ++j;
        }
        if (j == size) break;
      }

      if (size > 0) {
        std::vector<Candidate> starts = seeds;
        std::mt19937_64 rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(support_index + 1)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int r = 0; r < cfg.multistart; ++r) {
          VectorXd x = VectorXd::Zero(n);
          for (int i : S) x[i] = cfg.box.lo[i] + (cfg.box.hi[i] - cfg.box.lo[i]) * unit(rng);
          starts.push_back({x, objective(p, x), violation(p, x)});
        }
        for (const auto& s : starts) {
          if (!std::isfinite(s.f)) continue;
          Candidate c = polisher.polish(s.x);
          if (c.v <= cfg.feas_tol && better(c, S, best, best_S)) {
            best = c;
            best_S = S;
          }
        }
      }
      ++support_index;

      // Next combination.
      int j = size - 1;
      while (j >= 0 && S[static_cast<std::size_t>(j)] == n - size + j) --j;
      if (j < 0) break;
      ++S[static_cast<std::size_t>(j)];
      for (int l = j + 1; l < size; ++l) S[static_cast<std::size_t>(l)] = S[static_cast<std::size_t>(l - 1)] + 1;
    }
  }

  if (!std::isfinite(best.f)) {
    res.status = OracleStatus::InfeasibleAtResolution;
    return res;
  }
  res.x = best.x;
  res.candidate_value = best.f;
  res.support = best_S;
  res.max_violation = best.v;
  if (unbounded_along_boundary(p, cfg, best, best_S)) {
    res.status = OracleStatus::SuspectedUnbounded;
  } else {
    res.status = OracleStatus::Bounded;
    res.value = best.f;
  }
  return res;
}

WiBruteForce brute_force_wi(const RelaxedProblem& rp, const PointXY& pt,
                            const IndexPartition& part) {
  WiBruteForce out;
  out.best_residual = kInf;
  for (auto& I : enumerate_index_sets(part)) {
    FitResult<MultiplierSet> fit = fit_wi_multipliers(rp, pt, part, I);
    if (fit.report.overall < out.best_residual) {
      out.best_residual = fit.report.overall;
      out.best_I = I;
    }
    out.per_set.emplace_back(std::move(I), std::move(fit));
  }
  return out;
}

}  // namespace mpcac
