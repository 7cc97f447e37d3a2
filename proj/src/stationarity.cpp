#include "mpcac/stationarity.hpp"

#include <algorithm>
#include <cmath>

#include "mpcac/errors.hpp"
#include "mpcac/sign_lsq.hpp"

namespace mpcac {

namespace {

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// || min{-c, mu} ||_inf
double min_item(const VectorXd& c, const VectorXd& mu) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) r = std::max(r, std::abs(std::min(-c[i], mu[i])));
  return r;
}

double min_item(double c, double mu) { return std::abs(std::min(-c, mu)); }

double product_item(const VectorXd& c, const VectorXd& mu) {
  return inf_norm(c.cwiseProduct(mu));
}

void check_len(const VectorXd& v, int len, const char* name) {
  if (v.size() != len) {
    throw InvalidArgument(std::string(name) + " must have length " + std::to_string(len));
  }
  if (!v.allFinite()) throw InvalidArgument(std::string(name) + " has nonfinite entries");
}

void check_nonneg(const VectorXd& v, const char* name) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) {
      throw InvalidArgument(std::string(name) + "[" + std::to_string(i + 1) +
                            "] violates its sign constraint (must be >= 0)");
    }
  }
}

struct Layout {
  int m, p, n;
  int g() const { return 0; }
  int h() const { return m; }
  int theta() const { return m + p; }
  int a() const { return m + p + 1; }      // lam_G or mu_H
  int b() const { return m + p + 1 + n; }  // lam_H or mu_Htilde
  int c() const { return m + p + 1 + 2 * n; }  // lam_Htilde or mu_xi
  int size() const { return m + p + 1 + 3 * n; }
};

Layout layout_of(const RelaxedProblem& rp) { return {rp.base.m(), rp.base.p(), rp.n()}; }

// Columns shared by both views: g, h in the x rows and theta in the y rows.
Eigen::MatrixXd base_matrix(const RelaxedProblem& rp, const PointXY& pt, const Layout& L) {
  const int n = L.n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, L.size());
  if (L.m > 0) A.block(0, L.g(), n, L.m) = rp.base.jac_g(pt.x).transpose();
  if (L.p > 0) A.block(0, L.h(), n, L.p) = rp.base.jac_h(pt.x).transpose();
  A.block(n, L.theta(), n, 1).setConstant(-1.0);
  return A;
}

Eigen::VectorXd rhs(const RelaxedProblem& rp, const PointXY& pt) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * rp.n());
  b.head(rp.n()) = -rp.base.f.grad_at(pt.x);
  return b;
}

std::vector<VarSign> base_signs(const Layout& L) {
  std::vector<VarSign> s(static_cast<std::size_t>(L.size()), VarSign::Free);
  for (int i = 0; i < L.m; ++i) s[static_cast<std::size_t>(L.g() + i)] = VarSign::Nonneg;
  s[static_cast<std::size_t>(L.theta())] = VarSign::Nonneg;
  return s;
}

MultiplierSet unpack_aw(const Eigen::VectorXd& z, const Layout& L) {
  MultiplierSet lam;
  lam.lam_g = z.segment(L.g(), L.m);
  lam.lam_h = z.segment(L.h(), L.p);
  lam.lam_theta = z[L.theta()];
  lam.lam_G = z.segment(L.a(), L.n);
  lam.lam_H = z.segment(L.b(), L.n);
  lam.lam_Htilde = z.segment(L.c(), L.n);
  return lam;
}

Eigen::MatrixXd aw_matrix(const RelaxedProblem& rp, const PointXY& pt, const Layout& L) {
  Eigen::MatrixXd A = base_matrix(rp, pt, L);
  const int n = L.n;
  A.block(0, L.a(), n, n).setIdentity();
  A.block(n, L.b(), n, n) = -Eigen::MatrixXd::Identity(n, n);
  A.block(n, L.c(), n, n).setIdentity();
  return A;
}

}  // namespace

MultiplierSet MultiplierSet::zeros(const RelaxedProblem& rp) {
  const int n = rp.n();
  return {VectorXd::Zero(rp.base.m()), VectorXd::Zero(rp.base.p()), 0.0,
          VectorXd::Zero(n),           VectorXd::Zero(n),           VectorXd::Zero(n)};
}

NlpMultiplierSet NlpMultiplierSet::zeros(const RelaxedProblem& rp) {
  const int n = rp.n();
  return {VectorXd::Zero(rp.base.m()), VectorXd::Zero(rp.base.p()), 0.0,
          VectorXd::Zero(n),           VectorXd::Zero(n),           VectorXd::Zero(n)};
}

void validate(const RelaxedProblem& rp, const MultiplierSet& lam) {
  check_len(lam.lam_g, rp.base.m(), "lam_g");
  check_len(lam.lam_h, rp.base.p(), "lam_h");
  check_len(lam.lam_G, rp.n(), "lam_G");
  check_len(lam.lam_H, rp.n(), "lam_H");
  check_len(lam.lam_Htilde, rp.n(), "lam_Htilde");
  if (!std::isfinite(lam.lam_theta)) throw InvalidArgument("lam_theta is not finite");
  check_nonneg(lam.lam_g, "lam_g");
  check_nonneg(lam.lam_Htilde, "lam_Htilde");
  if (lam.lam_theta < 0) throw InvalidArgument("lam_theta violates its sign constraint (must be >= 0)");
}

void validate(const RelaxedProblem& rp, const NlpMultiplierSet& mu) {
  check_len(mu.mu_g, rp.base.m(), "mu_g");
  check_len(mu.mu_h, rp.base.p(), "mu_h");
  check_len(mu.mu_H, rp.n(), "mu_H");
  check_len(mu.mu_Htilde, rp.n(), "mu_Htilde");
  check_len(mu.mu_xi, rp.n(), "mu_xi");
  if (!std::isfinite(mu.mu_theta)) throw InvalidArgument("mu_theta is not finite");
  check_nonneg(mu.mu_g, "mu_g");
  check_nonneg(mu.mu_H, "mu_H");
  check_nonneg(mu.mu_Htilde, "mu_Htilde");
  if (mu.mu_theta < 0) throw InvalidArgument("mu_theta violates its sign constraint (must be >= 0)");
}

void ResidualReport::add(std::string name, double value) {
  value = std::abs(value);
  overall = items.empty() ? value : std::max(overall, value);
  items.emplace_back(std::move(name), value);
}

double ResidualReport::item(const std::string& name) const {
  for (const auto& [k, v] : items) {
    if (k == name) return v;
  }
  throw InvalidArgument("report has no item '" + name + "'");
}

VectorXd aw_lagrangian_gradient(const RelaxedProblem& rp, const PointXY& pt,
                                const MultiplierSet& lam) {
  const int n = rp.n();
  VectorXd grad(2 * n);
  VectorXd gx = rp.base.f.grad_at(pt.x);
  if (rp.base.m() > 0) gx += rp.base.jac_g(pt.x).transpose() * lam.lam_g;
  if (rp.base.p() > 0) gx += rp.base.jac_h(pt.x).transpose() * lam.lam_h;
  gx += lam.lam_G;
  grad.head(n) = gx;
  grad.tail(n) = -lam.lam_theta * VectorXd::Ones(n) - lam.lam_H + lam.lam_Htilde;
  return grad;
}

VectorXd nlp_lagrangian_gradient(const RelaxedProblem& rp, const PointXY& pt,
                                 const NlpMultiplierSet& mu) {
  const int n = rp.n();
  VectorXd grad(2 * n);
  VectorXd gx = rp.base.f.grad_at(pt.x);
  if (rp.base.m() > 0) gx += rp.base.jac_g(pt.x).transpose() * mu.mu_g;
  if (rp.base.p() > 0) gx += rp.base.jac_h(pt.x).transpose() * mu.mu_h;
  gx += mu.mu_xi.cwiseProduct(rp.H(pt.y));
  grad.head(n) = gx;
  grad.tail(n) = -mu.mu_theta * VectorXd::Ones(n) - mu.mu_H + mu.mu_Htilde -
                 mu.mu_xi.cwiseProduct(rp.G(pt.x));
  return grad;
}

ResidualReport aw_residual(const RelaxedProblem& rp, const PointXY& pt, const MultiplierSet& lam) {
  rp.check_point(pt);
  validate(rp, lam);
  ResidualReport r;
  r.condition = "aw";
  r.add("item2_stationarity", inf_norm(aw_lagrangian_gradient(rp, pt, lam)));
  r.add("item3_g", min_item(rp.base.g_at(pt.x), lam.lam_g));
  r.add("item4_theta", min_item(rp.theta(pt.y), lam.lam_theta));
  const VectorXd G = rp.G(pt.x);
  const VectorXd H = rp.H(pt.y);
  double item5 = 0.0, item6 = 0.0;
  for (int i = 0; i < rp.n(); ++i) {
    item5 = std::max(item5, std::min(std::abs(G[i]), std::abs(lam.lam_G[i])));
    item6 = std::max(item6, std::abs(std::min(-H[i], std::abs(lam.lam_H[i]))));
  }
  r.add("item5_G", item5);
  r.add("item6_H", item6);
  r.add("item7_Htilde", min_item(rp.Htilde(pt.y), lam.lam_Htilde));
  return r;
}

FitResult<MultiplierSet> fit_aw_multipliers(const RelaxedProblem& rp, const PointXY& pt,
                                           double pin_tol) {
  if (!(pin_tol > 0)) throw InvalidArgument("pin_tol must be positive");
  rp.check_point(pt);
  const Layout L = layout_of(rp);
  const Eigen::MatrixXd A = aw_matrix(rp, pt, L);
  std::vector<VarSign> s = base_signs(L);
  const VectorXd g = rp.base.g_at(pt.x);
  for (int i = 0; i < L.m; ++i)
    if (std::abs(g[i]) > pin_tol) s[static_cast<std::size_t>(L.g() + i)] = VarSign::Zero;
  if (-rp.theta(pt.y) > pin_tol) s[static_cast<std::size_t>(L.theta())] = VarSign::Zero;
  const VectorXd Ht = rp.Htilde(pt.y);
  for (int i = 0; i < L.n; ++i) {
    if (std::abs(pt.x[i]) > pin_tol) s[static_cast<std::size_t>(L.a() + i)] = VarSign::Zero;
    if (pt.y[i] > pin_tol) s[static_cast<std::size_t>(L.b() + i)] = VarSign::Zero;
    s[static_cast<std::size_t>(L.c() + i)] = -Ht[i] > pin_tol ? VarSign::Zero : VarSign::Nonneg;
  }
  const SignLsqResult fit = sign_lsq(A, rhs(rp, pt), s);
  FitResult<MultiplierSet> out{unpack_aw(fit.z, L), {}};
  out.report = aw_residual(rp, pt, out.multipliers);
  return out;
}

ResidualReport wi_residual(const RelaxedProblem& rp, const PointXY& pt,
                           const IndexPartition& part, const std::vector<int>& I,
                           const MultiplierSet& lam) {
  rp.check_point(pt);
  validate(rp, lam);
  if (part.n != rp.n()) throw InvalidArgument("partition dimension does not match problem");
  validate_index_set(part, I);
  for (int i = 0; i < rp.n(); ++i) {
    if (lam.lam_G[i] != 0.0 && !std::binary_search(I.begin(), I.end(), i)) {
      throw InvalidArgument("lam_G[" + std::to_string(i + 1) +
                            "] must be zero outside the index set");
    }
  }
  ResidualReport r;
  r.condition = "wi";
  r.add("item1_stationarity", inf_norm(aw_lagrangian_gradient(rp, pt, lam)));
  r.add("item2_g", lam.lam_g.dot(rp.base.g_at(pt.x)));
  r.add("item3_theta", lam.lam_theta * rp.theta(pt.y));
  double item4 = 0.0;
  for (int i : part.i0gt) item4 = std::max(item4, std::abs(lam.lam_H[i]));
  r.add("item4_H", item4);
  r.add("item5_Htilde", lam.lam_Htilde.dot(rp.Htilde(pt.y)));
  return r;
}

FitResult<MultiplierSet> fit_wi_multipliers(const RelaxedProblem& rp, const PointXY& pt,
                                           const IndexPartition& part,
                                           const std::vector<int>& I) {
  rp.check_point(pt);
  if (part.n != rp.n()) throw InvalidArgument("partition dimension does not match problem");
  validate_index_set(part, I);
  const double tol = part.zero_tol;
  const Layout L = layout_of(rp);
  const Eigen::MatrixXd A = aw_matrix(rp, pt, L);
  std::vector<VarSign> s = base_signs(L);
  const VectorXd g = rp.base.g_at(pt.x);
  for (int i = 0; i < L.m; ++i)
    if (std::abs(g[i]) > tol) s[static_cast<std::size_t>(L.g() + i)] = VarSign::Zero;
  if (std::abs(rp.theta(pt.y)) > tol) s[static_cast<std::size_t>(L.theta())] = VarSign::Zero;
  const VectorXd Ht = rp.Htilde(pt.y);
  for (int i = 0; i < L.n; ++i) {
    if (!std::binary_search(I.begin(), I.end(), i)) s[static_cast<std::size_t>(L.a() + i)] = VarSign::Zero;
    s[static_cast<std::size_t>(L.c() + i)] = std::abs(Ht[i]) > tol ? VarSign::Zero : VarSign::Nonneg;
  }
  for (int i : part.i0gt) s[static_cast<std::size_t>(L.b() + i)] = VarSign::Zero;
  const SignLsqResult fit = sign_lsq(A, rhs(rp, pt), s);
  FitResult<MultiplierSet> out{unpack_aw(fit.z, L), {}};
  out.report = wi_residual(rp, pt, part, I, out.multipliers);
  return out;
}

ResidualReport akkt_residual(const RelaxedProblem& rp, const PointXY& pt,
                             const NlpMultiplierSet& mu) {
  rp.check_point(pt);
  validate(rp, mu);
  ResidualReport r;
  r.condition = "akkt";
  r.add("stationarity", inf_norm(nlp_lagrangian_gradient(rp, pt, mu)));
  r.add("g", min_item(rp.base.g_at(pt.x), mu.mu_g));
  r.add("theta", min_item(rp.theta(pt.y), mu.mu_theta));
  r.add("H", min_item(rp.H(pt.y), mu.mu_H));
  r.add("Htilde", min_item(rp.Htilde(pt.y), mu.mu_Htilde));
  return r;
}

ResidualReport cakkt_residual(const RelaxedProblem& rp, const PointXY& pt,
                              const NlpMultiplierSet& mu) {
  rp.check_point(pt);
  validate(rp, mu);
  ResidualReport r;
  r.condition = "cakkt";
  r.add("stationarity", inf_norm(nlp_lagrangian_gradient(rp, pt, mu)));
  r.add("g", product_item(rp.base.g_at(pt.x), mu.mu_g));
  r.add("h", product_item(rp.base.h_at(pt.x), mu.mu_h));
  r.add("theta", rp.theta(pt.y) * mu.mu_theta);
  r.add("H", product_item(rp.H(pt.y), mu.mu_H));
  r.add("Htilde", product_item(rp.Htilde(pt.y), mu.mu_Htilde));
  r.add("xi", product_item(rp.xi(pt.x, pt.y), mu.mu_xi));
  return r;
}

FitResult<NlpMultiplierSet> fit_nlp_multipliers(const RelaxedProblem& rp, const PointXY& pt,
                                               double pin_tol, bool complementary) {
  if (!(pin_tol > 0)) throw InvalidArgument("pin_tol must be positive");
  rp.check_point(pt);
  const Layout L = layout_of(rp);
  const int n = L.n;
  Eigen::MatrixXd A = base_matrix(rp, pt, L);
  A.block(n, L.a(), n, n) = -Eigen::MatrixXd::Identity(n, n);
  A.block(n, L.b(), n, n).setIdentity();
  A.block(0, L.c(), n, n) = rp.H(pt.y).asDiagonal();
  A.block(n, L.c(), n, n) = (-rp.G(pt.x)).asDiagonal();

  std::vector<VarSign> s = base_signs(L);
  const VectorXd g = rp.base.g_at(pt.x);
  for (int i = 0; i < L.m; ++i)
    if (std::abs(g[i]) > pin_tol) s[static_cast<std::size_t>(L.g() + i)] = VarSign::Zero;
  if (-rp.theta(pt.y) > pin_tol) s[static_cast<std::size_t>(L.theta())] = VarSign::Zero;
  const VectorXd Ht = rp.Htilde(pt.y);
  const VectorXd xi = rp.xi(pt.x, pt.y);
  for (int i = 0; i < n; ++i) {
    s[static_cast<std::size_t>(L.a() + i)] = pt.y[i] > pin_tol ? VarSign::Zero : VarSign::Nonneg;
    s[static_cast<std::size_t>(L.b() + i)] = -Ht[i] > pin_tol ? VarSign::Zero : VarSign::Nonneg;
    if (complementary && std::abs(xi[i]) > pin_tol) s[static_cast<std::size_t>(L.c() + i)] = VarSign::Zero;
  }
  if (complementary) {
    const VectorXd h = rp.base.h_at(pt.x);
    for (int j = 0; j < L.p; ++j)
      if (std::abs(h[j]) > pin_tol) s[static_cast<std::size_t>(L.h() + j)] = VarSign::Zero;
  }
  const SignLsqResult fit = sign_lsq(A, rhs(rp, pt), s);
  NlpMultiplierSet mu;
  mu.mu_g = fit.z.segment(L.g(), L.m);
  mu.mu_h = fit.z.segment(L.h(), L.p);
  mu.mu_theta = fit.z[L.theta()];
  mu.mu_H = fit.z.segment(L.a(), n);
  mu.mu_Htilde = fit.z.segment(L.b(), n);
  mu.mu_xi = fit.z.segment(L.c(), n);
  FitResult<NlpMultiplierSet> out{mu, {}};
  out.report = complementary ? cakkt_residual(rp, pt, mu) : akkt_residual(rp, pt, mu);
  return out;
}

WitnessIterate akkt_witness(const RelaxedProblem& rp, const PointXY& pt, long long k, double tol) {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  rp.check_point(pt);
  const RelaxedFeasibility feas = is_feasible_relaxed(rp, pt, tol);
  if (!feas.feasible) {
    throw InfeasiblePoint("point is not feasible for the relaxation (max violation " +
                       std::to_string(feas.max_violation) + ")");
  }
  const IndexPartition part = classify_indices(pt, tol);
  const VectorXd b = rp.base.f.grad_at(pt.x);
  const double kk = static_cast<double>(k);

  WitnessIterate it;
  it.k = k;
  it.point.x = pt.x;
  it.point.y = pt.y;
  NlpMultiplierSet mu = NlpMultiplierSet::zeros(rp);
  for (int i : part.i0gt) mu.mu_xi[i] = b[i] / pt.y[i];
  for (int i : part.i00) {
    it.point.y[i] = b[i] / kk;
    mu.mu_xi[i] = kk;
  }
  for (int i : part.i_pm0) {
    const double sgn = pt.x[i] > 0 ? 1.0 : -1.0;
    it.point.y[i] = -sgn * b[i] / kk;
    mu.mu_xi[i] = -sgn * kk;
    mu.mu_H[i] = -mu.mu_xi[i] * pt.x[i];
  }
  it.multipliers = mu;
  return it;
}

PakktReport pakkt_check(const RelaxedProblem& rp, const std::vector<WitnessIterate>& iterates,
                         double tol) {
  if (iterates.size() < 2) throw InvalidArgument("pakkt_check needs at least two iterates");
  struct Family {
    const char* name;
    std::vector<VectorXd> mu;  // per iterate
    std::vector<VectorXd> c;
  };
  std::vector<Family> fam = {{"g", {}, {}},      {"h", {}, {}},      {"theta", {}, {}},
                             {"H", {}, {}},      {"Htilde", {}, {}}, {"xi", {}, {}}};
  PakktReport out;
  for (const auto& it : iterates) {
    const auto* mu = std::get_if<NlpMultiplierSet>(&it.multipliers);
    if (!mu) throw InvalidArgument("pakkt_check needs NLP multipliers (mu_*) on every iterate");
    rp.check_point(it.point);
    validate(rp, *mu);
    const PointXY& pt = it.point;
    const VectorXd vals[6] = {rp.base.g_at(pt.x), rp.base.h_at(pt.x),
                              VectorXd::Constant(1, rp.theta(pt.y)), rp.H(pt.y),
                              rp.Htilde(pt.y), rp.xi(pt.x, pt.y)};
    const VectorXd mus[6] = {mu->mu_g, mu->mu_h, VectorXd::Constant(1, mu->mu_theta),
                             mu->mu_H, mu->mu_Htilde, mu->mu_xi};
    double delta = 1.0;
    for (int f = 0; f < 6; ++f) {
      fam[static_cast<std::size_t>(f)].mu.push_back(mus[f]);
      fam[static_cast<std::size_t>(f)].c.push_back(vals[f]);
      if (mus[f].size() > 0) delta = std::max(delta, mus[f].cwiseAbs().maxCoeff());
    }
    out.delta.push_back(delta);
  }

  const std::size_t K = iterates.size();
  out.tail_begin = K / 2;
  bool signs_ok = true;
  for (const auto& f : fam) {
    const Eigen::Index len = f.mu.front().size();
    for (Eigen::Index i = 0; i < len; ++i) {
      PakktSign s;
      s.family = f.name;
      s.index = static_cast<int>(i);
      for (std::size_t k = out.tail_begin; k < K; ++k) {
        s.limsup_ratio = std::max(s.limsup_ratio, std::abs(f.mu[k][i]) / out.delta[k]);
      }
      s.required = s.limsup_ratio > tol;
      if (s.required) {
        for (std::size_t k = out.tail_begin; k < K; ++k) {
          if (!(f.mu[k][i] * f.c[k][i] > 0.0)) s.satisfied = false;
        }
      }
      signs_ok = signs_ok && s.satisfied;
      out.signs.push_back(s);
    }
  }
  const auto& last = iterates.back();
  out.report = akkt_residual(rp, last.point, std::get<NlpMultiplierSet>(last.multipliers));
  out.report.condition = "pakkt";
  out.pass = signs_ok && out.report.pass(tol);
  return out;
}

WitnessIterate cakkt_to_aw(const RelaxedProblem& rp, const WitnessIterate& it) {
  const auto* mu = std::get_if<NlpMultiplierSet>(&it.multipliers);
  if (!mu) throw InvalidArgument("cakkt_to_aw needs NLP multipliers");
  rp.check_point(it.point);
  validate(rp, *mu);
  MultiplierSet lam;
  lam.lam_g = mu->mu_g;
  lam.lam_h = mu->mu_h;
  lam.lam_theta = mu->mu_theta;
  lam.lam_Htilde = mu->mu_Htilde;
  lam.lam_H = mu->mu_H + mu->mu_xi.cwiseProduct(rp.G(it.point.x));
  lam.lam_G = mu->mu_xi.cwiseProduct(rp.H(it.point.y));
  WitnessIterate out = it;
  out.multipliers = lam;
  return out;
}

WitnessIterate tnlp_akkt_maps(const RelaxedProblem& rp, const IndexPartition& part,
                              const WitnessIterate& it, TnlpDirection dir) {
  const auto* lam_in = std::get_if<MultiplierSet>(&it.multipliers);
  if (!lam_in) throw InvalidArgument("tnlp maps need lam_* multipliers");
  if (part.n != rp.n()) throw InvalidArgument("partition dimension does not match problem");
  validate(rp, *lam_in);
  MultiplierSet lam = *lam_in;
  for (int i = 0; i < rp.n(); ++i) {
    if (!std::binary_search(part.i0.begin(), part.i0.end(), i)) lam.lam_G[i] = 0.0;
  }
  if (dir == TnlpDirection::Forward) {
    for (int i : part.i0gt) lam.lam_H[i] = 0.0;
  }
  WitnessIterate out = it;
  out.multipliers = lam;
  return out;
}

ResidualReport tnlp_akkt_residual(const RelaxedProblem& rp, const IndexPartition& part,
                                  const PointXY& pt, const MultiplierSet& lam) {
  rp.check_point(pt);
  validate(rp, lam);
  if (part.n != rp.n()) throw InvalidArgument("partition dimension does not match problem");
  MultiplierSet restricted = lam;
  for (int i = 0; i < rp.n(); ++i) {
    if (!std::binary_search(part.i0.begin(), part.i0.end(), i)) restricted.lam_G[i] = 0.0;
  }
  double h_item = 0.0;
  const VectorXd H = rp.H(pt.y);
  for (int i : part.i0gt) {
    if (lam.lam_H[i] < 0.0) {
      throw InvalidArgument("lam_H[" + std::to_string(i + 1) +
                            "] multiplies an inequality of the tightened problem and must be >= 0");
    }
    h_item = std::max(h_item, std::abs(std::min(-H[i], lam.lam_H[i])));
  }
  ResidualReport r;
  r.condition = "tnlp_akkt";
  r.add("stationarity", inf_norm(aw_lagrangian_gradient(rp, pt, restricted)));
  r.add("g", min_item(rp.base.g_at(pt.x), lam.lam_g));
  r.add("theta", min_item(rp.theta(pt.y), lam.lam_theta));
  r.add("H", h_item);
  r.add("Htilde", min_item(rp.Htilde(pt.y), lam.lam_Htilde));
  return r;
}

SequenceVerdict sequence_verdict(const std::vector<double>& residuals, double tol) {
  if (residuals.empty()) throw InvalidArgument("sequence is empty");
  SequenceVerdict v;
  v.history = residuals;
  v.final_residual = residuals.back();
  v.tail_nonincreasing = true;
  for (std::size_t k = residuals.size() / 2 + 1; k < residuals.size(); ++k) {
    if (residuals[k] > residuals[k - 1] * (1.0 + 1e-9) + 1e-300) v.tail_nonincreasing = false;
  }
  v.pass = v.final_residual <= tol && v.tail_nonincreasing;
  return v;
}

}  // namespace mpcac
