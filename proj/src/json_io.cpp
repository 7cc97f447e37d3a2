#include "mpcac/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mpcac/errors.hpp"

namespace mpcac {

namespace {

const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object()) throw SchemaError(std::string(where) + " must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string(where) + " is missing \"" + key + "\"");
  return *it;
}

int require_int(const json& j, const char* key, const char* where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer()) throw SchemaError(std::string(where) + "." + key + " must be an integer");
  return v.get<int>();
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw SchemaError(what + " must be a number");
  return v.get<double>();
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_array()) throw SchemaError(std::string("problem.") + key + " must be an array of strings");
  for (const auto& e : *it) {
    if (!e.is_string()) throw SchemaError(std::string("problem.") + key + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

// Report documents wrap their payload under "results".
const json& unwrap_witness(const json& j) {
  if (j.is_object() && j.contains("results")) {
    const json& r = j["results"];
    if (r.contains("witness")) return r["witness"];
    if (r.contains("certificate") && r["certificate"].contains("iterates") &&
        !r["certificate"]["iterates"].empty()) {
      return r["certificate"]["iterates"].back();
    }
    throw SchemaError("report document holds no witness or certificate");
  }
  return j;
}

VectorXd vec_or_zero(const json& j, const char* key, Eigen::Index len) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return VectorXd::Zero(len);
  VectorXd v = vector_from_json(*it, key);
  if (v.size() != len) {
    throw SchemaError(std::string(key) + " must have length " + std::to_string(len));
  }
  return v;
}

double scalar_or_zero(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return 0.0;
  return number(*it, key);
}

}  // namespace

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

json vector_to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string(what) + " must be an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = number(j[i], std::string(what) + "[" + std::to_string(i) + "]");
  }
  return v;
}

MpcacProblem problem_from_json(const json& j) {
  static const std::set<std::string> known = {"n",   "alpha", "objective", "ineq",       "eq",
                                              "box", "oracle", "name",     "description", "source"};
  if (!j.is_object()) throw SchemaError("problem must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (!known.count(k)) throw SchemaError("problem has unknown key \"" + k + "\"");
  }
  const int n = require_int(j, "n", "problem");
  const int alpha = require_int(j, "alpha", "problem");
  const json& obj = require(j, "objective", "problem");
  if (!obj.is_string()) throw SchemaError("problem.objective must be a string");
  MpcacProblem p = make_problem(n, alpha, obj.get<std::string>(), string_list(j, "ineq"),
                                string_list(j, "eq"));
  if (auto it = j.find("box"); it != j.end()) {
    Box b;
    b.lo = vector_from_json(require(*it, "lo", "problem.box"), "box.lo");
    b.hi = vector_from_json(require(*it, "hi", "problem.box"), "box.hi");
    if (b.lo.size() != n || b.hi.size() != n) {
      throw SchemaError("box.lo and box.hi must have length n");
    }
    p.box = b;
  }
  if (auto it = j.find("name"); it != j.end() && it->is_string()) p.name = it->get<std::string>();
  return p;
}

json problem_to_json(const MpcacProblem& p) {
  json j;
  if (!p.name.empty()) j["name"] = p.name;
  j["n"] = p.n;
  j["alpha"] = p.alpha;
  j["objective"] = p.f.value.to_string();
  j["ineq"] = json::array();
  for (const auto& g : p.g) j["ineq"].push_back(g.value.to_string());
  j["eq"] = json::array();
  for (const auto& h : p.h) j["eq"].push_back(h.value.to_string());
  if (p.box) j["box"] = {{"lo", vector_to_json(p.box->lo)}, {"hi", vector_to_json(p.box->hi)}};
  return j;
}

PointXY point_from_json(const json& doc, const RelaxedProblem& rp, double zero_tol) {
  const json* j = &doc;
  if (doc.is_object() && doc.contains("results")) j = &unwrap_witness(doc)["point"];
  else if (doc.is_object() && doc.contains("point") && !doc.contains("x")) j = &doc["point"];
  PointXY pt;
  pt.x = vector_from_json(require(*j, "x", "point"), "x");
  if (pt.x.size() != rp.n()) throw SchemaError("point.x must have length " + std::to_string(rp.n()));
  if (auto it = j->find("y"); it != j->end() && !it->is_null()) {
    pt.y = vector_from_json(*it, "y");
    if (pt.y.size() != rp.n()) throw SchemaError("point.y must have length " + std::to_string(rp.n()));
  } else {
    pt.y = VectorXd(rp.n());
    for (int i = 0; i < rp.n(); ++i) pt.y[i] = std::abs(pt.x[i]) <= zero_tol ? 1.0 : 0.0;
  }
  return pt;
}

json point_to_json(const PointXY& pt) {
  return {{"x", vector_to_json(pt.x)}, {"y", vector_to_json(pt.y)}};
}

AnyMultipliers multipliers_from_json(const json& doc, const RelaxedProblem& rp) {
  const json* j = &doc;
  if (doc.is_object() && doc.contains("results")) j = &unwrap_witness(doc)["multipliers"];
  else if (doc.is_object() && doc.contains("multipliers")) j = &doc["multipliers"];
  if (!j->is_object()) throw SchemaError("multipliers must be a JSON object");
  bool has_lam = false, has_mu = false;
  static const std::set<std::string> lam_keys = {"lam_g", "lam_h", "lam_theta", "lam_G", "lam_H", "lam_Htilde"};
  static const std::set<std::string> mu_keys = {"mu_g", "mu_h", "mu_theta", "mu_H", "mu_Htilde", "mu_xi"};
  for (const auto& [k, _] : j->items()) {
    if (lam_keys.count(k)) has_lam = true;
    else if (mu_keys.count(k)) has_mu = true;
    else throw SchemaError("multipliers has unknown key \"" + k + "\"");
  }
  if (has_lam && has_mu) throw SchemaError("multipliers mix lam_* and mu_* keys");
  const int n = rp.n();
  if (has_mu) {
    NlpMultiplierSet mu;
    mu.mu_g = vec_or_zero(*j, "mu_g", rp.base.m());
    mu.mu_h = vec_or_zero(*j, "mu_h", rp.base.p());
    mu.mu_theta = scalar_or_zero(*j, "mu_theta");
    mu.mu_H = vec_or_zero(*j, "mu_H", n);
    mu.mu_Htilde = vec_or_zero(*j, "mu_Htilde", n);
    mu.mu_xi = vec_or_zero(*j, "mu_xi", n);
    return mu;
  }
  MultiplierSet lam;
  lam.lam_g = vec_or_zero(*j, "lam_g", rp.base.m());
  lam.lam_h = vec_or_zero(*j, "lam_h", rp.base.p());
  lam.lam_theta = scalar_or_zero(*j, "lam_theta");
  lam.lam_G = vec_or_zero(*j, "lam_G", n);
  lam.lam_H = vec_or_zero(*j, "lam_H", n);
  lam.lam_Htilde = vec_or_zero(*j, "lam_Htilde", n);
  return lam;
}

json multipliers_to_json(const MultiplierSet& lam) {
  return {{"lam_g", vector_to_json(lam.lam_g)},       {"lam_h", vector_to_json(lam.lam_h)},
          {"lam_theta", num(lam.lam_theta)},          {"lam_G", vector_to_json(lam.lam_G)},
          {"lam_H", vector_to_json(lam.lam_H)},       {"lam_Htilde", vector_to_json(lam.lam_Htilde)}};
}

json multipliers_to_json(const NlpMultiplierSet& mu) {
  return {{"mu_g", vector_to_json(mu.mu_g)},         {"mu_h", vector_to_json(mu.mu_h)},
          {"mu_theta", num(mu.mu_theta)},            {"mu_H", vector_to_json(mu.mu_H)},
          {"mu_Htilde", vector_to_json(mu.mu_Htilde)}, {"mu_xi", vector_to_json(mu.mu_xi)}};
}

json multipliers_to_json(const AnyMultipliers& m) {
  return std::visit([](const auto& v) { return multipliers_to_json(v); }, m);
}

json iterate_to_json(const WitnessIterate& it) {
  json j;
  j["k"] = it.k;
  if (it.rho) j["rho"] = num(*it.rho);
  j["point"] = point_to_json(it.point);
  j["multipliers"] = multipliers_to_json(it.multipliers);
  return j;
}

WitnessIterate iterate_from_json(const json& j, const RelaxedProblem& rp) {
  if (!j.is_object()) throw SchemaError("iterate must be a JSON object");
  WitnessIterate it;
  const json& pt = require(j, "point", "iterate");
  it.point.x = vector_from_json(require(pt, "x", "iterate.point"), "x");
  it.point.y = vector_from_json(require(pt, "y", "iterate.point"), "y");
  if (it.point.x.size() != rp.n() || it.point.y.size() != rp.n()) {
    throw SchemaError("iterate point must have x and y of length " + std::to_string(rp.n()));
  }
  it.multipliers = multipliers_from_json(require(j, "multipliers", "iterate"), rp);
  if (auto k = j.find("k"); k != j.end()) {
    if (!k->is_number_integer() || k->get<long long>() < 1) throw SchemaError("iterate.k must be an integer >= 1");
    it.k = k->get<long long>();
  }
  if (auto r = j.find("rho"); r != j.end() && !r->is_null()) it.rho = number(*r, "iterate.rho");
  return it;
}

std::vector<WitnessIterate> sequence_from_json(const json& doc, const RelaxedProblem& rp) {
  const json* arr = &doc;
  if (doc.is_object()) {
    if (doc.contains("results")) {
      const json& r = doc["results"];
      if (r.contains("certificate")) {
        arr = &require(r["certificate"], "iterates", "certificate");
      } else if (r.contains("witness")) {
        return {iterate_from_json(r["witness"], rp)};
      } else if (r.contains("iterates")) {
        arr = &r["iterates"];
      } else {
        throw SchemaError("report document holds no sequence");
      }
    } else {
      arr = &require(doc, "iterates", "sequence");
    }
  }
  if (!arr->is_array()) throw SchemaError("sequence must be an array of iterates");
  std::vector<WitnessIterate> out;
  long long k = 1;
  for (const auto& e : *arr) {
    WitnessIterate it = iterate_from_json(e, rp);
    if (!e.contains("k")) it.k = k;
    ++k;
    out.push_back(std::move(it));
  }
  return out;
}

json report_to_json(const ResidualReport& r, double tol) {
  json items = json::object();
  for (const auto& [k, v] : r.items) items[k] = num(v);
  return {{"condition", r.condition}, {"items", items}, {"overall", num(r.overall)},
          {"pass", r.pass(tol)},      {"tol", tol}};
}

json pakkt_to_json(const PakktReport& r, double tol) {
  json j = report_to_json(r.report, tol);
  j["pass"] = r.pass;
  j["delta_k"] = json::array();
  for (double d : r.delta) j["delta_k"].push_back(num(d));
  j["tail_begin"] = r.tail_begin + 1;
  j["limsup_estimator"] = "max over the last half of the iterates";
  j["sign_conditions"] = json::array();
  for (const auto& s : r.signs) {
    j["sign_conditions"].push_back({{"family", s.family},
                                    {"index", s.index + 1},
                                    {"limsup_ratio", num(s.limsup_ratio)},
                                    {"required", s.required},
                                    {"satisfied", s.satisfied}});
  }
  return j;
}

json verdict_to_json(const SequenceVerdict& v, double tol) {
  json h = json::array();
  for (double r : v.history) h.push_back(num(r));
  return {{"history", h},
          {"final", num(v.final_residual)},
          {"tail_nonincreasing", v.tail_nonincreasing},
          {"pass", v.pass},
          {"tol", tol}};
}

json index_set_to_json(const std::vector<int>& I) {
  json a = json::array();
  for (int i : I) a.push_back(i + 1);
  return a;
}

std::vector<int> index_set_from_json(const json& j, int n) {
  if (!j.is_array()) throw SchemaError("index set must be an array of 1-based indices");
  std::vector<int> I;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw SchemaError("index set entries must be integers");
    const int i = e.get<int>();
    if (i < 1 || i > n) throw SchemaError("index " + std::to_string(i) + " is out of range 1.." + std::to_string(n));
    I.push_back(i - 1);
  }
  std::sort(I.begin(), I.end());
  return I;
}

json partition_to_json(const IndexPartition& part) {
  return {{"zero_tol", part.zero_tol},
          {"I00", index_set_to_json(part.i00)},
          {"Ipm0", index_set_to_json(part.i_pm0)},
          {"I0p", index_set_to_json(part.i0p)},
          {"I01", index_set_to_json(part.i01)},
          {"I0", index_set_to_json(part.i0)},
          {"I0gt", index_set_to_json(part.i0gt)}};
}

SolverConfig solver_config_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("solver config must be a JSON object");
  static const std::set<std::string> known = {"mode", "rho0", "gamma", "max_outer", "ball_radius", "aw_tol", "inner"};
  for (const auto& [k, _] : j.items()) {
    if (!known.count(k)) throw SchemaError("solver config has unknown key \"" + k + "\"");
  }
  SolverConfig cfg;
  if (auto it = j.find("mode"); it != j.end()) {
    const std::string m = it->is_string() ? it->get<std::string>() : "";
    if (m == "certify") cfg.mode = SolveMode::Certify;
    else if (m == "explore") cfg.mode = SolveMode::Explore;
    else throw SchemaError("mode must be \"certify\" or \"explore\"");
  }
  if (j.contains("rho0")) cfg.rho0 = number(j["rho0"], "rho0");
  if (j.contains("gamma")) cfg.gamma = number(j["gamma"], "gamma");
  if (j.contains("max_outer")) {
    if (!j["max_outer"].is_number_integer()) throw SchemaError("max_outer must be an integer");
    cfg.max_outer = j["max_outer"].get<int>();
  }
  if (j.contains("ball_radius")) cfg.ball_radius = number(j["ball_radius"], "ball_radius");
  if (j.contains("aw_tol")) cfg.aw_tol = number(j["aw_tol"], "aw_tol");
  if (auto it = j.find("inner"); it != j.end()) {
    if (!it->is_object()) throw SchemaError("inner must be a JSON object");
    static const std::set<std::string> inner_known = {"max_iters", "grad_tol", "c1", "backtrack", "max_backtracks"};
    for (const auto& [k, v] : it->items()) {
      if (!inner_known.count(k)) throw SchemaError("inner has unknown key \"" + k + "\"");
      if ((k == "max_iters" || k == "max_backtracks") && !v.is_number_integer()) {
        throw SchemaError("inner." + k + " must be an integer");
      }
    }
    if (it->contains("max_iters")) cfg.inner.max_iters = (*it)["max_iters"].get<int>();
    if (it->contains("grad_tol")) cfg.inner.grad_tol = number((*it)["grad_tol"], "inner.grad_tol");
    if (it->contains("c1")) cfg.inner.c1 = number((*it)["c1"], "inner.c1");
    if (it->contains("backtrack")) cfg.inner.backtrack = number((*it)["backtrack"], "inner.backtrack");
    if (it->contains("max_backtracks")) cfg.inner.max_backtracks = (*it)["max_backtracks"].get<int>();
  }
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("solver config: ") + e.what());
  }
  return cfg;
}

json solver_config_to_json(const SolverConfig& cfg) {
  return {{"mode", cfg.mode == SolveMode::Certify ? "certify" : "explore"},
          {"rho0", cfg.rho0},
          {"gamma", cfg.gamma},
          {"max_outer", cfg.max_outer},
          {"ball_radius", cfg.ball_radius},
          {"aw_tol", cfg.aw_tol},
          {"inner",
           {{"max_iters", cfg.inner.max_iters},
            {"grad_tol", cfg.inner.grad_tol},
            {"c1", cfg.inner.c1},
            {"backtrack", cfg.inner.backtrack},
            {"max_backtracks", cfg.inner.max_backtracks}}}};
}

json certificate_to_json(const CertificateSequence& seq) {
  json j;
  j["termination"] = seq.termination;
  j["reached_tol"] = seq.reached_tol;
  j["ball_ever_active"] = seq.ball_ever_active;
  j["residual_history"] = json::array();
  for (double r : seq.residual_history) j["residual_history"].push_back(num(r));
  j["iterates"] = json::array();
  for (const auto& ci : seq.iterates) {
    json it = iterate_to_json(ci.iterate);
    it["w"] = {{"wG", vector_to_json(ci.point.wG)}, {"wH", vector_to_json(ci.point.wH)}};
    it["phi"] = num(ci.phi);
    it["aw"] = report_to_json(ci.aw, 0.0);
    it["aw"].erase("pass");
    it["aw"].erase("tol");
    it["inner"] = {{"iterations", ci.inner_iterations},
                   {"termination", ci.inner_termination},
                   {"ball_active", ci.ball_active}};
    j["iterates"].push_back(std::move(it));
  }
  return j;
}

OracleConfig oracle_config_from_json(const json& doc, const MpcacProblem& p) {
  OracleConfig cfg = default_oracle_config(p);
  if (auto it = doc.find("oracle"); it != doc.end()) {
    const json& o = *it;
    if (!o.is_object()) throw SchemaError("problem.oracle must be a JSON object");
    static const std::set<std::string> known = {"grid", "multistart", "polish_iters", "seed", "feas_tol", "max_grid_points"};
    for (const auto& [k, v] : o.items()) {
      if (!known.count(k)) throw SchemaError("oracle has unknown key \"" + k + "\"");
      if (k != "feas_tol" && !v.is_number_integer()) throw SchemaError("oracle." + k + " must be an integer");
    }
    if (o.contains("grid")) cfg.grid = o["grid"].get<int>();
    if (o.contains("multistart")) cfg.multistart = o["multistart"].get<int>();
    if (o.contains("polish_iters")) cfg.polish_iters = o["polish_iters"].get<int>();
    if (o.contains("seed")) cfg.seed = o["seed"].get<std::uint64_t>();
    if (o.contains("feas_tol")) cfg.feas_tol = number(o["feas_tol"], "oracle.feas_tol");
    if (o.contains("max_grid_points")) cfg.max_grid_points = o["max_grid_points"].get<long long>();
  }
  try {
    cfg.validate(p.n);
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("oracle config: ") + e.what());
  }
  return cfg;
}

json oracle_config_to_json(const OracleConfig& cfg) {
  return {{"box", {{"lo", vector_to_json(cfg.box.lo)}, {"hi", vector_to_json(cfg.box.hi)}}},
          {"grid", cfg.grid},
          {"multistart", cfg.multistart},
          {"polish_iters", cfg.polish_iters},
          {"seed", cfg.seed},
          {"feas_tol", cfg.feas_tol},
          {"max_grid_points", cfg.max_grid_points}};
}

json oracle_result_to_json(const OracleResult& r) {
  json j;
  j["status"] = to_string(r.status);
  j["value"] = r.value ? num(*r.value) : json(nullptr);
  if (r.x.size() > 0) {
    j["x"] = vector_to_json(r.x);
    j["candidate_value"] = num(r.candidate_value);
    j["support"] = index_set_to_json(r.support);
    j["max_violation"] = num(r.max_violation);
  } else {
    j["x"] = nullptr;
  }
  j["supports_checked"] = r.supports_checked;
  return j;
}

json wi_brute_force_to_json(const WiBruteForce& r, double tol) {
  json j;
  j["best_index_set"] = index_set_to_json(r.best_I);
  j["best_residual"] = num(r.best_residual);
  j["pass"] = r.best_residual <= tol;
  j["tol"] = tol;
  j["per_index_set"] = json::array();
  for (const auto& [I, fit] : r.per_set) {
    j["per_index_set"].push_back({{"index_set", index_set_to_json(I)},
                                  {"report", report_to_json(fit.report, tol)},
                                  {"multipliers", multipliers_to_json(fit.multipliers)}});
  }
  return j;
}

}  // namespace mpcac
