#include "mpcac/commands.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>

#include "mpcac/errors.hpp"

namespace mpcac {

namespace {

double get_number(const json& req, const char* key, double fallback) {
  auto it = req.find(key);
  if (it == req.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw SchemaError(std::string(key) + " must be a number");
  return it->get<double>();
}

double require_number(const json& req, const char* key) {
  auto it = req.find(key);
  if (it == req.end() || !it->is_number()) throw SchemaError(std::string("request needs a numeric \"") + key + "\"");
  return it->get<double>();
}

const json* find(const json& req, const char* key) {
  auto it = req.find(key);
  return (it == req.end() || it->is_null()) ? nullptr : &*it;
}

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

json sequence_report(const RelaxedProblem& rp, const std::vector<WitnessIterate>& seq,
                     const std::string& condition, double tol, bool& pass) {
  json per = json::array();
  std::vector<double> history;
  for (const auto& it : seq) {
    ResidualReport r;
    if (condition == "aw") {
      const auto* lam = std::get_if<MultiplierSet>(&it.multipliers);
      if (!lam) throw SchemaError("aw sequences need lam_* multipliers");
      r = aw_residual(rp, it.point, *lam);
    } else {
      const auto* mu = std::get_if<NlpMultiplierSet>(&it.multipliers);
      if (!mu) throw SchemaError(condition + " sequences need mu_* multipliers");
      r = condition == "akkt" ? akkt_residual(rp, it.point, *mu) : cakkt_residual(rp, it.point, *mu);
    }
    history.push_back(r.overall);
    json e = report_to_json(r, tol);
    e["k"] = it.k;
    per.push_back(std::move(e));
  }
  const SequenceVerdict v = sequence_verdict(history, tol);
  pass = v.pass;
  return {{"condition", condition}, {"verdict", verdict_to_json(v, tol)}, {"iterates", per}};
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

ProblemDocument load_problem_document(const std::string& text) {
  ProblemDocument doc;
  doc.source = parse_json(text);
  doc.problem = problem_from_json(doc.source);
  doc.relaxed = build_relaxed(doc.problem);
  doc.digest = sha256_hex(text);
  return doc;
}

CommandResult run_check(const ProblemDocument& doc, const json& req) {
  const RelaxedProblem& rp = doc.relaxed;
  const json* cond = find(req, "condition");
  if (!cond || !cond->is_string()) throw SchemaError("request needs a \"condition\"");
  const std::string c = cond->get<std::string>();
  const double tol = require_number(req, "tol");
  const double pin_tol = get_number(req, "pin_tol", kDefaultPinTol);
  const double zero_tol = get_number(req, "zero_tol", kDefaultZeroTol);
  const json* seq_doc = find(req, "sequence");
  const json* mult_doc = find(req, "multipliers");

  CommandResult out;
  if (c == "pakkt") {
    if (!seq_doc) throw SchemaError("pakkt needs a sequence");
    const PakktReport r = pakkt_check(rp, sequence_from_json(*seq_doc, rp), tol);
    out.results = {{"condition", "pakkt"}, {"report", pakkt_to_json(r, tol)}};
    out.pass = r.pass;
    return out;
  }
  if (c != "aw" && c != "wi" && c != "akkt" && c != "cakkt") {
    throw SchemaError("unknown condition \"" + c + "\" (expected aw, wi, akkt, cakkt or pakkt)");
  }
  if (seq_doc) {
    if (c == "wi") throw SchemaError("wi is a pointwise condition; sequences are not accepted");
    out.results = sequence_report(rp, sequence_from_json(*seq_doc, rp), c, tol, out.pass);
    return out;
  }
  const json* pt_doc = find(req, "point");
  if (!pt_doc) throw SchemaError("request needs a point or a sequence");
  const PointXY pt = point_from_json(*pt_doc, rp, zero_tol);
  out.results["condition"] = c;
  out.results["point"] = point_to_json(pt);

  std::optional<AnyMultipliers> given;
  if (mult_doc) given = multipliers_from_json(*mult_doc, rp);

  if (c == "aw") {
    if (given) {
      const auto* lam = std::get_if<MultiplierSet>(&*given);
      if (!lam) throw SchemaError("aw needs lam_* multipliers");
      const ResidualReport r = aw_residual(rp, pt, *lam);
      out.results["multipliers"] = multipliers_to_json(*lam);
      out.results["fitted"] = false;
      out.results["report"] = report_to_json(r, tol);
      out.pass = r.pass(tol);
    } else {
      const auto fit = fit_aw_multipliers(rp, pt, pin_tol);
      out.results["multipliers"] = multipliers_to_json(fit.multipliers);
      out.results["fitted"] = true;
      out.results["pin_tol"] = pin_tol;
      out.results["report"] = report_to_json(fit.report, tol);
      out.pass = fit.report.pass(tol);
    }
    return out;
  }

  if (c == "wi") {
    const IndexPartition part = classify_indices(pt, zero_tol);
    out.results["partition"] = partition_to_json(part);
    const json* is_doc = find(req, "index_set");
    if (!is_doc && !given) {
      const WiBruteForce bf = brute_force_wi(rp, pt, part);
      out.results["brute_force"] = wi_brute_force_to_json(bf, tol);
      out.results["report"] = nullptr;
      for (const auto& [I, fit] : bf.per_set) {
        if (I == bf.best_I) {
          out.results["index_set"] = index_set_to_json(I);
          out.results["multipliers"] = multipliers_to_json(fit.multipliers);
          out.results["report"] = report_to_json(fit.report, tol);
        }
      }
      out.pass = bf.best_residual <= tol;
      return out;
    }
    const std::vector<int> I = is_doc ? index_set_from_json(*is_doc, rp.n()) : part.i0;
    out.results["index_set"] = index_set_to_json(I);
    if (given) {
      const auto* lam = std::get_if<MultiplierSet>(&*given);
      if (!lam) throw SchemaError("wi needs lam_* multipliers");
      const ResidualReport r = wi_residual(rp, pt, part, I, *lam);
      out.results["multipliers"] = multipliers_to_json(*lam);
      out.results["fitted"] = false;
      out.results["report"] = report_to_json(r, tol);
      out.pass = r.pass(tol);
    } else {
      const auto fit = fit_wi_multipliers(rp, pt, part, I);
      out.results["multipliers"] = multipliers_to_json(fit.multipliers);
      out.results["fitted"] = true;
      out.results["report"] = report_to_json(fit.report, tol);
      out.pass = fit.report.pass(tol);
    }
    return out;
  }

  const bool complementary = c == "cakkt";
  if (given) {
    const auto* mu = std::get_if<NlpMultiplierSet>(&*given);
    if (!mu) throw SchemaError(c + " needs mu_* multipliers");
    const ResidualReport r = complementary ? cakkt_residual(rp, pt, *mu) : akkt_residual(rp, pt, *mu);
    out.results["multipliers"] = multipliers_to_json(*mu);
    out.results["fitted"] = false;
    out.results["report"] = report_to_json(r, tol);
    out.pass = r.pass(tol);
  } else {
    const auto fit = fit_nlp_multipliers(rp, pt, pin_tol, complementary);
    out.results["multipliers"] = multipliers_to_json(fit.multipliers);
    out.results["fitted"] = true;
    out.results["pin_tol"] = pin_tol;
    out.results["report"] = report_to_json(fit.report, tol);
    out.pass = fit.report.pass(tol);
  }
  return out;
}

CommandResult run_solve(const ProblemDocument& doc, const json& req) {
  const RelaxedProblem& rp = doc.relaxed;
  const json* cfg_doc = find(req, "config");
  const SolverConfig cfg = solver_config_from_json(cfg_doc ? *cfg_doc : json::object());
  std::optional<PointXY> anchor, start;
  if (const json* a = find(req, "anchor")) anchor = point_from_json(*a, rp);
  if (const json* s = find(req, "start")) start = point_from_json(*s, rp);
  if (cfg.mode == SolveMode::Certify && !anchor) throw SchemaError("certify mode needs an anchor point");
  if (cfg.mode == SolveMode::Explore && !start) throw SchemaError("explore mode needs a start point");

  const CertificateSequence seq = solve(rp, cfg, anchor, start);
  CommandResult out;
  out.results["config"] = solver_config_to_json(cfg);
  if (anchor) out.results["anchor"] = point_to_json(*anchor);
  if (start) out.results["start"] = point_to_json(*start);
  out.results["certificate"] = certificate_to_json(seq);
  if (!seq.iterates.empty()) {
    const auto& last = seq.iterates.back();
    out.results["final_residual"] = last.aw.overall;
    if (anchor) {
      const double d = std::sqrt((last.point.x - anchor->x).squaredNorm() +
                                 (last.point.y - anchor->y).squaredNorm());
      out.results["final_distance_to_anchor"] = d;
    }
  }
  out.pass = seq.reached_tol;
  return out;
}

CommandResult run_witness(const ProblemDocument& doc, const json& req) {
  const RelaxedProblem& rp = doc.relaxed;
  const json* pt_doc = find(req, "point");
  if (!pt_doc) throw SchemaError("witness needs a point");
  const double zero_tol = get_number(req, "zero_tol", kDefaultZeroTol);
  const PointXY pt = point_from_json(*pt_doc, rp, zero_tol);
  const json* k_doc = find(req, "k");
  if (!k_doc || !k_doc->is_number_integer() || k_doc->get<long long>() < 1) {
    throw SchemaError("witness needs an integer k >= 1");
  }
  const long long k = k_doc->get<long long>();
  const double tol = get_number(req, "tol", 1.0 / static_cast<double>(k) + 1e-12);

  std::string transform;
  if (const json* t = find(req, "transform")) {
    transform = t->is_string() ? t->get<std::string>() : "";
    if (transform != "cakkt-to-aw" && transform != "tnlp-maps") {
      throw SchemaError("transform must be \"cakkt-to-aw\" or \"tnlp-maps\"");
    }
  }

  const WitnessIterate w = akkt_witness(rp, pt, k, zero_tol);
  const auto& mu = std::get<NlpMultiplierSet>(w.multipliers);
  const ResidualReport akkt = akkt_residual(rp, w.point, mu);
  const IndexPartition part = classify_indices(pt, zero_tol);

  CommandResult out;
  out.results["limit_point"] = point_to_json(pt);
  out.results["partition"] = partition_to_json(part);
  out.results["witness"] = iterate_to_json(w);
  out.results["akkt"] = report_to_json(akkt, tol);
  out.results["cakkt"] = report_to_json(cakkt_residual(rp, w.point, mu), tol);
  out.pass = akkt.pass(tol);

  if (transform == "cakkt-to-aw") {
    const WitnessIterate aw_it = cakkt_to_aw(rp, w);
    const auto& lam = std::get<MultiplierSet>(aw_it.multipliers);
    const double gap = inf_norm(aw_lagrangian_gradient(rp, w.point, lam) -
                                nlp_lagrangian_gradient(rp, w.point, mu));
    out.results["transform"] = {{"name", "cakkt-to-aw"},
                                {"iterate", iterate_to_json(aw_it)},
                                {"aw", report_to_json(aw_residual(rp, w.point, lam), tol)},
                                {"gradient_gap", gap}};
  } else if (transform == "tnlp-maps") {
    std::vector<WitnessIterate> seq;
    if (const json* s = find(req, "sequence")) {
      seq = sequence_from_json(*s, rp);
    } else {
      seq.push_back(cakkt_to_aw(rp, w));
    }
    json per = json::array();
    double gap = 0.0;
    for (const auto& it : seq) {
      const auto* lam = std::get_if<MultiplierSet>(&it.multipliers);
      if (!lam) throw SchemaError("tnlp-maps needs lam_* multipliers on every iterate");
      const double aw = aw_residual(rp, it.point, *lam).overall;
      const WitnessIterate fwd = tnlp_akkt_maps(rp, part, it, TnlpDirection::Forward);
      const auto& lf = std::get<MultiplierSet>(fwd.multipliers);
      const double tnlp = tnlp_akkt_residual(rp, part, it.point, lf).overall;
      const WitnessIterate back = tnlp_akkt_maps(rp, part, fwd, TnlpDirection::Backward);
      const double aw_back = aw_residual(rp, it.point, std::get<MultiplierSet>(back.multipliers)).overall;
      gap = std::max({gap, std::abs(aw - tnlp), std::abs(aw_back - tnlp)});
      per.push_back({{"k", it.k},
                     {"aw", aw},
                     {"tnlp_forward", tnlp},
                     {"aw_backward", aw_back},
                     {"forward_multipliers", multipliers_to_json(lf)}});
    }
    const double eq_tol = get_number(req, "map_tol", 1e-12);
    out.results["transform"] = {{"name", "tnlp-maps"},
                                {"iterates", per},
                                {"max_abs_difference", gap},
                                {"map_tol", eq_tol},
                                {"equal", gap <= eq_tol}};
    if (find(req, "sequence")) out.pass = gap <= eq_tol;
  }
  return out;
}

CommandResult run_oracle(const ProblemDocument& doc, const json& req) {
  const OracleConfig cfg = oracle_config_from_json(doc.source, doc.problem);
  const OracleResult r = support_enumerate_solve(doc.problem, cfg);
  CommandResult out;
  out.results["config"] = oracle_config_to_json(cfg);
  out.results["oracle"] = oracle_result_to_json(r);
  out.pass = r.status == OracleStatus::Bounded;
  if (const json* wi = find(req, "wi_at")) {
    const double zero_tol = get_number(req, "zero_tol", kDefaultZeroTol);
    const double tol = get_number(req, "tol", 1e-8);
    const PointXY pt = point_from_json(*wi, doc.relaxed, zero_tol);
    const IndexPartition part = classify_indices(pt, zero_tol);
    const WiBruteForce bf = brute_force_wi(doc.relaxed, pt, part);
    out.results["wi_at"] = point_to_json(pt);
    out.results["partition"] = partition_to_json(part);
    out.results["wi"] = wi_brute_force_to_json(bf, tol);
  }
  return out;
}

}  // namespace mpcac
