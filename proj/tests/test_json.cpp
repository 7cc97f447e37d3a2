#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mpcac/commands.hpp"
#include "mpcac/errors.hpp"
#include "mpcac/json_io.hpp"
#include "support.hpp"

using namespace mpcac;
using testing::vec;

namespace {

json cubic_doc() { return testing::corpus_json("cubic.json"); }
RelaxedProblem cubic() { return testing::load_corpus("cubic.json").relaxed; }

}  // namespace

TEST_CASE("problem documents") {
  const MpcacProblem p = problem_from_json(cubic_doc());
  CHECK(p.n == 3);
  CHECK(p.name == "cubic");
  const MpcacProblem back = problem_from_json(problem_to_json(p));
  CHECK(back.f.value == p.f.value);
  CHECK(back.g[0].value == p.g[0].value);
  CHECK(back.box->hi == p.box->hi);

  json j = cubic_doc();
  j["extra"] = 1;
  CHECK_THROWS_AS(problem_from_json(j), SchemaError);
  j = cubic_doc();
  j.erase("objective");
  CHECK_THROWS_AS(problem_from_json(j), SchemaError);
  j = cubic_doc();
  j["n"] = 2.5;
  CHECK_THROWS_AS(problem_from_json(j), SchemaError);
  j = cubic_doc();
  j["ineq"] = {1};
  CHECK_THROWS_AS(problem_from_json(j), SchemaError);
  j = cubic_doc();
  j["box"]["lo"] = {0, 0};
  CHECK_THROWS_AS(problem_from_json(j), SchemaError);
  j = cubic_doc();
  j["objective"] = "x1 +";
  CHECK_THROWS_AS(problem_from_json(j), ParseError);
  j = cubic_doc();
  j["alpha"] = 3;
  CHECK_THROWS_AS(problem_from_json(j), InvalidArgument);

  CHECK_THROWS_AS(parse_json("{\"n\": "), SchemaError);
  CHECK_THROWS_AS(load_problem_document("[1, 2]"), SchemaError);
}

TEST_CASE("document digest is the SHA-256 of the raw text") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto doc = testing::load_corpus("cubic.json");
  CHECK(doc.digest == sha256_hex(testing::read_text(testing::corpus_path("cubic.json"))));
}

TEST_CASE("points") {
  const RelaxedProblem rp = cubic();
  const PointXY pt = point_from_json(json::parse(R"({"x": [1, 0, 1e-12]})"), rp);
  CHECK(pt.y == vec({0, 1, 1}));
  const PointXY wrapped = point_from_json(json::parse(R"({"point": {"x": [1, 0, 0], "y": [0, 1, 0]}})"), rp);
  CHECK(wrapped.y == vec({0, 1, 0}));
  const PointXY rt = point_from_json(point_to_json(wrapped), rp);
  CHECK(rt.x == wrapped.x);
  CHECK(rt.y == wrapped.y);
  CHECK_THROWS_AS(point_from_json(json::parse(R"({"x": [1, 0]})"), rp), SchemaError);
  CHECK_THROWS_AS(point_from_json(json::parse(R"({"x": [1, 0, 0], "y": [0]})"), rp), SchemaError);
  CHECK_THROWS_AS(point_from_json(json::parse(R"({"x": [1, "a", 0]})"), rp), SchemaError);
  CHECK_THROWS_AS(point_from_json(json::parse(R"({"y": [1, 0, 0]})"), rp), SchemaError);
}

TEST_CASE("multipliers") {
  const RelaxedProblem rp = cubic();
  const AnyMultipliers lam = multipliers_from_json(json::parse(R"({"lam_g": [2], "lam_G": [0, 1, 0]})"), rp);
  REQUIRE(std::holds_alternative<MultiplierSet>(lam));
  const auto& l = std::get<MultiplierSet>(lam);
  CHECK(l.lam_g[0] == 2.0);
  CHECK(l.lam_G == vec({0, 1, 0}));
  CHECK(l.lam_H == vec({0, 0, 0}));
  CHECK(l.lam_theta == 0.0);

  const AnyMultipliers mu = multipliers_from_json(json::parse(R"({"mu_xi": [1, 2, 3]})"), rp);
  REQUIRE(std::holds_alternative<NlpMultiplierSet>(mu));
  CHECK(std::get<NlpMultiplierSet>(mu).mu_xi == vec({1, 2, 3}));

  CHECK_THROWS_AS(multipliers_from_json(json::parse(R"({"lam_g": [1], "mu_H": [0, 0, 0]})"), rp), SchemaError);
  CHECK_THROWS_AS(multipliers_from_json(json::parse(R"({"nu": [1]})"), rp), SchemaError);
  CHECK_THROWS_AS(multipliers_from_json(json::parse(R"({"lam_g": [1, 2]})"), rp), SchemaError);

  const auto round = multipliers_from_json(multipliers_to_json(lam), rp);
  CHECK(std::get<MultiplierSet>(round).lam_G == l.lam_G);
}

TEST_CASE("sequence formats") {
  const RelaxedProblem rp = cubic();
  const json file = testing::corpus_json("cubic_aw_sequence.json");
  const auto seq = sequence_from_json(file, rp);
  REQUIRE(seq.size() == 3);
  CHECK(seq[0].k == 10);
  CHECK(seq[2].k == 10000);

  const auto wrapped = sequence_from_json(json{{"iterates", file}}, rp);
  CHECK(wrapped.size() == 3);

  json bare = file;
  for (auto& e : bare) e.erase("k");
  const auto numbered = sequence_from_json(bare, rp);
  CHECK(numbered[0].k == 1);
  CHECK(numbered[2].k == 3);

  json entries = json::array();
  for (const auto& it : seq) entries.push_back(iterate_to_json(it));
  const json report = {{"results", {{"certificate", {{"iterates", entries}}}}}};
  const auto from_report = sequence_from_json(report, rp);
  REQUIRE(from_report.size() == 3);
  CHECK(from_report[1].point.x == seq[1].point.x);
  CHECK(std::get<MultiplierSet>(from_report[1].multipliers).lam_g ==
        std::get<MultiplierSet>(seq[1].multipliers).lam_g);

  const json witness = {{"results", {{"witness", entries[0]}}}};
  CHECK(sequence_from_json(witness, rp).size() == 1);
  CHECK(point_from_json(witness, rp).x == seq[0].point.x);

  CHECK_THROWS_AS(sequence_from_json(json{{"results", json::object()}}, rp), SchemaError);
  CHECK_THROWS_AS(sequence_from_json(json::parse(R"([{"k": 0, "point": {"x": [1,0,0], "y": [0,1,0]}}])"), rp),
                  SchemaError);
  CHECK_THROWS_AS(sequence_from_json(json(3), rp), SchemaError);
}

TEST_CASE("index sets and solver configs") {
  CHECK(index_set_from_json(json::parse("[3, 2]"), 3) == std::vector<int>{1, 2});
  CHECK(index_set_to_json({1, 2}) == json::parse("[2, 3]"));
  CHECK_THROWS_AS(index_set_from_json(json::parse("[4]"), 3), SchemaError);
  CHECK_THROWS_AS(index_set_from_json(json::parse("[1.5]"), 3), SchemaError);

  const SolverConfig cfg = solver_config_from_json(testing::corpus_json("certify.json"));
  CHECK(cfg.mode == SolveMode::Certify);
  CHECK(cfg.max_outer == 9);
  const SolverConfig back = solver_config_from_json(solver_config_to_json(cfg));
  CHECK(back.gamma == cfg.gamma);
  CHECK(back.inner.max_iters == cfg.inner.max_iters);
  CHECK_THROWS_AS(solver_config_from_json(json::parse(R"({"mode": "fast"})")), SchemaError);
  CHECK_THROWS_AS(solver_config_from_json(json::parse(R"({"gamma": 0.5})")), SchemaError);
  CHECK_THROWS_AS(solver_config_from_json(json::parse(R"({"inner": {"nope": 1}})")), SchemaError);
}

TEST_CASE("commands produce deterministic reports") {
  const auto doc = testing::load_corpus("cubic.json");
  const json req = {{"condition", "aw"}, {"tol", 1e-3}, {"pin_tol", 1e-2},
                    {"sequence", testing::corpus_json("cubic_aw_sequence.json")}};
  const CommandResult a = run_check(doc, req);
  const CommandResult b = run_check(doc, req);
  CHECK(a.pass);
  CHECK(a.results.dump() == b.results.dump());
  CHECK(parse_json(a.results.dump()) == a.results);

  const CommandResult wi = run_check(doc, {{"condition", "wi"}, {"tol", 1e-6},
                                           {"point", testing::corpus_json("cubic_min.json")}});
  CHECK_FALSE(wi.pass);

  const CommandResult w = run_witness(doc, {{"point", testing::corpus_json("cubic_min.json")}, {"k", 100}});
  const CommandResult back = run_check(doc, {{"condition", "akkt"}, {"tol", 0.010000000001},
                                             {"point", {{"results", w.results}}},
                                             {"multipliers", {{"results", w.results}}}});
  CHECK(back.pass);

  CHECK_THROWS_AS(run_check(doc, {{"condition", "strong"}, {"tol", 1}}), SchemaError);
  CHECK_THROWS_AS(run_check(doc, {{"condition", "aw"}}), SchemaError);
  CHECK_THROWS_AS(run_solve(doc, {{"config", testing::corpus_json("certify.json")}}), SchemaError);
}

TEST_CASE("oracle configuration from the problem document") {
  const auto doc = testing::load_corpus("cubic.json");
  const OracleConfig cfg = oracle_config_from_json(doc.source, doc.problem);
  CHECK(cfg.grid == 21);
  CHECK(cfg.multistart == 8);
  CHECK(cfg.box.lo == vec({-2, -2, -2}));
  json j = doc.source;
  j["oracle"]["grid"] = "many";
  CHECK_THROWS_AS(oracle_config_from_json(j, doc.problem), SchemaError);
}
