// mpcac command-line tool. Reports go to stdout as JSON, a short log to stderr.
//
// Exit codes: 0 pass, 1 fail at tolerance, 2 input error, 3 budget exhausted.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpcac/mpcac.h"

using json = nlohmann::ordered_json;

namespace {

enum Exit { kPass = 0, kFail = 1, kInputError = 2, kBudget = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<int> parse_index_list(const std::string& s) {
  std::vector<int> out;
  std::string tok;
  std::istringstream ss(s);
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("--index-set expects comma-separated integers, got \"" + s + "\"");
    }
  }
  return out;
}

class Problem {
 public:
  explicit Problem(const std::string& path) : path_(path) {
    const std::string text = read_file(path);
    if (mpcac_problem_load(text.c_str(), &p_) != MPCAC_OK) {
      throw InputError(path + ": " + mpcac_last_error());
    }
  }
  ~Problem() { mpcac_problem_free(p_); }
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  const mpcac_problem* get() const { return p_; }
  const std::string& path() const { return path_; }

  std::string digest() const {
    char* d = nullptr;
    if (mpcac_problem_digest(p_, &d) != MPCAC_OK) return "";
    std::string s(d);
    mpcac_string_free(d);
    return s;
  }

 private:
  std::string path_;
  mpcac_problem* p_ = nullptr;
};

using Command = mpcac_status (*)(const mpcac_problem*, const char*, char**, int*);

struct Outcome {
  mpcac_status status = MPCAC_OK;
  json results;
  bool pass = false;
};

Outcome run(Command cmd, const Problem& p, const json& request) {
  Outcome o;
  char* out = nullptr;
  int pass = 0;
  o.status = cmd(p.get(), request.dump().c_str(), &out, &pass);
  if (o.status == MPCAC_OK) {
    o.results = json::parse(out);
    mpcac_string_free(out);
    o.pass = pass != 0;
  }
  return o;
}

int emit(const std::string& name, const Problem& p, json args, const json& request,
         Command cmd, int fail_code) {
  const auto t0 = std::chrono::steady_clock::now();
  const Outcome o = run(cmd, p, request);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.status != MPCAC_OK) {
    std::cerr << "mpcac " << name << ": " << mpcac_status_name(o.status) << ": "
              << mpcac_last_error() << "\n";
    return kInputError;
  }
  args["request"] = request;
  json report;
  report["tool"] = "mpcac";
  report["version"] = mpcac_version();
  report["problem_digest"] = p.digest();
  report["command"] = {{"name", name}, {"args", args}};
  report["results"] = o.results;
  report["pass"] = o.pass;
  report["timings"] = {{"wall_seconds", secs}};
  std::cout << report.dump(2) << "\n";
  std::cerr << "mpcac " << name << ": " << (o.pass ? "pass" : "fail") << " (" << secs << " s)\n";
  return o.pass ? kPass : fail_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationarity checks and certificates for cardinality-constrained programs"};
  app.set_version_flag("--version", std::string(mpcac_version()));
  app.require_subcommand(1);

  struct {
    std::string problem, point, condition, index_set, multipliers, sequence;
    std::optional<double> tol, pin_tol, zero_tol;
  } chk;
  auto* check = app.add_subcommand("check", "Evaluate a stationarity condition at a point or along a sequence");
  check->add_option("--problem", chk.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  check->add_option("--point", chk.point, "Point JSON {x, y}")->check(CLI::ExistingFile);
  check->add_option("--condition", chk.condition, "Condition")
      ->required()
      ->check(CLI::IsMember({"aw", "wi", "akkt", "cakkt", "pakkt"}));
  check->add_option("--index-set", chk.index_set, "1-based index set for wi, e.g. 2,3");
  check->add_option("--multipliers", chk.multipliers, "Multiplier JSON; fitted when omitted")
      ->check(CLI::ExistingFile);
  check->add_option("--sequence", chk.sequence, "Sequence JSON")->check(CLI::ExistingFile);
  check->add_option("--tol", chk.tol, "Pass tolerance")->required();
  check->add_option("--pin-tol", chk.pin_tol, "Threshold for pinning multipliers of inactive constraints");
  check->add_option("--zero-tol", chk.zero_tol, "Tolerance for classifying zeros");

  struct {
    std::string problem, config, anchor, start;
  } sol;
  auto* solve = app.add_subcommand("solve", "Run the proximal penalty construction");
  solve->add_option("--problem", sol.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--config", sol.config, "Solver config JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--anchor", sol.anchor, "Anchor point JSON (certify mode)")->check(CLI::ExistingFile);
  solve->add_option("--start", sol.start, "Start point JSON")->check(CLI::ExistingFile);

  struct {
    std::string problem, point, transform, sequence;
    long long k = 0;
    std::optional<double> tol, zero_tol, map_tol;
  } wit;
  auto* witness = app.add_subcommand("witness", "Build the AKKT witness iterate at a feasible point");
  witness->add_option("--problem", wit.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  witness->add_option("--point", wit.point, "Feasible point JSON")->required()->check(CLI::ExistingFile);
  witness->add_option("--k", wit.k, "Iterate index")->required()->check(CLI::PositiveNumber);
  witness->add_option("--transform", wit.transform, "Transform")
      ->check(CLI::IsMember({"cakkt-to-aw", "tnlp-maps"}));
  witness->add_option("--sequence", wit.sequence, "AW sequence JSON for tnlp-maps")->check(CLI::ExistingFile);
  witness->add_option("--tol", wit.tol, "Pass tolerance (default 1/k + 1e-12)");
  witness->add_option("--zero-tol", wit.zero_tol, "Tolerance for classifying zeros");
  witness->add_option("--map-tol", wit.map_tol, "Tolerance for equal residuals under tnlp-maps");

  struct {
    std::string problem, wi_at;
    std::optional<double> tol;
  } orc;
  auto* oracle = app.add_subcommand("oracle", "Global minimum by support enumeration on the box");
  oracle->add_option("--problem", orc.problem, "Problem JSON with a box")->required()->check(CLI::ExistingFile);
  oracle->add_option("--wi-at", orc.wi_at, "Point JSON for a W_I brute-force check")->check(CLI::ExistingFile);
  oracle->add_option("--tol", orc.tol, "Tolerance for the W_I check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInputError;
  }

  try {
    if (*check) {
      const Problem p(chk.problem);
      json req = {{"condition", chk.condition}, {"tol", *chk.tol}};
      json args = {{"problem", chk.problem}};
      if (!chk.point.empty()) {
        req["point"] = read_json(chk.point);
        args["point"] = chk.point;
      }
      if (!chk.multipliers.empty()) {
        req["multipliers"] = read_json(chk.multipliers);
        args["multipliers"] = chk.multipliers;
      }
      if (!chk.sequence.empty()) {
        req["sequence"] = read_json(chk.sequence);
        args["sequence"] = chk.sequence;
      }
      if (!chk.index_set.empty()) req["index_set"] = parse_index_list(chk.index_set);
      if (chk.pin_tol) req["pin_tol"] = *chk.pin_tol;
      if (chk.zero_tol) req["zero_tol"] = *chk.zero_tol;
      if (chk.point.empty() && chk.sequence.empty()) throw InputError("check needs --point or --sequence");
      return emit("check", p, args, req, mpcac_check, kFail);
    }
    if (*solve) {
      const Problem p(sol.problem);
      json req = {{"config", read_json(sol.config)}};
      json args = {{"problem", sol.problem}, {"config", sol.config}};
      if (!sol.anchor.empty()) {
        req["anchor"] = read_json(sol.anchor);
        args["anchor"] = sol.anchor;
      }
      if (!sol.start.empty()) {
        req["start"] = read_json(sol.start);
        args["start"] = sol.start;
      }
      return emit("solve", p, args, req, mpcac_solve, kBudget);
    }
    if (*witness) {
      const Problem p(wit.problem);
      json req = {{"point", read_json(wit.point)}, {"k", wit.k}};
      json args = {{"problem", wit.problem}, {"point", wit.point}};
      if (!wit.transform.empty()) req["transform"] = wit.transform;
      if (!wit.sequence.empty()) {
        if (wit.transform != "tnlp-maps") throw InputError("--sequence requires --transform tnlp-maps");
        req["sequence"] = read_json(wit.sequence);
        args["sequence"] = wit.sequence;
      }
      if (wit.tol) req["tol"] = *wit.tol;
      if (wit.zero_tol) req["zero_tol"] = *wit.zero_tol;
      if (wit.map_tol) req["map_tol"] = *wit.map_tol;
      return emit("witness", p, args, req, mpcac_witness, kFail);
    }
    if (*oracle) {
      const Problem p(orc.problem);
      json req = json::object();
      json args = {{"problem", orc.problem}};
      if (!orc.wi_at.empty()) {
        req["wi_at"] = read_json(orc.wi_at);
        args["wi_at"] = orc.wi_at;
      }
      if (orc.tol) req["tol"] = *orc.tol;
      return emit("oracle", p, args, req, mpcac_oracle, kFail);
    }
  } catch (const InputError& e) {
    std::cerr << "mpcac: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "mpcac: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
