#include "mpcac/mpcac.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "mpcac/commands.hpp"
#include "mpcac/errors.hpp"
#include "mpcac/penalty.hpp"

struct mpcac_problem {
  mpcac::ProblemDocument doc;
};

struct mpcac_expr {
  mpcac::SmoothFunction fn;
  int n;
};

namespace {

thread_local std::string last_error;

mpcac_status fail(mpcac_status s, const char* what) {
  last_error = what;
  return s;
}

template <class F>
mpcac_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return MPCAC_OK;
  } catch (const mpcac::ParseError& e) {
    return fail(MPCAC_ERR_PARSE, e.what());
  } catch (const mpcac::SchemaError& e) {
    return fail(MPCAC_ERR_SCHEMA, e.what());
  } catch (const mpcac::DomainError& e) {
    return fail(MPCAC_ERR_DOMAIN, e.what());
  } catch (const mpcac::InvalidArgument& e) {
    return fail(MPCAC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const mpcac::InfeasiblePoint& e) {
    return fail(MPCAC_ERR_INFEASIBLE, e.what());
  } catch (const mpcac::LimitExceeded& e) {
    return fail(MPCAC_ERR_LIMIT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(MPCAC_ERR_SCHEMA, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MPCAC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MPCAC_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Run>
mpcac_status command(const mpcac_problem* p, const char* request_json, char** result_json,
                     int* pass, Run run) {
  if (!p || !result_json) return fail(MPCAC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const mpcac::json req = request_json && *request_json ? mpcac::parse_json(request_json)
                                                          : mpcac::json::object();
    if (!req.is_object()) throw mpcac::SchemaError("request must be a JSON object");
    const mpcac::CommandResult r = run(p->doc, req);
    *result_json = dup_string(r.results.dump());
    if (pass) *pass = r.pass ? 1 : 0;
  });
}

}  // namespace

extern "C" {

const char* mpcac_version(void) { return MPCAC_VERSION; }

const char* mpcac_last_error(void) { return last_error.c_str(); }

const char* mpcac_status_name(mpcac_status status) {
  switch (status) {
    case MPCAC_OK: return "ok";
    case MPCAC_ERR_PARSE: return "parse error";
    case MPCAC_ERR_SCHEMA: return "schema error";
    case MPCAC_ERR_DOMAIN: return "domain error";
    case MPCAC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MPCAC_ERR_INFEASIBLE: return "infeasible point";
    case MPCAC_ERR_LIMIT: return "limit exceeded";
    case MPCAC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void mpcac_string_free(char* s) { std::free(s); }

mpcac_status mpcac_problem_load(const char* json_text, mpcac_problem** out) {
  if (!json_text || !out) return fail(MPCAC_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new mpcac_problem{mpcac::load_problem_document(json_text)}; });
}

void mpcac_problem_free(mpcac_problem* p) { delete p; }

int mpcac_problem_dimension(const mpcac_problem* p) { return p ? p->doc.problem.n : -1; }

int mpcac_problem_alpha(const mpcac_problem* p) { return p ? p->doc.problem.alpha : -1; }

mpcac_status mpcac_problem_digest(const mpcac_problem* p, char** out) {
  if (!p || !out) return fail(MPCAC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(p->doc.digest); });
}

mpcac_status mpcac_check(const mpcac_problem* p, const char* request_json, char** result_json,
                         int* pass) {
  return command(p, request_json, result_json, pass, mpcac::run_check);
}

mpcac_status mpcac_solve(const mpcac_problem* p, const char* request_json, char** result_json,
                         int* pass) {
  return command(p, request_json, result_json, pass, mpcac::run_solve);
}

mpcac_status mpcac_witness(const mpcac_problem* p, const char* request_json, char** result_json,
                           int* pass) {
  return command(p, request_json, result_json, pass, mpcac::run_witness);
}

mpcac_status mpcac_oracle(const mpcac_problem* p, const char* request_json, char** result_json,
                          int* pass) {
  return command(p, request_json, result_json, pass, mpcac::run_oracle);
}

mpcac_status mpcac_expr_parse(const char* text, int n, mpcac_expr** out) {
  if (!text || !out) return fail(MPCAC_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new mpcac_expr{mpcac::SmoothFunction(mpcac::parse_expr(text, n), n), n};
  });
}

void mpcac_expr_free(mpcac_expr* e) { delete e; }

mpcac_status mpcac_expr_eval(const mpcac_expr* e, const double* x, size_t len, double* value) {
  if (!e || (!x && len) || !value) return fail(MPCAC_ERR_INVALID_ARGUMENT, "null argument");
  if (len != static_cast<size_t>(e->n)) return fail(MPCAC_ERR_INVALID_ARGUMENT, "point length differs from n");
  return guarded([&] { *value = e->fn.value.eval(std::span<const double>(x, len)); });
}

mpcac_status mpcac_expr_grad(const mpcac_expr* e, const double* x, size_t len, double* grad) {
  if (!e || (!x && len) || (!grad && len)) return fail(MPCAC_ERR_INVALID_ARGUMENT, "null argument");
  if (len != static_cast<size_t>(e->n)) return fail(MPCAC_ERR_INVALID_ARGUMENT, "point length differs from n");
  return guarded([&] {
    const std::span<const double> xs(x, len);
    for (size_t i = 0; i < len; ++i) grad[i] = e->fn.gradient[i].eval(xs);
  });
}

mpcac_status mpcac_expr_to_string(const mpcac_expr* e, char** out) {
  if (!e || !out) return fail(MPCAC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(e->fn.value.to_string()); });
}

mpcac_status mpcac_project_w(const double* aG, const double* aH, size_t len, double* wG,
                             double* wH) {
  if (len && (!aG || !aH || !wG || !wH)) return fail(MPCAC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto n = static_cast<Eigen::Index>(len);
    const auto [g, h] = mpcac::project_W(Eigen::Map<const Eigen::VectorXd>(aG, n),
                                         Eigen::Map<const Eigen::VectorXd>(aH, n));
    for (Eigen::Index i = 0; i < n; ++i) {
      wG[i] = g[i];
      wH[i] = h[i];
    }
  });
}

}  // extern "C"
