#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mpcac/oracle.hpp"
#include "mpcac/penalty.hpp"

namespace mpcac {

using json = nlohmann::ordered_json;

/// Parses JSON text; throws SchemaError on malformed input.
json parse_json(const std::string& text);

/// {"n", "alpha", "objective", "ineq"?, "eq"?, "box"?: {"lo", "hi"}, "oracle"?, "name"?}
MpcacProblem problem_from_json(const json& j);
json problem_to_json(const MpcacProblem& p);

/// {"x": [...], "y": [...]?}. A missing y is completed with y_i = 1 where
/// |x_i| <= zero_tol and 0 elsewhere. A report document carrying a witness is
/// accepted too (its point is used).
PointXY point_from_json(const json& j, const RelaxedProblem& rp, double zero_tol = kDefaultZeroTol);
json point_to_json(const PointXY& pt);

using AnyMultipliers = std::variant<MultiplierSet, NlpMultiplierSet>;

/// lam_* keys give a MultiplierSet, mu_* keys an NlpMultiplierSet; missing
/// keys are zero. Mixing both kinds is a SchemaError.
AnyMultipliers multipliers_from_json(const json& j, const RelaxedProblem& rp);
json multipliers_to_json(const MultiplierSet& lam);
json multipliers_to_json(const NlpMultiplierSet& mu);
json multipliers_to_json(const AnyMultipliers& m);

json iterate_to_json(const WitnessIterate& it);
WitnessIterate iterate_from_json(const json& j, const RelaxedProblem& rp);

/// A JSON array of iterates, an object {"iterates": [...]}, or a report
/// document holding results.certificate.iterates or results.witness.
std::vector<WitnessIterate> sequence_from_json(const json& j, const RelaxedProblem& rp);

json report_to_json(const ResidualReport& r, double tol);
json pakkt_to_json(const PakktReport& r, double tol);
json verdict_to_json(const SequenceVerdict& v, double tol);
json partition_to_json(const IndexPartition& part);
json index_set_to_json(const std::vector<int>& I);
/// 1-based indices from JSON; sorted on return.
std::vector<int> index_set_from_json(const json& j, int n);

SolverConfig solver_config_from_json(const json& j);
json solver_config_to_json(const SolverConfig& cfg);
json certificate_to_json(const CertificateSequence& seq);

/// Box from the problem plus the optional "oracle" object of the problem
/// document ({"grid", "multistart", "polish_iters", "seed", "feas_tol",
/// "max_grid_points"}).
OracleConfig oracle_config_from_json(const json& problem_doc, const MpcacProblem& p);
json oracle_config_to_json(const OracleConfig& cfg);
json oracle_result_to_json(const OracleResult& r);
json wi_brute_force_to_json(const WiBruteForce& r, double tol);

json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const json& j, const char* what);

}  // namespace mpcac
