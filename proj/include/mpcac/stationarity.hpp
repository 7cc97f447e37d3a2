#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mpcac/problem.hpp"

namespace mpcac {

/// Multipliers of the relaxation in the weak-stationarity view.
/// lam_g, lam_theta, lam_Htilde are nonnegative; the rest are free.
struct MultiplierSet {
  VectorXd lam_g;
  VectorXd lam_h;
  double lam_theta = 0;
  VectorXd lam_G;
  VectorXd lam_H;
  VectorXd lam_Htilde;

  static MultiplierSet zeros(const RelaxedProblem& rp);
};

/// Multipliers of the relaxation seen as a standard NLP with the extra
/// equality xi(x, y) = 0. All but mu_h and mu_xi are nonnegative.
struct NlpMultiplierSet {
  VectorXd mu_g;
  VectorXd mu_h;
  double mu_theta = 0;
  VectorXd mu_H;
  VectorXd mu_Htilde;
  VectorXd mu_xi;

  static NlpMultiplierSet zeros(const RelaxedProblem& rp);
};

/// Throw InvalidArgument on a length mismatch or sign violation.
void validate(const RelaxedProblem& rp, const MultiplierSet& lam);
void validate(const RelaxedProblem& rp, const NlpMultiplierSet& mu);

struct ResidualReport {
  std::string condition;
  std::vector<std::pair<std::string, double>> items;
  double overall = 0;

  void add(std::string name, double value);
  /// Throws InvalidArgument for an unknown item name.
  double item(const std::string& name) const;
  bool pass(double tol) const { return overall <= tol; }
};

struct WitnessIterate {
  PointXY point;
  std::variant<MultiplierSet, NlpMultiplierSet> multipliers;
  long long k = 1;
  std::optional<double> rho;
};

/// Gradient of the relaxation Lagrangian, stacked (x-part, y-part):
///   x: grad f + Jg' lam_g + Jh' lam_h + lam_G
///   y: -lam_theta e - lam_H + lam_Htilde
VectorXd aw_lagrangian_gradient(const RelaxedProblem& rp, const PointXY& pt,
                                const MultiplierSet& lam);

/// Gradient of the NLP-view Lagrangian, stacked (x-part, y-part):
///   x: grad f + Jg' mu_g + Jh' mu_h + mu_xi * H(y)
///   y: -mu_theta e - mu_H + mu_Htilde - mu_xi * G(x)
VectorXd nlp_lagrangian_gradient(const RelaxedProblem& rp, const PointXY& pt,
                                 const NlpMultiplierSet& mu);

/// Items item2_stationarity .. item7_Htilde, one per condition of the
/// approximate weak stationarity definition (item 1 is the limit itself).
ResidualReport aw_residual(const RelaxedProblem& rp, const PointXY& pt, const MultiplierSet& lam);

inline constexpr double kDefaultPinTol = 1e-6;

template <class M>
struct FitResult {
  M multipliers;
  ResidualReport report;
};

/// Sign-constrained least-squares fit of the stationarity item, with each
/// multiplier pinned to zero where its constraint is clearly inactive.
FitResult<MultiplierSet> fit_aw_multipliers(const RelaxedProblem& rp, const PointXY& pt,
                                           double pin_tol = kDefaultPinTol);

/// Items item1_stationarity .. item5_Htilde. lam_G must vanish off I.
ResidualReport wi_residual(const RelaxedProblem& rp, const PointXY& pt,
                           const IndexPartition& part, const std::vector<int>& I,
                           const MultiplierSet& lam);

/// Complementarity items are enforced exactly through pinning; activity is
/// decided with part.zero_tol.
FitResult<MultiplierSet> fit_wi_multipliers(const RelaxedProblem& rp, const PointXY& pt,
                                           const IndexPartition& part,
                                           const std::vector<int>& I);

/// stationarity plus |min{-c, mu_c}| for c in g, theta, H, Htilde.
ResidualReport akkt_residual(const RelaxedProblem& rp, const PointXY& pt,
                             const NlpMultiplierSet& mu);

/// stationarity plus |mu_c * c| for every constraint family including xi.
ResidualReport cakkt_residual(const RelaxedProblem& rp, const PointXY& pt,
                              const NlpMultiplierSet& mu);

/// Least-squares NLP multipliers for the akkt/cakkt checks. With
/// `complementary` set, equality multipliers are also pinned where the
/// constraint value exceeds pin_tol.
FitResult<NlpMultiplierSet> fit_nlp_multipliers(const RelaxedProblem& rp, const PointXY& pt,
                                               double pin_tol, bool complementary);

/// Explicit AKKT sequence through a feasible point: x^k = x, and with
/// b = grad f(x)
///   i in I0+ + I01: y_i = y_i,               mu_H = 0, mu_xi = b_i / y_i
///   i in I00:       y_i = b_i / k,           mu_H = 0, mu_xi = k
///   i in I+-0:      y_i = -sign(x_i) b_i / k, mu_xi = -sign(x_i) k,
///                   mu_H = -mu_xi x_i
/// Throws InfeasiblePoint if pt is not feasible at `tol`.
WitnessIterate akkt_witness(const RelaxedProblem& rp, const PointXY& pt, long long k,
                            double tol = kDefaultZeroTol);

struct PakktSign {
  std::string family;  // g, h, theta, H, Htilde, xi
  int index = 0;       // 0-based component
  double limsup_ratio = 0;
  bool required = false;
  bool satisfied = true;
};

struct PakktReport {
  ResidualReport report;  // AKKT items at the final iterate
  std::vector<double> delta;
  std::vector<PakktSign> signs;
  std::size_t tail_begin = 0;
  bool pass = false;
};

/// lim sup |mu| / delta_k is estimated by the max over the last half of the
/// iterates. Throws InvalidArgument for fewer than two iterates or iterates
/// without NLP multipliers.
PakktReport pakkt_check(const RelaxedProblem& rp, const std::vector<WitnessIterate>& iterates,
                         double tol);

/// lam_H = mu_H + mu_xi * G(x), lam_G = mu_xi * H(y); the other families are
/// copied. The AW stationarity item equals the NLP one.
WitnessIterate cakkt_to_aw(const RelaxedProblem& rp, const WitnessIterate& it);

enum class TnlpDirection { Forward, Backward };

/// Forward: AW iterate to an AKKT iterate of TNLP at I0 (lam_G zeroed off I0,
/// lam_H zeroed on I0+ + I01). Backward: lam_G extended by zero off I0.
/// `part` belongs to the limit point.
WitnessIterate tnlp_akkt_maps(const RelaxedProblem& rp, const IndexPartition& part,
                              const WitnessIterate& it, TnlpDirection dir);

/// AKKT residual of TNLP at I0: stationarity with lam_G restricted to I0, and
/// |min{-c, lam_c}| for g, theta, H on I0+ + I01 and Htilde.
ResidualReport tnlp_akkt_residual(const RelaxedProblem& rp, const IndexPartition& part,
                                  const PointXY& pt, const MultiplierSet& lam);

struct SequenceVerdict {
  std::vector<double> history;
  double final_residual = 0;
  bool tail_nonincreasing = false;
  bool pass = false;
};

/// Pass iff the last residual is <= tol and the last half of the history
/// never increases (relative slack 1e-9).
SequenceVerdict sequence_verdict(const std::vector<double>& residuals, double tol);

}  // namespace mpcac
