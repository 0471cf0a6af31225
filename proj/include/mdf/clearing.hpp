#pragma once

// Market-clearing formulation: decision layout, expected-cost objective,
// balance and participation-factor constraints, and the Gaussian chance
// constraint -> second-order cone reformulation. The single-period
// dispatch problem is the horizon-1, no-bids special case.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mdf/bids.hpp"
#include "mdf/conic.hpp"
#include "mdf/grid.hpp"
#include "mdf/pricing_types.hpp"
#include "mdf/risk.hpp"
#include "mdf/stochastic.hpp"

namespace mdf {

enum class ChanceClass {
  generator_max,
  generator_min,
  line_max,
  line_min,
  vb_power_max,
  vb_power_min,
  vb_soc_max,
  vb_soc_min,
};

std::string chance_class_name(ChanceClass cls);

// Everything needed to re-evaluate a reformulated constraint at a point:
// the sigma-scaled rows Sigma^{1/2} A(X)' (without the quantile factor)
// and the affine margin b(X).
struct ChanceConstraintInfo {
  std::string handle;
  ChanceClass cls = ChanceClass::generator_max;
  int entity = 0;  // generator / line / aggregator index
  int period = 0;  // 0-based
  double eps = 0.0;
  std::vector<conic::LinExpr> sigma_rows;
  conic::LinExpr margin;
  bool stochastic = false;  // emitted as an SOC block (vs reduced row)
};

// Constraint handle naming, shared by formulation, pricing and tests.
namespace handles {
std::string balance(int period);
std::string simplex(int period);
std::string gen_max(int gen, int period);
std::string gen_min(int gen, int period);
std::string line_max(int line, int period);
std::string line_min(int line, int period);
std::string vb_power_max(int agg, int period);
std::string vb_power_min(int agg, int period);
std::string vb_soc_max(int agg, int period);
std::string vb_soc_min(int agg, int period);
}  // namespace handles

struct DecisionLayout {
  int horizon = 0;
  int num_vars = 0;
  Eigen::ArrayXXi pg, beta_g;  // n_g x T variable indices
  Eigen::ArrayXXi pf, beta_f;  // n_f x T; -1 outside the service window
  Eigen::ArrayXXi alpha;       // n_f x 4 (r-, r+, e-, e+); -1 when pinned at 0
  std::vector<ChanceConstraintInfo> chance;
};

struct BuiltProgram {
  conic::ConicProgram program;
  DecisionLayout layout;
  std::vector<MdfBid> bids;  // the bids the program was built with
  WindModel wind;            // the wind model the program was built with
};

// Emits Phi^{-1}(1-eps) * || cov^{1/2} A(X)' ||_2 <= b(X) for the chance
// constraint P[A(X) xi <= b(X)] >= 1-eps with xi ~ N(0, cov). Reduces to
// the deterministic row b(X) >= 0 when the left side vanishes (zero
// covariance or eps = 0.5). Returns the sigma-scaled rows for ex-post
// probability evaluation.
struct ReformulatedRows {
  std::vector<conic::LinExpr> sigma_rows;
  bool stochastic = false;
};
ReformulatedRows reformulate_chance(conic::ProgramBuilder& builder,
                                    const std::vector<conic::LinExpr>& a_rows,
                                    const conic::LinExpr& margin,
                                    const Eigen::MatrixXd& cov, double eps,
                                    const std::string& handle);

// Multi-period market clearing over the full horizon; an empty bid list
// degrades to the multi-period dispatch problem without acceptance
// variables.
BuiltProgram build_clearing(const Network& network, const PtdfMatrix& ptdf,
                            const WindModel& wind, const RiskParameters& risk,
                            const std::vector<MdfBid>& bids);

// Single-period chance-constrained economic dispatch at `period`.
BuiltProgram build_cedp(const Network& network, const PtdfMatrix& ptdf,
                        const WindModel& wind, const RiskParameters& risk, int period);

struct ConstraintProbability {
  std::string handle;
  ChanceClass cls = ChanceClass::generator_max;
  int entity = 0;
  int period = 0;
  double eps = 0.0;
  double satisfaction = 1.0;  // Phi(b / ||Sigma^{1/2} A'||), 1 when deterministic
  double margin = 0.0;        // b(X*)
  double stddev = 0.0;        // ||Sigma^{1/2} A(X*)'||
};

struct ClearingSolution {
  Eigen::MatrixXd pg, beta_g;  // n_g x T, per-unit set-points and factors
  Eigen::MatrixXd pf, beta_f;  // n_f x T, zero outside service windows
  std::vector<MdfAcceptance> acceptance;
  double expected_cost = 0.0;    // analytic expected generation cost, $
  double reward_payment = 0.0;   // total MDF reward, $
  double objective = 0.0;        // expected_cost + reward_payment
  std::vector<ConstraintProbability> chance_probabilities;
  LmpProfile lmps;               // filled by pricing::extract_lmps
  conic::ConicSolution conic;    // primal/dual details and diagnostics
};

// Reads the solved program back into model quantities and verifies the
// solution invariants (balance, participation simplex, acceptance boxes)
// to 1e-6; throws InternalError naming the violated constraint.
ClearingSolution extract_solution(const Network& network, const BuiltProgram& built,
                                  const conic::ConicSolution& conic_solution);

}  // namespace mdf
