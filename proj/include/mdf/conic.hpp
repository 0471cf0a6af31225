#pragma once

// Standard-form cone program IR and a dense primal-dual interior-point
// solver (Nesterov-Todd scaling, Mehrotra predictor-corrector) over the
// product of a nonnegative orthant and second-order cones, with a native
// diagonal quadratic objective.
//
//   minimize    sum_j q2_j x_j^2 + q1' x + q0
//   subject to  A x = b
//               expr_k(x) >= 0                      (orthant rows)
//               || u_k(x) ||_2 <= v_k(x)            (second-order cones)
//
// Dual convention: the equality dual reported for "a'x = r" is the
// sensitivity of the optimal objective to r; orthant/cone duals are the
// nonnegative (dual-cone) multipliers z with stationarity
// grad f(x) - A' nu - C' z = 0, where C stacks the cone expressions.

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mdf::conic {

// Sparse affine expression over the decision variables.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  explicit LinExpr(double c) : constant(c) {}

  static LinExpr variable(int index, double coeff = 1.0) {
    LinExpr e;
    e.terms.emplace_back(index, coeff);
    return e;
  }

  LinExpr& add(int index, double coeff) {
    if (coeff != 0.0) terms.emplace_back(index, coeff);
    return *this;
  }
  LinExpr& add_constant(double c) {
    constant += c;
    return *this;
  }
  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator*=(double scale);

  double eval(const Eigen::VectorXd& x) const;
  bool empty() const { return terms.empty(); }  // constant expression
};

inline LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
inline LinExpr operator*(double s, LinExpr e) { return e *= s; }
inline LinExpr operator-(LinExpr a, const LinExpr& b) {
  LinExpr nb = b;
  nb *= -1.0;
  return a += nb;
}

enum class ConstraintKind { equality, nonnegative, second_order_cone };

struct ConstraintRef {
  ConstraintKind kind = ConstraintKind::equality;
  int index = 0;  // equality row / orthant row / cone block ordinal
};

struct ConicProgram {
  int num_vars = 0;
  Eigen::VectorXd quad_cost;  // per-variable coefficient on x^2, >= 0
  Eigen::VectorXd lin_cost;
  double const_cost = 0.0;

  Eigen::MatrixXd eq_matrix;  // p x n
  Eigen::VectorXd eq_rhs;

  // Cone expression C x + c with rows ordered: orthant first, then SOC
  // blocks, each block storing its bound row v first and the norm
  // arguments u after it.
  Eigen::MatrixXd cone_matrix;  // m x n
  Eigen::VectorXd cone_offset;
  int orthant_dim = 0;
  std::vector<int> soc_dims;  // full block sizes (1 + norm arguments)

  std::map<std::string, ConstraintRef> handles;
  std::vector<std::string> var_names;

  int cone_rows() const { return static_cast<int>(cone_matrix.rows()); }
  int eq_count() const { return static_cast<int>(eq_matrix.rows()); }

  void validate() const;  // dimension and convexity checks
  // Text dump of the full program, for cross-checks against other solvers.
  void dump(std::ostream& os) const;
};

class ProgramBuilder {
 public:
  int add_variable(const std::string& name = {});
  int variable_count() const { return num_vars_; }

  void add_quadratic_cost(int var, double coeff);
  void add_linear_cost(int var, double coeff);
  void add_constant_cost(double c) { const_cost_ += c; }
  void add_linear_cost(const LinExpr& expr, double scale = 1.0);

  // expr == rhs
  void add_equality(LinExpr expr, double rhs, const std::string& handle);
  // expr >= 0
  void add_nonnegative(LinExpr expr, const std::string& handle);
  // || norm_args ||_2 <= bound
  void add_second_order_cone(std::vector<LinExpr> norm_args, LinExpr bound,
                             const std::string& handle);

  ConicProgram build() const;

 private:
  void register_handle(const std::string& handle, ConstraintRef ref);

  int num_vars_ = 0;
  std::vector<std::string> var_names_;
  std::vector<std::pair<int, double>> quad_cost_;
  std::vector<std::pair<int, double>> lin_cost_;
  double const_cost_ = 0.0;
  std::vector<std::pair<LinExpr, double>> equalities_;
  std::vector<LinExpr> orthant_;
  std::vector<std::pair<std::vector<LinExpr>, LinExpr>> socs_;
  std::map<std::string, ConstraintRef> handles_;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

std::string status_name(SolveStatus status);

struct SolverOptions {
  double tol = 1e-8;      // feasibility and relative-gap tolerance
  int max_iter = 100;
  bool verbose = false;
};

struct IterateInfo {
  double pcost = 0.0, dcost = 0.0, gap = 0.0, pres = 0.0, dres = 0.0, step = 0.0;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;
  double objective = 0.0;

  Eigen::VectorXd eq_duals;    // d(objective)/d(rhs)
  Eigen::VectorXd cone_duals;  // stacked like cone rows, in the dual cone

  double primal_residual = 0.0;  // relative
  double dual_residual = 0.0;    // relative
  double duality_gap = 0.0;      // absolute s'z
  double relative_gap = 0.0;
  int iterations = 0;
  std::vector<IterateInfo> trace;

  // Copied from the program for handle-based dual lookup.
  std::map<std::string, ConstraintRef> handles;
  int orthant_dim = 0;
  std::vector<int> soc_dims;

  ConstraintRef ref(const std::string& handle) const;  // throws ArgumentError
  double eq_dual(const std::string& handle) const;
  // Orthant: size-1 vector. SOC: (bound row dual, norm-arg duals...).
  Eigen::VectorXd cone_dual(const std::string& handle) const;
  // Dual on the bound row (orthant row dual, or first component of the
  // SOC block dual); the multiplier that prices the constraint.
  double bound_dual(const std::string& handle) const;
};

ConicSolution solve(const ConicProgram& program, const SolverOptions& options = {});

}  // namespace mdf::conic
