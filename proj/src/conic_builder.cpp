#include <algorithm>
#include <ostream>
#include <sstream>

#include "mdf/conic.hpp"
#include "mdf/errors.hpp"

namespace mdf::conic {

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  constant += other.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(double scale) {
  for (auto& t : terms) t.second *= scale;
  constant *= scale;
  return *this;
}

double LinExpr::eval(const Eigen::VectorXd& x) const {
  double acc = constant;
  for (const auto& [idx, coeff] : terms) acc += coeff * x(idx);
  return acc;
}

int ProgramBuilder::add_variable(const std::string& name) {
  var_names_.push_back(name.empty() ? "x" + std::to_string(num_vars_) : name);
  return num_vars_++;
}

void ProgramBuilder::add_quadratic_cost(int var, double coeff) {
  if (coeff < 0.0) throw ArgumentError("builder: negative quadratic cost on " + var_names_.at(static_cast<size_t>(var)));
  if (coeff != 0.0) quad_cost_.emplace_back(var, coeff);
}

void ProgramBuilder::add_linear_cost(int var, double coeff) {
  if (coeff != 0.0) lin_cost_.emplace_back(var, coeff);
}

void ProgramBuilder::add_linear_cost(const LinExpr& expr, double scale) {
  for (const auto& [idx, coeff] : expr.terms) add_linear_cost(idx, scale * coeff);
  const_cost_ += scale * expr.constant;
}

void ProgramBuilder::register_handle(const std::string& handle, ConstraintRef ref) {
  if (handle.empty()) throw ArgumentError("builder: empty constraint handle");
  if (!handles_.emplace(handle, ref).second) {
    throw ArgumentError("builder: duplicate constraint handle '" + handle + "'");
  }
}

void ProgramBuilder::add_equality(LinExpr expr, double rhs, const std::string& handle) {
  register_handle(handle, {ConstraintKind::equality, static_cast<int>(equalities_.size())});
  equalities_.emplace_back(std::move(expr), rhs);
}

void ProgramBuilder::add_nonnegative(LinExpr expr, const std::string& handle) {
  register_handle(handle, {ConstraintKind::nonnegative, static_cast<int>(orthant_.size())});
  orthant_.push_back(std::move(expr));
}

void ProgramBuilder::add_second_order_cone(std::vector<LinExpr> norm_args, LinExpr bound,
                                           const std::string& handle) {
  if (norm_args.empty()) {
    throw ArgumentError("builder: second-order cone needs at least one norm argument");
  }
  register_handle(handle, {ConstraintKind::second_order_cone, static_cast<int>(socs_.size())});
  socs_.emplace_back(std::move(norm_args), std::move(bound));
}

ConicProgram ProgramBuilder::build() const {
  ConicProgram prog;
  prog.num_vars = num_vars_;
  prog.var_names = var_names_;
  prog.quad_cost = Eigen::VectorXd::Zero(num_vars_);
  for (const auto& [idx, c] : quad_cost_) prog.quad_cost(idx) += c;
  prog.lin_cost = Eigen::VectorXd::Zero(num_vars_);
  for (const auto& [idx, c] : lin_cost_) prog.lin_cost(idx) += c;
  prog.const_cost = const_cost_;

  const int p = static_cast<int>(equalities_.size());
  prog.eq_matrix = Eigen::MatrixXd::Zero(p, num_vars_);
  prog.eq_rhs = Eigen::VectorXd::Zero(p);
  for (int r = 0; r < p; ++r) {
    const auto& [expr, rhs] = equalities_[static_cast<size_t>(r)];
    for (const auto& [idx, coeff] : expr.terms) prog.eq_matrix(r, idx) += coeff;
    prog.eq_rhs(r) = rhs - expr.constant;
  }

  prog.orthant_dim = static_cast<int>(orthant_.size());
  int m = prog.orthant_dim;
  for (const auto& [args, bound] : socs_) m += static_cast<int>(args.size()) + 1;
  prog.cone_matrix = Eigen::MatrixXd::Zero(m, num_vars_);
  prog.cone_offset = Eigen::VectorXd::Zero(m);
  auto put_row = [&](int row, const LinExpr& expr) {
    for (const auto& [idx, coeff] : expr.terms) prog.cone_matrix(row, idx) += coeff;
    prog.cone_offset(row) = expr.constant;
  };
  for (int r = 0; r < prog.orthant_dim; ++r) put_row(r, orthant_[static_cast<size_t>(r)]);
  int row = prog.orthant_dim;
  for (const auto& [args, bound] : socs_) {
    prog.soc_dims.push_back(static_cast<int>(args.size()) + 1);
    put_row(row++, bound);
    for (const auto& arg : args) put_row(row++, arg);
  }
  prog.handles = handles_;
  prog.validate();
  return prog;
}

void ConicProgram::validate() const {
  if (num_vars <= 0) throw ValidationError("program: no variables");
  if (quad_cost.size() != num_vars || lin_cost.size() != num_vars) {
    throw ValidationError("program: cost dimension mismatch");
  }
  if (quad_cost.size() > 0 && quad_cost.minCoeff() < 0.0) {
    throw ValidationError("program: quadratic cost must be positive semidefinite");
  }
  if (eq_matrix.cols() != num_vars || eq_matrix.rows() != eq_rhs.size()) {
    throw ValidationError("program: equality dimension mismatch");
  }
  int expected = orthant_dim;
  for (int d : soc_dims) {
    if (d < 2) throw ValidationError("program: SOC block without norm arguments");
    expected += d;
  }
  if (cone_matrix.rows() != expected || cone_matrix.cols() != num_vars ||
      cone_offset.size() != expected) {
    throw ValidationError("program: cone dimension mismatch");
  }
}

void ConicProgram::dump(std::ostream& os) const {
  os << "vars " << num_vars << "\n";
  os << "objective quad";
  for (int j = 0; j < num_vars; ++j) os << ' ' << quad_cost(j);
  os << "\nobjective lin";
  for (int j = 0; j < num_vars; ++j) os << ' ' << lin_cost(j);
  os << "\nobjective const " << const_cost << "\n";
  os << "equalities " << eq_count() << "\n";
  for (int r = 0; r < eq_count(); ++r) {
    for (int j = 0; j < num_vars; ++j) os << eq_matrix(r, j) << ' ';
    os << "= " << eq_rhs(r) << "\n";
  }
  os << "orthant " << orthant_dim << "\n";
  for (int r = 0; r < orthant_dim; ++r) {
    for (int j = 0; j < num_vars; ++j) os << cone_matrix(r, j) << ' ';
    os << "+ " << cone_offset(r) << " >= 0\n";
  }
  int row = orthant_dim;
  for (size_t k = 0; k < soc_dims.size(); ++k) {
    os << "soc " << soc_dims[static_cast<size_t>(k)] << "\n";
    for (int i = 0; i < soc_dims[k]; ++i, ++row) {
      for (int j = 0; j < num_vars; ++j) os << cone_matrix(row, j) << ' ';
      os << "+ " << cone_offset(row) << (i == 0 ? "  (bound)\n" : "\n");
    }
  }
}

std::string status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

ConstraintRef ConicSolution::ref(const std::string& handle) const {
  auto it = handles.find(handle);
  if (it == handles.end()) throw ArgumentError("unknown constraint handle '" + handle + "'");
  return it->second;
}

double ConicSolution::eq_dual(const std::string& handle) const {
  const ConstraintRef r = ref(handle);
  if (r.kind != ConstraintKind::equality) {
    throw ArgumentError("constraint '" + handle + "' is not an equality");
  }
  return eq_duals(r.index);
}

Eigen::VectorXd ConicSolution::cone_dual(const std::string& handle) const {
  const ConstraintRef r = ref(handle);
  if (r.kind == ConstraintKind::nonnegative) {
    Eigen::VectorXd out(1);
    out(0) = cone_duals(r.index);
    return out;
  }
  if (r.kind == ConstraintKind::second_order_cone) {
    int start = orthant_dim;
    for (int k = 0; k < r.index; ++k) start += soc_dims[static_cast<size_t>(k)];
    return cone_duals.segment(start, soc_dims[static_cast<size_t>(r.index)]);
  }
  throw ArgumentError("constraint '" + handle + "' is not a cone constraint");
}

double ConicSolution::bound_dual(const std::string& handle) const {
  return cone_dual(handle)(0);
}

}  // namespace mdf::conic
