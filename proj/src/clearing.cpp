#include "mdf/clearing.hpp"

#include <cmath>
#include <sstream>

#include "mdf/errors.hpp"

namespace mdf {
namespace {

using conic::LinExpr;

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  if (cov.rows() == 0) return cov;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
    throw ValidationError("chance reformulation: covariance is not positive semidefinite");
  }
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

std::string tag(const char* name, int a, int b) {
  std::ostringstream os;
  os << name << '[' << a + 1 << ',' << b + 1 << ']';
  return os.str();
}

}  // namespace

std::string chance_class_name(ChanceClass cls) {
  switch (cls) {
    case ChanceClass::generator_max: return "generator_max";
    case ChanceClass::generator_min: return "generator_min";
    case ChanceClass::line_max: return "line_max";
    case ChanceClass::line_min: return "line_min";
    case ChanceClass::vb_power_max: return "vb_power_max";
    case ChanceClass::vb_power_min: return "vb_power_min";
    case ChanceClass::vb_soc_max: return "vb_soc_max";
    case ChanceClass::vb_soc_min: return "vb_soc_min";
  }
  return "unknown";
}

namespace handles {
std::string balance(int period) { return "balance[" + std::to_string(period + 1) + "]"; }
std::string simplex(int period) { return "simplex[" + std::to_string(period + 1) + "]"; }
std::string gen_max(int gen, int period) { return tag("gen_max", gen, period); }
std::string gen_min(int gen, int period) { return tag("gen_min", gen, period); }
std::string line_max(int line, int period) { return tag("line_max", line, period); }
std::string line_min(int line, int period) { return tag("line_min", line, period); }
std::string vb_power_max(int agg, int period) { return tag("vb_pmax", agg, period); }
std::string vb_power_min(int agg, int period) { return tag("vb_pmin", agg, period); }
std::string vb_soc_max(int agg, int period) { return tag("vb_emax", agg, period); }
std::string vb_soc_min(int agg, int period) { return tag("vb_emin", agg, period); }
}  // namespace handles

ReformulatedRows reformulate_chance(conic::ProgramBuilder& builder,
                                    const std::vector<LinExpr>& a_rows,
                                    const LinExpr& margin, const Eigen::MatrixXd& cov,
                                    double eps, const std::string& handle) {
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw ValidationError("chance reformulation: eps must lie in (0, 0.5] for '" +
                          handle + "'");
  }
  if (cov.rows() != static_cast<Eigen::Index>(a_rows.size())) {
    throw ArgumentError("chance reformulation: covariance dimension mismatch for '" +
                        handle + "'");
  }
  ReformulatedRows out;
  const Eigen::MatrixXd root = psd_sqrt(cov);
  const int dim = static_cast<int>(a_rows.size());
  for (int r = 0; r < dim; ++r) {
    LinExpr row;
    for (int c = 0; c < dim; ++c) {
      const double w = root(r, c);
      if (w == 0.0) continue;
      LinExpr scaled = a_rows[static_cast<size_t>(c)];
      scaled *= w;
      row += scaled;
    }
    out.sigma_rows.push_back(std::move(row));
  }
  const double quantile = quantile_standard_normal(1.0 - eps);
  bool vanishing = quantile == 0.0;
  if (!vanishing) {
    vanishing = true;
    for (const auto& row : out.sigma_rows) {
      if (std::abs(row.constant) > 0.0) vanishing = false;
      for (const auto& [idx, coeff] : row.terms) {
        (void)idx;
        if (coeff != 0.0) vanishing = false;
      }
      if (!vanishing) break;
    }
  }
  if (vanishing) {
    builder.add_nonnegative(margin, handle);
    out.stochastic = false;
    return out;
  }
  std::vector<LinExpr> norm_args;
  norm_args.reserve(static_cast<size_t>(dim));
  for (const auto& row : out.sigma_rows) {
    LinExpr scaled = row;
    scaled *= quantile;
    norm_args.push_back(std::move(scaled));
  }
  builder.add_second_order_cone(std::move(norm_args), margin, handle);
  out.stochastic = true;
  return out;
}

BuiltProgram build_clearing(const Network& net, const PtdfMatrix& ptdf,
                            const WindModel& wind, const RiskParameters& risk,
                            const std::vector<MdfBid>& bids) {
  const int T = net.horizon();
  const int n_g = net.generator_count();
  const int n_w = net.wind_count();
  const int n_f = static_cast<int>(bids.size());
  const int L = net.line_count();
  const double base = net.power_base_mva;

  if (n_g < 1) throw ValidationError("clearing: network has no generators");
  wind.validate();
  if (wind.units() != n_w) throw ValidationError("clearing: wind model does not match network");
  if (n_w > 0 && wind.periods() != T) {
    throw ValidationError("clearing: wind horizon does not match load horizon");
  }
  risk.validate(n_g, L, n_f);
  for (const auto& bid : bids) bid.validate(T);

  const AggregateDeviation agg = aggregate_stats(wind);
  std::vector<Eigen::MatrixXd> cov_by_period = wind.covariance;

  const ConnectionMatrices conn = connection_matrices(net);
  const Eigen::MatrixXd gamma_g = ptdf.gamma * conn.gen;    // L x n_g
  const Eigen::MatrixXd gamma_w = ptdf.gamma * conn.wind;   // L x n_w
  const Eigen::MatrixXd gamma_d = ptdf.gamma * conn.load;   // L x n_d
  Eigen::MatrixXd gamma_f(L, n_f);
  for (int f = 0; f < n_f; ++f) {
    gamma_f.col(f) = ptdf.gamma.col(net.bus_index(bids[static_cast<size_t>(f)].bus));
  }
  const Eigen::MatrixXd load_pu = net.load_profile_pu();  // T x n_d

  conic::ProgramBuilder builder;
  DecisionLayout layout;
  layout.horizon = T;
  layout.pg.setConstant(n_g, T, -1);
  layout.beta_g.setConstant(n_g, T, -1);
  layout.pf.setConstant(n_f, T, -1);
  layout.beta_f.setConstant(n_f, T, -1);
  layout.alpha.setConstant(n_f, 4, -1);

  for (int i = 0; i < n_g; ++i) {
    for (int t = 0; t < T; ++t) {
      layout.pg(i, t) = builder.add_variable(tag("pg", i, t));
      layout.beta_g(i, t) = builder.add_variable(tag("beta_g", i, t));
    }
  }
  for (int f = 0; f < n_f; ++f) {
    const MdfBid& bid = bids[static_cast<size_t>(f)];
    for (int t = 0; t < T; ++t) {
      if (!bid.in_window(t)) continue;
      layout.pf(f, t) = builder.add_variable(tag("pf", f, t));
      layout.beta_f(f, t) = builder.add_variable(tag("beta_f", f, t));
    }
    // Zero-width acceptance intervals stay pinned at zero instead of
    // becoming an empty-interior box.
    if (bid.r_min < 0.0) layout.alpha(f, 0) = builder.add_variable("alpha_rm[" + std::to_string(f + 1) + "]");
    if (bid.r_max > 0.0) layout.alpha(f, 1) = builder.add_variable("alpha_rp[" + std::to_string(f + 1) + "]");
    if (bid.e_min < 0.0) layout.alpha(f, 2) = builder.add_variable("alpha_em[" + std::to_string(f + 1) + "]");
    if (bid.e_max > 0.0) layout.alpha(f, 3) = builder.add_variable("alpha_ep[" + std::to_string(f + 1) + "]");
  }
  layout.num_vars = builder.variable_count();

  // Expected generation cost, expanded through the affine policy:
  // c2 (pg^2 + sigma_t^2 beta^2) + c1 pg + c0, evaluated in MW.
  for (int i = 0; i < n_g; ++i) {
    const Generator& gen = net.generators[static_cast<size_t>(i)];
    for (int t = 0; t < T; ++t) {
      const double sig = agg.sigma(t);
      builder.add_quadratic_cost(layout.pg(i, t), gen.cost_quad * base * base);
      builder.add_quadratic_cost(layout.beta_g(i, t), gen.cost_quad * base * base * sig * sig);
      builder.add_linear_cost(layout.pg(i, t), gen.cost_lin * base);
      builder.add_constant_cost(gen.cost_const);
    }
  }
  // MDF reward payments.
  for (int f = 0; f < n_f; ++f) {
    const MdfBid& bid = bids[static_cast<size_t>(f)];
    if (layout.alpha(f, 0) >= 0) builder.add_linear_cost(layout.alpha(f, 0), -bid.gamma_p);
    if (layout.alpha(f, 1) >= 0) builder.add_linear_cost(layout.alpha(f, 1), bid.gamma_p);
    if (layout.alpha(f, 2) >= 0) builder.add_linear_cost(layout.alpha(f, 2), -bid.gamma_e);
    if (layout.alpha(f, 3) >= 0) builder.add_linear_cost(layout.alpha(f, 3), bid.gamma_e);
  }

  auto alpha_expr = [&](int f, int which) {
    // Fixed-at-zero sides evaluate as the constant 0.
    return layout.alpha(f, which) >= 0 ? LinExpr::variable(layout.alpha(f, which))
                                       : LinExpr(0.0);
  };

  for (int t = 0; t < T; ++t) {
    // Expected supply-demand balance.
    LinExpr balance;
    for (int i = 0; i < n_g; ++i) balance.add(layout.pg(i, t), 1.0);
    for (int f = 0; f < n_f; ++f) {
      if (layout.pf(f, t) >= 0) balance.add(layout.pf(f, t), 1.0);
    }
    double rhs = net.total_load_pu(t);
    for (int j = 0; j < n_w; ++j) rhs -= wind.mean_pu(t, j);
    builder.add_equality(balance, rhs, handles::balance(t));

    // Joint participation-factor simplex.
    LinExpr simplex;
    for (int i = 0; i < n_g; ++i) simplex.add(layout.beta_g(i, t), 1.0);
    for (int f = 0; f < n_f; ++f) {
      if (layout.beta_f(f, t) >= 0) simplex.add(layout.beta_f(f, t), 1.0);
    }
    builder.add_equality(simplex, 1.0, handles::simplex(t));

    for (int i = 0; i < n_g; ++i) {
      builder.add_nonnegative(LinExpr::variable(layout.beta_g(i, t)), tag("beta_g_nn", i, t));
    }
    for (int f = 0; f < n_f; ++f) {
      if (layout.beta_f(f, t) >= 0) {
        builder.add_nonnegative(LinExpr::variable(layout.beta_f(f, t)), tag("beta_f_nn", f, t));
      }
    }

    const double sigma_t = agg.sigma(t);
    Eigen::MatrixXd omega_cov(1, 1);
    omega_cov(0, 0) = sigma_t * sigma_t;

    // Generator output limits, conditioned on the scalar total deviation.
    for (int i = 0; i < n_g; ++i) {
      const Generator& gen = net.generators[static_cast<size_t>(i)];
      const double eps = risk.eps_gen[static_cast<size_t>(i)];
      {
        std::vector<LinExpr> a = {LinExpr::variable(layout.beta_g(i, t), -1.0)};
        LinExpr margin(gen.p_max_mw / base);
        margin.add(layout.pg(i, t), -1.0);
        auto rows = reformulate_chance(builder, a, margin, omega_cov, eps,
                                       handles::gen_max(i, t));
        layout.chance.push_back({handles::gen_max(i, t), ChanceClass::generator_max, i, t,
                                 eps, std::move(rows.sigma_rows), margin, rows.stochastic});
      }
      {
        std::vector<LinExpr> a = {LinExpr::variable(layout.beta_g(i, t), 1.0)};
        LinExpr margin(-gen.p_min_mw / base);
        margin.add(layout.pg(i, t), 1.0);
        auto rows = reformulate_chance(builder, a, margin, omega_cov, eps,
                                       handles::gen_min(i, t));
        layout.chance.push_back({handles::gen_min(i, t), ChanceClass::generator_min, i, t,
                                 eps, std::move(rows.sigma_rows), margin, rows.stochastic});
      }
    }

    // Line flows, conditioned on the deviation vector.
    for (int l = 0; l < L; ++l) {
      const double limit = net.lines[static_cast<size_t>(l)].flow_limit_mw / base;
      const double eps = risk.eps_line[static_cast<size_t>(l)];
      // e_l' Gamma (Hg pg + Hw wbar + Hf pf - Hd pd), split into the
      // deviation row A(X) and the expected flow.
      std::vector<LinExpr> a_rows;
      a_rows.reserve(static_cast<size_t>(n_w));
      for (int j = 0; j < n_w; ++j) {
        LinExpr row(gamma_w(l, j));
        for (int i = 0; i < n_g; ++i) row.add(layout.beta_g(i, t), -gamma_g(l, i));
        for (int f = 0; f < n_f; ++f) {
          if (layout.beta_f(f, t) >= 0) row.add(layout.beta_f(f, t), -gamma_f(l, f));
        }
        a_rows.push_back(std::move(row));
      }
      LinExpr expected_flow;
      for (int i = 0; i < n_g; ++i) expected_flow.add(layout.pg(i, t), gamma_g(l, i));
      for (int f = 0; f < n_f; ++f) {
        if (layout.pf(f, t) >= 0) expected_flow.add(layout.pf(f, t), gamma_f(l, f));
      }
      for (int j = 0; j < n_w; ++j) expected_flow.add_constant(gamma_w(l, j) * wind.mean_pu(t, j));
      for (int d = 0; d < net.load_count(); ++d) expected_flow.add_constant(-gamma_d(l, d) * load_pu(t, d));
      {
        LinExpr margin(limit);
        margin += -1.0 * expected_flow;
        auto rows = reformulate_chance(builder, a_rows, margin,
                                       cov_by_period.empty() ? Eigen::MatrixXd(0, 0)
                                                             : cov_by_period[static_cast<size_t>(t)],
                                       eps, handles::line_max(l, t));
        layout.chance.push_back({handles::line_max(l, t), ChanceClass::line_max, l, t, eps,
                                 std::move(rows.sigma_rows), margin, rows.stochastic});
      }
      {
        std::vector<LinExpr> neg_rows;
        neg_rows.reserve(a_rows.size());
        for (const auto& row : a_rows) {
          LinExpr neg = row;
          neg *= -1.0;
          neg_rows.push_back(std::move(neg));
        }
        LinExpr margin(limit);
        margin += expected_flow;
        auto rows = reformulate_chance(builder, neg_rows, margin,
                                       cov_by_period.empty() ? Eigen::MatrixXd(0, 0)
                                                             : cov_by_period[static_cast<size_t>(t)],
                                       eps, handles::line_min(l, t));
        layout.chance.push_back({handles::line_min(l, t), ChanceClass::line_min, l, t, eps,
                                 std::move(rows.sigma_rows), margin, rows.stochastic});
      }
    }

    // Virtual-battery charging power and state of charge, inside the
    // service window only.
    for (int f = 0; f < n_f; ++f) {
      const MdfBid& bid = bids[static_cast<size_t>(f)];
      if (layout.pf(f, t) < 0) continue;
      const double eps_p = risk.eps_power[static_cast<size_t>(f)];
      {
        std::vector<LinExpr> a = {LinExpr::variable(layout.beta_f(f, t), -1.0)};
        LinExpr margin = alpha_expr(f, 1);
        margin.add(layout.pf(f, t), -1.0);
        auto rows = reformulate_chance(builder, a, margin, omega_cov, eps_p,
                                       handles::vb_power_max(f, t));
        layout.chance.push_back({handles::vb_power_max(f, t), ChanceClass::vb_power_max, f,
                                 t, eps_p, std::move(rows.sigma_rows), margin,
                                 rows.stochastic});
      }
      {
        std::vector<LinExpr> a = {LinExpr::variable(layout.beta_f(f, t), 1.0)};
        LinExpr margin = -1.0 * alpha_expr(f, 0);
        margin.add(layout.pf(f, t), 1.0);
        auto rows = reformulate_chance(builder, a, margin, omega_cov, eps_p,
                                       handles::vb_power_min(f, t));
        layout.chance.push_back({handles::vb_power_min(f, t), ChanceClass::vb_power_min, f,
                                 t, eps_p, std::move(rows.sigma_rows), margin,
                                 rows.stochastic});
      }

      const double eps_e = risk.eps_energy[static_cast<size_t>(f)];
      // A-rows over (Omega_1, ..., Omega_t); entries before the window
      // start are structurally zero.
      std::vector<LinExpr> soc_rows;
      soc_rows.reserve(static_cast<size_t>(t + 1));
      LinExpr discharged;  // sum of set-points up to t
      for (int tau = 0; tau <= t; ++tau) {
        LinExpr row;
        if (layout.beta_f(f, tau) >= 0) row.add(layout.beta_f(f, tau), 1.0);
        soc_rows.push_back(std::move(row));
        if (layout.pf(f, tau) >= 0) discharged.add(layout.pf(f, tau), 1.0);
      }
      {
        LinExpr margin = alpha_expr(f, 3);
        margin += discharged;
        auto rows = reformulate_chance(builder, soc_rows, margin,
                                       agg.cumulative_cov[static_cast<size_t>(t)], eps_e,
                                       handles::vb_soc_max(f, t));
        layout.chance.push_back({handles::vb_soc_max(f, t), ChanceClass::vb_soc_max, f, t,
                                 eps_e, std::move(rows.sigma_rows), margin,
                                 rows.stochastic});
      }
      {
        std::vector<LinExpr> neg_rows;
        neg_rows.reserve(soc_rows.size());
        for (const auto& row : soc_rows) {
          LinExpr neg = row;
          neg *= -1.0;
          neg_rows.push_back(std::move(neg));
        }
        LinExpr margin = -1.0 * alpha_expr(f, 2);
        margin += -1.0 * discharged;
        auto rows = reformulate_chance(builder, neg_rows, margin,
                                       agg.cumulative_cov[static_cast<size_t>(t)], eps_e,
                                       handles::vb_soc_min(f, t));
        layout.chance.push_back({handles::vb_soc_min(f, t), ChanceClass::vb_soc_min, f, t,
                                 eps_e, std::move(rows.sigma_rows), margin,
                                 rows.stochastic});
      }
    }
  }

  // Acceptance boxes.
  for (int f = 0; f < n_f; ++f) {
    const MdfBid& bid = bids[static_cast<size_t>(f)];
    const std::string fs = std::to_string(f + 1);
    if (layout.alpha(f, 0) >= 0) {
      builder.add_nonnegative(LinExpr::variable(layout.alpha(f, 0), -1.0),
                              "alpha_rm_ub[" + fs + "]");
      LinExpr lb = LinExpr::variable(layout.alpha(f, 0));
      lb.add_constant(-bid.r_min);
      builder.add_nonnegative(lb, "alpha_rm_lb[" + fs + "]");
    }
    if (layout.alpha(f, 1) >= 0) {
      builder.add_nonnegative(LinExpr::variable(layout.alpha(f, 1)), "alpha_rp_lb[" + fs + "]");
      LinExpr ub = LinExpr::variable(layout.alpha(f, 1), -1.0);
      ub.add_constant(bid.r_max);
      builder.add_nonnegative(ub, "alpha_rp_ub[" + fs + "]");
    }
    if (layout.alpha(f, 2) >= 0) {
      builder.add_nonnegative(LinExpr::variable(layout.alpha(f, 2), -1.0),
                              "alpha_em_ub[" + fs + "]");
      LinExpr lb = LinExpr::variable(layout.alpha(f, 2));
      lb.add_constant(-bid.e_min);
      builder.add_nonnegative(lb, "alpha_em_lb[" + fs + "]");
    }
    if (layout.alpha(f, 3) >= 0) {
      builder.add_nonnegative(LinExpr::variable(layout.alpha(f, 3)), "alpha_ep_lb[" + fs + "]");
      LinExpr ub = LinExpr::variable(layout.alpha(f, 3), -1.0);
      ub.add_constant(bid.e_max);
      builder.add_nonnegative(ub, "alpha_ep_ub[" + fs + "]");
    }
  }

  BuiltProgram out{builder.build(), std::move(layout), bids, wind};
  return out;
}

BuiltProgram build_cedp(const Network& net, const PtdfMatrix& ptdf, const WindModel& wind,
                        const RiskParameters& risk, int period) {
  Network sliced = slice_single_period(net, period);
  if (net.wind_count() > 0) {
    sliced.wind = wind.slice(period);
  }
  RiskParameters r = risk;
  r.eps_power.clear();
  r.eps_energy.clear();
  return build_clearing(sliced, ptdf, sliced.wind, r, {});
}

ClearingSolution extract_solution(const Network& net, const BuiltProgram& built,
                                  const conic::ConicSolution& conic_solution) {
  if (conic_solution.status != conic::SolveStatus::optimal) {
    throw ArgumentError("extract_solution: solver status is " +
                        conic::status_name(conic_solution.status));
  }
  const DecisionLayout& layout = built.layout;
  const Eigen::VectorXd& x = conic_solution.x;
  const int T = layout.horizon;
  const int n_g = static_cast<int>(layout.pg.rows());
  const int n_f = static_cast<int>(layout.pf.rows());
  const double base = net.power_base_mva;

  ClearingSolution sol;
  sol.conic = conic_solution;
  sol.pg.setZero(n_g, T);
  sol.beta_g.setZero(n_g, T);
  sol.pf.setZero(n_f, T);
  sol.beta_f.setZero(n_f, T);
  for (int i = 0; i < n_g; ++i) {
    for (int t = 0; t < T; ++t) {
      sol.pg(i, t) = x(layout.pg(i, t));
      sol.beta_g(i, t) = x(layout.beta_g(i, t));
    }
  }
  for (int f = 0; f < n_f; ++f) {
    for (int t = 0; t < T; ++t) {
      if (layout.pf(f, t) >= 0) sol.pf(f, t) = x(layout.pf(f, t));
      if (layout.beta_f(f, t) >= 0) sol.beta_f(f, t) = x(layout.beta_f(f, t));
    }
  }
  sol.acceptance.resize(static_cast<size_t>(n_f));
  for (int f = 0; f < n_f; ++f) {
    MdfAcceptance& acc = sol.acceptance[static_cast<size_t>(f)];
    acc.r_minus = layout.alpha(f, 0) >= 0 ? x(layout.alpha(f, 0)) : 0.0;
    acc.r_plus = layout.alpha(f, 1) >= 0 ? x(layout.alpha(f, 1)) : 0.0;
    acc.e_minus = layout.alpha(f, 2) >= 0 ? x(layout.alpha(f, 2)) : 0.0;
    acc.e_plus = layout.alpha(f, 3) >= 0 ? x(layout.alpha(f, 3)) : 0.0;
  }

  const double tol = 1e-6;
  const WindModel& wind = built.wind;
  for (int t = 0; t < T; ++t) {
    double supply = sol.pg.col(t).sum() + sol.pf.col(t).sum();
    double rhs = net.total_load_pu(t);
    for (int j = 0; j < net.wind_count(); ++j) rhs -= wind.mean_pu(t, j);
    if (std::abs(supply - rhs) > tol) {
      throw InternalError("solution violates " + handles::balance(t));
    }
    const double beta_total = sol.beta_g.col(t).sum() + sol.beta_f.col(t).sum();
    if (std::abs(beta_total - 1.0) > tol) {
      throw InternalError("solution violates " + handles::simplex(t));
    }
    if (sol.beta_g.col(t).minCoeff() < -tol ||
        (n_f > 0 && sol.beta_f.col(t).minCoeff() < -tol)) {
      throw InternalError("solution violates participation nonnegativity at period " +
                          std::to_string(t + 1));
    }
  }
  const AggregateDeviation agg = aggregate_stats(wind);
  sol.expected_cost = 0.0;
  for (int i = 0; i < n_g; ++i) {
    const Generator& gen = net.generators[static_cast<size_t>(i)];
    for (int t = 0; t < T; ++t) {
      const double p_mw = sol.pg(i, t) * base;
      const double sig_mw = agg.sigma(t) * sol.beta_g(i, t) * base;
      sol.expected_cost += gen.cost_quad * (p_mw * p_mw + sig_mw * sig_mw) +
                           gen.cost_lin * p_mw + gen.cost_const;
    }
  }
  sol.reward_payment = 0.0;
  for (int f = 0; f < n_f; ++f) {
    const MdfBid& bid = built.bids[static_cast<size_t>(f)];
    validate_acceptance(bid, sol.acceptance[static_cast<size_t>(f)], tol);
    sol.reward_payment += LinearReward{bid.gamma_p, bid.gamma_e}.value(
        sol.acceptance[static_cast<size_t>(f)]);
  }
  sol.objective = conic_solution.objective;
  if (std::abs(sol.objective - (sol.expected_cost + sol.reward_payment)) >
      1e-5 * std::max(1.0, std::abs(sol.objective))) {
    throw InternalError("solution objective does not match expected cost plus reward");
  }

  sol.chance_probabilities.reserve(layout.chance.size());
  for (const auto& info : layout.chance) {
    ConstraintProbability cp;
    cp.handle = info.handle;
    cp.cls = info.cls;
    cp.entity = info.entity;
    cp.period = info.period;
    cp.eps = info.eps;
    cp.margin = info.margin.eval(x);
    double ss = 0.0;
    for (const auto& row : info.sigma_rows) {
      const double v = row.eval(x);
      ss += v * v;
    }
    cp.stddev = std::sqrt(ss);
    if (cp.stddev > 1e-12) {
      cp.satisfaction = standard_normal_cdf(cp.margin / cp.stddev);
    } else {
      cp.satisfaction = cp.margin >= -1e-9 ? 1.0 : 0.0;
    }
    sol.chance_probabilities.push_back(std::move(cp));
  }
  return sol;
}

}  // namespace mdf
