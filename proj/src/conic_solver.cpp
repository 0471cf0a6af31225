#include <cmath>
#include <limits>

#include "mdf/conic.hpp"
#include "mdf/errors.hpp"

// Primal-dual path-following over R+^l x SOC blocks with Nesterov-Todd
// scaling and Mehrotra predictor-corrector, quadratic objective kept in the
// KKT system. The scaled Newton system is reduced by eliminating dz and dx
// against two Cholesky factors (M = P + G'(W'W)^-1 G, then the Schur
// complement on the equality block).

namespace mdf::conic {
namespace {

constexpr double kStepScale = 0.99;
constexpr int kSigmaExponent = 3;

struct ConeLayout {
  int n_orth = 0;
  std::vector<int> soc_dims;

  int dim() const {
    int d = n_orth;
    for (int s : soc_dims) d += s;
    return d;
  }
  int degree() const { return n_orth + static_cast<int>(soc_dims.size()); }
};

Eigen::VectorXd cone_identity(const ConeLayout& cone) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(cone.dim());
  e.head(cone.n_orth).setOnes();
  int off = cone.n_orth;
  for (int d : cone.soc_dims) {
    e(off) = 1.0;
    off += d;
  }
  return e;
}

// min t such that u + t*e is in the cone; u is interior iff the result < 0.
double max_step(const ConeLayout& cone, const Eigen::VectorXd& u) {
  double t = -std::numeric_limits<double>::infinity();
  if (cone.n_orth > 0) t = std::max(t, -u.head(cone.n_orth).minCoeff());
  int off = cone.n_orth;
  for (int d : cone.soc_dims) {
    t = std::max(t, u.segment(off + 1, d - 1).norm() - u(off));
    off += d;
  }
  return t;
}

Eigen::VectorXd jordan_prod(const ConeLayout& cone, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b) {
  Eigen::VectorXd out(cone.dim());
  out.head(cone.n_orth) = a.head(cone.n_orth).cwiseProduct(b.head(cone.n_orth));
  int off = cone.n_orth;
  for (int d : cone.soc_dims) {
    const auto a1 = a.segment(off + 1, d - 1);
    const auto b1 = b.segment(off + 1, d - 1);
    out(off) = a.segment(off, d).dot(b.segment(off, d));
    out.segment(off + 1, d - 1) = a(off) * b1 + b(off) * a1;
    off += d;
  }
  return out;
}

// Solve lambda o v = u.
Eigen::VectorXd jordan_solve(const ConeLayout& cone, const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& u) {
  Eigen::VectorXd out(cone.dim());
  out.head(cone.n_orth) =
      u.head(cone.n_orth).cwiseQuotient(lambda.head(cone.n_orth));
  int off = cone.n_orth;
  for (int d : cone.soc_dims) {
    const auto l1 = lambda.segment(off + 1, d - 1);
    const auto u1 = u.segment(off + 1, d - 1);
    const double det = lambda(off) * lambda(off) - l1.squaredNorm();
    const double v0 = (lambda(off) * u(off) - l1.dot(u1)) / det;
    out(off) = v0;
    out.segment(off + 1, d - 1) = (u1 - v0 * l1) / lambda(off);
    off += d;
  }
  return out;
}

// P(lambda^{-1/2}) u: maps the step condition lambda + alpha*u >= 0 onto
// e + alpha * (this) >= 0.
Eigen::VectorXd scale_by_lambda(const ConeLayout& cone, const Eigen::VectorXd& lambda,
                                const Eigen::VectorXd& u) {
  Eigen::VectorXd out(cone.dim());
  out.head(cone.n_orth) =
      u.head(cone.n_orth).cwiseQuotient(lambda.head(cone.n_orth));
  int off = cone.n_orth;
  for (int d : cone.soc_dims) {
    const auto l1 = lambda.segment(off + 1, d - 1);
    const auto u1 = u.segment(off + 1, d - 1);
    const double det = lambda(off) * lambda(off) - l1.squaredNorm();
    // lambda^{-1} = J lambda / det, then its Jordan square root.
    const double inv0 = lambda(off) / det;
    const double det_inv_sqrt = 1.0 / std::sqrt(det);
    const double r0 = std::sqrt(0.5 * (inv0 + det_inv_sqrt));
    const Eigen::VectorXd r1 = (-1.0 / det) * l1 / (2.0 * r0);
    const double rdotu = r0 * u(off) + r1.dot(u1);
    out(off) = 2.0 * r0 * rdotu - det_inv_sqrt * u(off);
    out.segment(off + 1, d - 1) = 2.0 * rdotu * r1 + det_inv_sqrt * u1;
    off += d;
  }
  return out;
}

// Nesterov-Todd scaling. For SOC blocks W = eta * V(wbar) with
// V(w) = [w0, w1'; w1, I + w1 w1'/(1+w0)], wbar of unit hyperbolic norm;
// V^{-1} = V(J wbar) and W'W = eta^2 (2 wbar wbar' - J).
struct Scaling {
  ConeLayout cone;
  Eigen::VectorXd w_orth;  // sqrt(s ./ z)
  struct SocScale {
    double eta = 1.0;
    Eigen::VectorXd wbar;
  };
  std::vector<SocScale> soc;
  Eigen::VectorXd lambda;  // W z = W^{-T} s

  static Scaling identity(const ConeLayout& cone) {
    Scaling sc;
    sc.cone = cone;
    sc.w_orth = Eigen::VectorXd::Ones(cone.n_orth);
    for (int d : cone.soc_dims) {
      SocScale s;
      s.eta = 1.0;
      s.wbar = Eigen::VectorXd::Zero(d);
      s.wbar(0) = 1.0;
      sc.soc.push_back(std::move(s));
    }
    sc.lambda = cone_identity(cone);
    return sc;
  }

  // Returns false when s or z is not strictly interior.
  static bool compute(const ConeLayout& cone, const Eigen::VectorXd& s,
                      const Eigen::VectorXd& z, Scaling& out) {
    out.cone = cone;
    out.soc.clear();
    out.lambda.resize(cone.dim());
    if (cone.n_orth > 0) {
      if (s.head(cone.n_orth).minCoeff() <= 0.0 || z.head(cone.n_orth).minCoeff() <= 0.0) {
        return false;
      }
      out.w_orth = (s.head(cone.n_orth).cwiseQuotient(z.head(cone.n_orth))).cwiseSqrt();
      out.lambda.head(cone.n_orth) =
          (s.head(cone.n_orth).cwiseProduct(z.head(cone.n_orth))).cwiseSqrt();
    } else {
      out.w_orth.resize(0);
    }
    int off = cone.n_orth;
    for (int d : cone.soc_dims) {
      const auto sb = s.segment(off, d);
      const auto zb = z.segment(off, d);
      const double sres = sb(0) * sb(0) - sb.tail(d - 1).squaredNorm();
      const double zres = zb(0) * zb(0) - zb.tail(d - 1).squaredNorm();
      if (sres <= 0.0 || zres <= 0.0 || sb(0) <= 0.0 || zb(0) <= 0.0) return false;
      const double a = std::sqrt(sres);
      const double b = std::sqrt(zres);
      const Eigen::VectorXd sn = sb / a;
      const Eigen::VectorXd zn = zb / b;
      const double gamma = std::sqrt(0.5 * (1.0 + sn.dot(zn)));
      SocScale sc;
      sc.eta = std::sqrt(a / b);
      sc.wbar.resize(d);
      sc.wbar(0) = (sn(0) + zn(0)) / (2.0 * gamma);
      sc.wbar.tail(d - 1) = (sn.tail(d - 1) - zn.tail(d - 1)) / (2.0 * gamma);
      // lambda block = eta * V(wbar) z
      out.lambda.segment(off, d) = sc.eta * v_apply(sc.wbar, zb);
      out.soc.push_back(std::move(sc));
      off += d;
    }
    return true;
  }

  static Eigen::VectorXd v_apply(const Eigen::VectorXd& w, const Eigen::VectorXd& u) {
    const int d = static_cast<int>(w.size());
    Eigen::VectorXd out(d);
    const auto w1 = w.tail(d - 1);
    const auto u1 = u.tail(d - 1);
    const double w1u1 = w1.dot(u1);
    out(0) = w(0) * u(0) + w1u1;
    out.tail(d - 1) = u1 + (u(0) + w1u1 / (1.0 + w(0))) * w1;
    return out;
  }

  Eigen::VectorXd apply_w(const Eigen::VectorXd& u) const {  // W u (symmetric)
    Eigen::VectorXd out(cone.dim());
    out.head(cone.n_orth) = w_orth.cwiseProduct(u.head(cone.n_orth));
    int off = cone.n_orth;
    for (size_t k = 0; k < soc.size(); ++k) {
      const int d = cone.soc_dims[k];
      out.segment(off, d) = soc[k].eta * v_apply(soc[k].wbar, u.segment(off, d));
      off += d;
    }
    return out;
  }

  Eigen::VectorXd apply_w_inv(const Eigen::VectorXd& u) const {  // W^{-1} u
    Eigen::VectorXd out(cone.dim());
    out.head(cone.n_orth) = u.head(cone.n_orth).cwiseQuotient(w_orth);
    int off = cone.n_orth;
    for (size_t k = 0; k < soc.size(); ++k) {
      const int d = cone.soc_dims[k];
      Eigen::VectorXd jw = soc[k].wbar;
      jw.tail(d - 1) *= -1.0;
      out.segment(off, d) = v_apply(jw, u.segment(off, d)) / soc[k].eta;
      off += d;
    }
    return out;
  }

  Eigen::VectorXd apply_wtw(const Eigen::VectorXd& u) const {  // W'W u
    Eigen::VectorXd out(cone.dim());
    out.head(cone.n_orth) =
        w_orth.cwiseProduct(w_orth).cwiseProduct(u.head(cone.n_orth));
    int off = cone.n_orth;
    for (size_t k = 0; k < soc.size(); ++k) {
      const int d = cone.soc_dims[k];
      const auto& w = soc[k].wbar;
      const auto ub = u.segment(off, d);
      const double wu = w.dot(ub);
      Eigen::VectorXd ju = ub;
      ju.tail(d - 1) *= -1.0;
      out.segment(off, d) = soc[k].eta * soc[k].eta * (2.0 * wu * w - ju);
      off += d;
    }
    return out;
  }

  // (W'W)^{-1} applied to the rows of a matrix.
  Eigen::MatrixXd apply_inv_wtw(const Eigen::MatrixXd& m) const {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (int i = 0; i < cone.n_orth; ++i) {
      out.row(i) = m.row(i) / (w_orth(i) * w_orth(i));
    }
    int off = cone.n_orth;
    for (size_t k = 0; k < soc.size(); ++k) {
      const int d = cone.soc_dims[k];
      Eigen::VectorXd jw = soc[k].wbar;
      jw.tail(d - 1) *= -1.0;
      const Eigen::RowVectorXd t = jw.transpose() * m.middleRows(off, d);
      Eigen::MatrixXd jm = m.middleRows(off, d);
      jm.bottomRows(d - 1) *= -1.0;
      out.middleRows(off, d) = (2.0 * jw * t - jm) / (soc[k].eta * soc[k].eta);
      off += d;
    }
    return out;
  }
};

// Elimination-based KKT solver:
//   [ P   A'  G'    ] [dx]   [bx]
//   [ A   0   0     ] [dy] = [by]
//   [ G   0  -W'W   ] [dz]   [bz]
struct KktSolver {
  const Eigen::VectorXd* P = nullptr;  // diagonal
  const Eigen::MatrixXd* A = nullptr;
  const Eigen::MatrixXd* G = nullptr;
  const Scaling* scaling = nullptr;
  Eigen::MatrixXd DG;  // (W'W)^{-1} G
  Eigen::LLT<Eigen::MatrixXd> chol_m;
  Eigen::LLT<Eigen::MatrixXd> chol_s;
  bool has_eq = false;

  bool factor(const Eigen::VectorXd& pdiag, const Eigen::MatrixXd& a,
              const Eigen::MatrixXd& g, const Scaling& sc) {
    P = &pdiag;
    A = &a;
    G = &g;
    scaling = &sc;
    has_eq = a.rows() > 0;
    DG = sc.apply_inv_wtw(g);
    Eigen::MatrixXd m = g.transpose() * DG;
    m.diagonal() += pdiag;
    const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
    double reg = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::MatrixXd mr = m;
      if (reg > 0.0) mr.diagonal().array() += reg;
      chol_m.compute(mr);
      if (chol_m.info() == Eigen::Success) break;
      reg = (reg == 0.0) ? 1e-12 * scale : reg * 1e3;
      if (attempt == 3) return false;
    }
    if (has_eq) {
      const Eigen::MatrixXd ami = chol_m.solve(a.transpose());
      Eigen::MatrixXd s = a * ami;
      const double sscale = std::max(1.0, s.diagonal().cwiseAbs().maxCoeff());
      double sreg = 0.0;
      for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::MatrixXd sr = s;
        if (sreg > 0.0) sr.diagonal().array() += sreg;
        chol_s.compute(sr);
        if (chol_s.info() == Eigen::Success) break;
        sreg = (sreg == 0.0) ? 1e-12 * sscale : sreg * 1e3;
        if (attempt == 3) return false;
      }
    }
    return true;
  }

  void solve_once(const Eigen::VectorXd& bx, const Eigen::VectorXd& by,
                  const Eigen::VectorXd& bz, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                  Eigen::VectorXd& dz) const {
    const Eigen::VectorXd t1 = bx + DG.transpose() * bz;
    if (has_eq) {
      const Eigen::VectorXd mt1 = chol_m.solve(t1);
      dy = chol_s.solve(*A * mt1 - by);
      dx = chol_m.solve(t1 - A->transpose() * dy);
    } else {
      dy.resize(0);
      dx = chol_m.solve(t1);
    }
    dz = scaling->apply_inv_wtw(*G * dx - bz);
  }

  void solve(const Eigen::VectorXd& bx, const Eigen::VectorXd& by,
             const Eigen::VectorXd& bz, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
             Eigen::VectorXd& dz) const {
    solve_once(bx, by, bz, dx, dy, dz);
    // One pass of iterative refinement against the unreduced system.
    Eigen::VectorXd r1 = bx - (P->cwiseProduct(dx) + G->transpose() * dz);
    if (has_eq) r1 -= A->transpose() * dy;
    Eigen::VectorXd r2 = has_eq ? Eigen::VectorXd(by - *A * dx) : Eigen::VectorXd();
    const Eigen::VectorXd r3 = bz - (*G * dx - scaling->apply_wtw(dz));
    Eigen::VectorXd cx, cy, cz;
    solve_once(r1, r2, r3, cx, cy, cz);
    dx += cx;
    if (has_eq) dy += cy;
    dz += cz;
  }
};

struct Iterate {
  Eigen::VectorXd x, y, z, s;
  double merit = std::numeric_limits<double>::infinity();
};

}  // namespace

ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts) {
  prog.validate();
  if (!(opts.tol > 0.0)) throw ArgumentError("solver: tolerance must be positive");

  const int n = prog.num_vars;
  const Eigen::VectorXd pdiag = 2.0 * prog.quad_cost;
  const Eigen::VectorXd& q = prog.lin_cost;
  const Eigen::MatrixXd& A = prog.eq_matrix;
  const Eigen::VectorXd& b = prog.eq_rhs;
  const Eigen::MatrixXd G = -prog.cone_matrix;
  const Eigen::VectorXd& h = prog.cone_offset;
  const int p = static_cast<int>(A.rows());
  const int m = static_cast<int>(G.rows());

  ConeLayout cone{prog.orthant_dim, prog.soc_dims};

  ConicSolution sol;
  sol.handles = prog.handles;
  sol.orthant_dim = prog.orthant_dim;
  sol.soc_dims = prog.soc_dims;

  auto finish = [&](SolveStatus status, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& z, const Eigen::VectorXd& s, int iters) {
    sol.status = status;
    sol.x = x;
    sol.objective = 0.5 * x.dot(pdiag.cwiseProduct(x)) + q.dot(x) + prog.const_cost;
    sol.eq_duals = -y;
    sol.cone_duals = z;
    sol.iterations = iters;
    const double resx0 = std::max(1.0, q.norm());
    const double resy0 = std::max(1.0, b.norm());
    const double resz0 = std::max(1.0, h.norm());
    Eigen::VectorXd rx = pdiag.cwiseProduct(x) + q + G.transpose() * z;
    if (p > 0) rx += A.transpose() * y;
    sol.dual_residual = rx.norm() / resx0;
    const double nry = p > 0 ? (A * x - b).norm() / resy0 : 0.0;
    const double nrz = m > 0 ? (G * x + s - h).norm() / resz0 : 0.0;
    sol.primal_residual = std::max(nry, nrz);
    sol.duality_gap = m > 0 ? s.dot(z) : 0.0;
    const double pcost = sol.objective - prog.const_cost;
    sol.relative_gap = sol.duality_gap / std::max(1.0, std::abs(pcost));
    return sol;
  };

  // No cone constraints: plain equality-constrained QP via one KKT solve.
  if (m == 0) {
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + p, n + p);
    kkt.topLeftCorner(n, n).diagonal() = pdiag;
    if (p > 0) {
      kkt.topRightCorner(n, p) = A.transpose();
      kkt.bottomLeftCorner(p, n) = A;
    }
    Eigen::VectorXd rhs(n + p);
    rhs.head(n) = -q;
    rhs.tail(p) = b;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) {
      return finish(SolveStatus::numerical_failure, Eigen::VectorXd::Zero(n),
                    Eigen::VectorXd::Zero(p), Eigen::VectorXd(), Eigen::VectorXd(), 0);
    }
    const Eigen::VectorXd xy = lu.solve(rhs);
    return finish(SolveStatus::optimal, xy.head(n), xy.tail(p), Eigen::VectorXd(),
                  Eigen::VectorXd(), 0);
  }

  // Initial point from the W = I KKT system.
  Eigen::VectorXd x, y, z, s;
  {
    Scaling id = Scaling::identity(cone);
    KktSolver kkt;
    if (!kkt.factor(pdiag, A, G, id)) {
      return finish(SolveStatus::numerical_failure, Eigen::VectorXd::Zero(n),
                    Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(m),
                    Eigen::VectorXd::Zero(m), 0);
    }
    kkt.solve(-q, b, h, x, y, z);
    if (p == 0) y = Eigen::VectorXd::Zero(0);
    s = -z;
    const double ts = max_step(cone, s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) {
      s += (1.0 + ts) * cone_identity(cone);
    }
    const double tz = max_step(cone, z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) {
      z += (1.0 + tz) * cone_identity(cone);
    }
  }

  const double resx0 = std::max(1.0, q.norm());
  const double resy0 = std::max(1.0, b.norm());
  const double resz0 = std::max(1.0, h.norm());
  const Eigen::VectorXd e = cone_identity(cone);
  const double feastol = opts.tol;
  const double abstol = opts.tol;
  const double reltol = opts.tol;
  const double cert_tol = 1e-8;

  Iterate best;
  best.x = x;
  best.y = y;
  best.z = z;
  best.s = s;

  Scaling scaling;
  KktSolver kkt;
  int iter = 0;
  for (; iter <= opts.max_iter; ++iter) {
    const Eigen::VectorXd px = pdiag.cwiseProduct(x);
    Eigen::VectorXd rx = px + q + G.transpose() * z;
    if (p > 0) rx += A.transpose() * y;
    const Eigen::VectorXd ry = p > 0 ? Eigen::VectorXd(A * x - b) : Eigen::VectorXd();
    const Eigen::VectorXd rz = G * x + s - h;

    const double gap = s.dot(z);
    const double pcost = 0.5 * x.dot(px) + q.dot(x);
    double dcost = pcost + z.dot(rz) - gap;
    if (p > 0) dcost += y.dot(ry);
    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0) {
      relgap = gap / -pcost;
    } else if (dcost > 0.0) {
      relgap = gap / dcost;
    }
    const double pres = std::max(p > 0 ? ry.norm() / resy0 : 0.0, rz.norm() / resz0);
    const double dres = rx.norm() / resx0;

    sol.trace.push_back({pcost + prog.const_cost, dcost + prog.const_cost, gap, pres,
                         dres, 0.0});
    if (opts.verbose) {
      // left to the caller's stream on purpose; trace carries the history
    }

    const double merit = std::max({pres, dres, gap / std::max(1.0, std::abs(pcost))});
    if (merit < best.merit) {
      best = {x, y, z, s, merit};
    }

    if (pres <= feastol && dres <= feastol && (gap <= abstol || relgap <= reltol)) {
      return finish(SolveStatus::optimal, x, y, z, s, iter);
    }

    // Farkas-type certificates on the current iterate.
    {
      double denom = -h.dot(z);
      if (p > 0) denom -= b.dot(y);
      const double dual_scale = std::max({1.0, z.lpNorm<Eigen::Infinity>(),
                                          p > 0 ? y.lpNorm<Eigen::Infinity>() : 0.0});
      if (denom > 1e-6 * dual_scale) {
        Eigen::VectorXd atg = G.transpose() * z;
        if (p > 0) atg += A.transpose() * y;
        if (atg.lpNorm<Eigen::Infinity>() / denom <= cert_tol) {
          return finish(SolveStatus::infeasible, x, y, z, s, iter);
        }
      }
      const double down = -q.dot(x);
      if (down > 1e-6 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
        const Eigen::VectorXd xhat = x / down;
        const Eigen::VectorXd gx = G * xhat;
        const bool p_ok = (pdiag.cwiseProduct(xhat)).lpNorm<Eigen::Infinity>() <= cert_tol;
        const bool a_ok = p == 0 || (A * xhat).lpNorm<Eigen::Infinity>() <= cert_tol;
        const bool k_ok = max_step(cone, Eigen::VectorXd(-gx)) <= cert_tol;
        if (p_ok && a_ok && k_ok) {
          return finish(SolveStatus::unbounded, x, y, z, s, iter);
        }
      }
    }

    if (iter == opts.max_iter) break;

    if (!Scaling::compute(cone, s, z, scaling)) break;
    if (!kkt.factor(pdiag, A, G, scaling)) break;

    const double mu = gap / cone.degree();
    const Eigen::VectorXd& lambda = scaling.lambda;
    const Eigen::VectorXd lam_sq = jordan_prod(cone, lambda, lambda);

    // Predictor.
    Eigen::VectorXd dx, dy, dz;
    kkt.solve(-rx, p > 0 ? Eigen::VectorXd(-ry) : Eigen::VectorXd(), -rz + s, dx, dy, dz);
    const Eigen::VectorXd w_dz_aff = scaling.apply_w(dz);
    const Eigen::VectorXd us_aff = -lambda - w_dz_aff;

    double t_aff = std::max(max_step(cone, scale_by_lambda(cone, lambda, us_aff)),
                            max_step(cone, scale_by_lambda(cone, lambda, w_dz_aff)));
    const double step_aff = t_aff <= 0.0 ? 1.0 : std::min(1.0, 1.0 / t_aff);
    const double dsdz = us_aff.dot(w_dz_aff);
    double sigma = 1.0 - step_aff + dsdz / gap * step_aff * step_aff;
    sigma = std::pow(std::min(1.0, std::max(0.0, sigma)), kSigmaExponent);

    // Corrector (combined direction).
    const Eigen::VectorXd bs =
        -lam_sq - jordan_prod(cone, us_aff, w_dz_aff) + sigma * mu * e;
    const Eigen::VectorXd lam_bs = jordan_solve(cone, lambda, bs);
    kkt.solve(-rx, p > 0 ? Eigen::VectorXd(-ry) : Eigen::VectorXd(),
              -rz - scaling.apply_w(lam_bs), dx, dy, dz);
    const Eigen::VectorXd w_dz = scaling.apply_w(dz);
    const Eigen::VectorXd us = lam_bs - w_dz;
    const Eigen::VectorXd ds = scaling.apply_w(us);

    double t = std::max(max_step(cone, scale_by_lambda(cone, lambda, us)),
                        max_step(cone, scale_by_lambda(cone, lambda, w_dz)));
    const double step = t <= 0.0 ? 1.0 : std::min(1.0, kStepScale / t);
    sol.trace.back().step = step;
    if (step < 1e-13) break;

    x += step * dx;
    if (p > 0) y += step * dy;
    z += step * dz;
    s += step * ds;
  }

  return finish(SolveStatus::numerical_failure, best.x, best.y, best.z, best.s, iter);
}

}  // namespace mdf::conic
