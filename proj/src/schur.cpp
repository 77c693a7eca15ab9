// Schur multiplier norm by a reduced semidefinite program.
//
// The block SDP  min t  s.t. [[P, A], [A*, Q]] >= 0, diag P <= t, diag Q <= t
// has the dual  max_{u, v in simplex} ||D_sqrt(u) A D_sqrt(v)||_1.  The dual
// objective h(u, v) is concave, so it is maximized with a log-barrier Newton
// method. Every iterate gives a lower bound h(u, v) and, through the SVD of
// D_sqrt(u) A D_sqrt(v), an explicit factorization A = <x_i, y_j> whose
// bound max|x| max|y| is the matching upper bound. The loop stops once the
// two certified sides meet.

#include "mdlab/schur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mdlab/errors.hpp"

namespace mdlab {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_finite(const MatrixXcd& a) {
  if (a.rows() < 1 || a.cols() < 1) throw ValidationError("Schur problem needs a non-empty matrix");
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) {
        throw ValidationError("Schur problem matrix has a non-finite entry");
      }
    }
  }
}

// Everything the iteration needs at one weight vector w = (u, v).
struct Point {
  double h = 0.0;
  VectorXd grad;
  MatrixXcd ur, vr;  // leading singular vectors of M, rank r
  VectorXd sigma;
  MatrixXcd m;
};

Point evaluate(const MatrixXcd& a, const VectorXd& u, const VectorXd& v) {
  const auto rows = a.rows();
  const auto cols = a.cols();
  Point p;
  const VectorXd su = u.cwiseSqrt();
  const VectorXd sv = v.cwiseSqrt();
  p.m = su.asDiagonal() * a * sv.asDiagonal();
  Eigen::BDCSVD<MatrixXcd> svd(p.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();
  p.h = s.sum();
  Eigen::Index r = 0;
  const double cut = s.size() ? 1e-13 * s(0) : 0.0;
  while (r < s.size() && s(r) > cut) ++r;
  p.sigma = s.head(r);
  p.ur = svd.matrixU().leftCols(r);
  p.vr = svd.matrixV().leftCols(r);
  // d h / d u_i = |M*|_ii / (2 u_i), d h / d v_j = |M|_jj / (2 v_j).
  p.grad.resize(rows + cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    p.grad(i) = (p.ur.row(i).cwiseAbs2().dot(p.sigma)) / (2.0 * u(i));
  }
  for (Eigen::Index j = 0; j < cols; ++j) {
    p.grad(rows + j) = (p.vr.row(j).cwiseAbs2().dot(p.sigma)) / (2.0 * v(j));
  }
  return p;
}

// Hessian of h in the weights. With M = U S V*, K = [[0, M], [M*, 0]] and
// h = tr|K|, the second derivative is a divided-difference form over the
// eigenpairs (U_k, +-V_k)/sqrt2 plus the null directions of K.
MatrixXd hessian(const Point& p, const VectorXd& u, const VectorXd& v) {
  const auto rows = u.size();
  const auto cols = v.size();
  const auto r = p.sigma.size();
  const auto n = rows + cols;

  MatrixXd coeff(r, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    for (Eigen::Index l = 0; l < r; ++l) {
      const double d = p.sigma(k) - p.sigma(l);
      coeff(k, l) = d * d / (p.sigma(k) + p.sigma(l));
    }
  }
  // Z(i, k r + l) = conj(U_ik) U_il
  auto outer_rows = [&](const MatrixXcd& q) {
    MatrixXcd z(q.rows(), r * r);
    for (Eigen::Index k = 0; k < r; ++k) {
      for (Eigen::Index l = 0; l < r; ++l) {
        z.col(k * r + l) = q.col(k).conjugate().cwiseProduct(q.col(l)) * coeff(k, l);
      }
    }
    return z;
  };
  auto plain_rows = [&](const MatrixXcd& q) {
    MatrixXcd z(q.rows(), r * r);
    for (Eigen::Index k = 0; k < r; ++k) {
      for (Eigen::Index l = 0; l < r; ++l) z.col(k * r + l) = q.col(k).conjugate().cwiseProduct(q.col(l));
    }
    return z;
  };
  const MatrixXcd zu = plain_rows(p.ur);
  const MatrixXcd zv = plain_rows(p.vr);
  const MatrixXcd zuc = outer_rows(p.ur);

  MatrixXd hh(n, n);
  hh.topLeftCorner(rows, rows) = (zuc * zu.adjoint()).real();
  hh.topRightCorner(rows, cols) = -(zuc * zv.adjoint()).real();
  hh.bottomRightCorner(cols, cols) = (outer_rows(p.vr) * zv.adjoint()).real();
  hh.bottomLeftCorner(cols, rows) = hh.topRightCorner(rows, cols).transpose();

  const MatrixXcd abs_ms = p.ur * p.sigma.asDiagonal() * p.ur.adjoint();
  const MatrixXcd abs_m = p.vr * p.sigma.asDiagonal() * p.vr.adjoint();
  const MatrixXcd perp_u = MatrixXcd::Identity(rows, rows) - p.ur * p.ur.adjoint();
  const MatrixXcd perp_v = MatrixXcd::Identity(cols, cols) - p.vr * p.vr.adjoint();
  hh.topLeftCorner(rows, rows) += 2.0 * abs_ms.conjugate().cwiseProduct(perp_u).real();
  hh.bottomRightCorner(cols, cols) += 2.0 * abs_m.conjugate().cwiseProduct(perp_v).real();

  VectorXd w(n);
  w << u, v;
  MatrixXd h = hh.array() / (4.0 * w * w.transpose()).array();

  // First-order part: derivative of the weights inside K at fixed sign(K).
  const MatrixXcd sgn = p.ur * p.vr.adjoint();
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double c = 2.0 * (std::conj(sgn(i, j)) * p.m(i, j)).real() / (4.0 * u(i) * v(j));
      h(i, rows + j) += c;
      h(rows + j, i) += c;
    }
  }
  for (Eigen::Index i = 0; i < rows; ++i) h(i, i) -= abs_ms(i, i).real() / (2.0 * u(i) * u(i));
  for (Eigen::Index j = 0; j < cols; ++j) {
    h(rows + j, rows + j) -= abs_m(j, j).real() / (2.0 * v(j) * v(j));
  }
  return 0.5 * h;
}

struct Witness {
  MatrixXcd x, y;
  double bound = 0.0;
  double residual = 0.0;
};

// x_i = U_i S^{1/2} / sqrt(u_i), y_j = V_j S^{1/2} / sqrt(v_j), keeping the
// leading `rank` singular directions.
Witness witness_from(const MatrixXcd& a, const Point& p, const VectorXd& u, const VectorXd& v,
                     Eigen::Index rank) {
  Witness w;
  const VectorXd root = p.sigma.head(rank).cwiseSqrt();
  w.x = u.cwiseSqrt().cwiseInverse().asDiagonal() * p.ur.leftCols(rank) * root.asDiagonal();
  w.y = v.cwiseSqrt().cwiseInverse().asDiagonal() * p.vr.leftCols(rank) * root.asDiagonal();
  const WitnessCheck c = verify_witness(a, w.x, w.y);
  w.bound = c.bound;
  w.residual = c.residual;
  return w;
}

// Certified upper bound: witness bound plus a Schur bound on what it misses.
double certified_upper(const MatrixXcd& a, const Witness& w) {
  const MatrixXcd e = a - w.x * w.y.adjoint();
  return w.bound + schur_norm_crude_upper(e);
}

}  // namespace

WitnessCheck verify_witness(const MatrixXcd& a, const MatrixXcd& x, const MatrixXcd& y) {
  if (x.rows() != a.rows() || y.rows() != a.cols() || x.cols() != y.cols()) {
    throw ValidationError("witness shape does not match the matrix");
  }
  WitnessCheck c;
  if (a.size() == 0) return c;
  c.residual = (a - x * y.adjoint()).cwiseAbs().maxCoeff();
  const double mx = x.cols() ? x.rowwise().norm().maxCoeff() : 0.0;
  const double my = y.cols() ? y.rowwise().norm().maxCoeff() : 0.0;
  c.bound = mx * my;
  return c;
}

double schur_dual_bound(const MatrixXcd& a, const VectorXd& u, const VectorXd& v) {
  if (u.size() != a.rows() || v.size() != a.cols()) throw ValidationError("weight length mismatch");
  if (u.minCoeff() < 0.0 || v.minCoeff() < 0.0) throw ValidationError("weights must be nonnegative");
  const double su = u.sum();
  const double sv = v.sum();
  if (su <= 0.0 || sv <= 0.0) throw ValidationError("weights must not vanish");
  const MatrixXcd m = u.cwiseSqrt().asDiagonal() * a * v.cwiseSqrt().asDiagonal();
  Eigen::BDCSVD<MatrixXcd> svd(m);
  return svd.singularValues().sum() / std::sqrt(su * sv);
}

double schur_norm_crude_upper(const MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  return std::min(a.rowwise().norm().maxCoeff(), a.colwise().norm().maxCoeff());
}

SchurSolution schur_norm(const SchurProblem& problem) {
  const MatrixXcd& a0 = problem.matrix;
  const SchurOptions& opt = problem.options;
  check_finite(a0);
  if (!(opt.tol > 0.0)) throw ValidationError("Schur tolerance must be positive");
  if (opt.max_iterations < 1) throw ValidationError("Schur iteration cap must be positive");

  const auto rows = a0.rows();
  const auto cols = a0.cols();
  const auto n = rows + cols;
  SchurSolution sol;

  const double scale = a0.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    sol.witness = {MatrixXcd::Zero(rows, 1), MatrixXcd::Zero(cols, 1)};
    sol.row_weights = VectorXd::Constant(rows, 1.0 / rows);
    sol.col_weights = VectorXd::Constant(cols, 1.0 / cols);
    sol.converged = true;
    return sol;
  }
  const MatrixXcd a = a0 / scale;
  const double target = 0.5 * opt.tol / scale;

  VectorXd u = VectorXd::Constant(rows, 1.0 / rows);
  VectorXd v = VectorXd::Constant(cols, 1.0 / cols);
  Point p = evaluate(a, u, v);

  double best_lower = p.h;
  VectorXd best_u = u, best_v = v;
  double best_upper = std::numeric_limits<double>::infinity();
  Point best_upper_point = p;
  VectorXd best_upper_u = u, best_upper_v = v;

  auto record = [&](const Point& q, const VectorXd& uu, const VectorXd& vv) {
    const double lower = q.h / std::sqrt(uu.sum() * vv.sum());
    if (lower > best_lower) {
      best_lower = lower;
      best_u = uu;
      best_v = vv;
    }
    const Witness w = witness_from(a, q, uu, vv, q.sigma.size());
    const double upper = certified_upper(a, w);
    if (upper < best_upper) {
      best_upper = upper;
      best_upper_point = q;
      best_upper_u = uu;
      best_upper_v = vv;
    }
  };
  record(p, u, v);

  VectorXd w(n);
  w << u, v;
  double mu = std::max(p.h, 1e-3) / static_cast<double>(n);
  int it = 0;
  bool done = best_upper - best_lower <= target;

  auto barrier = [&](const Point& q, const VectorXd& ww) { return q.h + mu * ww.array().log().sum(); };

  while (!done && it < opt.max_iterations) {
    ++it;
    const VectorXd g = p.grad + mu * w.cwiseInverse();
    MatrixXd pm = -hessian(p, u, v);
    pm.diagonal() += mu * w.cwiseAbs2().cwiseInverse();

    // Newton step for the barrier problem with sum u = sum v = 1.
    MatrixXd c = MatrixXd::Zero(n, 2);
    c.col(0).head(rows).setOnes();
    c.col(1).tail(cols).setOnes();
    Eigen::LDLT<MatrixXd> fact(pm);
    if (fact.info() != Eigen::Success || !fact.isPositive()) {
      pm.diagonal().array() += 1e-12 * pm.diagonal().cwiseAbs().maxCoeff();
      fact.compute(pm);
    }
    const MatrixXd pc = fact.solve(c);
    const VectorXd pg = fact.solve(g);
    const Eigen::Matrix2d s = c.transpose() * pc;
    const Eigen::Vector2d lam = s.ldlt().solve(-c.transpose() * pg);
    VectorXd step = pg + pc * lam;
    // Remove rounding drift off the constraint plane.
    step.head(rows).array() -= step.head(rows).mean();
    step.tail(cols).array() -= step.tail(cols).mean();

    const double decrement = g.dot(step);
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (step(i) < 0.0) alpha = std::min(alpha, -0.99 * w(i) / step(i));
    }
    const double f0 = barrier(p, w);
    Point q;
    VectorXd wn;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      wn = w + alpha * step;
      if (wn.minCoeff() > 0.0) {
        q = evaluate(a, wn.head(rows), wn.tail(cols));
        if (barrier(q, wn) >= f0 + 1e-4 * alpha * decrement) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (accepted) {
      w = wn;
      u = w.head(rows);
      v = w.tail(cols);
      p = std::move(q);
      record(p, u, v);
    }
    if (!accepted || decrement < 0.25 * mu) mu *= 0.2;
    done = best_upper - best_lower <= target;
    if (mu < 1e-18) break;
  }

  sol.iterations = it;
  sol.converged = done;
  sol.lower = best_lower * scale;
  sol.upper = best_upper * scale;
  sol.value = 0.5 * (sol.lower + sol.upper);
  sol.row_weights = best_u / best_u.sum();
  sol.col_weights = best_v / best_v.sum();

  // Reporting witness: singular directions down to tol * sigma_max, enlarged
  // until the entrywise residual is within half the tolerance.
  const Point& bp = best_upper_point;
  const auto full = bp.sigma.size();
  Eigen::Index rank = 0;
  while (rank < full && bp.sigma(rank) >= opt.tol * bp.sigma(0)) ++rank;
  rank = std::max<Eigen::Index>(rank, 1);
  Witness wt = witness_from(a, bp, best_upper_u, best_upper_v, rank);
  while (wt.residual > target && rank < full) {
    ++rank;
    wt = witness_from(a, bp, best_upper_u, best_upper_v, rank);
  }
  const double root = std::sqrt(scale);
  sol.witness = {wt.x * root, wt.y * root};
  sol.witness_residual = verify_witness(a0, sol.witness.x, sol.witness.y).residual;
  return sol;
}

PsdCheck psd_check(const MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) throw ValidationError("psd_check expects a square matrix");
  if (m.size() == 0) return {true, 0.0};
  const double mag = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol * mag) {
    throw ValidationError("psd_check input is not Hermitian");
  }
  const MatrixXcd herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return {lmin >= -tol, lmin};
}

}  // namespace mdlab
