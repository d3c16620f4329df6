#pragma once

// Logarithm of A in GL_n(A(p)), one coefficient position at a time.
//
// At position k the eigenvalue arguments of U_A(k) leave an angular gap of at
// least 2 pi / n. The branch cut is the ray at angle theta_k through the
// midpoint of the largest gap, and log is taken with arg in (theta - 2pi, theta)
// where theta is read in (0, 2pi]. Small B therefore satisfy log(e^B) = B.
//
// Two independent evaluations are compared:
//  (a) eigendecomposition V diag(log lambda) V^-1 when V is well conditioned,
//      else Eigen's Schur-Parlett logarithm of the matrix rotated so that the
//      cut lands on the negative real axis;
//  (b) trapezoid quadrature of (1/2 pi i) \oint log(zeta) (zeta I - U)^-1 dzeta
//      over the keyhole path: arc |zeta| = R+1, inward segment, arc |zeta| = r/2
//      clockwise, outward segment, with r, R the extreme eigenvalue moduli over
//      all positions.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hadamard/matrix.hpp"

namespace hadamard {

struct log_options {
  std::size_t quadrature_nodes = 2048;  ///< 0 skips the contour cross-check
  double agreement_tol = 1e-6;
  double roundtrip_tol = 1e-9;
};

struct matrix_log {
  MatElement log;
  std::vector<double> theta;       ///< branch-cut angle per window position
  double max_disagreement = 0.0;   ///< max |(a) - (b)| entrywise; 0 when skipped
  double max_roundtrip_error = 0.0;
};

namespace detail {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double wrap_angle(double a) {
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a -= two_pi;
  return a;
}

/// Midpoint of the largest gap between the arguments of `lambda`, in [0, 2pi).
/// Ties (within 1e-12) go to the smallest midpoint.
inline double sector_angle(const CVector& lambda) {
  std::vector<double> args;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) args.push_back(wrap_angle(std::arg(lambda(i))));
  std::sort(args.begin(), args.end());
  double best_gap = -1.0, best_mid = 0.0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const double lo = args[i];
    const double hi = (i + 1 < args.size()) ? args[i + 1] : args.front() + two_pi;
    const double gap = hi - lo;
    const double mid = wrap_angle(lo + gap / 2.0);
    if (gap > best_gap + 1e-12 || (std::abs(gap - best_gap) <= 1e-12 && mid < best_mid)) {
      best_gap = std::max(gap, best_gap);
      best_mid = mid;
    }
  }
  return best_mid;
}

/// Lower end of the argument range (theta - 2pi, theta), theta in (0, 2pi].
inline double branch_floor(double theta) { return (theta > 0.0 ? theta : two_pi) - two_pi; }

/// log z with arg in (lo, lo + 2pi), lo = branch_floor(theta).
inline cplx branch_log(cplx z, double theta) {
  const double lo = branch_floor(theta);
  double a = std::arg(z);
  while (a <= lo) a += two_pi;
  while (a > lo + two_pi) a -= two_pi;
  return {std::log(std::abs(z)), a};
}

inline CMatrix log_eigen(const CMatrix& U, double theta) {
  const auto n = U.rows();
  if (n == 1) return CMatrix::Constant(1, 1, branch_log(U(0, 0), theta));
  Eigen::ComplexEigenSolver<CMatrix> es(U);
  const CMatrix& V = es.eigenvectors();
  Eigen::JacobiSVD<CMatrix> svd(V);
  const auto& s = svd.singularValues();
  const double cond = s(n - 1) > 0.0 ? s(0) / s(n - 1) : std::numeric_limits<double>::infinity();
  if (cond <= 1e4) {
    CVector l(n);
    for (Eigen::Index i = 0; i < n; ++i) l(i) = branch_log(es.eigenvalues()(i), theta);
    return V * l.asDiagonal() * V.inverse();
  }
  // cut rotated onto the negative real axis: log_theta(U) = Log(e^-s U) + s, s = i(lo + pi)
  const cplx shift{0.0, branch_floor(theta) + std::numbers::pi};
  const CMatrix rotated = std::exp(-shift) * U;
  CMatrix L = rotated.log();
  L.diagonal().array() += shift;
  return L;
}

// Trapezoid rule in t on [-T, T] after the substitution
// s = (1 + tanh(pi/2 sinh t)) / 2, which maps onto [0, 1] with all
// derivatives of the integrand vanishing at both ends.
template <class F>
CMatrix de_integrate(F&& f, std::size_t nodes, Eigen::Index n) {
  constexpr double T = 3.2;
  CMatrix acc = CMatrix::Zero(n, n);
  const double h = 2.0 * T / static_cast<double>(nodes - 1);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double t = -T + h * static_cast<double>(j);
    const double a = std::numbers::pi / 2.0 * std::sinh(t);
    const double c = std::cosh(a);
    const double ds = std::numbers::pi / 4.0 * std::cosh(t) / (c * c);
    if (ds < 1e-300) continue;
    const double s = 0.5 * (1.0 + std::tanh(a));
    acc += f(s) * (h * ds);
  }
  return acc;
}

inline CMatrix log_contour(const CMatrix& U, double theta, double r, double R, std::size_t nodes) {
  const auto n = U.rows();
  const CMatrix I = CMatrix::Identity(n, n);
  const double alpha = std::numbers::pi / (2.0 * static_cast<double>(n));
  const double lo = branch_floor(theta);
  const double phi0 = lo + alpha, phi1 = lo + two_pi - alpha;
  const double lin = std::log(r / 2.0), lout = std::log(R + 1.0);
  // the arcs pass closer to the spectrum than the radial segments do
  const std::size_t arc = std::max<std::size_t>(nodes * 7 / 20, 2);
  const std::size_t seg = std::max<std::size_t>(nodes / 2 - arc, 2);

  // integrand log(zeta) (zeta I - U)^-1 dzeta/ds, zeta = exp(lz)
  auto term = [&](cplx lz, cplx dlz) -> CMatrix {
    const cplx zeta = std::exp(lz);
    return (zeta * I - U).partialPivLu().inverse() * (lz * zeta * dlz);
  };
  CMatrix sum = CMatrix::Zero(n, n);
  // outer arc, anticlockwise phi0 -> phi1
  sum += de_integrate([&](double s) { return term({lout, phi0 + s * (phi1 - phi0)}, {0.0, phi1 - phi0}); }, arc, n);
  // inward along arg = phi1
  sum += de_integrate([&](double s) { return term({lout + s * (lin - lout), phi1}, {lin - lout, 0.0}); }, seg, n);
  // inner arc, clockwise phi1 -> phi0
  sum += de_integrate([&](double s) { return term({lin, phi1 + s * (phi0 - phi1)}, {0.0, phi0 - phi1}); }, arc, n);
  // outward along arg = phi0
  sum += de_integrate([&](double s) { return term({lin + s * (lout - lin), phi0}, {lout - lin, 0.0}); }, seg, n);
  return sum / cplx{0.0, two_pi};
}

}  // namespace detail

/// B with e^B = A. Throws NotInGL, QuadratureDisagreement, NumericalFailure.
inline matrix_log mat_log(const MatElement& a, const log_options& opt = {}) {
  require_square(a);
  if (opt.quadrature_nodes == 1 || opt.quadrature_nodes > (std::size_t{1} << 24))
    throw error(errc::bad_input, "quadrature_nodes must be 0 or in [2, 2^24]");
  const joint_window w = a.window();
  const auto n = static_cast<Eigen::Index>(a.rows());

  std::vector<CMatrix> us;
  std::vector<double> thetas;
  double r = std::numeric_limits<double>::infinity(), R = 0.0;
  for (index_t k = 0; k < w.end(); ++k) {
    CMatrix U = a.at(k);
    Eigen::JacobiSVD<CMatrix> svd(U);
    const auto& s = svd.singularValues();
    if (!(s(n - 1) > 1e-13 * s(0))) throw error(errc::not_in_gl, "U_A(k) is singular", k);
    Eigen::ComplexEigenSolver<CMatrix> es(U, false);
    const CVector& lambda = es.eigenvalues();
    for (Eigen::Index i = 0; i < n; ++i) {
      r = std::min(r, std::abs(lambda(i)));
      R = std::max(R, std::abs(lambda(i)));
    }
    thetas.push_back(detail::sector_angle(lambda));
    us.push_back(std::move(U));
  }

  matrix_log out{MatElement(a), thetas, 0.0, 0.0};
  std::vector<CMatrix> logs;
  logs.reserve(us.size());
  for (index_t k = 0; k < w.end(); ++k) {
    CMatrix B = detail::log_eigen(us[k], thetas[k]);
    if (opt.quadrature_nodes > 0) {
      const CMatrix Q = detail::log_contour(us[k], thetas[k], r, R, opt.quadrature_nodes);
      const double diff = detail::max_abs(B - Q);
      out.max_disagreement = std::max(out.max_disagreement, diff);
      if (!(diff <= opt.agreement_tol))
        throw error(errc::quadrature_disagreement,
                    "eigen and contour logarithms differ by " + detail::format_number(diff), k);
    }
    const double rt = detail::max_abs(expm(B) - us[k]);
    out.max_roundtrip_error = std::max(out.max_roundtrip_error, rt);
    if (!(rt <= opt.roundtrip_tol))
      throw error(errc::numerical_failure, "exp(log U) misses U by " + detail::format_number(rt), k);
    logs.push_back(std::move(B));
  }
  out.log = MatElement::from_positions(a.weight_ref(), w, logs);
  return out;
}

}  // namespace hadamard
