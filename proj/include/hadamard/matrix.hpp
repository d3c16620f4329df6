#pragma once

// Matrices over A(p).
//
// Entry (i,j) of U_A(k) is the normalized coefficient u_{a_ij}(k) = p(k) a^_ij(k).
// Matrix product over A(p) is the pointwise product of these coefficient
// matrices, so everything here works one coefficient position at a time on
// the joint window of the entries and reassembles eventually periodic entries.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "hadamard/algebra.hpp"

namespace hadamard {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

class MatElement {
 public:
  MatElement(WeightRef w, std::size_t rows, std::size_t cols, std::vector<Element> entries)
      : weight_(std::move(w)), rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0) throw error(errc::dimension_mismatch, "empty matrix");
    if (entries_.size() != rows_ * cols_) throw error(errc::dimension_mismatch, "entry count != rows*cols");
    for (const auto& e : entries_) {
      if (!(e.weight() == *weight_)) throw error(errc::weight_mismatch, "entry weight differs from matrix weight");
      (void)e.seq();  // EPSeq-backed entries only
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const WeightRef& weight_ref() const noexcept { return weight_; }
  const Weight& weight() const noexcept { return *weight_; }

  const Element& operator()(std::size_t i, std::size_t j) const { return entries_.at(i * cols_ + j); }
  const std::vector<Element>& entries() const noexcept { return entries_; }

  joint_window window() const {
    std::vector<const EPSeq*> seqs;
    for (const auto& e : entries_) seqs.push_back(&e.seq());
    return window_of(seqs);
  }

  /// U_A(k).
  CMatrix at(index_t k) const {
    CMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = entries_[i * cols_ + j].seq()[k];
    return m;
  }

  /// Reassemble from coefficient matrices at every position of `w`.
  static MatElement from_positions(WeightRef wt, const joint_window& w, const std::vector<CMatrix>& us) {
    if (us.size() != w.end() || us.empty()) throw error(errc::bad_input, "position count mismatch");
    const auto rows = static_cast<std::size_t>(us.front().rows());
    const auto cols = static_cast<std::size_t>(us.front().cols());
    std::vector<Element> entries;
    entries.reserve(rows * cols);
    std::vector<cplx> vals(w.end());
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        for (index_t k = 0; k < w.end(); ++k) {
          const cplx v = us[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          if (!detail::finite(v)) throw error(errc::numerical_failure, "non-finite matrix coefficient", k);
          vals[k] = v;
        }
        entries.emplace_back(wt, from_window(w, vals));
      }
    return MatElement(std::move(wt), rows, cols, std::move(entries));
  }

 private:
  WeightRef weight_;
  std::size_t rows_, cols_;
  std::vector<Element> entries_;
};

/// Joint window over several matrices.
inline joint_window window_of(std::initializer_list<const MatElement*> ms) {
  std::vector<const EPSeq*> seqs;
  for (const MatElement* m : ms)
    for (const auto& e : m->entries()) seqs.push_back(&e.seq());
  return window_of(seqs);
}

/// Apply `fn(k, U(k)...)` at every position of the joint window.
template <class Fn>
std::vector<CMatrix> map_positions(const MatElement& a, Fn&& fn) {
  const joint_window w = a.window();
  std::vector<CMatrix> out;
  out.reserve(w.end());
  for (index_t k = 0; k < w.end(); ++k) out.push_back(fn(k, a.at(k)));
  return out;
}

inline void require_square(const MatElement& a) {
  if (a.rows() != a.cols()) throw error(errc::dimension_mismatch, "square matrix required");
}

inline MatElement mat_identity(WeightRef w, std::size_t n) {
  std::vector<Element> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e.push_back(i == j ? unit(w) : zero(w));
  return MatElement(w, n, n, std::move(e));
}

inline MatElement mat_add(const MatElement& a, const MatElement& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw error(errc::dimension_mismatch, "shape mismatch in add");
  std::vector<Element> e;
  for (std::size_t i = 0; i < a.entries().size(); ++i) e.push_back(a.entries()[i] + b.entries()[i]);
  return MatElement(a.weight_ref(), a.rows(), a.cols(), std::move(e));
}

inline MatElement mat_mul(const MatElement& a, const MatElement& b) {
  if (a.cols() != b.rows()) throw error(errc::dimension_mismatch, "inner dimensions differ");
  if (!(a.weight() == b.weight())) throw error(errc::weight_mismatch, "matrix weights differ");
  const joint_window w = window_of({&a, &b});
  std::vector<CMatrix> us;
  us.reserve(w.end());
  for (index_t k = 0; k < w.end(); ++k) us.push_back(a.at(k) * b.at(k));
  return MatElement::from_positions(a.weight_ref(), w, us);
}

namespace detail {

// Cofactor expansion: exact on data where products and sums are exact.
inline cplx cofactor_det(const CMatrix& m) {
  const Eigen::Index n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (n > 6) return m.partialPivLu().determinant();
  cplx d{};
  for (Eigen::Index j = 0; j < n; ++j) {
    if (m(0, j) == cplx{}) continue;
    CMatrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r)
      for (Eigen::Index c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = m(r, c);
    const cplx term = m(0, j) * cofactor_det(minor);
    d += (j % 2 == 0) ? term : -term;
  }
  return d;
}

inline double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace detail

/// det A with u_{det A}(k) = det U_A(k).
inline Element mat_det(const MatElement& a) {
  require_square(a);
  const joint_window w = a.window();
  std::vector<cplx> vals(w.end());
  for (index_t k = 0; k < w.end(); ++k) vals[k] = detail::cofactor_det(a.at(k));
  return Element(a.weight_ref(), from_window(w, vals));
}

struct norm_bounds {
  double max_entry_norm;  ///< max_ij ||a_ij||, a lower bound for the sup below
  double spectral_sup;    ///< sup_k ||U_A(k)||_{2,2}, exact over the window
  double upper;           ///< max(rows, cols) * max_entry_norm
  bool holds;             ///< spectral_sup <= upper (up to rounding)
};

inline norm_bounds mat_norm_bounds(const MatElement& a) {
  norm_bounds nb{0.0, 0.0, 0.0, false};
  for (const auto& e : a.entries()) nb.max_entry_norm = std::max(nb.max_entry_norm, norm(e));
  const joint_window w = a.window();
  for (index_t k = 0; k < w.end(); ++k) nb.spectral_sup = std::max(nb.spectral_sup, detail::spectral_norm(a.at(k)));
  nb.upper = static_cast<double>(std::max(a.rows(), a.cols())) * nb.max_entry_norm;
  nb.holds = nb.spectral_sup <= nb.upper * (1.0 + 1e-14);
  return nb;
}

// ---- A x = b ---------------------------------------------------------------

struct solve_result {
  double delta;  ///< 1 / sup_k ||x_k||_2 (infinite when x = 0)
  MatElement x;
  double max_residual;  ///< max_k ||U_A(k) x_k - u_b(k)||_2
};

/// Solve A * x = b one coefficient position at a time with the minimal-norm
/// least squares solution. Inconsistent positions fail with a unit vector y
/// in the numerical left null space of U_A(k) with <y, u_b(k)> != 0, which
/// violates ||U_A(k)^* y|| >= delta |<y, u_b(k)>| for every delta > 0.
/// Numerical rank uses singular values above rtol * sigma_max.
inline outcome<solve_result> mat_solve(const MatElement& a, const MatElement& b, double rtol = 1e-10) {
  if (b.cols() != 1 || b.rows() != a.rows()) throw error(errc::dimension_mismatch, "b must be rows(A) x 1");
  if (!(a.weight() == b.weight())) throw error(errc::weight_mismatch, "A and b weights differ");
  if (!(rtol > 0.0)) throw error(errc::bad_input, "rtol must be positive");
  const joint_window w = window_of({&a, &b});
  const auto n = static_cast<Eigen::Index>(a.cols());
  std::vector<CMatrix> xs;
  xs.reserve(w.end());
  double sup_x = 0.0, max_res = 0.0;
  for (index_t k = 0; k < w.end(); ++k) {
    const CMatrix U = a.at(k);
    const CVector v = b.at(k).col(0);
    Eigen::JacobiSVD<CMatrix> svd(U, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < s.size() && smax > 0.0 && s(rank) > rtol * smax) ++rank;

    CVector x = CVector::Zero(n);
    for (Eigen::Index i = 0; i < rank; ++i)
      x += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(v) / s(i));

    // component of v outside the numerical range of U
    CVector y = CVector::Zero(U.rows());
    for (Eigen::Index i = rank; i < U.rows(); ++i) y += svd.matrixU().col(i) * svd.matrixU().col(i).dot(v);
    const double scale = std::max({v.norm(), smax * x.norm(), std::numeric_limits<double>::min()});
    if (y.norm() > rtol * scale) {
      y /= y.norm();
      return failure{errc::inconsistent, k, "u_b(k) has a component outside the range of U_A(k)",
                     std::vector<cplx>(y.data(), y.data() + y.size())};
    }
    max_res = std::max(max_res, (U * x - v).norm());
    sup_x = std::max(sup_x, x.norm());
    xs.push_back(x);
  }
  const double delta = sup_x > 0.0 ? 1.0 / sup_x : std::numeric_limits<double>::infinity();
  return solve_result{delta, MatElement::from_positions(a.weight_ref(), w, xs), max_res};
}

// ---- exponential -----------------------------------------------------------

/// exp(U) by Eigen's scaling-and-squaring Pade approximant; 1x1 uses std::exp.
inline CMatrix expm(const CMatrix& u) {
  if (u.rows() == 1) return CMatrix::Constant(1, 1, std::exp(u(0, 0)));
  return u.exp();
}

/// e^B with U_{e^B}(k) = exp(U_B(k)).
inline MatElement mat_exp(const MatElement& b) {
  require_square(b);
  return MatElement::from_positions(b.weight_ref(), b.window(),
                                    map_positions(b, [](index_t, const CMatrix& u) { return expm(u); }));
}

// ---- resolvent diagnostic --------------------------------------------------

struct resolvent_check {
  index_t position;
  double distance;  ///< d(z, spectrum of U_A(k))
  double lhs;       ///< ||(zI - U)^-1||_{2,2}
  double rhs;       ///< (1/d) exp(c2 * 2n ||U||^2 / d^2 + b2)
  bool holds;
};

/// Evaluate both sides of the resolvent growth estimate at every position.
/// Diagnostic only: c2 and b2 are caller-supplied constants.
inline std::vector<resolvent_check> resolvent_bound_check(const MatElement& a, cplx z, double c2, double b2) {
  require_square(a);
  if (!(c2 > 0.0) || !(b2 > 0.0)) throw error(errc::bad_input, "c2 and b2 must be positive");
  const joint_window w = a.window();
  const auto n = static_cast<double>(a.rows());
  std::vector<resolvent_check> out;
  for (index_t k = 0; k < w.end(); ++k) {
    const CMatrix U = a.at(k);
    Eigen::ComplexEigenSolver<CMatrix> es(U, false);
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) d = std::min(d, std::abs(z - es.eigenvalues()(i)));
    const CMatrix shifted = z * CMatrix::Identity(U.rows(), U.cols()) - U;
    Eigen::JacobiSVD<CMatrix> svd(shifted);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double scale = std::max(1.0, std::abs(z) + detail::spectral_norm(U));
    if (d <= 1e-14 * scale || smin == 0.0) throw error(errc::spectrum_hit, "z is an eigenvalue", k);
    const double unorm = detail::spectral_norm(U);
    const double lhs = 1.0 / smin;
    const double rhs = std::exp(c2 * 2.0 * n * unorm * unorm / (d * d) + b2) / d;
    out.push_back({k, d, lhs, rhs, lhs <= rhs});
  }
  return out;
}

}  // namespace hadamard
