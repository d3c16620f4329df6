#pragma once

// Factorization of A in SL_n(A(p)) into elementary matrices I + alpha e_ij.
//
// Route: B = log A, and the path gamma(t) = exp((1-t)B) with its first column
// scaled by exp(-(1-t) tr B) stays in SL_n and runs from A to I. Cutting
// [0,1] finely enough makes every step M_i = gamma(t_{i+1}) gamma(t_i)^-1
// close to I, so M_i = L D U without pivoting. L and U split into one
// elementary factor per off-diagonal entry and D into diag(a, 1/a) blocks of
// five factors each:
//   diag(a, 1/a) = E12(a) E21(-1/a) E12(a-1) E21(1) E12(-1).
// Then A = M_0^-1 ... M_{N-1}^-1 with E_ij(alpha)^-1 = E_ij(-alpha).
//
// When A itself has an LDU factorization with pivots bounded away from zero
// at every position, that is tried first; the result is still verified.

#include <algorithm>
#include <cmath>
#include <vector>

#include "hadamard/matrix_log.hpp"

namespace hadamard {

struct ElementaryFactor {
  std::size_t i, j;
  Element alpha;

  ElementaryFactor(std::size_t i_, std::size_t j_, Element a) : i(i_), j(j_), alpha(std::move(a)) {
    if (i == j) throw error(errc::bad_input, "elementary factor needs i != j");
  }
};

struct sl_options {
  double step_norm = 0.5;
  double tol = 1e-9;
  bool direct = true;  ///< try LDU of A before the path construction
  std::size_t max_steps = std::size_t{1} << 20;
  /// The path needs some logarithm, not a cross-checked one; the factor
  /// product is verified against A regardless.
  log_options log{.quadrature_nodes = 0};
};

struct sl_factorization {
  std::vector<ElementaryFactor> factors;
  std::size_t steps = 0;  ///< path steps; 0 for the direct route
  double max_error = 0.0;  ///< max_k max-abs(product of factors - U_A(k))
};

namespace detail {

// One elementary factor with per-position scalars, before assembly.
struct raw_factor {
  std::size_t i, j;
  std::vector<cplx> alpha;
};

inline bool all_zero(const std::vector<cplx>& v) {
  return std::all_of(v.begin(), v.end(), [](cplx c) { return c == cplx{}; });
}

// Append with merging of equal (i,j) neighbours and removal of zero factors.
inline void push_factor(std::vector<raw_factor>& out, raw_factor f) {
  if (all_zero(f.alpha)) return;
  if (!out.empty() && out.back().i == f.i && out.back().j == f.j) {
    for (std::size_t k = 0; k < f.alpha.size(); ++k) out.back().alpha[k] += f.alpha[k];
    if (all_zero(out.back().alpha)) out.pop_back();
    return;
  }
  out.push_back(std::move(f));
}

// LDU of each M(k) without pivoting; nullopt when some pivot is below `floor`.
inline std::optional<std::vector<raw_factor>> ldu_factors(const std::vector<CMatrix>& ms, double floor) {
  const std::size_t P = ms.size();
  const auto n = ms.front().rows();
  std::vector<CMatrix> L(P), U(P);
  std::vector<CVector> D(P);
  for (std::size_t k = 0; k < P; ++k) {
    CMatrix a = ms[k];
    L[k] = CMatrix::Identity(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!(std::abs(a(c, c)) >= floor)) return std::nullopt;
      for (Eigen::Index r = c + 1; r < n; ++r) {
        const cplx m = a(r, c) / a(c, c);
        L[k](r, c) = m;
        a.row(r) -= m * a.row(c);
        a(r, c) = 0.0;
      }
    }
    D[k] = a.diagonal();
    U[k] = CMatrix::Identity(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = r + 1; c < n; ++c) U[k](r, c) = a(r, c) / a(r, r);
  }
  auto gather = [P](auto&& get) {
    std::vector<cplx> v(P);
    for (std::size_t k = 0; k < P; ++k) v[k] = get(k);
    return v;
  };
  std::vector<raw_factor> out;
  const auto N = static_cast<std::size_t>(n);
  // L = L_1 ... L_{n-1}, L_c carrying column c
  for (std::size_t c = 0; c + 1 < N; ++c)
    for (std::size_t r = c + 1; r < N; ++r)
      push_factor(out, {r, c, gather([&](std::size_t k) { return L[k](r, c); })});
  // D = prod_i diag(.., a_i, 1/a_i, ..) with a_i = d_1 ... d_i
  std::vector<cplx> a(P, 1.0);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    for (std::size_t k = 0; k < P; ++k) a[k] *= D[k](static_cast<Eigen::Index>(i));
    const std::size_t j = i + 1;
    push_factor(out, {i, j, a});
    push_factor(out, {j, i, gather([&](std::size_t k) { return -1.0 / a[k]; })});
    push_factor(out, {i, j, gather([&](std::size_t k) { return a[k] - 1.0; })});
    push_factor(out, {j, i, std::vector<cplx>(P, 1.0)});
    push_factor(out, {i, j, std::vector<cplx>(P, -1.0)});
  }
  // U = U_{n-1} ... U_1, U_r carrying row r
  for (std::size_t r = N - 1; r-- > 0;)
    for (std::size_t c = r + 1; c < N; ++c)
      push_factor(out, {r, c, gather([&](std::size_t k) { return U[k](r, c); })});
  return out;
}

inline double product_error(const std::vector<raw_factor>& fs, const std::vector<CMatrix>& target) {
  double err = 0.0;
  const auto n = target.front().rows();
  for (std::size_t k = 0; k < target.size(); ++k) {
    CMatrix p = CMatrix::Identity(n, n);
    // right-multiplying by I + alpha e_ij adds alpha * column i to column j
    for (const auto& f : fs)
      p.col(static_cast<Eigen::Index>(f.j)) += f.alpha[k] * p.col(static_cast<Eigen::Index>(f.i));
    err = std::max(err, max_abs(p - target[k]));
  }
  return err;
}

}  // namespace detail

inline sl_factorization sl_factor(const MatElement& a, const sl_options& opt = {}) {
  require_square(a);
  if (!(opt.step_norm > 0.0 && opt.step_norm < 1.0)) throw error(errc::bad_input, "step_norm must lie in (0, 1)");
  if (!(opt.tol > 0.0)) throw error(errc::bad_input, "tol must be positive");
  const joint_window w = a.window();
  const auto n = static_cast<Eigen::Index>(a.rows());
  const std::size_t P = w.end();

  std::vector<CMatrix> us(P);
  for (index_t k = 0; k < P; ++k) {
    us[k] = a.at(k);
    const cplx d = detail::cofactor_det(us[k]);
    if (!(std::abs(d - 1.0) <= opt.tol))
      throw error(errc::not_sl, "det U_A(k) = " + detail::format_number(d.real()) + "+" +
                                    detail::format_number(d.imag()) + "i, not 1",
                  k);
  }

  auto assemble = [&](const std::vector<detail::raw_factor>& raw, std::size_t steps) {
    sl_factorization out;
    out.steps = steps;
    out.max_error = detail::product_error(raw, us);
    if (!(out.max_error <= opt.tol))
      throw error(errc::numerical_failure,
                  "factor product misses A by " + detail::format_number(out.max_error));
    for (const auto& f : raw) out.factors.emplace_back(f.i, f.j, Element(a.weight_ref(), from_window(w, f.alpha)));
    return out;
  };

  if (n == 1) return assemble({}, 0);

  if (opt.direct) {
    double scale = 1.0;
    for (const auto& u : us) scale = std::max(scale, detail::max_abs(u));
    if (auto raw = detail::ldu_factors(us, 1e-8 * scale)) {
      if (detail::product_error(*raw, us) <= opt.tol) return assemble(*raw, 0);
    }
  }

  // path gamma(t) from A (t = 0) to I (t = 1)
  const matrix_log lg = mat_log(a, opt.log);
  std::vector<CMatrix> bs(P);
  std::vector<cplx> tr(P);
  for (index_t k = 0; k < P; ++k) {
    bs[k] = lg.log.at(k);
    tr[k] = bs[k].trace();
  }
  auto gamma = [&](double t) {
    std::vector<CMatrix> g(P);
    for (index_t k = 0; k < P; ++k) {
      if (t == 0.0) {
        g[k] = us[k];
        continue;
      }
      g[k] = expm((1.0 - t) * bs[k]);
      g[k].col(0) *= std::exp(-(1.0 - t) * tr[k]);
    }
    return g;
  };
  auto step_of = [&](const std::vector<CMatrix>& g0, const std::vector<CMatrix>& g1) {
    std::vector<CMatrix> m(P);
    for (index_t k = 0; k < P; ++k) m[k] = g1[k] * g0[k].inverse();
    return m;
  };
  auto dist = [&](const std::vector<CMatrix>& m) {
    double d = 0.0;
    for (const auto& x : m) d = std::max(d, detail::spectral_norm(x - CMatrix::Identity(n, n)));
    return d;
  };

  // adaptive bisection, left to right
  std::vector<std::vector<CMatrix>> steps;
  std::vector<std::pair<double, double>> stack{{0.0, 1.0}};
  while (!stack.empty()) {
    auto [t0, t1] = stack.back();
    stack.pop_back();
    auto m = step_of(gamma(t0), gamma(t1));
    if (dist(m) <= opt.step_norm) {
      steps.push_back(std::move(m));
      if (steps.size() > opt.max_steps) throw error(errc::subdivision_overflow, "too many path steps");
      continue;
    }
    const double mid = 0.5 * (t0 + t1);
    if (!(mid > t0 && mid < t1) || steps.size() + stack.size() >= opt.max_steps)
      throw error(errc::subdivision_overflow, "step_norm not reached within " + std::to_string(opt.max_steps) + " steps");
    stack.push_back({mid, t1});
    stack.push_back({t0, mid});
  }

  std::vector<detail::raw_factor> raw;
  for (const auto& m : steps) {
    auto fs = detail::ldu_factors(m, std::numeric_limits<double>::min());
    if (!fs) throw error(errc::numerical_failure, "zero pivot in a near-identity step");
    for (auto it = fs->rbegin(); it != fs->rend(); ++it) {
      detail::raw_factor inv = *it;
      for (auto& x : inv.alpha) x = -x;
      detail::push_factor(raw, std::move(inv));
    }
  }
  return assemble(raw, steps.size());
}

/// Ordered product of elementary factors as a matrix over A(p).
inline MatElement factor_product(WeightRef w, std::size_t n, const std::vector<ElementaryFactor>& fs) {
  MatElement p = mat_identity(w, n);
  for (const auto& f : fs) {
    if (f.i >= n || f.j >= n) throw error(errc::dimension_mismatch, "factor index out of range");
    std::vector<Element> e;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) e.push_back(r == c ? unit(w) : (r == f.i && c == f.j ? f.alpha : zero(w)));
    p = mat_mul(p, MatElement(w, n, n, std::move(e)));
  }
  return p;
}

}  // namespace hadamard
