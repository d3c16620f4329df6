#pragma once

// Random generators and brute-force oracles shared by the test suites.
//
// Oracles here deliberately avoid the library's own window and combinator
// code: they materialize plain vectors and scan them.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "hadamard/hadamard.hpp"

namespace support {

using hadamard::cplx;
using hadamard::Element;
using hadamard::EPSeq;
using hadamard::index_t;
using hadamard::WeightRef;

class rng {
 public:
  explicit rng(std::uint64_t seed) : g_(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(g_); }
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

inline WeightRef factorial() { return hadamard::make_weight(hadamard::Weight::factorial()); }

// Dyadic values k/4 with |k| <= 8: sums and products of a few of them are exact.
inline cplx dyadic(rng& r, double zero_prob = 0.25) {
  if (r.coin(zero_prob)) return {};
  return {r.integer(-8, 8) / 4.0, r.integer(-8, 8) / 4.0};
}

// Zero or 2^j times one of 1, -1, i, -i: division by these is exact.
inline cplx pow2_unit(rng& r, double zero_prob = 0.25) {
  if (r.coin(zero_prob)) return {};
  const double m = std::ldexp(1.0, r.integer(-2, 2));
  switch (r.integer(0, 3)) {
    case 0: return {m, 0.0};
    case 1: return {-m, 0.0};
    case 2: return {0.0, m};
    default: return {0.0, -m};
  }
}

inline cplx gaussian(rng& r, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  return {d(r.engine()), d(r.engine())};
}

template <class Gen>
EPSeq random_epseq(rng& r, Gen&& gen, int max_prefix = 3, int max_period = 4) {
  std::vector<cplx> prefix(static_cast<std::size_t>(r.integer(0, max_prefix)));
  std::vector<cplx> cycle(static_cast<std::size_t>(r.integer(1, max_period)));
  for (auto& v : prefix) v = gen(r);
  for (auto& v : cycle) v = gen(r);
  return EPSeq(prefix, cycle);
}

inline EPSeq random_dyadic(rng& r, double zero_prob = 0.25) {
  return random_epseq(r, [zero_prob](rng& g) { return dyadic(g, zero_prob); });
}

inline Element element(const WeightRef& w, EPSeq s) { return Element(w, std::move(s)); }

inline std::vector<cplx> materialize(const EPSeq& s, std::size_t n) {
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = s[i];
  return v;
}

/// prefix + 2 * lcm(cycle lengths): every position class appears at least twice.
inline std::size_t scan_length(std::initializer_list<const EPSeq*> seqs) {
  std::size_t p = 0, l = 1;
  for (const EPSeq* s : seqs) {
    p = std::max<std::size_t>(p, s->prefix_length());
    l = std::lcm<std::size_t>(l, s->period());
  }
  return p + 2 * l;
}

inline std::size_t scan_length(const std::vector<const EPSeq*>& seqs) {
  std::size_t p = 0, l = 1;
  for (const EPSeq* s : seqs) {
    p = std::max<std::size_t>(p, s->prefix_length());
    l = std::lcm<std::size_t>(l, s->period());
  }
  return p + 2 * l;
}

// g divides f iff f vanishes wherever g does.
inline bool oracle_divides(const EPSeq& f, const EPSeq& g) {
  const std::size_t n = scan_length({&f, &g});
  for (std::size_t i = 0; i < n; ++i)
    if (g[i] == cplx{} && f[i] != cplx{}) return false;
  return true;
}

inline bool oracle_in_ideal(const EPSeq& f, const std::vector<EPSeq>& gens) {
  std::vector<const EPSeq*> all{&f};
  for (const auto& g : gens) all.push_back(&g);
  const std::size_t n = scan_length(all);
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (const auto& g : gens) any = any || g[i] != cplx{};
    if (!any && f[i] != cplx{}) return false;
  }
  return true;
}

inline bool oracle_corona(const std::vector<EPSeq>& fs) {
  std::vector<const EPSeq*> all;
  for (const auto& f : fs) all.push_back(&f);
  const std::size_t n = scan_length(all);
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (const auto& f : fs) any = any || f[i] != cplx{};
    if (!any) return false;
  }
  return true;
}

/// Zero-run length from k in a materialized vector; nullopt if it runs off the end.
inline std::optional<std::size_t> oracle_run(const std::vector<cplx>& v, std::size_t k) {
  for (std::size_t i = k; i < v.size(); ++i)
    if (v[i] != cplx{}) return i - k;
  return std::nullopt;
}

/// Indices m <= horizon lying in a block 2^k + l, 0 <= l <= k^(n+1), by enumeration.
inline std::set<index_t> krull_zero_set(unsigned n, index_t horizon) {
  std::set<index_t> zeros;
  for (unsigned k = 0; (index_t{1} << k) <= horizon; ++k) {
    index_t len = 1;
    for (unsigned e = 0; e <= n; ++e) len *= k;
    for (index_t l = 0; l <= len && (index_t{1} << k) + l <= horizon; ++l) zeros.insert((index_t{1} << k) + l);
  }
  return zeros;
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Random square matrix over A(p) with Gaussian entries of spectral norm
/// `scale` at every position; each entry is purely periodic with the given period.
inline hadamard::MatElement random_matrix(rng& r, const WeightRef& w, std::size_t rows, std::size_t cols,
                                          std::size_t period, double scale, bool normalize_spectral = true) {
  std::vector<Eigen::MatrixXcd> pos(period, Eigen::MatrixXcd(rows, cols));
  for (auto& m : pos) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = gaussian(r);
    if (normalize_spectral) m *= scale / Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
  }
  std::vector<Element> e;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      std::vector<cplx> cyc;
      for (const auto& m : pos) cyc.push_back(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      e.emplace_back(w, EPSeq({}, cyc));
    }
  return hadamard::MatElement(w, rows, cols, std::move(e));
}

/// A scaled so that det U_A(k) = 1 at every position (first column divided by det).
inline hadamard::MatElement det_normalize(const hadamard::MatElement& a) {
  const Element d = hadamard::mat_det(a);
  std::vector<Element> e = a.entries();
  for (std::size_t i = 0; i < a.rows(); ++i)
    e[i * a.cols()] = Element(a.weight_ref(), hadamard::ep_zip(e[i * a.cols()].seq(), d.seq(),
                                                              [](cplx x, cplx y) { return x / y; }));
  return hadamard::MatElement(a.weight_ref(), a.rows(), a.cols(), std::move(e));
}

}  // namespace support
