#include <catch_amalgamated.hpp>

#include <numbers>

#include "support.hpp"

using namespace hadamard;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const WeightRef W = support::factorial();

Element el(std::vector<cplx> prefix, std::vector<cplx> cycle) { return normalized(W, std::move(prefix), std::move(cycle)); }

Element dyadic_el(support::rng& r, double zero_prob = 0.25) { return Element(W, support::random_dyadic(r, zero_prob)); }

// Random data on which the witness formulas are exact in double: at each
// position the nonzero values share one power-of-two modulus.
std::vector<Element> equal_modulus_family(support::rng& r, std::size_t count, std::size_t period) {
  std::vector<std::vector<cplx>> cyc(count, std::vector<cplx>(period));
  for (std::size_t k = 0; k < period; ++k) {
    const double m = std::ldexp(1.0, r.integer(-2, 2));
    for (auto& c : cyc) {
      const cplx unit = support::pow2_unit(r, 0.3);
      c[k] = unit == cplx{} ? unit : unit / std::abs(unit) * m;
    }
  }
  std::vector<Element> out;
  for (auto& c : cyc) out.push_back(el({}, c));
  return out;
}

double rounding_scale(const Element& f) { return 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, norm(f)); }

}  // namespace

TEST_CASE("ring axioms hold exactly on dyadic data") {
  support::rng r(21);
  for (int t = 0; t < 200; ++t) {
    const Element f = dyadic_el(r), g = dyadic_el(r), h = dyadic_el(r);
    CHECK(star(star(f, g), h) == star(f, star(g, h)));
    CHECK(star(f, g) == star(g, f));
    CHECK(star(f, g + h) == star(f, g) + star(f, h));
    CHECK((f + g) + h == f + (g + h));
    CHECK(f + g == g + f);
    CHECK(star(f, unit(W)) == f);
    CHECK(f + zero(W) == f);
    CHECK(f - f == zero(W));
  }
}

TEST_CASE("norm is submultiplicative and the unit has norm one") {
  support::rng r(22);
  CHECK(norm(unit(W)) == 1.0);
  for (int t = 0; t < 200; ++t) {
    const Element f(W, support::random_epseq(r, [](support::rng& g) { return support::gaussian(g); }));
    const Element g(W, support::random_epseq(r, [](support::rng& g) { return support::gaussian(g); }));
    CHECK(norm(star(f, g)) <= norm(f) * norm(g) * (1.0 + 1e-15));
    CHECK(norm(f + g) <= (norm(f) + norm(g)) * (1.0 + 1e-15));
  }
}

TEST_CASE("weights must agree") {
  const WeightRef s = parse_weight("superexp");
  CHECK_THROWS_AS(star(unit(W), unit(s)), error);
  try {
    (void)(unit(W) + unit(s));
  } catch (const error& e) {
    CHECK(e.code() == errc::weight_mismatch);
  }
}

TEST_CASE("raw coefficients map to normalized ones") {
  const Element z3 = monomial(W, 3);
  CHECK(z3.u(3) == 6.0);
  CHECK(z3.u(2) == 0.0);
  CHECK_THAT(z3.raw(3).real(), WithinRel(1.0, 1e-15));
  const cplx taylor[] = {1.0, cplx{0.0, 2.0}, 0.5};
  const Element p = from_raw(W, taylor);
  CHECK(p.u(0) == 1.0);
  CHECK(p.u(1) == cplx(0.0, 2.0));
  CHECK(p.u(2) == 1.0);
  // 200! overflows but 1e-300 * 200! does not
  std::vector<cplx> big(201);
  big[200] = 1e-300;
  CHECK_THAT(from_raw(W, big).u(200).real(), WithinRel(std::exp(std::lgamma(201.0) - 300.0 * std::log(10.0)), 1e-12));
  big[200] = 1.0;
  CHECK_THROWS_AS(from_raw(W, big), error);
}

TEST_CASE("evaluation of the unit under the factorial weight is exp") {
  for (cplx z : {cplx{0.0}, cplx{1.0}, cplx{-3.0, 2.0}, cplx{10.0, -1.0}}) {
    const evaluation e = eval_at(unit(W), z, 1e-13);
    CHECK(std::abs(e.value - std::exp(z)) <= e.error_bound + 1e-13 * std::abs(std::exp(z)) + 1e-14);
    CHECK(e.error_bound <= 1e-13);
  }
}

TEST_CASE("evaluation of polynomials matches Horner") {
  support::rng r(23);
  for (const char* wn : {"factorial", "superexp", "superexp:b=1.5,q=3"}) {
    const WeightRef w = parse_weight(wn);
    for (int t = 0; t < 30; ++t) {
      std::vector<cplx> taylor(6);
      for (auto& c : taylor) c = support::gaussian(r) * 0.1;
      const Element p = from_raw(w, taylor);
      const cplx z = support::gaussian(r);
      cplx horner{};
      for (auto it = taylor.rbegin(); it != taylor.rend(); ++it) horner = horner * z + *it;
      const evaluation e = eval_at(p, z, 1e-12);
      CHECK(std::abs(e.value - horner) <= 1e-12 * (1.0 + std::abs(horner)));
    }
  }
}

TEST_CASE("evaluation of a periodic element under a super-exponential weight") {
  const WeightRef w = parse_weight("superexp");
  const Element f(w, EPSeq({}, {1.0, -1.0}));
  const cplx z = 1.5;
  // direct sum with exact 2^(n^2)
  cplx direct{};
  for (int n = 0; n < 12; ++n) direct += f.u(static_cast<index_t>(n)) * std::pow(z, n) / std::ldexp(1.0, n * n);
  const evaluation e = eval_at(f, z, 1e-14);
  CHECK(std::abs(e.value - direct) <= 1e-14 + e.error_bound);
}

TEST_CASE("invertibility") {
  auto inv = invertible(unit(W));
  REQUIRE(inv);
  CHECK(inv->delta == 1.0);
  CHECK(inv->inverse == unit(W));

  auto bad = invertible(monomial(W, 1));
  REQUIRE_FALSE(bad);
  CHECK(bad.why().code == errc::not_invertible);
  CHECK(bad.why().index == index_t{0});

  support::rng r(24);
  for (int t = 0; t < 100; ++t) {
    const Element f(W, support::random_epseq(r, [](support::rng& g) { return support::pow2_unit(g, 0.0); }));
    auto i = invertible(f);
    REQUIRE(i);
    CHECK(star(f, i->inverse) == unit(W));
  }
}

TEST_CASE("divisibility matches the zero-pattern oracle") {
  support::rng r(25);
  int successes = 0;
  for (int t = 0; t < 300; ++t) {
    const Element f = dyadic_el(r, 0.4);
    const Element g(W, support::random_epseq(r, [](support::rng& x) { return support::pow2_unit(x, 0.4); }));
    auto q = divide(f, g);
    CHECK(q.ok() == support::oracle_divides(f.seq(), g.seq()));
    if (!q) {
      const index_t n = *q.why().index;
      CHECK(g.u(n) == cplx{});
      CHECK(f.u(n) != cplx{});
      continue;
    }
    ++successes;
    CHECK(star(g, q->h) == f);
    // least constant: attained somewhere and never exceeded
    double worst = 0.0;
    for (index_t n = 0; n < support::scan_length({&f.seq(), &g.seq()}); ++n)
      if (g.u(n) != cplx{}) worst = std::max(worst, std::abs(f.u(n)) / std::abs(g.u(n)));
    CHECK(q->constant == worst);
  }
  CHECK(successes > 20);
}

TEST_CASE("divisibility witness on general data is correct to rounding") {
  support::rng r(26);
  for (int t = 0; t < 200; ++t) {
    const Element f = dyadic_el(r, 0.3), g = dyadic_el(r, 0.1);
    auto q = divide(f, g);
    if (q) CHECK(max_pointwise_error(star(g, q->h), f) <= rounding_scale(f));
  }
}

TEST_CASE("gcd is the pointwise maximum modulus") {
  const Element a = el({}, {cplx{3.0, 4.0}, 0.0}), b = el({1.0}, {1.0});
  const Element fs[] = {a, b};
  const Element d = gcd(fs);
  CHECK(d.u(0) == 5.0);
  CHECK(d.u(1) == 1.0);
  CHECK(d.u(2) == 5.0);
  CHECK(divide(a, d).ok());
  CHECK(divide(b, d).ok());
}

TEST_CASE("ideal membership example") {
  const Element f = el({}, {1.0, 1.0});
  const Element gens[] = {el({}, {2.0, 0.0}), el({}, {0.0, 3.0})};
  auto m = in_ideal(f, gens);
  REQUIRE(m);
  CHECK(m->constant == 0.5);
  CHECK(max_pointwise_error(star(m->coeffs[0], gens[0]) + star(m->coeffs[1], gens[1]), f) == 0.0);
}

TEST_CASE("ideal membership matches the oracle and witnesses are exact on equal-modulus data") {
  support::rng r(27);
  int successes = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t K = static_cast<std::size_t>(r.integer(1, 2));
    const std::size_t period = static_cast<std::size_t>(r.integer(1, 4));
    const std::vector<Element> gens = equal_modulus_family(r, K, period);
    const Element f = dyadic_el(r, 0.3);
    std::vector<EPSeq> gs;
    for (const auto& g : gens) gs.push_back(g.seq());
    auto m = in_ideal(f, gens);
    CHECK(m.ok() == support::oracle_in_ideal(f.seq(), gs));
    if (!m) continue;
    ++successes;
    Element sum = zero(W);
    for (std::size_t k = 0; k < K; ++k) sum = sum + star(m->coeffs[k], gens[k]);
    CHECK(sum == f);
  }
  CHECK(successes > 20);
}

TEST_CASE("corona examples") {
  const Element fs[] = {el({}, {1.0, 0.0}), el({}, {0.0, 1.0})};
  auto c = corona_solve(fs);
  REQUIRE(c);
  CHECK(c->delta == 1.0);
  CHECK(star(c->gs[0], fs[0]) + star(c->gs[1], fs[1]) == unit(W));

  const Element z[] = {monomial(W, 1)};
  auto bad = corona_solve(z);
  REQUIRE_FALSE(bad);
  CHECK(bad.why().code == errc::corona_fails);
  CHECK(bad.why().index == index_t{0});
}

TEST_CASE("corona solutions respect the 1/delta bound") {
  support::rng r(28);
  for (int t = 0; t < 200; ++t) {
    std::vector<Element> fs;
    for (int i = 0; i < r.integer(1, 3); ++i) fs.push_back(dyadic_el(r, 0.3));
    std::vector<EPSeq> seqs;
    for (const auto& f : fs) seqs.push_back(f.seq());
    auto c = corona_solve(fs);
    CHECK(c.ok() == support::oracle_corona(seqs));
    if (!c) continue;
    Element sum = zero(W);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      CHECK(norm(c->gs[i]) <= (1.0 / c->delta) * (1.0 + 1e-15));
      sum = sum + star(c->gs[i], fs[i]);
    }
    CHECK(max_pointwise_error(sum, unit(W)) <= 4 * std::numeric_limits<double>::epsilon());
  }
}

TEST_CASE("corona residual is exact on equal-modulus data") {
  support::rng r(29);
  for (int t = 0; t < 200; ++t) {
    const auto fs = equal_modulus_family(r, 2, static_cast<std::size_t>(r.integer(1, 4)));
    auto c = corona_solve(fs);
    if (!c) continue;
    CHECK(star(c->gs[0], fs[0]) + star(c->gs[1], fs[1]) == unit(W));
  }
}

TEST_CASE("approximation by invertibles") {
  support::rng r(30);
  for (int t = 0; t < 100; ++t) {
    const Element f = dyadic_el(r, 0.4);
    const double eps = std::ldexp(1.0, -r.integer(1, 6));
    const Element g = approx_invertible(f, eps);
    CHECK(invertible(g).ok());
    CHECK(inf_abs(g.seq()) >= eps);
    CHECK(norm(g - f) <= 2 * eps);
  }
  CHECK_THROWS_AS(approx_invertible(unit(W), 0.0), error);
}

TEST_CASE("Bass reduction") {
  support::rng r(31);
  for (int t = 0; t < 50; ++t) {
    // f1 = 1 - g2 f2 with g1 = 1 gives g1 f1 + g2 f2 = 1
    const Element f2 = dyadic_el(r), g2 = dyadic_el(r);
    const Element f1 = unit(W) - star(g2, f2);
    const bass_result b = bass_reduce(f1, f2, unit(W), g2);
    auto inv = invertible(b.witness);
    REQUIRE(inv);
    CHECK(inv->delta > 0.0);
    CHECK(b.delta == inv->delta);
    CHECK(max_pointwise_error(b.witness, f1 + star(b.h, f2)) == 0.0);
  }
  try {
    (void)bass_reduce(monomial(W, 1), monomial(W, 1), unit(W), unit(W));
    FAIL("expected PreconditionFailed");
  } catch (const error& e) {
    CHECK(e.code() == errc::precondition_failed);
  }
}

TEST_CASE("idempotents are exactly the 0/1 sequences") {
  const Element P = el({}, {1.0, 0.0});
  CHECK(is_idempotent(P));
  CHECK(star(P, P) == P);
  CHECK_FALSE(P == zero(W));
  CHECK_FALSE(P == unit(W));
  CHECK_FALSE(is_idempotent(el({}, {0.5})));
  CHECK_FALSE(is_idempotent(el({}, {cplx{0.0, 1.0}})));
  try {
    (void)idempotent_from_mask(W, EPSeq({}, {2.0}));
    FAIL("expected BadMask");
  } catch (const error& e) {
    CHECK(e.code() == errc::bad_mask);
  }
}

TEST_CASE("exponential and logarithm") {
  const Element m1 = el({}, {-1.0});
  CHECK(log_el(m1).u(0) == cplx(0.0, std::numbers::pi));
  CHECK(detail::principal_log(cplx{-1.0, -0.0}).imag() == std::numbers::pi);
  CHECK_THROWS_AS(log_el(monomial(W, 2)), error);

  support::rng r(32);
  for (int t = 0; t < 100; ++t) {
    const Element g(W, support::random_epseq(r, [](support::rng& x) {
                      return std::polar(x.uniform(0.1, 10.0), x.uniform(-std::numbers::pi, std::numbers::pi));
                    }));
    const Element l = log_el(g);
    CHECK(max_pointwise_error(exp_el(l), g) <= 1e-12 * norm(g));
    const double delta = inf_abs(g.seq());
    CHECK(norm(l) <= log_norm_bound(delta, norm(g)) + 1e-12);
    // log(exp f) = f when Im f lies in (-pi, pi]
    const Element f(W, support::random_epseq(r, [](support::rng& x) {
                      return cplx{x.uniform(-2.0, 2.0), x.uniform(-3.0, 3.0)};
                    }));
    CHECK(max_pointwise_error(log_el(exp_el(f)), f) <= 1e-14);
  }
}

TEST_CASE("generated elements carry horizon certainty") {
  const Element g(W, GenSeq([](index_t n) { return cplx{n % 2 == 0 ? 1.0 : 0.5}; }, 100, 1.0));
  const Element f = el({}, {2.0});
  const Element p = star(f, g);
  CHECK_FALSE(p.exact());
  CHECK(p.horizon() == 100);
  CHECK(p.u(3) == 1.0);
  CHECK(norm(p) == 2.0);
  CHECK(certainty_of(p) == certainty::horizon);
  CHECK(certainty_of(f) == certainty::exact);
  CHECK_THROWS_AS(p.seq(), error);
  CHECK_THROWS_AS(p.u(101), error);
}

TEST_CASE("every 0/1 mask of small period gives an idempotent") {
  for (std::size_t period = 1; period <= 5; ++period)
    for (unsigned bits = 0; bits < (1u << period); ++bits) {
      std::vector<cplx> cyc(period);
      for (std::size_t i = 0; i < period; ++i) cyc[i] = (bits >> i) & 1u ? 1.0 : 0.0;
      const Element P = idempotent_from_mask(W, EPSeq({}, cyc));
      CHECK(is_idempotent(P));
      CHECK(star(P, P) == P);
      CHECK(star(P, unit(W) - P) == zero(W));
    }
}

TEST_CASE("gcd is divisible by every planted common factor") {
  support::rng r(33);
  for (int t = 0; t < 200; ++t) {
    const Element c(W, support::random_epseq(r, [](support::rng& x) { return support::pow2_unit(x, 0.3); }));
    const std::vector<Element> fs{star(c, Element(W, support::random_dyadic(r))),
                                  star(c, Element(W, support::random_dyadic(r)))};
    const Element d = gcd(fs);
    for (const auto& f : fs) CHECK(divide(f, d).ok());
    CHECK(divide(d, c).ok());
  }
}

TEST_CASE("evaluation matches a 40-term direct sum") {
  support::rng r(34);
  for (int t = 0; t < 100; ++t) {
    const Element f(W, support::random_epseq(r, [](support::rng& x) { return support::gaussian(x); }));
    const cplx z = std::polar(r.uniform(0.0, 3.0), r.uniform(-std::numbers::pi, std::numbers::pi));
    cplx direct{}, zn = 1.0;
    for (int n = 0; n < 40; ++n) {
      direct += f.u(static_cast<index_t>(n)) * zn;
      zn *= z / static_cast<double>(n + 1);
    }
    const double tol = 1e-10;
    CHECK(std::abs(eval_at(f, z, tol).value - direct) <= 2 * tol);
  }
}
