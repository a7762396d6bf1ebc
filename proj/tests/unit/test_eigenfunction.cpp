#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "bt4/eigenfunction.hpp"
#include "bt4/spectral.hpp"

using namespace bt4;

namespace {

constexpr double kPi = std::numbers::pi;

xcplx ex(xreal t) { return std::polar<xreal>(1.0L, t); }
cplx e(double t) { return std::polar(1.0, t); }

xcplx coeff_sum(const CoefficientTable& t, xreal l, xreal m, xreal n) {
  xcplx s = 0;
  for (const auto& term : t.terms) s += term.coeff(l, m, n);
  return s;
}

// largest relative gap of the reduced evaluations over all v with l <= 6
double limit_gap(const CoefficientTable& a, const CoefficientTable& b) {
  double worst = 0;
  for (const auto& v : enumerate_ball(6)) {
    const xcplx x = eval_reduced(a, v), y = eval_reduced(b, v);
    worst = std::max(worst, static_cast<double>(std::abs(x - y) / std::max<xreal>(1, std::abs(y))));
  }
  return worst;
}

// z1 = z2 base points; z4 absorbs the product constraint
std::vector<XTuple> one_pair_bases(int q) {
  const xreal s = std::sqrt(static_cast<xreal>(q));
  return {
      {ex(0.4L), ex(0.4L), ex(1.3L), ex(-2.1L)},
      {ex(-0.2L), ex(-0.2L), s * ex(1.7L), ex(-1.3L) / s},
      {s * ex(0.9L), s * ex(0.9L), ex(-0.3L) / s, ex(-1.5L) / s},
  };
}

std::vector<XTuple> two_pair_bases(int q) {
  const xreal s = std::sqrt(static_cast<xreal>(q));
  return {
      {ex(0.4L), ex(0.4L), ex(-0.4L), ex(-0.4L)},
      {s * ex(0.7L), s * ex(0.7L), ex(-0.7L) / s, ex(-0.7L) / s},
      {ex(1.1L), ex(1.1L), -ex(-1.1L), -ex(-1.1L)},
  };
}

}  // namespace

TEST_CASE("generic coefficients at the trivial point") {
  for (int q : {2, 3, 5}) {
    const auto t = generic_coeffs(sample_family_ext({Family::Trivial, {0}}, q), q);
    REQUIRE(t.terms.size() == 24);
    for (const auto& term : t.terms) {
      const bool survivor = term.idx == std::array<int, 3>{3, 2, 1};
      if (survivor)
        CHECK(std::abs(term.coeff.c[0] - xcplx(1)) < 1e-15L);
      else
        CHECK(term.coeff.is_zero());
    }
  }
}

TEST_CASE("vanishing-factor law") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> th(0, 2 * kPi);
  for (int q : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      const xcplx w = ex(th(rng)), a = ex(th(rng));
      const XTuple z{static_cast<xreal>(q) * w, w, a, 1.0L / (static_cast<xreal>(q) * w * w * a)};
      const auto t = generic_coeffs(z, q);
      for (const auto& term : t.terms) {
        std::array<int, 4> p{term.idx[0], term.idx[1], term.idx[2], 6 - term.idx[0] - term.idx[1] - term.idx[2]};
        const auto pos0 = std::find(p.begin(), p.end(), 0), pos1 = std::find(p.begin(), p.end(), 1);
        CHECK(term.coeff.is_zero() == (pos0 < pos1));
        if (term.idx[0] == 0) CHECK(term.coeff.is_zero());
      }
    }
  }
}

TEST_CASE("generic coefficients sum to one") {
  std::mt19937_64 rng(9);
  for (int q : {2, 3})
    for (Family f : {Family::Family2, Family::Family4, Family::Tempered})
      for (int trial = 0; trial < 30; ++trial) {
        const auto t = generic_coeffs(sample_family_ext(random_tag(f, rng), q), q);
        CHECK(std::abs(coeff_sum(t, 0, 0, 0) - xcplx(1)) < 1e-10L);
      }
  CHECK_THROWS_AS(generic_coeffs({ex(0.4L), ex(0.4L), ex(1.3L), ex(-2.1L)}, 2), std::domain_error);
}

TEST_CASE("one-pair coefficients") {
  for (int q : {2, 3})
    for (const auto& z : one_pair_bases(q)) {
      const auto t = one_pair_coeffs(z, q);
      CHECK(std::abs(coeff_sum(t, 0, 0, 0) - xcplx(1)) < 1e-12L);
      for (const auto& term : t.terms) {
        if (term.idx[0] != 0 || term.idx[1] != 0) continue;
        // the (l - m) term drops on l = m
        const xcplx ref = term.coeff(3, 3, 1);
        for (int l = 1; l < 8; ++l)
          for (int n = 0; n <= l; ++n) CHECK(std::abs(term.coeff(l, l, n) - ref) <= 1e-12L * (1 + std::abs(ref)));
      }
    }
  CHECK_THROWS_AS(one_pair_coeffs({ex(0.4L), ex(0.4L), ex(0.4L), ex(-1.2L)}, 2), std::domain_error);
}

TEST_CASE("two-pair coefficients") {
  for (int q : {2, 3})
    for (const auto& z : two_pair_bases(q)) {
      const auto t = two_pairs_coeffs(z, q);
      CHECK(std::abs(coeff_sum(t, 0, 0, 0) - xcplx(1)) < 1e-12L);
    }
  for (int q : {2, 3})
    for (int k = 0; k < 4; ++k) {
      const xcplx ik = std::pow(xcplx(0, 1), k);
      const xreal s = std::sqrt(static_cast<xreal>(q));
      const auto t = two_pairs_coeffs({s * ik, s * ik, ik / s, ik / s}, q);
      for (const auto& term : t.terms) {
        const bool survivor =
            term.idx == std::array<int, 3>{2, 0, 2} || term.idx == std::array<int, 3>{2, 2, 0};
        CHECK(term.coeff.is_zero() != survivor);
      }
    }
  CHECK_THROWS_AS(two_pairs_coeffs({ex(0.4L), ex(0.4L), ex(0.4L), ex(0.4L)}, 2), std::domain_error);
}

TEST_CASE("generic converges to one pair") {
  for (int q : {2, 3})
    for (const auto& z : one_pair_bases(q)) {
      const auto ref = one_pair_coeffs(z, q);
      for (xreal h : {1e-4L, 1e-5L, 1e-6L, 1e-7L}) {
        const XTuple zh{z[0], z[1] * (1 + h), z[2], z[3] / (1 + h)};
        CHECK(limit_gap(generic_coeffs(zh, q), ref) <= 100 * static_cast<double>(h));
      }
    }
}

TEST_CASE("one pair converges to two pairs") {
  for (int q : {2, 3})
    for (const auto& z : two_pair_bases(q)) {
      const auto ref = two_pairs_coeffs(z, q);
      for (xreal h : {1e-4L, 1e-5L, 1e-6L}) {
        const XTuple zh{z[0], z[1], z[2], z[3] * (1 + h)};
        CHECK(limit_gap(one_pair_coeffs(zh, q), ref) <= 100 * static_cast<double>(h));
      }
    }
}

TEST_CASE("regime dispatch") {
  CHECK(detect_multiplicity(ZTuple{e(0.1), e(0.7), e(1.9), e(-2.7)}).regime == Regime::Generic);
  const auto one = detect_multiplicity(ZTuple{e(0.7), e(0.1), e(0.7), e(-1.5)});
  CHECK(one.regime == Regime::OnePair);
  CHECK(one.order[0] == 0);
  CHECK(one.order[1] == 2);
  CHECK(detect_multiplicity(ZTuple{e(0.4), e(-0.4), e(0.4), e(-0.4)}).regime == Regime::TwoPairs);
  CHECK(detect_multiplicity(ZTuple{1, 1, 1, 1}).max_mult == 4);
  CHECK_THROWS_AS(Eigenfunction(ZTuple{e(0.2), e(0.2), e(0.2), e(-0.6)}, 2), UnsupportedMultiplicity);
}

TEST_CASE("evaluation") {
  std::mt19937_64 rng(14);
  for (int q : {2, 3})
    for (Family f : {Family::Trivial, Family::Family2, Family::Family3, Family::Family4, Family::Tempered})
      for (int trial = 0; trial < 10; ++trial) {
        const XTuple z = sample_family_ext(random_tag(f, rng), q);
        const Eigenfunction fz(z, q);
        CHECK(std::abs(fz.eval({0, 0, 0}) - cplx(1)) < 1e-12);
        const EigTriple lam = eig_from_z(z, q);
        const double deg = q * q * q + q * q + q + 1;
        CHECK(std::abs(fz.eval({1, 0, 0}) - lam.l1 / deg) < 1e-10 * (1 + std::abs(lam.l1)));
      }
  for (const auto& z : one_pair_bases(3)) CHECK(std::abs(Eigenfunction(z, 3).eval({0, 0, 0}) - cplx(1)) < 1e-12);
  for (const auto& z : two_pair_bases(3)) CHECK(std::abs(Eigenfunction(z, 3).eval({0, 0, 0}) - cplx(1)) < 1e-12);
}

TEST_CASE("trivial eigenfunctions are color characters") {
  for (int q : {2, 3})
    for (int k = 0; k < 4; ++k) {
      const Eigenfunction f(sample_family_ext({Family::Trivial, {static_cast<double>(k)}}, q), q);
      for (const auto& v : enumerate_ball(30))
        CHECK(std::abs(f.eval(v) - std::pow(cplx(0, 1), k * color(v))) < 1e-9);
    }
}

TEST_CASE("conjugate symmetry") {
  std::mt19937_64 rng(15);
  for (int q : {2, 3})
    for (Family f : {Family::Family2, Family::Family3, Family::Family4, Family::Tempered})
      for (int trial = 0; trial < 5; ++trial) {
        const ZTuple z = sample_family(random_tag(f, rng), q);
        ZTuple c;
        for (int k = 0; k < 4; ++k) c[k] = std::conj(z[k]);
        const Eigenfunction a(z, q), b(canonical(c), q);
        for (const auto& v : enumerate_ball(8))
          CHECK(std::abs(b.eval_reduced(v) - std::conj(a.eval_reduced(v))) <= 1e-9 * (1 + std::abs(a.eval_reduced(v))));
      }
}

TEST_CASE("evaluation cap") {
  const Eigenfunction f(ZTuple{e(0.1), e(0.7), e(1.9), e(-2.7)}, 2);
  CHECK_NOTHROW(f.eval({200, 3, 1}));
  CHECK_THROWS_AS(f.eval({201, 0, 0}), std::range_error);
  CHECK_THROWS_AS(f.on_ball(201), std::range_error);
}

TEST_CASE("ray values") {
  std::mt19937_64 rng(16);
  for (int q : {2, 3}) {
    const ZTuple z = sample_family(random_tag(Family::Tempered, rng), q);
    const Eigenfunction fz(z, q);
    double total = 0;
    for (const auto& t : fz.table().terms) total += static_cast<double>(std::abs(t.coeff.c[0]));
    for (Ray r : {Ray::L00, Ray::LL0, Ray::LLL}) {
      const auto rv = ray_values(z, q, r, 60, 0.1);
      REQUIRE(rv.values.size() == 61);
      for (double x : rv.normalized) CHECK(x <= total * (1 + 1e-9));
    }
    const ZTuple triv = sample_family({Family::Trivial, {0}}, q);
    for (Ray r : {Ray::L00, Ray::LL0, Ray::LLL}) CHECK(ray_values(triv, q, r, 60, 0.1).normalized.back() < 1e-10);
  }
  const ZTuple bad{2.0, 0.5, e(kPi / 3), e(-kPi / 3)};
  const auto rv = ray_values(bad, 2, Ray::L00, 60, 0.1);
  CHECK(rv.normalized.back() > 1e10 * rv.normalized[10]);
  CHECK_THROWS_AS(ray_values(bad, 2, Ray::L00, 0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ray_values(bad, 2, Ray::L00, 10, 0.0), std::invalid_argument);
}
