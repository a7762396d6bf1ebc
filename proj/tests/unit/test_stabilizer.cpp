#include <gmpxx.h>

#include <stdexcept>

#include "doctest.h"

#include "bt4/stabilizer.hpp"

using namespace bt4;

namespace {

mpz_class ipow(long b, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  return r;
}

mpq_class ratio(const mpz_class& a, const mpz_class& b) {
  mpq_class r(a, b);
  r.canonicalize();
  return r;
}

// order of GL_4(F_q) / F_q^* counted column by column
mpz_class pgl4(long q) {
  mpz_class r = 1;
  for (int k = 0; k < 4; ++k) r *= ipow(q, 4) - ipow(q, k);
  return r / (q - 1);
}

}  // namespace

TEST_CASE("closed-form orders") {
  CHECK(stabilizer_order({0, 0, 0}, 2) == 20160);
  CHECK(stabilizer_order({1, 1, 0}, 2) == 9216);
  CHECK(stabilizer_order({3, 2, 1}, 2) == 65536);
  CHECK(stabilizer_order({1, 0, 0}, 2) == 10752);
  CHECK(stabilizer_order({2, 1, 0}, 2) == 24576);
  for (long q : {2, 3, 4, 5, 7}) CHECK(stabilizer_order({0, 0, 0}, q) == pgl4(q));
  CHECK_THROWS_AS(stabilizer_order({1, 0, 0}, 1), std::invalid_argument);
}

TEST_CASE("orders are multiples of (q-1)^3 q^6") {
  for (int q : {2, 3, 4, 5, 8, 9})
    for (const auto& v : enumerate_ball(8)) {
      const mpz_class unit = ipow(q - 1, 3) * ipow(q, 6);
      CHECK(stabilizer_order(v, q) % unit == 0);
    }
}

TEST_CASE("brute force on small vertices") {
  CHECK(brute_force_order({0, 0, 0}, 2).order == 20160);
  CHECK(brute_force_order({1, 0, 0}, 2).order == 10752);
  CHECK(brute_force_order({2, 1, 0}, 2).order == 24576);
  CHECK(brute_force_order({1, 1, 1}, 2).order == stabilizer_order({1, 1, 1}, 2));
  CHECK(brute_force_order({2, 1, 1}, 2).order == stabilizer_order({2, 1, 1}, 2));
  CHECK(brute_force_order({0, 0, 0}, 3).order == pgl4(3));
}

TEST_CASE("brute force guards") {
  CHECK_THROWS_AS(brute_force_order({1, 0, 0}, 4), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_order({3, 2, 1}, 3, 1e3), BudgetExceeded);
}

TEST_CASE("weights") {
  CHECK(vertex_weight({0, 0, 0}, 2) == mpq_class(1, 315));
  CHECK(vertex_weight({1, 0, 0}, 2) == mpq_class(1, 168));
  CHECK(vertex_weight({3, 2, 1}, 2) == mpq_class(1, 1024));
  for (int q : {2, 3, 5})
    for (const auto& v : enumerate_ball(10)) {
      const mpq_class w = vertex_weight(v, q);
      CHECK(w > 0);
      CHECK(w < 1);
      const int s = 3 * v.ell + v.m - v.n;
      CHECK(w <= mpq_class(1) / ipow(q, s));
      CHECK(weight_to_double(w) == doctest::Approx(w.get_d()).epsilon(1e-15));
    }
}

TEST_CASE("normalization constant cancels in weight ratios") {
  for (int q : {2, 3})
    for (const auto& u : enumerate_ball(4))
      for (const auto& v : enumerate_ball(4)) {
        const mpq_class lhs = vertex_weight(u, q) / vertex_weight(v, q);
        const mpq_class rhs = ratio(stabilizer_order(v, q), stabilizer_order(u, q));
        CHECK(lhs == rhs);
      }
}

TEST_CASE("total volume") {
  CHECK(total_volume(0, 2) == mpq_class(1, 315));
  CHECK(total_volume(1, 2) == mpq_class(1, 315) + mpq_class(1, 168) + mpq_class(1, 144) + mpq_class(1, 168));
  CHECK(total_volume(10, 2) < total_volume(20, 2));
  for (int q : {2, 3}) {
    mpq_class prev = total_volume(1, q);
    for (int L = 2; L <= 30; ++L) {
      const mpq_class cur = total_volume(L, q);
      CHECK(cur > prev);
      CHECK(cur - prev <= ratio(ipow(L + 1, 2), ipow(q, 2 * L)));
      prev = cur;
    }
  }
}
