#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>

#include "bt4/geometry.hpp"

namespace bt4 {

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

mpz_class stabilizer_order(const VertexId& v, int q);

// kappa(v) = |Gamma_v| / ((q-1)^3 q^{6 + 3l + m - n})
mpz_class class_factor(VertexClass c, int q);

struct BruteForceResult {
  mpz_class order;
  double enumerated = 0;  // number of matrices visited
};

// Counts the matrices of the stabilizer set directly: entry (i,j) ranges over
// polynomials of degree <= d_i - d_j (zero when d_i < d_j), d = (l,m,n,0),
// and a matrix is kept iff its determinant in F_p[t] is a nonzero constant.
BruteForceResult brute_force_order(const VertexId& v, int p, double budget = 1e8);

mpq_class vertex_weight(const VertexId& v, int q);
double weight_to_double(const mpq_class& w);
mpq_class total_volume(int L, int q);

}  // namespace bt4
