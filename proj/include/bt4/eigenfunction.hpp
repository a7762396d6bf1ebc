#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "bt4/geometry.hpp"
#include "bt4/hecke.hpp"
#include "bt4/spectral_types.hpp"

namespace bt4 {

struct UnsupportedMultiplicity : std::domain_error {
  using std::domain_error::domain_error;
};

// coefficients are built and summed in extended precision: near a repeated
// root the generic constants are large and cancel
using xreal = long double;
using xcplx = std::complex<xreal>;
using XTuple = std::array<xcplx, 4>;

// polynomial of degree <= 2 in (l, m, n) with complex coefficients
class Poly2 {
 public:
  // monomial order: 1, l, m, n, l^2, m^2, n^2, lm, ln, mn
  std::array<xcplx, 10> c{};

  Poly2() = default;
  Poly2(xcplx k) { c[0] = k; }
  Poly2(xreal k) { c[0] = k; }
  Poly2(double k) { c[0] = k; }
  Poly2(int k) { c[0] = static_cast<xreal>(k); }
  static Poly2 var(int which);  // 0 -> l, 1 -> m, 2 -> n

  xcplx operator()(xreal l, xreal m, xreal n) const;
  bool is_zero() const;
  int degree() const;

  friend Poly2 operator+(const Poly2& a, const Poly2& b);
  friend Poly2 operator-(const Poly2& a, const Poly2& b);
  friend Poly2 operator-(const Poly2& a);
  friend Poly2 operator*(const Poly2& a, const Poly2& b);
};

enum class Regime { Generic, OnePair, TwoPairs };
const char* regime_name(Regime r);

// one monomial z[idx0]^l z[idx1]^m z[idx2]^n with its coefficient function
struct Term {
  std::array<int, 3> idx{};
  Poly2 coeff;
};

struct CoefficientTable {
  Regime regime = Regime::Generic;
  XTuple z{};  // the tuple the monomials refer to (pair entries averaged)
  std::vector<Term> terms;
};

// a - q b, snapped to exact zero when it vanishes up to rounding
xcplx qdiff(xcplx a, xcplx b, xreal q);

XTuple widen(const ZTuple& z);
ZTuple narrow(const XTuple& z);

CoefficientTable generic_coeffs(const XTuple& z, int q);
// z[0] == z[1]; z[0], z[2], z[3] distinct
CoefficientTable one_pair_coeffs(const XTuple& z, int q);
// z[0] == z[1], z[2] == z[3], z[0] != z[2]
CoefficientTable two_pairs_coeffs(const XTuple& z, int q);

struct Multiplicity {
  Regime regime = Regime::Generic;
  std::array<int, 4> order{0, 1, 2, 3};  // permutation bringing pairs to the front
  int max_mult = 1;
};
Multiplicity detect_multiplicity(const ZTuple& z, double delta = kRepeatDelta);

// regime chosen from the multiplicity structure of z
CoefficientTable coefficients(const XTuple& z, int q);
// sum of the table's monomials at v, without the sqrt(q) power
xcplx eval_reduced(const CoefficientTable& t, const VertexId& v);
inline CoefficientTable coefficients(const ZTuple& z, int q) { return coefficients(widen(z), q); }

class Eigenfunction {
 public:
  Eigenfunction(const XTuple& z, int q);
  Eigenfunction(const ZTuple& z, int q) : Eigenfunction(widen(z), q) {}

  const CoefficientTable& table() const { return table_; }
  ZTuple z() const { return narrow(z_); }
  int q() const { return q_; }

  cplx eval(const VertexId& v) const;
  // f(v) / sqrt(q)^{3l+m-n}
  cplx eval_reduced(const VertexId& v) const;
  // values on ball(L); reduced drops the sqrt(q) power
  BallFunction on_ball(int L, bool reduced = false) const;

 private:
  XTuple z_;
  int q_;
  CoefficientTable table_;
};

cplx eval(const ZTuple& z, int q, const VertexId& v);

enum class Ray { L00, LL0, LLL };
const char* ray_name(Ray r);
VertexId ray_vertex(Ray r, int l);

struct RayValues {
  std::vector<cplx> values;      // f along the ray, l = 0..L
  std::vector<double> normalized;  // |f| / q^{(3+c)l/2}, q^{(2+c)l}, q^{(3+c)l/2}
};
RayValues ray_values(const ZTuple& z, int q, Ray ray, int L, double c);

}  // namespace bt4
