#include "bt4/eigenfunction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bt4 {

// ---- Poly2

namespace {

constexpr int kDeg[10] = {0, 1, 1, 1, 2, 2, 2, 2, 2, 2};

int product_slot(int a, int b) {
  if (a == 0) return b;
  if (b == 0) return a;
  if (kDeg[a] + kDeg[b] > 2) return -1;
  if (a > b) std::swap(a, b);
  // a, b in {1,2,3}
  if (a == b) return 3 + a;  // l^2, m^2, n^2
  if (a == 1 && b == 2) return 7;
  if (a == 1 && b == 3) return 8;
  return 9;
}

}  // namespace

Poly2 Poly2::var(int which) {
  Poly2 p;
  p.c[1 + which] = 1.0;
  return p;
}

xcplx Poly2::operator()(xreal l, xreal m, xreal n) const {
  return c[0] + c[1] * l + c[2] * m + c[3] * n + c[4] * (l * l) + c[5] * (m * m) + c[6] * (n * n) +
         c[7] * (l * m) + c[8] * (l * n) + c[9] * (m * n);
}

bool Poly2::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](xcplx x) { return x == xcplx(0.0L); });
}

int Poly2::degree() const {
  int d = -1;
  for (int k = 0; k < 10; ++k)
    if (c[k] != xcplx(0.0L)) d = std::max(d, kDeg[k]);
  return d;
}

Poly2 operator+(const Poly2& a, const Poly2& b) {
  Poly2 r;
  for (int k = 0; k < 10; ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

Poly2 operator-(const Poly2& a) {
  Poly2 r;
  for (int k = 0; k < 10; ++k) r.c[k] = -a.c[k];
  return r;
}

Poly2 operator-(const Poly2& a, const Poly2& b) { return a + (-b); }

Poly2 operator*(const Poly2& a, const Poly2& b) {
  Poly2 r;
  for (int i = 0; i < 10; ++i) {
    if (a.c[i] == xcplx(0.0L)) continue;
    for (int j = 0; j < 10; ++j) {
      if (b.c[j] == xcplx(0.0L)) continue;
      const int s = product_slot(i, j);
      if (s < 0) throw std::logic_error("Poly2 product exceeds degree 2");
      r.c[s] += a.c[i] * b.c[j];
    }
  }
  return r;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Generic: return "Generic";
    case Regime::OnePair: return "OnePair";
    case Regime::TwoPairs: return "TwoPairs";
  }
  return "?";
}

// ---- coefficient tables

xcplx qdiff(xcplx a, xcplx b, xreal q) {
  const xcplx d = a - q * b;
  if (std::abs(d) <= 1e-10L * (std::abs(a) + q * std::abs(b))) return 0.0L;
  return d;
}

namespace {

xreal dconst(xreal q) { return (q + 1) * (q * q + q + 1) * (q * q * q + q * q + q + 1); }

}  // namespace

XTuple widen(const ZTuple& z) { return {xcplx(z[0]), xcplx(z[1]), xcplx(z[2]), xcplx(z[3])}; }
ZTuple narrow(const XTuple& z) { return {cplx(z[0]), cplx(z[1]), cplx(z[2]), cplx(z[3])}; }

CoefficientTable generic_coeffs(const XTuple& z, int q) {
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (std::abs(z[a] - z[b]) < kSeparationFloor)
        throw std::domain_error("generic coefficients need pairwise distinct z");
  const xreal Q = q;
  CoefficientTable t;
  t.regime = Regime::Generic;
  t.z = z;
  std::array<int, 4> p{0, 1, 2, 3};
  do {
    xcplx num = 1.0L, den = dconst(Q);
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        num *= qdiff(z[p[a]], z[p[b]], Q);
        den *= z[p[a]] - z[p[b]];
      }
    t.terms.push_back({{p[0], p[1], p[2]}, Poly2(num / den)});
  } while (std::next_permutation(p.begin(), p.end()));
  return t;
}

CoefficientTable one_pair_coeffs(const XTuple& zin, int q) {
  const xreal Q = q;
  const xcplx z1 = 0.5L * (zin[0] + zin[1]);
  const XTuple z{z1, z1, zin[2], zin[3]};
  if (std::abs(z[0] - z[2]) < kSeparationFloor || std::abs(z[0] - z[3]) < kSeparationFloor ||
      std::abs(z[2] - z[3]) < kSeparationFloor)
    throw std::domain_error("one-pair coefficients need z1, z3, z4 distinct");
  const Poly2 L = Poly2::var(0), M = Poly2::var(1), N = Poly2::var(2);
  const xreal k1 = 1 - Q, k2 = (1 - Q) * (1 - Q * Q);
  auto qd = [&](int a, int b) { return qdiff(z[a], z[b], Q); };
  auto sq = [](xcplx x) { return x * x; };

  const xcplx den = sq(z[0] - z[2]) * sq(z[0] - z[3]) * (z[2] - z[3]) * dconst(Q);
  CoefficientTable t;
  t.regime = Regime::OnePair;
  t.z = z;
  // the displayed formulas carry the opposite overall sign to the limit of the
  // generic coefficients; the factor -1 below restores f(v_000) = 1
  for (int i : {2, 3}) {
    const int j = 5 - i;
    const xreal si = (i == 2) ? -1.0L : 1.0L;  // (-1)^i with i in {3, 4}
    const xreal sj = -si;
    const xcplx zi = z[i], zj = z[j];
    const xcplx pre = -1.0L / den;

    t.terms.push_back({{0, 0, i},
                       Poly2(pre * si * sq(qd(0, 2)) * sq(qd(0, 3)) * qd(i, j)) *
                           (Q + 1 + (L - M) * k1)});
    t.terms.push_back({{0, i, 0},
                       Poly2(pre * sj * sq(qd(0, j)) * qd(i, j)) *
                           ((Q + 1 + (L - N) * k1) * (qd(0, i) * qd(i, 0)) + Poly2(k2 * z1 * zi))});
    t.terms.push_back(
        {{0, i, j},
         Poly2(pre * si * qd(i, j)) *
             ((Q + 1 + L * k1) * (qd(0, 2) * qd(2, 0) * qd(0, 3) * qd(3, 0)) +
              Poly2(k2 * (qd(0, 2) * qd(2, 0) * z1 * z[3] + qd(0, 3) * qd(3, 0) * z1 * z[2])))});
    t.terms.push_back({{i, 0, 0},
                       Poly2(pre * si * sq(qd(i, 0)) * sq(qd(0, j)) * qd(i, j)) *
                           (Q + 1 + (M - N) * k1)});
    t.terms.push_back({{i, 0, j},
                       Poly2(pre * sj * sq(qd(i, 0)) * qd(i, j)) *
                           ((1 + Q + M * k1) * (qd(0, j) * qd(j, 0)) + Poly2(k2 * z1 * zj))});
    t.terms.push_back({{i, j, 0},
                       Poly2(pre * si * sq(qd(2, 0)) * sq(qd(3, 0)) * qd(i, j)) *
                           (Q + 1 + N * k1)});
  }
  return t;
}

CoefficientTable two_pairs_coeffs(const XTuple& zin, int q) {
  const xreal Q = q;
  const xcplx z1 = 0.5L * (zin[0] + zin[1]), z3 = 0.5L * (zin[2] + zin[3]);
  if (std::abs(z1 - z3) < kSeparationFloor) throw std::domain_error("two-pair coefficients need z1 != z3");
  const XTuple z{z1, z1, z3, z3};
  const Poly2 L = Poly2::var(0), M = Poly2::var(1), N = Poly2::var(2);
  const xreal k1 = 1 - Q, k2 = (1 - Q) * (1 - Q * Q);
  const xcplx a = qdiff(z1, z3, Q), b = qdiff(z3, z1, Q);
  const xcplx d = z1 - z3;
  const xcplx den = d * d * d * d * dconst(Q);
  const xcplx p = z1 * z3;

  CoefficientTable t;
  t.regime = Regime::TwoPairs;
  t.z = z;
  // F_113, F_331
  t.terms.push_back({{0, 0, 2}, Poly2(a * a * a * a / den) * ((1 + Q + (L - M) * k1) * (1 + Q + N * k1))});
  t.terms.push_back({{2, 2, 0}, Poly2(b * b * b * b / den) * ((1 + Q + (L - M) * k1) * (1 + Q + N * k1))});
  // F_131 and its mirror F_313
  auto mixed = [&](xcplx x, xcplx y, xcplx zx, xcplx zy) {
    return Poly2(-x * x * x * y / den) * ((1 + Q + (L - N) * k1) * (1 + Q + M * k1)) -
           Poly2(k2 * x * x * p / den) * (2 + 2 * Q + (L + M - N + 1) * k1) -
           Poly2(2 * Q * (1 - Q) * k2 * x * zx * zy * zy / den);
  };
  t.terms.push_back({{0, 2, 0}, mixed(a, b, z1, z3)});
  t.terms.push_back({{2, 0, 2}, mixed(b, a, z3, z1)});
  // F_133, F_311
  const Poly2 fjj = Poly2(a * a * b * b / den) * ((1 + Q + L * k1) * (1 + Q + (M - N) * k1)) +
                    Poly2(2 * k2 * a * b * p / den) * (1 + Q + (M - N) * k1);
  t.terms.push_back({{0, 2, 2}, fjj});
  t.terms.push_back({{2, 0, 0}, fjj});
  return t;
}

Multiplicity detect_multiplicity(const ZTuple& z, double delta) {
  std::array<int, 4> parent{0, 1, 2, 3};
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (std::abs(z[a] - z[b]) < delta) parent[find(b)] = find(a);
  std::array<std::vector<int>, 4> groups;
  for (int a = 0; a < 4; ++a) groups[find(a)].push_back(a);

  Multiplicity m;
  std::vector<int> pairs, singles;
  for (const auto& g : groups) {
    m.max_mult = std::max<int>(m.max_mult, static_cast<int>(g.size()));
    if (g.size() == 2) pairs.insert(pairs.end(), g.begin(), g.end());
    if (g.size() == 1) singles.push_back(g[0]);
  }
  if (m.max_mult >= 3) return m;
  std::vector<int> ord = pairs;
  ord.insert(ord.end(), singles.begin(), singles.end());
  std::copy(ord.begin(), ord.end(), m.order.begin());
  m.regime = pairs.empty() ? Regime::Generic : (pairs.size() == 2 ? Regime::OnePair : Regime::TwoPairs);
  return m;
}

CoefficientTable coefficients(const XTuple& z, int q) {
  const Multiplicity mu = detect_multiplicity(narrow(z));
  if (mu.max_mult >= 3)
    throw UnsupportedMultiplicity("root of multiplicity " + std::to_string(mu.max_mult) +
                                  " has no closed-form eigenfunction");
  XTuple r;
  for (int k = 0; k < 4; ++k) r[k] = z[mu.order[k]];
  switch (mu.regime) {
    case Regime::Generic: return generic_coeffs(z, q);
    case Regime::OnePair: return one_pair_coeffs(r, q);
    case Regime::TwoPairs: return two_pairs_coeffs(r, q);
  }
  return {};
}

// ---- evaluation

Eigenfunction::Eigenfunction(const XTuple& z, int q) : z_(z), q_(q), table_(coefficients(z, q)) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
}

xcplx eval_reduced(const CoefficientTable& table, const VertexId& v) {
  const xreal l = v.ell, m = v.m, n = v.n;
  xcplx s = 0.0L;
  for (const auto& t : table.terms) {
    const xcplx mono =
        std::pow(table.z[t.idx[0]], v.ell) * std::pow(table.z[t.idx[1]], v.m) * std::pow(table.z[t.idx[2]], v.n);
    s += t.coeff(l, m, n) * mono;
  }
  return s;
}

cplx Eigenfunction::eval_reduced(const VertexId& v) const {
  if (v.ell > kMaxEll) throw std::range_error("vertex beyond the evaluation cap l <= 200");
  return cplx(bt4::eval_reduced(table_, v));
}

cplx Eigenfunction::eval(const VertexId& v) const {
  return eval_reduced(v) * std::exp(v.shift() * 0.5 * std::log(static_cast<double>(q_)));
}

BallFunction Eigenfunction::on_ball(int L, bool reduced) const {
  if (L > kMaxEll) throw std::range_error("ball beyond the evaluation cap l <= 200");
  std::array<std::vector<xcplx>, 4> pw;
  for (int a = 0; a < 4; ++a) {
    pw[a].resize(L + 1);
    pw[a][0] = 1.0L;
    for (int k = 1; k <= L; ++k) pw[a][k] = pw[a][k - 1] * table_.z[a];
  }
  const double lsq = 0.5 * std::log(static_cast<double>(q_));
  bool constant = true;
  for (const auto& t : table_.terms) constant = constant && t.coeff.degree() <= 0;

  BallFunction f(L);
  std::size_t k = 0;
  for (const auto& v : enumerate_ball(L)) {
    xcplx s = 0.0L;
    for (const auto& t : table_.terms) {
      const xcplx c = constant ? t.coeff.c[0] : t.coeff(v.ell, v.m, v.n);
      s += c * pw[t.idx[0]][v.ell] * pw[t.idx[1]][v.m] * pw[t.idx[2]][v.n];
    }
    const cplx g(s);
    f.at(k++) = reduced ? g : g * std::exp(v.shift() * lsq);
  }
  return f;
}

cplx eval(const ZTuple& z, int q, const VertexId& v) { return Eigenfunction(z, q).eval(v); }

const char* ray_name(Ray r) {
  switch (r) {
    case Ray::L00: return "(l,0,0)";
    case Ray::LL0: return "(l,l,0)";
    case Ray::LLL: return "(l,l,l)";
  }
  return "?";
}

VertexId ray_vertex(Ray r, int l) {
  switch (r) {
    case Ray::L00: return {l, 0, 0};
    case Ray::LL0: return {l, l, 0};
    case Ray::LLL: return {l, l, l};
  }
  return {};
}

RayValues ray_values(const ZTuple& z, int q, Ray ray, int L, double c) {
  if (L < 1) throw std::invalid_argument("ray needs L >= 1");
  if (c <= 0) throw std::invalid_argument("c must be positive");
  const Eigenfunction f(z, q);
  const double lq = std::log(static_cast<double>(q));
  RayValues out;
  for (int l = 0; l <= L; ++l) {
    const VertexId v = ray_vertex(ray, l);
    const cplx g = f.eval_reduced(v);
    const double growth = (ray == Ray::LL0) ? (2 + c) * l : 0.5 * (3 + c) * l;
    const double logf = 0.5 * v.shift() * lq;
    out.values.push_back(g * std::exp(logf));
    out.normalized.push_back(std::abs(g) * std::exp(logf - growth * lq));
  }
  return out;
}

}  // namespace bt4
