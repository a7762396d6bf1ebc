#include "bt4/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bt4 {

namespace {

constexpr double kPi = std::numbers::pi;

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }
bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

double wrap(double t) {
  t = std::fmod(t, 2 * kPi);
  if (t < 0) t += 2 * kPi;
  return t;
}

}  // namespace

ZTuple canonical(const ZTuple& z, double tol) {
  ZTuple s = z;
  std::sort(s.begin(), s.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
  for (std::size_t i = 0; i < 4;) {
    std::size_t j = i + 1;
    while (j < 4 && std::abs(std::abs(s[j]) - std::abs(s[i])) <= tol * std::max(1.0, std::abs(s[i]))) ++j;
    std::sort(s.begin() + i, s.begin() + j, [](cplx a, cplx b) { return std::arg(a) < std::arg(b); });
    i = j;
  }
  return s;
}

std::array<cplx, 3> sigma(const ZTuple& z) {
  const cplx s1 = z[0] + z[1] + z[2] + z[3];
  const cplx s2 = z[0] * z[1] + z[0] * z[2] + z[0] * z[3] + z[1] * z[2] + z[1] * z[3] + z[2] * z[3];
  const cplx s3 = z[0] * z[1] * z[2] + z[0] * z[1] * z[3] + z[0] * z[2] * z[3] + z[1] * z[2] * z[3];
  return {s1, s2, s3};
}

EigTriple eig_from_z(const ZTuple& z, int q, double tol) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  const cplx prod = z[0] * z[1] * z[2] * z[3];
  if (std::abs(prod - 1.0) > tol) throw std::domain_error("z1 z2 z3 z4 != 1");
  const auto s = sigma(z);
  const double Q = q, r = Q * std::sqrt(Q);
  return {r * s[0], Q * Q * s[1], r * s[2]};
}

namespace {

cplx horner(const std::array<cplx, 5>& c, cplx x) {
  cplx v = c[4];
  for (int k = 3; k >= 0; --k) v = v * x + c[k];
  return v;
}

std::array<cplx, 5> derivative(const std::array<cplx, 5>& c) {
  std::array<cplx, 5> d{};
  for (int k = 1; k < 5; ++k) d[k - 1] = static_cast<double>(k) * c[k];
  return d;
}

}  // namespace

EigTriple eig_from_z(const XTuple& z, int q, double tol) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  const xcplx prod = z[0] * z[1] * z[2] * z[3];
  if (std::abs(prod - 1.0L) > tol) throw std::domain_error("z1 z2 z3 z4 != 1");
  const xcplx s1 = z[0] + z[1] + z[2] + z[3];
  const xcplx s2 = z[0] * z[1] + z[0] * z[2] + z[0] * z[3] + z[1] * z[2] + z[1] * z[3] + z[2] * z[3];
  const xcplx s3 = z[0] * z[1] * z[2] + z[0] * z[1] * z[3] + z[0] * z[2] * z[3] + z[1] * z[2] * z[3];
  const xreal Q = q, r = Q * std::sqrt(Q);
  return {cplx(r * s1), cplx(Q * Q * s2), cplx(r * s3)};
}

RootSolve z_from_eig(const EigTriple& lam, int q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  const double Q = q, r = Q * std::sqrt(Q);
  const cplx s1 = lam.l1 / r, s2 = lam.l2 / (Q * Q), s3 = lam.l3 / r;
  // z^4 - s1 z^3 + s2 z^2 - s3 z + 1, low order first
  const std::array<cplx, 5> c{1.0, -s3, s2, -s1, 1.0};

  Eigen::Matrix4cd comp = Eigen::Matrix4cd::Zero();
  for (int k = 1; k < 4; ++k) comp(k, k - 1) = 1.0;
  for (int k = 0; k < 4; ++k) comp(k, 3) = -c[k];
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(comp, false);
  std::array<cplx, 4> roots;
  for (int k = 0; k < 4; ++k) roots[k] = es.eigenvalues()[k];

  const auto dc = derivative(c);
  for (auto& x : roots) {
    const cplx d = horner(dc, x);
    if (std::abs(d) > 1e-6 * std::max(1.0, std::abs(x))) {
      const cplx step = horner(c, x) / d;
      if (std::abs(step) < 1e-3 * std::max(1.0, std::abs(x))) x -= step;
    }
  }

  // clusters of k roots are expected to spread like eps^{1/k}
  RootSolve out;
  std::array<bool, 4> used{};
  ZTuple z = roots;
  std::vector<int> mult;
  for (int k = 4; k >= 2; --k) {
    const double radius = std::max(kRepeatDelta, 10 * std::pow(2.2e-16, 1.0 / k));
    // try every subset of size k among unused roots
    for (int mask = 0; mask < 16; ++mask) {
      if (__builtin_popcount(mask) != k) continue;
      std::vector<int> sel;
      bool ok = true;
      for (int a = 0; a < 4; ++a)
        if (mask >> a & 1) {
          if (used[a]) ok = false;
          sel.push_back(a);
        }
      if (!ok) continue;
      cplx mean = 0.0;
      for (int a : sel) mean += roots[a];
      mean /= static_cast<double>(k);
      const double scale = std::max(1.0, std::abs(mean));
      for (int a : sel) ok = ok && std::abs(roots[a] - mean) <= radius * scale;
      if (!ok) continue;
      for (int a : sel) {
        used[a] = true;
        z[a] = mean;
      }
      mult.push_back(k);
      if (k >= 3) out.ill_conditioned = true;
    }
  }
  for (int a = 0; a < 4; ++a)
    if (!used[a]) mult.push_back(1);
  std::sort(mult.rbegin(), mult.rend());
  out.multiplicities = mult;
  out.z = canonical(z);
  return out;
}

bool in_S(const ZTuple& z, double tol) {
  const auto s = sigma(z);
  const cplx prod = z[0] * z[1] * z[2] * z[3];
  return close(std::conj(s[0]), s[2], tol) && std::abs(s[1].imag()) <= tol * std::max(1.0, std::abs(s[1])) &&
         std::abs(prod - 1.0) <= tol;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::Trivial: return "Trivial";
    case Family::Family2: return "Family2";
    case Family::Family3: return "Family3";
    case Family::Family4: return "Family4";
    case Family::Tempered: return "Tempered";
    case Family::NotInSpectrum: return "NotInSpectrum";
  }
  return "?";
}

FamilyTag classify(const ZTuple& zin, int q, double tol) {
  if (!in_S(zin, tol)) throw std::domain_error("z is not in S");
  const ZTuple z = canonical(zin);
  const double Q = q, sq = std::sqrt(Q);
  std::array<double, 4> r;
  for (int k = 0; k < 4; ++k) r[k] = std::abs(z[k]);
  auto pattern = [&](double a, double b, double c, double d) {
    return close(r[0], a, tol) && close(r[1], b, tol) && close(r[2], c, tol) && close(r[3], d, tol);
  };
  auto rep = [&](int a, int b) { return std::abs(z[a] - z[b]) < kRepeatDelta; };

  FamilyTag t;
  if (pattern(1, 1, 1, 1)) {
    t.family = Family::Tempered;
    t.params = {wrap(std::arg(z[0])), wrap(std::arg(z[1])), wrap(std::arg(z[2]))};
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) t.degenerate = t.degenerate || rep(a, b);
    return t;
  }
  if (pattern(Q * sq, sq, 1 / sq, 1 / (Q * sq))) {
    if (close(z[0], Q * z[1], tol) && close(z[1], Q * z[2], tol) && close(z[2], Q * z[3], tol)) {
      const cplx zeta = z[0] / (Q * sq);
      for (int k = 0; k < 4; ++k)
        if (close(zeta, std::pow(cplx(0, 1), k), tol)) {
          t.family = Family::Trivial;
          t.params = {static_cast<double>(k)};
          return t;
        }
    }
    return t;
  }
  if (pattern(Q, 1, 1, 1 / Q)) {
    for (int j : {1, 2})
      if (close(z[0], Q * z[j], tol) && close(z[j], Q * z[3], tol)) {
        t.family = Family::Family2;
        t.params = {wrap(std::arg(z[0]))};
        t.degenerate = rep(1, 2);
        return t;
      }
    return t;
  }
  if (pattern(sq, sq, 1 / sq, 1 / sq)) {
    const cplx s = z[0] * z[1] / Q;
    const double sign = s.real() >= 0 ? 1.0 : -1.0;
    const bool paired = (close(z[0], Q * z[2], tol) && close(z[1], Q * z[3], tol)) ||
                        (close(z[0], Q * z[3], tol) && close(z[1], Q * z[2], tol));
    if (paired && close(s, cplx(sign), tol)) {
      t.family = Family::Family3;
      t.params = {wrap(std::arg(z[0])), sign};
      t.degenerate = rep(0, 1);
    }
    return t;
  }
  if (pattern(sq, 1, 1, 1 / sq)) {
    if (close(z[0], Q * z[3], tol)) {
      t.family = Family::Family4;
      t.params = {wrap(std::arg(z[0])), wrap(std::arg(z[1]))};
      t.degenerate = rep(1, 2);
    }
    return t;
  }
  return t;
}

XTuple sample_family_ext(const FamilyTag& tag, int q) {
  const xreal Q = q, sq = std::sqrt(Q);
  auto e = [](xreal t) { return std::polar(1.0L, t); };
  std::vector<xreal> p(tag.params.begin(), tag.params.end());
  auto need = [&](std::size_t n) {
    if (p.size() != n) throw std::invalid_argument("wrong number of family parameters");
  };
  XTuple z;
  switch (tag.family) {
    case Family::Trivial: {
      need(1);
      const int k = static_cast<int>(std::lround(tag.params[0]));
      if (k < 0 || k > 3 || tag.params[0] != k) throw std::invalid_argument("trivial index must be 0..3");
      const xcplx zeta = std::array<xcplx, 4>{xcplx(1, 0), xcplx(0, 1), xcplx(-1, 0), xcplx(0, -1)}[k];
      z = {zeta * (Q * sq), zeta * sq, zeta / sq, zeta / (Q * sq)};
      break;
    }
    case Family::Family2:
      need(1);
      z = {Q * e(p[0]), e(p[0]), e(-3 * p[0]), e(p[0]) / Q};
      break;
    case Family::Family3: {
      need(2);
      if (p[1] != 1 && p[1] != -1) throw std::invalid_argument("Family3 sign must be +1 or -1");
      z = {sq * e(p[0]), p[1] * sq * e(-p[0]), e(p[0]) / sq, p[1] * e(-p[0]) / sq};
      break;
    }
    case Family::Family4:
      need(2);
      z = {sq * e(p[0]), e(p[1]), e(-(p[1] + 2 * p[0])), e(p[0]) / sq};
      break;
    case Family::Tempered:
      need(3);
      z = {e(p[0]), e(p[1]), e(p[2]), e(-(p[0] + p[1] + p[2]))};
      break;
    case Family::NotInSpectrum: throw std::invalid_argument("NotInSpectrum has no samples");
  }
  // order as canonical() orders the rounded values
  const ZTuple zd = narrow(z);
  const ZTuple c = canonical(zd);
  XTuple out;
  std::array<bool, 4> used{};
  for (int k = 0; k < 4; ++k)
    for (int a = 0; a < 4; ++a)
      if (!used[a] && zd[a] == c[k]) {
        used[a] = true;
        out[k] = z[a];
        break;
      }
  return out;
}

ZTuple sample_family(const FamilyTag& tag, int q) { return narrow(sample_family_ext(tag, q)); }

FamilyTag random_tag(Family f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> th(0.0, 2 * kPi);
  FamilyTag t;
  t.family = f;
  switch (f) {
    case Family::Trivial: t.params = {static_cast<double>(std::uniform_int_distribution<int>(0, 3)(rng))}; break;
    case Family::Family2: t.params = {th(rng)}; break;
    case Family::Family3: {
      const double a = th(rng);
      t.params = {a, std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0};
      break;
    }
    case Family::Family4: {
      const double a = th(rng), b = th(rng);
      t.params = {a, b};
      break;
    }
    case Family::Tempered: {
      const double a = th(rng), b = th(rng), c = th(rng);
      t.params = {a, b, c};
      break;
    }
    case Family::NotInSpectrum: throw std::invalid_argument("NotInSpectrum has no samples");
  }
  return t;
}

bool same_point(const FamilyTag& a, const FamilyTag& b, int q, double tol) {
  if (a.family != b.family) return false;
  if (a.family == Family::NotInSpectrum) return true;
  const ZTuple za = sample_family(a, q), zb = sample_family(b, q);
  std::array<bool, 4> used{};
  for (const auto& x : za) {
    bool hit = false;
    for (int k = 0; k < 4 && !hit; ++k)
      if (!used[k] && std::abs(x - zb[k]) <= tol * std::max(1.0, std::abs(x))) used[k] = hit = true;
    if (!hit) return false;
  }
  return true;
}

bool in_building_spectrum(const EigTriple& lam, int q, double tol) {
  const RootSolve rs = z_from_eig(lam, q);
  const double t = rs.ill_conditioned ? std::max(tol, 1e-6) : tol;
  return std::all_of(rs.z.begin(), rs.z.end(), [&](cplx x) { return std::abs(std::abs(x) - 1.0) <= t; });
}

ConditionD condition_D(const ZTuple& z, int q, const CoefficientTable& coeffs, double tol) {
  (void)q;
  if (detect_multiplicity(z).regime != coeffs.regime)
    throw std::invalid_argument("coefficient regime does not match z");
  double scale = 0;
  for (const auto& t : coeffs.terms)
    for (const auto& c : t.coeff.c) scale = std::max(scale, static_cast<double>(std::abs(c)));
  ConditionD out;
  for (const auto& t : coeffs.terms) {
    double mag = 0;
    for (const auto& c : t.coeff.c) mag = std::max(mag, static_cast<double>(std::abs(c)));
    if (mag <= 1e-12 * scale) continue;
    const cplx a(coeffs.z[t.idx[0]]), b(coeffs.z[t.idx[1]]), c(coeffs.z[t.idx[2]]);
    const std::array<std::pair<double, const char*>, 3> rays{
        {{std::abs(a), "(1,0,0)"}, {std::abs(a * b), "(1,1,0)"}, {std::abs(a * b * c), "(1,1,1)"}}};
    for (const auto& [m, name] : rays)
      if (m > 1 + tol && (out.holds || m > out.modulus)) {
        out.holds = false;
        out.witness = {t.idx[0] + 1, t.idx[1] + 1, t.idx[2] + 1};
        out.ray = name;
        out.modulus = m;
      }
  }
  return out;
}

}  // namespace bt4
