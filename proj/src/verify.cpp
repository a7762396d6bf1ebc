#include "bt4/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "bt4/stabilizer.hpp"

namespace bt4 {

using nlohmann::json;

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Flagged: return "flagged";
  }
  return "?";
}

void VerificationReport::fail(const std::string& w) {
  status = Status::Fail;
  witness = w.empty() ? std::string("unspecified") : w;
}

void VerificationReport::flag(const std::string& w) {
  if (status == Status::Fail) return;
  status = Status::Flagged;
  if (witness.empty()) witness = w;
}

json VerificationReport::to_json() const {
  json ev = evidence;
  ev["max_residual"] = max_residual;
  ev["bound"] = bound;
  ev["witness"] = witness.empty() ? json(nullptr) : json(witness);
  return {{"check", check}, {"anchor", anchor}, {"inputs", inputs}, {"status", status_name(status)}, {"evidence", ev}};
}

json to_json(cplx x) { return json::array({x.real(), x.imag()}); }

json to_json(const ZTuple& z) {
  json a = json::array();
  for (const auto& x : z) a.push_back(to_json(x));
  return a;
}

namespace {

using Lam = std::array<xcplx, 3>;

Lam lambdas(const XTuple& z, int q) {
  const xcplx s1 = z[0] + z[1] + z[2] + z[3];
  const xcplx s2 = z[0] * z[1] + z[0] * z[2] + z[0] * z[3] + z[1] * z[2] + z[1] * z[3] + z[2] * z[3];
  const xcplx s3 = z[0] * z[1] * z[2] + z[0] * z[1] * z[3] + z[0] * z[2] * z[3] + z[1] * z[2] * z[3];
  const xreal Q = q, r = Q * std::sqrt(Q);
  return {r * s1, Q * Q * s2, r * s3};
}

VerificationReport start(const char* check, const char* anchor, const XTuple& z, int q) {
  VerificationReport r;
  r.check = check;
  r.anchor = anchor;
  r.inputs["z"] = to_json(narrow(z));
  r.inputs["q"] = q;
  return r;
}

double inv_kappa(VertexClass c, int q) { return 1.0 / class_factor(c, q).get_d(); }

std::array<double, 8> inv_kappa_table(int q) {
  std::array<double, 8> t{};
  for (int c = 0; c < 8; ++c) t[c] = inv_kappa(static_cast<VertexClass>(c), q);
  return t;
}

xreal rel(xcplx diff, xreal scale) { return scale > 0 ? std::abs(diff) / scale : std::abs(diff); }

}  // namespace

// ---- eigen residual

VerificationReport eigen_residual(const XTuple& z, int q, int L, double tol) {
  VerificationReport r = start("eigen_residual", "closed-form simultaneous eigenfunction", z, q);
  r.inputs["L"] = L;
  const Eigenfunction f(z, q);
  const Lam lx = lambdas(z, q);
  const BallFunction F = f.on_ball(L);
  double worst = 0;
  VertexId wv;
  int wi = 1;
  std::array<double, 3> per_i{};
  for (int i = 1; i <= 3; ++i) {
    const cplx lam(lx[i - 1]);
    for (const auto& v : interior(L)) {
      cplx acc = 0.0;
      double loc = std::abs(F[v]);
      for (const auto& t : stencil(v, i, q)) {
        acc += static_cast<double>(t.coeff) * F[t.u];
        loc = std::max(loc, std::abs(F[t.u]));
      }
      const double e = std::abs(acc - lam * F[v]) / (1 + loc);
      per_i[i - 1] = std::max(per_i[i - 1], e);
      if (e > worst) worst = e, wv = v, wi = i;
    }
  }
  r.max_residual = worst;
  r.bound = tol;
  r.evidence["regime"] = regime_name(f.table().regime);
  r.evidence["worst_vertex"] = wv.str();
  r.evidence["worst_i"] = wi;
  r.evidence["per_i"] = per_i;
  if (!(worst <= tol)) r.fail(wv.str() + " i=" + std::to_string(wi));
  return r;
}

// ---- recurrences

VerificationReport char_recurrence_check(const XTuple& z, int q, int Lmax, double tol) {
  if (Lmax < 4 || Lmax > kMaxEll) throw std::invalid_argument("Lmax must be in [4, 200]");
  VerificationReport r = start("char_recurrence", "five-term recurrence along (l,0,0)", z, q);
  r.inputs["Lmax"] = Lmax;
  const Eigenfunction f(z, q);
  const Lam lam = lambdas(z, q);
  const xreal Q = q, sq = std::sqrt(Q);
  std::vector<xcplx> a(Lmax + 1);
  for (int l = 0; l <= Lmax; ++l) a[l] = eval_reduced(f.table(), {l, 0, 0}) * std::pow(sq, static_cast<xreal>(l));
  xreal worst = 0;
  int wl = 2;
  for (int l = 2; l <= Lmax - 2; ++l) {
    const std::array<xcplx, 5> t{a[l + 2], -lam[0] / Q * a[l + 1], lam[1] / Q * a[l], -lam[2] * a[l - 1],
                                 Q * Q * a[l - 2]};
    xcplx s = 0;
    xreal scale = 0;
    for (const auto& x : t) s += x, scale += std::abs(x);
    const xreal e = rel(s, scale);
    if (e > worst) worst = e, wl = l;
  }
  r.max_residual = static_cast<double>(worst);
  r.bound = tol;
  if (!(worst <= tol)) r.fail(VertexId(wl, 0, 0).str());
  return r;
}

VerificationReport face_recurrence_check(const XTuple& z, int q, int Lmax, double tol) {
  if (Lmax < 4 || Lmax > kMaxEll) throw std::invalid_argument("Lmax must be in [4, 200]");
  VerificationReport r = start("face_recurrence", "six-term recurrence on the (l,m,0) face", z, q);
  r.inputs["Lmax"] = Lmax;
  const Eigenfunction f(z, q);
  const Lam lam = lambdas(z, q);
  const xreal Q = q, sq = std::sqrt(Q);
  std::vector<std::vector<xcplx>> a(Lmax + 1);
  for (int l = 0; l <= Lmax; ++l)
    for (int m = 0; m <= l; ++m)
      a[l].push_back(eval_reduced(f.table(), {l, m, 0}) * std::pow(sq, static_cast<xreal>(l - m)));
  xreal worst = 0;
  VertexId wv(2, 1, 0);
  for (int l = 2; l + 2 <= Lmax; ++l)
    for (int m = 1; m < l; ++m) {
      const std::array<xcplx, 6> t{a[l + 2][m + 1],       Q * a[l + 1][m + 2], -lam[0] / Q * a[l + 1][m + 1],
                                   lam[2] / Q * a[l][m], -Q * a[l - 1][m],    -a[l][m - 1]};
      xcplx s = 0;
      xreal scale = 0;
      for (const auto& x : t) s += x, scale += std::abs(x);
      const xreal e = rel(s, scale);
      if (e > worst) worst = e, wv = VertexId(l, m, 0);
    }
  r.max_residual = static_cast<double>(worst);
  r.bound = tol;
  if (!(worst <= tol)) r.fail(wv.str());
  return r;
}

// ---- growth along the rays

VerificationReport condition_B_check(const XTuple& z, int q, int L, double c) {
  if (c <= 0) throw std::invalid_argument("c must be positive");
  if (L < 8 || L > kMaxEll) throw std::invalid_argument("L must be in [8, 200]");
  VerificationReport r = start("condition_B", "ray growth bounds O(q^{(3+c)l/2}), O(q^{(2+c)l})", z, q);
  r.inputs["L"] = L;
  r.inputs["c"] = c;
  r.bound = c / 4;
  const Eigenfunction f(z, q);
  const double lq = std::log(static_cast<double>(q));
  json rays = json::object();
  double worst = -1e300;
  for (Ray ray : {Ray::L00, Ray::LL0, Ray::LLL}) {
    const double decay = ray == Ray::LL0 ? c : c / 2;
    std::vector<double> env(L + 1);
    double run = -1e300;
    for (int l = 0; l <= L; ++l) {
      const double g = static_cast<double>(std::abs(eval_reduced(f.table(), ray_vertex(ray, l))));
      const double lg = g > 0 ? std::log(g) / lq - decay * l : -1e300;
      run = std::max(run, lg);
      env[l] = run;
    }
    // least squares slope over the last half
    const int lo = L / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    bool empty = true;
    for (int l = lo; l <= L; ++l) {
      if (env[l] <= -1e299) continue;
      empty = false;
      sx += l, sy += env[l], sxx += double(l) * l, sxy += l * env[l];
      ++n;
    }
    const double slope = (empty || n < 2) ? 0.0 : (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rays[ray_name(ray)] = {{"slope", slope}, {"sup_log_q", env[L] <= -1e299 ? json(nullptr) : json(env[L])}};
    if (slope > worst) {
      worst = slope;
      if (slope > c / 4) r.fail(std::string(ray_name(ray)) + " slope " + std::to_string(slope));
    }
  }
  r.max_residual = worst;
  r.evidence["rays"] = rays;
  return r;
}

// ---- Weyl sequences

namespace {

std::string offset_name(const VertexId& v, const VertexId& u) {
  auto part = [](const char* s, int d) {
    std::string o = s;
    if (d > 0) o += "+" + std::to_string(d);
    if (d < 0) o += std::to_string(d);
    return o;
  };
  return "f(" + part("l", u.ell - v.ell) + "," + part("m", u.m - v.m) + "," + part("n", u.n - v.n) + ")";
}

// the defect formula derived from the stencil of a representative vertex
std::string rederived_row(const VertexId& v, int i, int q) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : stencil(v, i, q)) {
    const int d = t.u.ell - v.ell;
    if (d == 0) continue;
    os << (d < 0 ? (first ? "" : " + ") : (first ? "-" : " - "));
    os << (d < 0 ? "eps(1-eps)^{l-1}*" : "eps(1-eps)^l*") << t.coeff << "*" << offset_name(v, t.u);
    first = false;
  }
  return first ? "0" : os.str();
}

VertexId class_representative(VertexClass c) {
  switch (c) {
    case VertexClass::Origin: return {0, 0, 0};
    case VertexClass::RayL00: return {3, 0, 0};
    case VertexClass::FaceLL0: return {3, 3, 0};
    case VertexClass::RayLLL: return {3, 3, 3};
    case VertexClass::FaceLM0: return {4, 2, 0};
    case VertexClass::FaceLMM: return {4, 2, 2};
    case VertexClass::FaceLLM: return {4, 4, 2};
    case VertexClass::Interior: return {5, 3, 1};
  }
  return {};
}

// the i = 1 defect list as printed, one expression per class
cplx printed_defect(const BallFunction& F, const VertexId& v, int q, double eps) {
  const double Q = q, l = v.ell;
  const double up = eps * std::pow(1 - eps, l), down = eps * std::pow(1 - eps, l - 1);
  const int m = v.m, n = v.n;
  switch (classify(v)) {
    case VertexClass::Origin: return -eps * (Q * Q * Q + Q * Q + Q + 1) * F[{1, 0, 0}];
    case VertexClass::RayL00: return -up * F[{v.ell + 1, 0, 0}];
    case VertexClass::FaceLL0: return -up * (Q + 1) * F[{v.ell + 1, v.ell, 0}];
    case VertexClass::RayLLL:
      return down * Q * Q * Q * F[{v.ell - 1, v.ell - 1, v.ell - 1}] -
             up * (Q * Q + Q + 1) * F[{v.ell + 1, v.ell, v.ell}];
    case VertexClass::FaceLM0: return -up * F[{v.ell + 1, m, 0}];
    case VertexClass::FaceLMM: return down * Q * Q * Q * F[{v.ell + 1, m, 0}] - up * F[{v.ell + 1, m, m}];
    case VertexClass::FaceLLM:
      return eps * std::pow(1 - eps, l + 1) * Q * Q * Q * F[{v.ell - 1, v.ell - 1, n - 1}] -
             up * F[{v.ell + 1, v.ell, n}];
    case VertexClass::Interior: return down * Q * Q * Q * F[{v.ell - 1, m - 1, n - 1}] - up * F[{v.ell + 1, m, n}];
  }
  return 0.0;
}

}  // namespace

VerificationReport weyl_identity_check(const XTuple& z, int q, double eps, int L, double tol) {
  if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  if (L < 3 || L > 60) throw std::invalid_argument("L must be in [3, 60]");
  VerificationReport r = start("weyl_identity", "defect of the damped eigenfunction (1-eps)^l f", z, q);
  r.inputs["eps"] = eps;
  r.inputs["L"] = L;
  r.bound = tol;
  const Eigenfunction f(z, q);
  const Lam lx = lambdas(z, q);
  const BallFunction F = f.on_ball(L);
  std::vector<double> pw(L + 2);
  for (int l = 0; l <= L + 1; ++l) pw[l] = std::pow(1 - eps, l);
  const auto w = weight_table(L, q);
  const auto inner = interior(L);

  double worst = 0, num_gap = 0;
  std::string wit;
  std::array<double, 8> printed_gap{};
  json per_i = json::array();
  for (int i = 1; i <= 3; ++i) {
    const cplx lam(lx[i - 1]);
    double nd = 0, nr = 0;
    for (std::size_t k = 0; k < inner.size(); ++k) {
      const VertexId& v = inner[k];
      const double fl = pw[v.ell];
      cplx direct = -lam * fl * F[v], redo = 0.0;
      double scale = std::abs(lam) * fl * std::abs(F[v]);
      for (const auto& t : stencil(v, i, q)) {
        const double c = static_cast<double>(t.coeff);
        direct += c * pw[t.u.ell] * F[t.u];
        scale += c * pw[t.u.ell] * std::abs(F[t.u]);
        const int d = t.u.ell - v.ell;
        if (d < 0) redo += eps * pw[v.ell - 1] * c * F[t.u];
        if (d > 0) redo -= eps * fl * c * F[t.u];
      }
      const double e = std::abs(direct - redo) / std::max(scale, 1e-300);
      if (e > worst) worst = e, wit = v.str() + " i=" + std::to_string(i);
      nd += w[k] * std::norm(direct);
      nr += w[k] * std::norm(redo);
      if (i == 1) {
        const double pe = std::abs(direct - printed_defect(F, v, q, eps)) / std::max(scale, 1e-300);
        auto& g = printed_gap[static_cast<int>(classify(v))];
        g = std::max(g, pe);
      }
    }
    const double gap = std::abs(std::sqrt(nd) - std::sqrt(nr)) / std::max(std::sqrt(nd), 1e-300);
    num_gap = std::max(num_gap, gap);
    json rows = json::object();
    for (int c = 0; c < 8; ++c) {
      const auto vc = static_cast<VertexClass>(c);
      rows[class_name(vc)] = rederived_row(class_representative(vc), i, q);
    }
    per_i.push_back({{"i", i}, {"numerator_direct", std::sqrt(nd)}, {"numerator_rederived", std::sqrt(nr)},
                     {"rederived_rows", rows}});
  }
  r.max_residual = worst;
  r.evidence["per_i"] = per_i;
  r.evidence["numerator_relative_gap"] = num_gap;

  json mism = json::array(), gaps = json::object();
  for (int c = 0; c < 8; ++c) {
    const auto vc = static_cast<VertexClass>(c);
    gaps[class_name(vc)] = printed_gap[c];
    if (printed_gap[c] > tol) mism.push_back(class_name(vc));
  }
  r.evidence["printed_i1_gap"] = gaps;
  r.evidence["printed_i1_mismatch"] = mism;

  if (!(worst <= tol)) r.fail(wit);
  else if (!(num_gap <= 1e-8)) r.fail("numerator sum");
  else if (!mism.empty()) {
    std::string s = "printed i=1 rows differ:";
    for (const auto& x : mism) s += " " + x.get<std::string>();
    r.flag(s);
  }
  return r;
}

namespace {

// radii compared when deciding that the ratio has settled
constexpr int kStableGap = 5;

struct LevelSums {
  std::array<std::vector<double>, 3> num;
  std::vector<double> den;
};

// per-level weighted sums in reduced coordinates, where w |f|^2 = |g|^2 / kappa
LevelSums weyl_levels(const Eigenfunction& f, const Lam& lx, int q, double eps, int L) {
  const BallFunction g = f.on_ball(L, true);
  std::vector<double> pw(L + 1);
  for (int l = 0; l <= L; ++l) pw[l] = std::pow(1 - eps, l);
  const double sq = std::sqrt(static_cast<double>(q));
  std::array<double, 33> sp;
  for (int k = -16; k <= 16; ++k) sp[k + 16] = std::pow(sq, k);
  const auto ik = inv_kappa_table(q);
  const std::array<cplx, 3> lam{cplx(lx[0]), cplx(lx[1]), cplx(lx[2])};

  LevelSums s;
  s.den.assign(L, 0.0);
  for (auto& x : s.num) x.assign(L, 0.0);
  std::size_t k = 0;
  for (const auto& v : interior(L)) {
    const double wk = ik[static_cast<int>(classify(v))];
    const cplx G = pw[v.ell] * g.at(k++);
    s.den[v.ell] += wk * std::norm(G);
    for (int i = 1; i <= 3; ++i) {
      cplx acc = -lam[i - 1] * G;
      for (const auto& t : stencil(v, i, q))
        acc += static_cast<double>(t.coeff) * sp[t.u.shift() - v.shift() + 16] * pw[t.u.ell] * g[t.u];
      s.num[i - 1][v.ell] += wk * std::norm(acc);
    }
  }
  return s;
}

}  // namespace

VerificationReport weyl_ratio(const XTuple& z, int q, double eps, int L0) {
  if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  if (L0 < 10 || L0 > kMaxEll) throw std::invalid_argument("L0 must be in [10, 200]");
  VerificationReport r = start("weyl_ratio", "Weyl sequence bound eps(1-eps)^{-1}(q^4+q^3+2q^2+q+1)", z, q);
  r.inputs["eps"] = eps;
  r.inputs["L0"] = L0;
  const double Q = q;
  r.bound = eps / (1 - eps) * (Q * Q * Q * Q + Q * Q * Q + 2 * Q * Q + Q + 1) * (1 + 1e-3);
  const Eigenfunction f(z, q);
  const Lam lx = lambdas(z, q);

  std::array<double, 3> ratio{}, prev{};
  int L = L0;
  bool stable = false;
  for (;;) {
    const LevelSums s = weyl_levels(f, lx, q, eps, L);
    std::array<double, 3> n{};
    double d = 0;
    for (int l = 0; l < L; ++l) {
      if (l == L - kStableGap) {
        for (int i = 0; i < 3; ++i) prev[i] = std::sqrt(n[i] / d);
      }
      d += s.den[l];
      for (int i = 0; i < 3; ++i) n[i] += s.num[i][l];
    }
    for (int i = 0; i < 3; ++i) ratio[i] = std::sqrt(n[i] / d);
    stable = true;
    for (int i = 0; i < 3; ++i) stable = stable && std::abs(ratio[i] - prev[i]) <= 1e-4;
    if (stable || L >= kMaxEll) break;
    L = std::min(kMaxEll, 2 * L);
  }
  r.inputs["L"] = L;
  r.evidence["ratio"] = ratio;
  r.evidence["ratio_at_L_minus_5"] = prev;
  r.evidence["stabilized"] = stable;
  r.max_residual = *std::max_element(ratio.begin(), ratio.end());
  const int wi = static_cast<int>(std::max_element(ratio.begin(), ratio.end()) - ratio.begin()) + 1;
  if (!std::isfinite(r.max_residual) || !stable)
    r.flag("ratio not stabilized by L=" + std::to_string(L));
  else if (r.max_residual > r.bound)
    r.fail("i=" + std::to_string(wi) + " at L=" + std::to_string(L));
  return r;
}

// ---- Appendix B sequences

namespace {

xreal min_gap(const std::vector<xcplx>& x) {
  xreal g = 1e300L;
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = a + 1; b < x.size(); ++b) g = std::min(g, std::abs(x[a] - x[b]));
  return g;
}

// sum_k X_k r_k^{n-1} with X_k = p_k^{d} / prod_{j != k} (p_k - p_j), roots r_k = s p_k
void closed_form(const std::vector<xcplx>& p, xreal s, int N, std::vector<cplx>& out, std::vector<xreal>& scale) {
  const int d = static_cast<int>(p.size()) - 1;
  out.assign(N + 1, 0.0);
  scale.assign(N + 1, 0.0L);
  for (std::size_t k = 0; k < p.size(); ++k) {
    xcplx den = 1;
    for (std::size_t j = 0; j < p.size(); ++j)
      if (j != k) den *= p[k] - p[j];
    const xcplx X = std::pow(p[k], d) / den;
    xcplx r = 1;
    for (int n = 1; n <= N; ++n) {
      const xcplx t = X * r;
      out[n] += cplx(t);
      scale[n] += std::abs(t);
      r *= s * p[k];
    }
  }
}

SequenceTriple sequences(const Lam& lam, const std::optional<XTuple>& z, int q, int N) {
  if (N < 1 || N > kMaxEll) throw std::invalid_argument("N must be in [1, 200]");
  const xreal Q = q;
  const xreal Q3 = Q * Q * Q, Q5 = Q3 * Q * Q, Q6 = Q3 * Q3, Q8 = Q6 * Q * Q, Q12 = Q6 * Q6;
  const xcplx l1 = lam[0], l2 = lam[1], l3 = lam[2];
  std::vector<xcplx> a(N + 7, 0.0L), b(N + 7, 0.0L), g(N + 7, 0.0L);
  const int o = 6;  // storage offset so n - 6 is addressable
  a[o + 1] = b[o + 1] = g[o + 1] = 1;
  for (int n = 2; n <= N; ++n) {
    const int k = o + n;
    a[k] = l1 * a[k - 1] - Q * l2 * a[k - 2] + Q3 * l3 * a[k - 3] - Q6 * a[k - 4];
    b[k] = l3 * b[k - 1] - Q * l2 * b[k - 2] + Q3 * l1 * b[k - 3] - Q6 * b[k - 4];
    g[k] = l2 * g[k - 1] - (l1 * l3 - Q3) * Q * g[k - 2] + (l1 * l1 + l3 * l3 - 2.0L * l2 * Q) * Q3 * g[k - 3] -
           (l1 * l3 - Q3) * Q5 * g[k - 4] + l2 * Q8 * g[k - 5] - Q12 * g[k - 6];
  }
  SequenceTriple s;
  for (int n = 0; n <= N; ++n) {
    s.alpha.push_back(cplx(a[o + n]));
    s.beta.push_back(cplx(b[o + n]));
    s.gamma.push_back(cplx(g[o + n]));
  }
  if (!z) return s;

  const XTuple& x = *z;
  std::vector<xcplx> zs(x.begin(), x.end()), inv, pairs;
  for (const auto& v : zs) inv.push_back(1.0L / v);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) pairs.push_back(x[i] * x[j]);
  xreal zmax = 0;
  for (const auto& v : zs) zmax = std::max(zmax, std::abs(v));
  if (min_gap(zs) < 1e-6L * zmax || min_gap(pairs) < 1e-6L * zmax * zmax) return s;

  std::vector<xreal> sa, sb, sg;
  const xreal r32 = Q * std::sqrt(Q);
  closed_form(zs, r32, N, s.alpha_closed, sa);
  closed_form(inv, r32, N, s.beta_closed, sb);
  closed_form(pairs, Q * Q, N, s.gamma_closed, sg);
  s.closed_form = true;
  for (int n = 1; n <= N; ++n) {
    s.max_rel_diff = std::max<double>(s.max_rel_diff, rel(xcplx(s.alpha[n] - s.alpha_closed[n]), sa[n]));
    s.max_rel_diff = std::max<double>(s.max_rel_diff, rel(xcplx(s.beta[n] - s.beta_closed[n]), sb[n]));
    s.max_rel_diff = std::max<double>(s.max_rel_diff, rel(xcplx(s.gamma[n] - s.gamma_closed[n]), sg[n]));
  }
  return s;
}

}  // namespace

SequenceTriple appendixB_sequences(const XTuple& z, int q, int N) { return sequences(lambdas(z, q), z, q, N); }

SequenceTriple appendixB_sequences(const EigTriple& lam, int q, int N) {
  const RootSolve rs = z_from_eig(lam, q);
  std::optional<XTuple> z;
  if (!rs.ill_conditioned && rs.multiplicities.size() == 4) z = widen(rs.z);
  return sequences({xcplx(lam.l1), xcplx(lam.l2), xcplx(lam.l3)}, z, q, N);
}

// ---- Appendix B convolution identities

VerificationReport appendixB_convolution(const XTuple& z, int q, const BallFunction& p, int L, double tol) {
  if (L < 8 || L > 60) throw std::invalid_argument("L must be in [8, 60]");
  if (std::abs(p.at(0)) != 0) throw std::invalid_argument("perturbation must vanish at the origin");
  const auto pv = enumerate_ball(p.radius());
  for (std::size_t k = 0; k < pv.size(); ++k)
    if (pv[k].ell >= L - 1 && std::abs(p.at(k)) != 0)
      throw std::invalid_argument("perturbation support touches the truncation boundary");

  VerificationReport r = start("appendixB_convolution", "ray convolution identities for h - f", z, q);
  r.inputs["L"] = L;
  r.bound = tol;
  const Lam lx = lambdas(z, q);
  BallFunction a(L);
  for (std::size_t k = 0; k < pv.size() && pv[k].ell <= L; ++k) a[pv[k]] = p.at(k);

  std::array<BallFunction, 3> dl;
  for (int i = 1; i <= 3; ++i) {
    dl[i - 1] = apply(a, i, q);
    const cplx lam(lx[i - 1]);
    for (std::size_t k = 0; k < dl[i - 1].size(); ++k) dl[i - 1].at(k) -= lam * a.at(k);
  }
  auto d1 = [&](int l, int m, int n) { return dl[0][{l, m, n}]; };
  auto d2 = [&](int l, int m, int n) { return dl[1][{l, m, n}]; };
  auto d3 = [&](int l, int m, int n) { return dl[2][{l, m, n}]; };

  const SequenceTriple s = appendixB_sequences(z, q, L);
  const double Q = q, Q2 = Q * Q, Q3 = Q2 * Q, Q4 = Q3 * Q, Q5 = Q4 * Q, Q7 = Q5 * Q2, Q8 = Q4 * Q4;
  const double P4 = Q3 + Q2 + Q + 1;
  const cplx L1(lx[0]), L3(lx[2]);
  const int top = L - 2;

  double worst = 0;
  std::string wit;
  json per_ray = json::object();
  auto check = [&](const char* name, auto lhs, const std::vector<cplx>& kern, const std::vector<cplx>& seq,
                   int from) {
    double w = 0;
    for (int l = from; l <= top; ++l) {
      cplx sum = 0.0;
      double scale = std::abs(lhs(l));
      for (int i = 1; i <= l; ++i) {
        sum += kern[l - i] * seq[i];
        scale += std::abs(kern[l - i]) * std::abs(seq[i]);
      }
      const double e = scale > 0 ? std::abs(sum - lhs(l)) / scale : 0.0;
      if (e > w) w = e;
      if (e > worst) worst = e, wit = std::string(name) + " l=" + std::to_string(l);
    }
    per_ray[name] = w;
  };

  std::vector<cplx> c(top), d(top), e(top);
  for (int n = 0; n < top; ++n) {
    if (n == 0) {
      c[n] = d1(0, 0, 0) / P4;
      d[n] = d3(0, 0, 0) / P4;
    } else if (n == 1) {
      c[n] = d1(1, 0, 0) - Q * d2(0, 0, 0) / (Q2 + 1);
      d[n] = d3(1, 1, 1) - Q * d2(0, 0, 0) / (Q2 + 1);
    } else if (n == 2) {
      c[n] = d1(2, 0, 0) - Q * d2(1, 0, 0) + Q3 * (Q2 + Q + 1) * d3(0, 0, 0) / P4;
      d[n] = d3(2, 2, 2) - Q * d2(1, 1, 1) + Q3 * (Q2 + Q + 1) * d1(0, 0, 0) / P4;
    } else {
      c[n] = d1(n, 0, 0) - Q * d2(n - 1, 0, 0) + Q3 * d3(n - 2, 0, 0);
      d[n] = d3(n, n, n) - Q * d2(n - 1, n - 1, n - 1) + Q3 * d1(n - 2, n - 2, n - 2);
    }
  }
  check("(l,0,0)", [&](int l) { return a[{l, 0, 0}]; }, c, s.alpha, 1);
  check("(l,l,l)", [&](int l) { return a[{l, l, l}]; }, d, s.beta, 1);

  // (l,l,0): e_0..e_4 are read off the first five values, later terms are the
  // right-hand side of the sixth-order relation
  auto x = [&](int l) { return a[{l, l, 0}]; };
  for (int n = 1; n <= 5 && n <= top; ++n) {
    cplx acc = x(n);
    for (int i = 2; i <= n; ++i) acc -= e[n - i] * s.gamma[i];
    e[n - 1] = acc;
  }
  for (int l = 5; l < top; ++l)
    e[l] = d2(l, l, 0) - 2 * Q4 * d2(l - 2, l - 2, 0) + Q8 * d2(l - 4, l - 4, 0) - Q * (Q + 1) * d3(l, l - 1, 0) +
           Q3 * (Q + 1) * d1(l - 1, l - 2, 0) - L3 * Q * d1(l - 1, l - 1, 0) + L3 * Q3 * d3(l - 2, l - 2, 0) +
           L1 * Q3 * d1(l - 2, l - 2, 0) - L1 * Q5 * d3(l - 3, l - 3, 0) + Q5 * (Q + 1) * d3(l - 2, l - 3, 0) -
           Q7 * (Q + 1) * d1(l - 3, l - 4, 0);
  check("(l,l,0)", x, e, s.gamma, 6);

  r.max_residual = worst;
  r.evidence["per_ray"] = per_ray;
  json fitted = json::array();
  for (int n = 0; n < 5 && n < top; ++n) fitted.push_back(to_json(e[n]));
  r.evidence["fitted_e"] = fitted;
  if (!(worst <= tol)) r.fail(wit);
  return r;
}

// ---- spectrum decision

namespace {

void decide(Decision& out, const XTuple& z, int q, double tol, json& chain) {
  VerificationReport& r = out.report;
  const ZTuple zd = narrow(z);
  const bool s = in_S(zd, tol);
  chain.push_back({{"step", "in_S"}, {"value", s}});
  if (s) {
    out.tag = classify(zd, q, tol);
    chain.push_back({{"step", "classify"},
                     {"family", family_name(out.tag.family)},
                     {"params", out.tag.params},
                     {"degenerate", out.tag.degenerate}});
  } else {
    out.tag = FamilyTag{};
  }
  out.in_building_spectrum = std::all_of(zd.begin(), zd.end(), [&](cplx x) { return std::abs(std::abs(x) - 1) <= tol; });

  std::optional<CoefficientTable> table;
  try {
    table = coefficients(z, q);
  } catch (const UnsupportedMultiplicity& ex) {
    chain.push_back({{"step", "coefficients"}, {"error", ex.what()}});
  }
  std::optional<ConditionD> D;
  if (table) {
    D = condition_D(zd, q, *table, tol);
    json j = {{"step", "condition_D"}, {"holds", D->holds}, {"regime", regime_name(table->regime)}};
    if (!D->holds) j["witness"] = {{"monomial", D->witness}, {"ray", D->ray}, {"modulus", D->modulus}};
    chain.push_back(j);
  }

  const Family fam = out.tag.family;
  if (fam == Family::NotInSpectrum) {
    if (D && !D->holds) {
      r.witness = "condition (D): C_{" + std::to_string(D->witness[0]) + std::to_string(D->witness[1]) +
                  std::to_string(D->witness[2]) + "} nonzero with modulus " + std::to_string(D->modulus) +
                  " along " + D->ray;
      r.evidence["failed_condition"] = "D";
    } else if (table) {
      const VerificationReport b = condition_B_check(z, q, 60, 0.1);
      chain.push_back({{"step", "condition_B"}, {"report", b.to_json()}});
      if (b.status == Status::Fail) {
        r.witness = "condition (B): " + b.witness;
        r.evidence["failed_condition"] = "B";
      } else {
        r.fail("no failing condition found for a point outside every family");
      }
    } else {
      r.flag("root of multiplicity >= 3 outside every family");
    }
    return;
  }

  if (D && !D->holds) {
    r.fail("condition (D) fails inside " + std::string(family_name(fam)));
    return;
  }
  if (fam == Family::Trivial) {
    // the eigenfunction is a character of the color, hence of finite norm
    const double v30 = weight_to_double(total_volume(30, q)), v29 = weight_to_double(total_volume(29, q));
    chain.push_back({{"step", "isolated"}, {"norm_squared", v30}, {"last_increment", v30 - v29}});
    return;
  }
  if (!table) {
    r.flag("no closed-form eigenfunction for this multiplicity");
    return;
  }
  const VerificationReport w = weyl_ratio(z, q, 0.1);
  chain.push_back({{"step", "weyl_ratio"}, {"report", w.to_json()}});
  if (w.status == Status::Fail) r.fail("weyl ratio " + w.witness);
  else if (w.status == Status::Flagged) r.flag(w.witness);
}

Decision finish(Decision out, json chain) {
  VerificationReport& r = out.report;
  r.evidence["chain"] = chain;
  r.evidence["family"] = family_name(out.tag.family);
  r.evidence["params"] = out.tag.params;
  r.evidence["degenerate"] = out.tag.degenerate;
  r.evidence["in_building_spectrum"] = out.in_building_spectrum;
  return out;
}

}  // namespace

Decision spectrum_decision(const EigTriple& lam, int q, double tol) {
  Decision out;
  out.report.check = "spectrum_decision";
  out.report.anchor = "(A) => (B) => (C) => (D) => (A) decision chain";
  out.report.inputs["lambda"] = json::array({to_json(lam.l1), to_json(lam.l2), to_json(lam.l3)});
  out.report.inputs["q"] = q;
  const RootSolve rs = z_from_eig(lam, q);
  json chain = json::array();
  chain.push_back({{"step", "z_from_eig"},
                   {"z", to_json(rs.z)},
                   {"multiplicities", rs.multiplicities},
                   {"ill_conditioned", rs.ill_conditioned}});
  const double t = rs.ill_conditioned ? std::max(tol, 1e-6) : tol;
  decide(out, widen(rs.z), q, t, chain);
  return finish(out, chain);
}

Decision spectrum_decision(const XTuple& z, int q, double tol) {
  Decision out;
  out.report.check = "spectrum_decision";
  out.report.anchor = "(A) => (B) => (C) => (D) => (A) decision chain";
  out.report.inputs["z"] = to_json(narrow(z));
  out.report.inputs["q"] = q;
  json chain = json::array();
  decide(out, z, q, tol, chain);
  return finish(out, chain);
}

// ---- weak Ramanujan sweep

json partition_table(int q) {
  const double Q = q, s = std::sqrt(Q);
  auto row = [](const char* fam, std::array<double, 4> m, const char* part) {
    return json{{"family", fam}, {"moduli", m}, {"partition", part}};
  };
  return json::array({row("Trivial", {Q * s, s, 1 / s, 1 / (Q * s)}, "4"),
                      row("Family2", {Q, 1, 1, 1 / Q}, "3+1"),
                      row("Family3", {s, s, 1 / s, 1 / s}, "2+2"),
                      row("Family4", {s, 1, 1, 1 / s}, "2+1+1"),
                      row("Tempered", {1, 1, 1, 1}, "1+1+1+1")});
}

std::vector<FamilyTag> family_grid(Family f, int count) {
  if (count < 1) throw std::invalid_argument("grid needs at least one point");
  constexpr double tau = 2 * std::numbers::pi;
  // irrational offsets keep grid points away from repeated roots
  constexpr double p1 = 0.3819660112501051, p2 = 0.2360679774997897, p3 = 0.1458980337503155;
  std::vector<FamilyTag> out;
  auto push = [&](std::vector<double> params) { out.push_back({f, std::move(params), false}); };
  switch (f) {
    case Family::Trivial:
      for (int k = 0; k < 4; ++k) push({double(k)});
      break;
    case Family::Family2:
      for (int k = 0; k < count; ++k) push({tau * (k + p1) / count});
      break;
    case Family::Family3: {
      const int n = std::max(1, count / 2);
      for (double sign : {1.0, -1.0})
        for (int k = 0; k < n; ++k) push({tau * (k + p1) / n, sign});
      break;
    }
    case Family::Family4: {
      const int a = std::max(1, static_cast<int>(std::lround(std::sqrt(count))));
      const int b = std::max(1, count / a);
      for (int j = 0; j < a; ++j)
        for (int k = 0; k < b; ++k) push({tau * (j + p1) / a, tau * (k + p2) / b});
      break;
    }
    case Family::Tempered: {
      const int a = std::max(1, static_cast<int>(std::lround(std::cbrt(count))));
      const int b = std::max(1, static_cast<int>(std::lround(std::sqrt(double(count) / a))));
      const int c = std::max(1, count / (a * b));
      for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j)
          for (int k = 0; k < c; ++k) push({tau * (i + p1) / a, tau * (j + p2) / b, tau * (k + p3) / c});
      break;
    }
    case Family::NotInSpectrum: throw std::invalid_argument("NotInSpectrum has no grid");
  }
  return out;
}

VerificationReport weakly_ramanujan_report(int q, int grid, double eps) {
  VerificationReport r;
  r.check = "weakly_ramanujan";
  r.anchor = "non-trivial discrete simultaneous spectrum lies in the tempered set";
  r.inputs = {{"q", q}, {"grid", grid}, {"eps", eps}};
  r.bound = eps / (1 - eps) * (double(q) * q * q * q + double(q) * q * q + 2.0 * q * q + q + 1) * (1 + 1e-3);

  json fams = json::object();
  bool all_members = true, tempered_only = true, none_isolated = true;
  double worst_ratio = 0;
  for (Family f : {Family::Trivial, Family::Family2, Family::Family3, Family::Family4, Family::Tempered}) {
    const auto tags = family_grid(f, grid);
    std::vector<bool> member(tags.size());
    int n_member = 0, n_building = 0, n_flag = 0;
    std::string first_bad;
    for (std::size_t k = 0; k < tags.size(); ++k) {
      const XTuple z = sample_family_ext(tags[k], q);
      const ZTuple zd = narrow(z);
      const bool ibs = in_building_spectrum(eig_from_z(z, q), q);
      n_building += ibs;
      if (ibs != (f == Family::Tempered)) {
        tempered_only = false;
        if (first_bad.empty()) first_bad = "building spectrum mismatch at point " + std::to_string(k);
      }
      if (f == Family::Trivial) {
        member[k] = true;
        continue;
      }
      const CoefficientTable t = coefficients(z, q);
      const bool d = condition_D(zd, q, t).holds;
      const VerificationReport w = weyl_ratio(z, q, eps);
      worst_ratio = std::max(worst_ratio, w.max_residual);
      n_flag += w.status == Status::Flagged;
      member[k] = d && w.status == Status::Pass;
      n_member += member[k];
      if (!member[k]) {
        all_members = false;
        if (first_bad.empty())
          first_bad = "point " + std::to_string(k) + (d ? " weyl " + w.witness : " condition (D)");
      }
    }
    int isolated = 0;
    if (f != Family::Trivial && f != Family::Tempered)
      for (std::size_t k = 0; k < tags.size(); ++k) {
        if (!member[k]) continue;
        const bool left = k > 0 && member[k - 1], right = k + 1 < tags.size() && member[k + 1];
        if (!left && !right) ++isolated;
      }
    if (isolated) none_isolated = false;
    fams[family_name(f)] = {{"points", tags.size()},      {"members", n_member},  {"in_building_spectrum", n_building},
                            {"weyl_flagged", n_flag},      {"isolated", isolated}, {"first_problem", first_bad}};
    if (!first_bad.empty() && r.witness.empty()) r.witness = std::string(family_name(f)) + ": " + first_bad;
  }
  r.max_residual = worst_ratio;
  r.evidence["families"] = fams;
  r.evidence["assertions"] = {{"members_pass", all_members},
                              {"only_tempered_in_building_spectrum", tempered_only},
                              {"no_isolated_points", none_isolated}};
  r.evidence["partition_table"] = partition_table(q);
  if (!(all_members && tempered_only && none_isolated)) r.fail(r.witness);
  return r;
}

}  // namespace bt4
