#include "bt4/hecke.hpp"

#include "json.hpp"

#include <cmath>
#include <stdexcept>

#include "bt4/stabilizer.hpp"

namespace bt4 {

namespace {

struct Raw {
  int l, m, n;
  std::int64_t c;
};

}  // namespace

Stencil stencil(const VertexId& v, int i, int q) {
  if (i < 1 || i > 3) throw std::invalid_argument("color step must be 1, 2 or 3");
  if (q < 2 || q > 10000) throw std::invalid_argument("q out of range");
  const std::int64_t Q = q, Q2 = Q * Q, Q3 = Q2 * Q, Q4 = Q3 * Q;
  const int l = v.ell, m = v.m, n = v.n;
  std::vector<Raw> r;
  switch (classify(v)) {
    case VertexClass::Origin:
      if (i == 1) r = {{1, 0, 0, Q3 + Q2 + Q + 1}};
      else if (i == 2) r = {{1, 1, 0, Q4 + Q3 + 2 * Q2 + Q + 1}};
      else r = {{1, 1, 1, Q3 + Q2 + Q + 1}};
      break;
    case VertexClass::RayL00:
      if (i == 1) r = {{l, 1, 0, Q3 + Q2 + Q}, {l + 1, 0, 0, 1}};
      else if (i == 2) r = {{l, 1, 1, Q4 + Q3 + Q2}, {l + 1, 1, 0, Q2 + Q + 1}};
      else r = {{l - 1, 0, 0, Q3}, {l + 1, 1, 1, Q2 + Q + 1}};
      break;
    case VertexClass::FaceLL0:
      if (i == 1) r = {{l, l, 1, Q3 + Q2}, {l + 1, l, 0, Q + 1}};
      else if (i == 2)
        r = {{l - 1, l - 1, 0, Q4}, {l + 1, l + 1, 0, 1}, {l + 1, l, 1, Q * (Q + 1) * (Q + 1)}};
      else r = {{l, l - 1, 0, Q3 + Q2}, {l + 1, l + 1, 1, Q + 1}};
      break;
    case VertexClass::RayLLL:
      if (i == 1) r = {{l - 1, l - 1, l - 1, Q3}, {l + 1, l, l, Q2 + Q + 1}};
      else if (i == 2) r = {{l, l - 1, l - 1, Q4 + Q3 + Q2}, {l + 1, l + 1, l, Q2 + Q + 1}};
      else r = {{l, l, l - 1, Q3 + Q2 + Q}, {l + 1, l + 1, l + 1, 1}};
      break;
    case VertexClass::FaceLM0:
      if (i == 1) r = {{l, m, 1, Q3 + Q2}, {l, m + 1, 0, Q}, {l + 1, m, 0, 1}};
      else if (i == 2)
        r = {{l - 1, m - 1, 0, Q4}, {l, m + 1, 1, Q3 + Q2}, {l + 1, m, 1, Q2 + Q}, {l + 1, m + 1, 0, 1}};
      else r = {{l - 1, m, 0, Q3}, {l, m - 1, 0, Q2}, {l + 1, m + 1, 1, Q + 1}};
      break;
    case VertexClass::FaceLMM:
      if (i == 1) r = {{l - 1, m - 1, m - 1, Q3}, {l, m + 1, m, Q2 + Q}, {l + 1, m, m, 1}};
      else if (i == 2)
        r = {{l - 1, m, m - 1, Q4 + Q3}, {l, m - 1, m - 1, Q2}, {l, m + 1, m + 1, Q2}, {l + 1, m + 1, m, Q + 1}};
      else r = {{l - 1, m, m, Q3}, {l, m, m - 1, Q2 + Q}, {l + 1, m + 1, m + 1, 1}};
      break;
    case VertexClass::FaceLLM:
      if (i == 1) r = {{l - 1, l - 1, n - 1, Q3}, {l, l, n + 1, Q2}, {l + 1, l, n, Q + 1}};
      else if (i == 2)
        r = {{l - 1, l - 1, n, Q4}, {l, l - 1, n - 1, Q3 + Q2}, {l + 1, l, n + 1, Q2 + Q}, {l + 1, l + 1, n, 1}};
      else r = {{l, l - 1, n, Q3 + Q2}, {l, l, n - 1, Q}, {l + 1, l + 1, n + 1, 1}};
      break;
    case VertexClass::Interior:
      if (i == 1) r = {{l - 1, m - 1, n - 1, Q3}, {l, m, n + 1, Q2}, {l, m + 1, n, Q}, {l + 1, m, n, 1}};
      else if (i == 2)
        r = {{l - 1, m - 1, n, Q4}, {l - 1, m, n - 1, Q3}, {l, m - 1, n - 1, Q2},
             {l, m + 1, n + 1, Q2}, {l + 1, m, n + 1, Q}, {l + 1, m + 1, n, 1}};
      else r = {{l - 1, m, n, Q3}, {l, m - 1, n, Q2}, {l, m, n - 1, Q}, {l + 1, m + 1, n + 1, 1}};
      break;
  }
  Stencil s;
  s.center = v;
  s.step = i;
  for (const auto& t : r) s.terms[s.size++] = {VertexId(t.l, t.m, t.n), t.c};
  return s;
}

std::int64_t row_sum(const VertexId& v, int i, int q) {
  std::int64_t s = 0;
  for (const auto& t : stencil(v, i, q)) s += t.coeff;
  return s;
}

std::int64_t expected_row_sum(int i, int q) {
  const std::int64_t Q = q;
  if (i == 2) return Q * Q * Q * Q + Q * Q * Q + 2 * Q * Q + Q + 1;
  return Q * Q * Q + Q * Q + Q + 1;
}

BallFunction::BallFunction(int L, cplx fill) : L_(L), vals_(ball_size(L), fill) {
  if (L < 0) throw std::invalid_argument("negative radius");
}

BallFunction apply(const BallFunction& f, int i, int q) {
  if (f.radius() < 1) throw std::invalid_argument("apply needs radius >= 1");
  BallFunction g(f.radius() - 1);
  std::size_t k = 0;
  for (const auto& v : enumerate_ball(g.radius())) {
    cplx acc = 0.0;
    for (const auto& t : stencil(v, i, q)) acc += static_cast<double>(t.coeff) * f[t.u];
    g.at(k++) = acc;
  }
  return g;
}

std::vector<double> weight_table(int L, int q) {
  std::vector<double> w;
  w.reserve(ball_size(L));
  for (const auto& v : enumerate_ball(L)) w.push_back(weight_to_double(vertex_weight(v, q)));
  return w;
}

cplx inner_product(const BallFunction& f, const BallFunction& g, int q) {
  if (f.radius() != g.radius()) throw std::invalid_argument("domain mismatch");
  const auto w = weight_table(f.radius(), q);
  cplx s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += f.at(k) * std::conj(g.at(k)) * w[k];
  return s;
}

double norm(const BallFunction& f, int q) { return std::sqrt(inner_product(f, f, q).real()); }

namespace {

BallFunction restrict_to(const BallFunction& f, int L) {
  BallFunction g(L);
  for (std::size_t k = 0; k < g.size(); ++k) g.at(k) = f.at(k);
  return g;
}

void require_inner_support(const BallFunction& f) {
  const int L = f.radius();
  for (const auto& v : enumerate_ball(L))
    if (v.ell > L - 2 && f[v] != cplx(0.0))
      throw std::invalid_argument("support too close to truncation boundary at " + v.str());
}

}  // namespace

double adjoint_defect(const BallFunction& f, const BallFunction& g, int i, int q) {
  if (f.radius() != g.radius()) throw std::invalid_argument("domain mismatch");
  if (f.radius() < 2) throw std::invalid_argument("radius too small");
  require_inner_support(f);
  require_inner_support(g);
  const int L = f.radius();
  const cplx lhs = inner_product(apply(f, i, q), restrict_to(g, L - 1), q);
  const cplx rhs = inner_product(restrict_to(f, L - 1), apply(g, 4 - i, q), q);
  return std::abs(lhs - rhs);
}

mpq_class edge_weight(const VertexId& v, const StencilTerm& t, int q) {
  return vertex_weight(v, q) * mpq_class(static_cast<long>(t.coeff));
}

void export_operator(std::ostream& os, int L, int i, int q) {
  if (L < 1) throw std::invalid_argument("export needs L >= 1");
  nlohmann::json header;
  header["q"] = q;
  header["L"] = L;
  header["i"] = i;
  header["entry"] = "w(row) * coefficient(row -> col)";
  auto& map = header["vertex_index_map"] = nlohmann::json::array();
  for (const auto& v : enumerate_ball(L)) map.push_back({v.ell, v.m, v.n});
  os << "% " << header.dump() << "\n";
  for (const auto& v : interior(L))
    for (const auto& t : stencil(v, i, q)) {
      const mpq_class e = edge_weight(v, t, q);
      os << ball_index(v) << " " << ball_index(t.u) << " " << e.get_num().get_str() << " "
         << e.get_den().get_str() << "\n";
    }
}

}  // namespace bt4
