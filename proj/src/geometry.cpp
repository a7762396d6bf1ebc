#include "bt4/geometry.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace bt4 {

VertexId::VertexId(int l, int mm, int nn) : ell(l), m(mm), n(nn) {
  if (!(l >= mm && mm >= nn && nn >= 0))
    throw std::invalid_argument("not an orbit representative: (" + std::to_string(l) + "," +
                                std::to_string(mm) + "," + std::to_string(nn) + ")");
}

std::string VertexId::str() const {
  return "(" + std::to_string(ell) + "," + std::to_string(m) + "," + std::to_string(n) + ")";
}

const char* class_name(VertexClass c) {
  switch (c) {
    case VertexClass::Origin: return "Origin";
    case VertexClass::RayL00: return "RayL00";
    case VertexClass::FaceLL0: return "FaceLL0";
    case VertexClass::RayLLL: return "RayLLL";
    case VertexClass::FaceLM0: return "FaceLM0";
    case VertexClass::FaceLMM: return "FaceLMM";
    case VertexClass::FaceLLM: return "FaceLLM";
    case VertexClass::Interior: return "Interior";
  }
  return "?";
}

VertexClass classify(const VertexId& v) {
  const int l = v.ell, m = v.m, n = v.n;
  if (l == 0) return VertexClass::Origin;
  if (m == 0) return VertexClass::RayL00;
  if (n == 0) return l == m ? VertexClass::FaceLL0 : VertexClass::FaceLM0;
  if (l == m && m == n) return VertexClass::RayLLL;
  if (l == m) return VertexClass::FaceLLM;
  if (m == n) return VertexClass::FaceLMM;
  return VertexClass::Interior;
}

int color(const VertexId& v) { return (v.ell + v.m + v.n) % 4; }

VertexId normalize(int a, int b, int c, int d) {
  std::array<int, 4> e{a, b, c, d};
  std::sort(e.begin(), e.end(), std::greater<>());
  return VertexId(e[0] - e[3], e[1] - e[3], e[2] - e[3]);
}

namespace {

using Row = std::vector<std::array<int, 3>>;

Row table_row(const VertexId& v, int i) {
  const int l = v.ell, m = v.m, n = v.n;
  switch (classify(v)) {
    case VertexClass::Origin:
      if (i == 1) return {{1, 0, 0}};
      if (i == 2) return {{1, 1, 0}};
      return {{1, 1, 1}};
    case VertexClass::RayL00:
      if (i == 1) return {{l, 1, 0}, {l + 1, 0, 0}};
      if (i == 2) return {{l, 1, 1}, {l + 1, 1, 0}};
      return {{l - 1, 0, 0}, {l + 1, 1, 1}};
    case VertexClass::FaceLL0:
      if (i == 1) return {{l, l, 1}, {l + 1, l, 0}};
      if (i == 2) return {{l - 1, l - 1, 0}, {l + 1, l + 1, 0}, {l + 1, l, 1}};
      return {{l, l - 1, 0}, {l + 1, l + 1, 1}};
    case VertexClass::RayLLL:
      if (i == 1) return {{l - 1, l - 1, l - 1}, {l + 1, l, l}};
      if (i == 2) return {{l, l - 1, l - 1}, {l + 1, l + 1, l}};
      return {{l, l, l - 1}, {l + 1, l + 1, l + 1}};
    case VertexClass::FaceLM0:
      if (i == 1) return {{l, m, 1}, {l, m + 1, 0}, {l + 1, m, 0}};
      if (i == 2) return {{l - 1, m - 1, 0}, {l, m + 1, 1}, {l + 1, m, 1}, {l + 1, m + 1, 0}};
      return {{l - 1, m, 0}, {l, m - 1, 0}, {l + 1, m + 1, 1}};
    case VertexClass::FaceLMM:
      if (i == 1) return {{l - 1, m - 1, m - 1}, {l, m + 1, m}, {l + 1, m, m}};
      if (i == 2) return {{l - 1, m, m - 1}, {l, m - 1, m - 1}, {l, m + 1, m + 1}, {l + 1, m + 1, m}};
      return {{l - 1, m, m}, {l, m, m - 1}, {l + 1, m + 1, m + 1}};
    case VertexClass::FaceLLM:
      if (i == 1) return {{l - 1, l - 1, n - 1}, {l, l, n + 1}, {l + 1, l, n}};
      if (i == 2) return {{l - 1, l - 1, n}, {l, l - 1, n - 1}, {l + 1, l, n + 1}, {l + 1, l + 1, n}};
      return {{l, l - 1, n}, {l, l, n - 1}, {l + 1, l + 1, n + 1}};
    case VertexClass::Interior:
      if (i == 1) return {{l - 1, m - 1, n - 1}, {l, m, n + 1}, {l, m + 1, n}, {l + 1, m, n}};
      if (i == 2)
        return {{l - 1, m - 1, n}, {l - 1, m, n - 1}, {l, m - 1, n - 1},
                {l, m + 1, n + 1}, {l + 1, m, n + 1}, {l + 1, m + 1, n}};
      return {{l - 1, m, n}, {l, m - 1, n}, {l, m, n - 1}, {l + 1, m + 1, n + 1}};
  }
  return {};
}

}  // namespace

std::vector<VertexId> neighbors(const VertexId& v, int i) {
  if (i < 1 || i > 3) throw std::invalid_argument("color step must be 1, 2 or 3");
  std::vector<VertexId> out;
  for (const auto& t : table_row(v, i)) out.push_back(normalize(t[0], t[1], t[2]));
  return out;
}

std::size_t ball_size(int L) {
  if (L < 0) return 0;
  const std::size_t l = static_cast<std::size_t>(L);
  return (l + 1) * (l + 2) * (l + 3) / 6;
}

std::size_t ball_index(const VertexId& v) {
  const std::size_t l = v.ell, m = v.m;
  return l * (l + 1) * (l + 2) / 6 + m * (m + 1) / 2 + static_cast<std::size_t>(v.n);
}

std::vector<VertexId> enumerate_ball(int L) {
  std::vector<VertexId> out;
  out.reserve(ball_size(L));
  for (int l = 0; l <= L; ++l)
    for (int m = 0; m <= l; ++m)
      for (int n = 0; n <= m; ++n) out.emplace_back(l, m, n);
  return out;
}

std::vector<VertexId> interior(int L) {
  if (L < 1) throw std::invalid_argument("interior needs L >= 1");
  return enumerate_ball(L - 1);
}

}  // namespace bt4
