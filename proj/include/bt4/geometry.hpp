#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bt4 {

struct VertexId {
  int ell = 0, m = 0, n = 0;

  VertexId() = default;
  VertexId(int l, int mm, int nn);

  auto operator<=>(const VertexId&) const = default;
  bool operator==(const VertexId&) const = default;

  // 3l + m - n, the exponent of sqrt(q) carried by eigenfunctions
  int shift() const { return 3 * ell + m - n; }
  std::string str() const;
};

enum class VertexClass { Origin, RayL00, FaceLL0, RayLLL, FaceLM0, FaceLMM, FaceLLM, Interior };

const char* class_name(VertexClass c);
VertexClass classify(const VertexId& v);
int color(const VertexId& v);

// (a,b,c,d) exponents of a diagonal lattice -> orbit representative
VertexId normalize(int a, int b, int c, int d = 0);

// Table 1 rows; i in {1,2,3}
std::vector<VertexId> neighbors(const VertexId& v, int i);

std::size_t ball_size(int L);
// position of v in the lexicographic enumeration of any ball containing it
std::size_t ball_index(const VertexId& v);
std::vector<VertexId> enumerate_ball(int L);
std::vector<VertexId> interior(int L);

}  // namespace bt4
