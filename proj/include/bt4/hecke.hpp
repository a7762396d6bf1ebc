#pragma once

#include <gmpxx.h>

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "bt4/geometry.hpp"

namespace bt4 {

using cplx = std::complex<double>;

struct StencilTerm {
  VertexId u;
  std::int64_t coeff = 0;
};

struct Stencil {
  VertexId center;
  int step = 1;
  std::array<StencilTerm, 6> terms{};
  std::size_t size = 0;

  const StencilTerm* begin() const { return terms.data(); }
  const StencilTerm* end() const { return terms.data() + size; }
};

Stencil stencil(const VertexId& v, int i, int q);
std::int64_t row_sum(const VertexId& v, int i, int q);
std::int64_t expected_row_sum(int i, int q);

class BallFunction {
 public:
  BallFunction() = default;
  explicit BallFunction(int L, cplx fill = 0.0);

  int radius() const { return L_; }
  std::size_t size() const { return vals_.size(); }
  cplx& operator[](const VertexId& v) { return vals_[ball_index(v)]; }
  const cplx& operator[](const VertexId& v) const { return vals_[ball_index(v)]; }
  cplx& at(std::size_t k) { return vals_[k]; }
  const cplx& at(std::size_t k) const { return vals_[k]; }
  const std::vector<cplx>& values() const { return vals_; }

 private:
  int L_ = 0;
  std::vector<cplx> vals_;
};

// (A_{w,i} f)(v) for v in interior(L); result has radius L-1
BallFunction apply(const BallFunction& f, int i, int q);

// weights as doubles for ball(L), index-aligned with enumerate_ball
std::vector<double> weight_table(int L, int q);

cplx inner_product(const BallFunction& f, const BallFunction& g, int q);
double norm(const BallFunction& f, int q);

// |<A_i f, g> - <f, A_{4-i} g>| over interior(L); f, g must vanish outside ball(L-2)
double adjoint_defect(const BallFunction& f, const BallFunction& g, int i, int q);

// w(v) * c_i(v -> u): the edge weight read from v's side
mpq_class edge_weight(const VertexId& v, const StencilTerm& t, int q);

// coordinate-format export of A_{w,i} restricted to interior(L) x ball(L)
void export_operator(std::ostream& os, int L, int i, int q);

}  // namespace bt4
