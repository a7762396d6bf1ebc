#pragma once

#include <array>
#include <complex>

namespace bt4 {

using cplx = std::complex<double>;
using ZTuple = std::array<cplx, 4>;

struct EigTriple {
  cplx l1, l2, l3;
};

// default thresholds shared by the spectral and eigenfunction modules
inline constexpr double kDefaultTol = 1e-8;
inline constexpr double kRepeatDelta = 1e-6;
// separation the closed forms accept when called directly; dispatch uses kRepeatDelta
inline constexpr double kSeparationFloor = 1e-9;
inline constexpr int kMaxEll = 200;

}  // namespace bt4
