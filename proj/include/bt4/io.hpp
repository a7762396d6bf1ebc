#pragma once

#include <string>

#include "bt4/spectral.hpp"

namespace bt4 {

// Accepted forms: "a", "a+bi", "a-bi", "bi", "i", and polar "r e^{i t}" (or e^{-i t}) where
// r is a product or quotient of numbers, q, sqrt(q) and q^x (q^{x}); such an r may also
// stand alone as a real number. Whitespace is ignored.
cplx parse_complex(const std::string& text, int q);

Family parse_family(const std::string& name);

// full precision for plotting round trips
std::string fmt(double x);

}  // namespace bt4
