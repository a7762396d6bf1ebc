#include "bt4/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bt4 {

namespace {

class Parser {
 public:
  Parser(const std::string& s, int q) : q_(q) {
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) s_ += c;
  }

  cplx run() {
    if (s_.empty()) bad("empty");
    const std::size_t e = s_.find("e^{");
    const bool is_polar = e != std::string::npos && (s_.compare(e + 3, 1, "i") == 0 || s_.compare(e + 3, 2, "-i") == 0);
    cplx v;
    if (is_polar) v = polar(e);
    else if (s_.find('q') != std::string::npos) v = modulus(s_.size());
    else v = cartesian();
    if (pos_ != s_.size()) bad("trailing characters");
    return v;
  }

 private:
  std::string s_;
  std::size_t pos_ = 0;
  int q_;

  [[noreturn]] void bad(const char* why) const {
    throw std::invalid_argument("malformed complex number '" + s_ + "': " + why);
  }
  bool eat(const std::string& t) {
    if (s_.compare(pos_, t.size(), t) != 0) return false;
    pos_ += t.size();
    return true;
  }
  bool at_number() const {
    return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
  }
  double number() {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s_.substr(pos_), &used);
    } catch (const std::exception&) {
      bad("expected a number");
    }
    pos_ += used;
    return v;
  }
  double signed_number() {
    double sign = 1;
    if (eat("-")) sign = -1;
    else eat("+");
    return sign * number();
  }

  double factor() {
    const double Q = q_;
    if (eat("sqrt(q)")) return std::sqrt(Q);
    if (eat("q")) {
      if (!eat("^")) return Q;
      if (eat("{")) {
        const double x = signed_number();
        if (!eat("}")) bad("missing }");
        return std::pow(Q, x);
      }
      return std::pow(Q, signed_number());
    }
    if (at_number()) return number();
    bad("expected a modulus factor");
  }

  // modulus before e^{i t}; empty means 1
  double modulus(std::size_t end) {
    double sign = 1;
    if (eat("-")) sign = -1;
    else eat("+");
    if (pos_ == end) return sign;
    double v = factor();
    while (pos_ < end) {
      if (eat("*")) v *= factor();
      else if (eat("/")) v /= factor();
      else v *= factor();
    }
    return sign * v;
  }

  cplx polar(std::size_t e) {
    const double r = modulus(e);
    if (pos_ != e) bad("bad modulus");
    eat("e^{");
    const double dir = eat("-") ? -1.0 : 1.0;
    eat("i");
    eat("*");
    const double t = dir * signed_number();
    if (!eat("}")) bad("missing }");
    return std::polar(1.0, t) * r;
  }

  cplx cartesian() {
    if (s_.back() != 'i') return {signed_number(), 0.0};
    // imaginary unit present: split at the last sign that is not part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t k = s_.size() - 1; k > 0; --k)
      if ((s_[k] == '+' || s_[k] == '-') && s_[k - 1] != 'e' && s_[k - 1] != 'E') {
        split = k;
        break;
      }
    double re = 0;
    if (split != std::string::npos) {
      re = signed_number();
      if (pos_ != split) bad("bad real part");
    }
    double sign = 1;
    if (eat("-")) sign = -1;
    else eat("+");
    double im = 1;
    if (s_[pos_] != 'i') im = number();
    if (!eat("i")) bad("expected i");
    return {re, sign * im};
  }
};

}  // namespace

cplx parse_complex(const std::string& text, int q) { return Parser(text, q).run(); }

Family parse_family(const std::string& name) {
  for (Family f : {Family::Trivial, Family::Family2, Family::Family3, Family::Family4, Family::Tempered,
                   Family::NotInSpectrum})
    if (name == family_name(f)) return f;
  throw std::invalid_argument("unknown family '" + name + "'");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace bt4
