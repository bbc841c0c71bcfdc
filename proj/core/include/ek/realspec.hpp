#pragma once

#include <string>

#include "ek/quad.hpp"

namespace ek {

// Real input grammar:
//   rat:<n>[/<d>]
//   quad:d=<d>,a=<rat>,b=<rat>,sign=<+|->
//   dec:<digits>~<err>
// The quad variant with sign + maps sqrt(d) onto the positive real root;
// dec values are certified enclosures, with no irrationality assumption.
struct RealSpec {
  enum class Kind { Rational, Quad, Decimal };

  Kind kind = Kind::Rational;
  Rat rat;                     // Rational
  long d = 0;                  // Quad
  Rat qa, qb;                  // Quad coordinates
  int embed_sign = 1;          // Quad
  Rat dec_lo, dec_hi;          // Decimal interval

  static RealSpec parse(const std::string& s);
  static RealSpec rational(const Rat& q);
  static RealSpec quad(long d, const Rat& a, const Rat& b, int sign);

  bool exact() const { return kind != Kind::Decimal; }
  // Quad variant as a field element with the sign folded into b.
  QuadElem to_elem() const;
  AdaptiveReal to_real() const;
  std::string str() const;
};

// p-adic input grammar:
//   rat:<n>[/<d>]
//   quad:d=<d>,a=<rat>,b=<rat>,branch=<s>
// The quad variant names the image of a + b*sqrt(d) in Q_p under the
// embedding fixed by sqrt(d) = s (mod p).
struct PadicSpec {
  enum class Kind { Rational, Quad };

  Kind kind = Kind::Rational;
  Rat rat;
  long d = 0;
  Rat qa, qb;
  Int branch;

  static PadicSpec parse(const std::string& s);
  static PadicSpec rational(const Rat& q);
  static PadicSpec quad(long d, const Rat& a, const Rat& b, const Int& branch);

  QuadElem to_elem() const;
  std::string str() const;
};

}  // namespace ek
