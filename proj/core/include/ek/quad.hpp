#pragma once

#include <string>

#include "ek/ball.hpp"
#include "ek/intutil.hpp"

namespace ek {

// Real or imaginary quadratic field Q(sqrt(d)), d squarefree, d not in {0,1}.
// ring_shift records whether the maximal order is Z[(1+sqrt(d))/2].
struct QuadField {
  long d;
  bool ring_shift;  // d = 1 mod 4

  explicit QuadField(long d_);
  bool operator==(const QuadField& o) const { return d == o.d; }
};

// Element a + b*sqrt(d) with rational coordinates in the {1, sqrt(d)} basis.
// Half-integer coordinates are legal; integrality is decided through the
// trace/norm criterion, not through the coordinates.
class QuadElem {
public:
  QuadElem(long d, Rat a, Rat b);
  static QuadElem from_rational(long d, const Rat& a) { return QuadElem(d, a, Rat(0)); }

  long d() const { return d_; }
  const Rat& a() const { return a_; }
  const Rat& b() const { return b_; }

  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }

  QuadElem conj() const { return QuadElem(d_, a_, -b_); }
  Rat trace() const { return 2 * a_; }
  Rat norm() const { return a_ * a_ - d_ * b_ * b_; }
  bool is_algebraic_integer() const;

  QuadElem operator+(const QuadElem& o) const;
  QuadElem operator-(const QuadElem& o) const;
  QuadElem operator*(const QuadElem& o) const;
  QuadElem operator/(const QuadElem& o) const;
  QuadElem operator-() const { return QuadElem(d_, -a_, -b_); }
  QuadElem inverse() const;
  QuadElem pow(long long e) const;
  QuadElem scale(const Rat& c) const { return QuadElem(d_, c * a_, c * b_); }

  bool operator==(const QuadElem& o) const;

  // Exact sign under the real embedding sqrt(d) -> positive root (d > 0),
  // or of the rational value when b = 0.
  int sign_real() const;
  bool less_real(const QuadElem& o) const { return (*this - o).sign_real() < 0; }

  // Real embedding as an adaptive real (d > 0, or rational element).
  AdaptiveReal to_real() const;
  // Complex embedding pieces for d < 0: value = re + i*im, im = b*sqrt(|d|).
  AdaptiveReal complex_re() const;
  AdaptiveReal complex_im() const;

  std::string str() const;

private:
  void check_same_field(const QuadElem& o) const;

  long d_;
  Rat a_, b_;
};

struct TraceNormConj {
  Rat trace;
  Rat norm;
  QuadElem conj;
};

TraceNormConj quad_trace_norm(const QuadElem& x);

}  // namespace ek
