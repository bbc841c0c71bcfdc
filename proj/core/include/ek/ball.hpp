#pragma once

#include <mpfr.h>

#include <functional>
#include <memory>
#include <string>

#include "ek/intutil.hpp"

namespace ek {

using Prec = mpfr_prec_t;

// Hard cap (in bits) for adaptive-precision escalation. Defaults to 2^16,
// overridable with the EKWIT_PREC_CAP environment variable or set_prec_cap().
Prec prec_cap();
void set_prec_cap(Prec cap);

// Closed dyadic interval [lo, hi] with directed-rounding endpoints. Every
// operation returns an interval containing the exact image of its inputs,
// so a value tracked through any expression stays enclosed. Exposed to
// callers as a midpoint-radius ball.
class RealBall {
public:
  RealBall();  // exact zero
  RealBall(const RealBall& o);
  RealBall(RealBall&& o) noexcept;
  RealBall& operator=(const RealBall& o);
  RealBall& operator=(RealBall&& o) noexcept;
  ~RealBall();

  static RealBall exact_int(const Int& v, Prec prec);
  static RealBall from_rat(const Rat& v, Prec prec);
  static RealBall from_endpoints(const Rat& lo, const Rat& hi, Prec prec);
  static RealBall pi(Prec prec);

  Prec prec() const { return prec_; }
  bool exact() const;  // radius 0

  Rat lo_rat() const;
  Rat hi_rat() const;
  Rat mid_rat() const;
  Rat rad_rat() const;
  double approx() const;  // midpoint as double, for display only

  int sign_lo() const;  // mpfr sign of the lower endpoint
  int sign_hi() const;
  bool contains_zero() const;
  bool is_positive() const { return sign_lo() > 0; }
  bool is_negative() const { return sign_hi() < 0; }
  bool is_exact_zero() const;

  // Certified order: true only when provable from the endpoints.
  bool certainly_lt(const RealBall& o) const;
  bool certainly_le(const RealBall& o) const;
  bool certainly_le_rat(const Rat& bound) const;
  bool certainly_gt_rat(const Rat& bound) const;

  // Decimal endpoint strings with outward rounding, e.g. "1.4142135623e+00".
  std::string dec_lo(int digits) const;
  std::string dec_hi(int digits) const;

  RealBall neg() const;
  RealBall abs() const;
  RealBall sqrt() const;  // throws DomainError if lo < 0
  RealBall log() const;   // throws DomainError unless lo > 0
  RealBall exp() const;
  RealBall pow_si(long n) const;
  RealBall mul_2si(long e) const;
  RealBall add_rat(const Rat& q) const;
  RealBall mul_int(const Int& z) const;

  friend RealBall operator+(const RealBall& a, const RealBall& b);
  friend RealBall operator-(const RealBall& a, const RealBall& b);
  friend RealBall operator*(const RealBall& a, const RealBall& b);
  friend RealBall operator/(const RealBall& a, const RealBall& b);

  // Enclosure of atan2 over the box (y, x). Throws DomainError when the box
  // meets the branch cut ambiguity (both straddle the relevant axes).
  static RealBall atan2(const RealBall& y, const RealBall& x);

  // Interval max/min (monotone, hence endpoint-wise).
  RealBall max_with(const RealBall& o) const;
  RealBall min_with(const RealBall& o) const;

  // floor(lo) / floor(hi) as integers; exponent must be sane.
  Int floor_lo() const;
  Int floor_hi() const;

private:
  explicit RealBall(Prec prec);
  void set_prec_clear(Prec prec);

  mpfr_t lo_;
  mpfr_t hi_;
  Prec prec_;
};

// A real number given as an evaluation procedure: for any working precision
// it produces an enclosing RealBall. Predicates escalate precision until they
// can certify an answer or hit the global cap.
class AdaptiveReal {
public:
  using Fn = std::function<RealBall(Prec)>;

  AdaptiveReal();  // exact zero
  explicit AdaptiveReal(Fn f);

  static AdaptiveReal from_rat(const Rat& q);
  static AdaptiveReal from_int(const Int& z);
  static AdaptiveReal from_interval(const Rat& lo, const Rat& hi);
  static AdaptiveReal sqrt_int(long d);  // sqrt of a nonnegative integer
  static AdaptiveReal pi();

  RealBall eval(Prec prec) const;

  // Evaluate, retrying at doubled precision while the enclosure is undefined
  // (e.g. division by a straddling interval). Throws PrecisionExhausted.
  RealBall eval_settled(Prec start) const;

  // Escalate until the radius is <= 2^abs_exp, or until the radius is
  // <= |value| * 2^-rel_bits. Throws PrecisionExhausted at the cap.
  RealBall refine(long rel_bits, long abs_exp) const;
  RealBall refine_abs(long abs_exp) const { return refine(-1, abs_exp); }

  // Certified sign: +1/-1, or 0 only for a syntactically exact zero ball.
  int sign() const;
  int cmp(const AdaptiveReal& o) const { return (*this - o).sign(); }

  // Certified floor; throws PrecisionExhausted if the value sits on an
  // integer that interval refinement cannot separate.
  Int floor() const;

  // Nearest integer, deterministic. Half-integer ties (which certified
  // refinement cannot decide) resolve via the midpoint at a local cap; use
  // only as a guide when the final inequality is re-certified.
  Int round_guided() const;

  AdaptiveReal operator-() const;
  AdaptiveReal abs() const;
  AdaptiveReal sqrt() const;
  AdaptiveReal log() const;
  AdaptiveReal exp() const;
  AdaptiveReal pow_si(long n) const;
  AdaptiveReal add_rat(const Rat& q) const;
  AdaptiveReal mul_rat(const Rat& q) const;
  AdaptiveReal mul_int(const Int& z) const;

  friend AdaptiveReal operator+(const AdaptiveReal& a, const AdaptiveReal& b);
  friend AdaptiveReal operator-(const AdaptiveReal& a, const AdaptiveReal& b);
  friend AdaptiveReal operator*(const AdaptiveReal& a, const AdaptiveReal& b);
  friend AdaptiveReal operator/(const AdaptiveReal& a, const AdaptiveReal& b);

  static AdaptiveReal atan2(const AdaptiveReal& y, const AdaptiveReal& x);

private:
  std::shared_ptr<const Fn> fn_;
};

// Spec'd entry point: enclose x with radius <= target_radius.
RealBall real_embed(const AdaptiveReal& x, const Rat& target_radius);

// Certified value <= bound: true/false when refinement decides it,
// conservatively false at the precision cap.
bool certify_le(const AdaptiveReal& value, const Rat& bound);

}  // namespace ek
