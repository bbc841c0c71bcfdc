#include "ek/ball.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <vector>

namespace ek {

namespace {

std::atomic<Prec> g_prec_cap{0};

Prec env_prec_cap() {
  const char* s = std::getenv("EKWIT_PREC_CAP");
  if (s != nullptr) {
    long v = std::atol(s);
    if (v >= 64) return static_cast<Prec>(v);
  }
  return static_cast<Prec>(1) << 16;
}

}  // namespace

Prec prec_cap() {
  Prec c = g_prec_cap.load(std::memory_order_relaxed);
  if (c == 0) {
    c = env_prec_cap();
    g_prec_cap.store(c, std::memory_order_relaxed);
  }
  return c;
}

void set_prec_cap(Prec cap) { g_prec_cap.store(cap < 64 ? 64 : cap, std::memory_order_relaxed); }

RealBall::RealBall(Prec prec) : prec_(prec < MPFR_PREC_MIN ? MPFR_PREC_MIN : prec) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
}

RealBall::RealBall() : RealBall(static_cast<Prec>(64)) {
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

RealBall::RealBall(const RealBall& o) : RealBall(o.prec_) {
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

RealBall::RealBall(RealBall&& o) noexcept : prec_(o.prec_) {
  mpfr_init2(lo_, MPFR_PREC_MIN);
  mpfr_init2(hi_, MPFR_PREC_MIN);
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

RealBall& RealBall::operator=(const RealBall& o) {
  if (this != &o) {
    set_prec_clear(o.prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}

RealBall& RealBall::operator=(RealBall&& o) noexcept {
  if (this != &o) {
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    prec_ = o.prec_;
  }
  return *this;
}

RealBall::~RealBall() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

void RealBall::set_prec_clear(Prec prec) {
  prec_ = prec < MPFR_PREC_MIN ? MPFR_PREC_MIN : prec;
  mpfr_set_prec(lo_, prec_);
  mpfr_set_prec(hi_, prec_);
}

RealBall RealBall::exact_int(const Int& v, Prec prec) {
  size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
  Prec p = prec;
  if (static_cast<size_t>(p) < bits + 2) p = static_cast<Prec>(bits + 2);
  RealBall r(p);
  mpfr_set_z(r.lo_, v.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_, v.get_mpz_t(), MPFR_RNDU);
  return r;
}

RealBall RealBall::from_rat(const Rat& v, Prec prec) {
  RealBall r(prec);
  mpfr_set_q(r.lo_, v.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, v.get_mpq_t(), MPFR_RNDU);
  return r;
}

RealBall RealBall::from_endpoints(const Rat& lo, const Rat& hi, Prec prec) {
  RealBall r(prec);
  mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
  return r;
}

RealBall RealBall::pi(Prec prec) {
  RealBall r(prec);
  mpfr_const_pi(r.lo_, MPFR_RNDD);
  mpfr_const_pi(r.hi_, MPFR_RNDU);
  return r;
}

bool RealBall::exact() const { return mpfr_equal_p(lo_, hi_) != 0; }

namespace {
Rat mpfr_to_rat(const mpfr_t x) {
  if (mpfr_zero_p(x)) return Rat(0);
  mpq_class q;
  mpfr_exp_t e;
  mpz_class m;
  e = mpfr_get_z_2exp(m.get_mpz_t(), x);
  q = m;
  if (e >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<unsigned long>(e));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<unsigned long>(-e));
  }
  return q;
}
}  // namespace

Rat RealBall::lo_rat() const { return mpfr_to_rat(lo_); }
Rat RealBall::hi_rat() const { return mpfr_to_rat(hi_); }
Rat RealBall::mid_rat() const { return (lo_rat() + hi_rat()) / 2; }
Rat RealBall::rad_rat() const { return (hi_rat() - lo_rat()) / 2; }

double RealBall::approx() const {
  double a = mpfr_get_d(lo_, MPFR_RNDN);
  double b = mpfr_get_d(hi_, MPFR_RNDN);
  return (a + b) / 2;
}

int RealBall::sign_lo() const { return mpfr_sgn(lo_); }
int RealBall::sign_hi() const { return mpfr_sgn(hi_); }
bool RealBall::contains_zero() const { return sign_lo() <= 0 && sign_hi() >= 0; }
bool RealBall::is_exact_zero() const { return mpfr_zero_p(lo_) && mpfr_zero_p(hi_); }

bool RealBall::certainly_lt(const RealBall& o) const { return mpfr_less_p(hi_, o.lo_) != 0; }
bool RealBall::certainly_le(const RealBall& o) const { return mpfr_lessequal_p(hi_, o.lo_) != 0; }

bool RealBall::certainly_le_rat(const Rat& bound) const {
  return mpfr_cmp_q(hi_, bound.get_mpq_t()) <= 0;
}

bool RealBall::certainly_gt_rat(const Rat& bound) const {
  return mpfr_cmp_q(lo_, bound.get_mpq_t()) > 0;
}

std::string RealBall::dec_lo(int digits) const {
  char buf[96];
  if (digits > 40) digits = 40;
  mpfr_snprintf(buf, sizeof buf, "%.*RDe", digits, lo_);
  return buf;
}

std::string RealBall::dec_hi(int digits) const {
  char buf[96];
  if (digits > 40) digits = 40;
  mpfr_snprintf(buf, sizeof buf, "%.*RUe", digits, hi_);
  return buf;
}

RealBall RealBall::neg() const {
  RealBall r(prec_);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

RealBall RealBall::abs() const {
  RealBall r(prec_);
  if (sign_lo() >= 0) return *this;
  if (sign_hi() <= 0) return neg();
  // straddles zero: [0, max(|lo|, hi)]
  mpfr_set_zero(r.lo_, 1);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  if (mpfr_less_p(r.hi_, hi_)) mpfr_set(r.hi_, hi_, MPFR_RNDU);
  return r;
}

RealBall RealBall::sqrt() const {
  if (sign_lo() < 0) throw DomainError("sqrt of interval with negative lower endpoint");
  RealBall r(prec_);
  mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

RealBall RealBall::log() const {
  if (sign_lo() <= 0) throw DomainError("log of interval not strictly positive");
  RealBall r(prec_);
  mpfr_log(r.lo_, lo_, MPFR_RNDD);
  mpfr_log(r.hi_, hi_, MPFR_RNDU);
  return r;
}

RealBall RealBall::exp() const {
  RealBall r(prec_);
  mpfr_exp(r.lo_, lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, hi_, MPFR_RNDU);
  return r;
}

RealBall RealBall::pow_si(long n) const {
  RealBall r(prec_);
  if (n == 0) {
    mpfr_set_si(r.lo_, 1, MPFR_RNDD);
    mpfr_set_si(r.hi_, 1, MPFR_RNDU);
    return r;
  }
  if (n < 0) {
    RealBall one = exact_int(1, prec_);
    return one / pow_si(-n);
  }
  bool even = (n % 2 == 0);
  if (!even || sign_lo() >= 0) {
    mpfr_pow_si(r.lo_, lo_, n, MPFR_RNDD);
    mpfr_pow_si(r.hi_, hi_, n, MPFR_RNDU);
    return r;
  }
  if (sign_hi() <= 0) {  // even power of a nonpositive interval: decreasing
    mpfr_pow_si(r.lo_, hi_, n, MPFR_RNDD);
    mpfr_pow_si(r.hi_, lo_, n, MPFR_RNDU);
    return r;
  }
  // even power straddling zero: [0, max(|lo|, hi)^n]
  mpfr_set_zero(r.lo_, 1);
  mpfr_t m;
  mpfr_init2(m, prec_);
  mpfr_neg(m, lo_, MPFR_RNDU);
  if (mpfr_less_p(m, hi_)) mpfr_set(m, hi_, MPFR_RNDU);
  mpfr_pow_si(r.hi_, m, n, MPFR_RNDU);
  mpfr_clear(m);
  return r;
}

RealBall RealBall::mul_2si(long e) const {
  RealBall r(prec_);
  mpfr_mul_2si(r.lo_, lo_, e, MPFR_RNDD);
  mpfr_mul_2si(r.hi_, hi_, e, MPFR_RNDU);
  return r;
}

RealBall RealBall::add_rat(const Rat& q) const {
  RealBall r(prec_);
  mpfr_t t;
  mpfr_init2(t, prec_);
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDD);
  mpfr_add(r.lo_, lo_, t, MPFR_RNDD);
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDU);
  mpfr_add(r.hi_, hi_, t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

RealBall RealBall::mul_int(const Int& z) const {
  RealBall r(prec_);
  int s = mpz_sgn(z.get_mpz_t());
  if (s == 0) return RealBall();
  if (s > 0) {
    mpfr_mul_z(r.lo_, lo_, z.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(r.hi_, hi_, z.get_mpz_t(), MPFR_RNDU);
  } else {
    mpfr_mul_z(r.lo_, hi_, z.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(r.hi_, lo_, z.get_mpz_t(), MPFR_RNDU);
  }
  return r;
}

RealBall operator+(const RealBall& a, const RealBall& b) {
  RealBall r(std::max(a.prec_, b.prec_));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

RealBall operator-(const RealBall& a, const RealBall& b) {
  RealBall r(std::max(a.prec_, b.prec_));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

RealBall operator*(const RealBall& a, const RealBall& b) {
  Prec p = std::max(a.prec_, b.prec_);
  RealBall r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  const mpfr_srcptr as[2] = {a.lo_, a.hi_};
  const mpfr_srcptr bs[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : as) {
    for (auto y : bs) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

RealBall operator/(const RealBall& a, const RealBall& b) {
  if (b.contains_zero()) throw DomainError("division by interval containing zero");
  Prec p = std::max(a.prec_, b.prec_);
  RealBall r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  const mpfr_srcptr as[2] = {a.lo_, a.hi_};
  const mpfr_srcptr bs[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : as) {
    for (auto y : bs) {
      mpfr_div(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_div(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return r;
}

RealBall RealBall::atan2(const RealBall& y, const RealBall& x) {
  Prec p = std::max(y.prec_, x.prec_);
  // Ambiguous when y straddles zero and x is not certainly positive
  // (the enclosure would have to wrap the branch cut).
  if (y.contains_zero() && x.sign_lo() <= 0)
    throw DomainError("atan2 box meets the branch cut");
  RealBall r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  const mpfr_srcptr ys[2] = {y.lo_, y.hi_};
  const mpfr_srcptr xs[2] = {x.lo_, x.hi_};
  bool first = true;
  for (auto yy : ys) {
    for (auto xx : xs) {
      mpfr_atan2(t, yy, xx, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_atan2(t, yy, xx, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  // If x straddles zero the extremum +-pi/2 sits inside the box edge.
  if (x.contains_zero()) {
    if (y.sign_lo() > 0) {
      mpfr_const_pi(t, MPFR_RNDU);
      mpfr_div_2ui(t, t, 1, MPFR_RNDU);
      if (mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
    } else if (y.sign_hi() < 0) {
      mpfr_const_pi(t, MPFR_RNDU);
      mpfr_div_2ui(t, t, 1, MPFR_RNDU);
      mpfr_neg(t, t, MPFR_RNDD);
      if (mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
    }
  }
  mpfr_clear(t);
  return r;
}

RealBall RealBall::max_with(const RealBall& o) const {
  RealBall r(std::max(prec_, o.prec_));
  mpfr_max(r.lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, hi_, o.hi_, MPFR_RNDU);
  return r;
}

RealBall RealBall::min_with(const RealBall& o) const {
  RealBall r(std::max(prec_, o.prec_));
  mpfr_min(r.lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_min(r.hi_, hi_, o.hi_, MPFR_RNDU);
  return r;
}

Int RealBall::floor_lo() const {
  Int z;
  mpfr_t t;
  mpfr_init2(t, prec_);
  mpfr_floor(t, lo_);
  mpfr_get_z(z.get_mpz_t(), t, MPFR_RNDN);
  mpfr_clear(t);
  return z;
}

Int RealBall::floor_hi() const {
  Int z;
  mpfr_t t;
  mpfr_init2(t, prec_);
  mpfr_floor(t, hi_);
  mpfr_get_z(z.get_mpz_t(), t, MPFR_RNDN);
  mpfr_clear(t);
  return z;
}

// ---------------------------------------------------------------------------
// AdaptiveReal

AdaptiveReal::AdaptiveReal()
    : fn_(std::make_shared<const Fn>([](Prec) { return RealBall(); })) {}

AdaptiveReal::AdaptiveReal(Fn f) : fn_(std::make_shared<const Fn>(std::move(f))) {}

AdaptiveReal AdaptiveReal::from_rat(const Rat& q) {
  return AdaptiveReal([q](Prec p) { return RealBall::from_rat(q, p); });
}

AdaptiveReal AdaptiveReal::from_int(const Int& z) {
  return AdaptiveReal([z](Prec p) { return RealBall::exact_int(z, p); });
}

AdaptiveReal AdaptiveReal::from_interval(const Rat& lo, const Rat& hi) {
  return AdaptiveReal([lo, hi](Prec p) { return RealBall::from_endpoints(lo, hi, p); });
}

AdaptiveReal AdaptiveReal::sqrt_int(long d) {
  if (d < 0) throw DomainError("sqrt_int of negative integer");
  return AdaptiveReal([d](Prec p) { return RealBall::exact_int(Int(d), p).sqrt(); });
}

AdaptiveReal AdaptiveReal::pi() {
  return AdaptiveReal([](Prec p) { return RealBall::pi(p); });
}

RealBall AdaptiveReal::eval(Prec prec) const { return (*fn_)(prec); }

RealBall AdaptiveReal::eval_settled(Prec start) const {
  Prec cap = prec_cap();
  for (Prec p = start; p <= cap; p *= 2) {
    try {
      return eval(p);
    } catch (const DomainError&) {
      if (p * 2 > cap) break;
    }
  }
  throw PrecisionExhausted("enclosure undefined up to the precision cap");
}

RealBall AdaptiveReal::refine(long rel_bits, long abs_exp) const {
  Prec cap = prec_cap();
  for (Prec p = 64; p <= cap; p *= 2) {
    bool defined = true;
    RealBall b;
    try {
      b = eval(p);
    } catch (const DomainError&) {
      defined = false;
    }
    if (defined) {
      if (b.exact()) return b;
      Rat rad = b.rad_rat();
      Rat abs_bound;
      if (abs_exp >= 0) {
        abs_bound = Rat(pow_int(Int(2), static_cast<unsigned long>(abs_exp)));
      } else {
        abs_bound = Rat(1, pow_int(Int(2), static_cast<unsigned long>(-abs_exp)));
      }
      if (rad <= abs_bound) return b;
      if (rel_bits >= 0 && !b.contains_zero()) {
        Rat m = b.mid_rat();
        if (m < 0) m = -m;
        Rat rel_bound = m / Rat(pow_int(Int(2), static_cast<unsigned long>(rel_bits)));
        if (rad <= rel_bound) return b;
      }
    }
    if (p * 2 > cap) break;
  }
  throw PrecisionExhausted("radius goal unreachable at the precision cap");
}

int AdaptiveReal::sign() const {
  Prec cap = prec_cap();
  for (Prec p = 64; p <= cap; p *= 2) {
    try {
      RealBall b = eval(p);
      if (b.is_exact_zero()) return 0;
      if (b.sign_lo() > 0) return 1;
      if (b.sign_hi() < 0) return -1;
    } catch (const DomainError&) {
    }
    if (p * 2 > cap) break;
  }
  throw PrecisionExhausted("sign undecidable at the precision cap");
}

Int AdaptiveReal::floor() const {
  Prec cap = prec_cap();
  for (Prec p = 64; p <= cap; p *= 2) {
    try {
      RealBall b = eval(p);
      Int f1 = b.floor_lo();
      Int f2 = b.floor_hi();
      if (f1 == f2) return f1;
      if (b.exact()) return f1;
    } catch (const DomainError&) {
    }
    if (p * 2 > cap) break;
  }
  throw PrecisionExhausted("floor undecidable at the precision cap");
}

Int AdaptiveReal::round_guided() const {
  AdaptiveReal shifted = add_rat(Rat(1, 2));
  Prec local_cap = std::min<Prec>(prec_cap(), 1 << 12);
  for (Prec p = 64; p <= local_cap; p *= 2) {
    try {
      RealBall b = shifted.eval(p);
      Int f1 = b.floor_lo();
      Int f2 = b.floor_hi();
      if (f1 == f2 || b.exact()) return f1;
    } catch (const DomainError&) {
    }
  }
  try {
    RealBall b = shifted.eval(local_cap);
    Rat m = b.mid_rat();
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), m.get_num_mpz_t(), m.get_den_mpz_t());
    return q;
  } catch (const DomainError&) {
    throw PrecisionExhausted("rounding guide undefined at the local cap");
  }
}

#define EK_AD_BINOP(op)                                                       \
  AdaptiveReal operator op(const AdaptiveReal& a, const AdaptiveReal& b) {    \
    auto fa = a.fn_;                                                          \
    auto fb = b.fn_;                                                          \
    return AdaptiveReal([fa, fb](Prec p) { return (*fa)(p)op(*fb)(p); });     \
  }

EK_AD_BINOP(+)
EK_AD_BINOP(-)
EK_AD_BINOP(*)
EK_AD_BINOP(/)
#undef EK_AD_BINOP

AdaptiveReal AdaptiveReal::operator-() const {
  auto f = fn_;
  return AdaptiveReal([f](Prec p) { return (*f)(p).neg(); });
}

AdaptiveReal AdaptiveReal::abs() const {
  auto f = fn_;
  return AdaptiveReal([f](Prec p) { return (*f)(p).abs(); });
}

AdaptiveReal AdaptiveReal::sqrt() const {
  auto f = fn_;
  return AdaptiveReal([f](Prec p) { return (*f)(p).sqrt(); });
}

AdaptiveReal AdaptiveReal::log() const {
  auto f = fn_;
  return AdaptiveReal([f](Prec p) { return (*f)(p).log(); });
}

AdaptiveReal AdaptiveReal::exp() const {
  auto f = fn_;
  return AdaptiveReal([f](Prec p) { return (*f)(p).exp(); });
}

AdaptiveReal AdaptiveReal::pow_si(long n) const {
  auto f = fn_;
  return AdaptiveReal([f, n](Prec p) { return (*f)(p).pow_si(n); });
}

AdaptiveReal AdaptiveReal::add_rat(const Rat& q) const {
  auto f = fn_;
  return AdaptiveReal([f, q](Prec p) { return (*f)(p).add_rat(q); });
}

AdaptiveReal AdaptiveReal::mul_rat(const Rat& q) const {
  auto f = fn_;
  return AdaptiveReal([f, q](Prec p) { return (*f)(p) * RealBall::from_rat(q, p); });
}

AdaptiveReal AdaptiveReal::mul_int(const Int& z) const {
  auto f = fn_;
  return AdaptiveReal([f, z](Prec p) { return (*f)(p).mul_int(z); });
}

AdaptiveReal AdaptiveReal::atan2(const AdaptiveReal& y, const AdaptiveReal& x) {
  auto fy = y.fn_;
  auto fx = x.fn_;
  return AdaptiveReal([fy, fx](Prec p) { return RealBall::atan2((*fy)(p), (*fx)(p)); });
}

bool certify_le(const AdaptiveReal& value, const Rat& bound) {
  Prec cap = prec_cap();
  for (Prec p = 64; p <= cap; p *= 2) {
    try {
      RealBall b = value.eval(p);
      if (b.certainly_le_rat(bound)) return true;
      if (b.certainly_gt_rat(bound)) return false;
    } catch (const DomainError&) {
    }
    if (p * 2 > cap) break;
  }
  return false;
}

RealBall real_embed(const AdaptiveReal& x, const Rat& target_radius) {
  if (target_radius <= 0) throw DomainError("target radius must be positive");
  // Express the radius goal as a power of two at or below the target.
  Rat t = target_radius;
  long e = 0;
  while (t < 1) {
    t *= 2;
    --e;
  }
  while (t >= 2) {
    t /= 2;
    ++e;
  }
  return x.refine_abs(e);
}

}  // namespace ek
