#include "ek/quad.hpp"

#include <sstream>

namespace ek {

QuadField::QuadField(long d_) : d(d_) {
  if (d == 0 || d == 1) throw DomainError("d must not be 0 or 1");
  if (!is_squarefree(d)) throw DomainError("d must be squarefree");
  long m = d % 4;
  if (m < 0) m += 4;
  ring_shift = (m == 1);
}

QuadElem::QuadElem(long d, Rat a, Rat b) : d_(d), a_(std::move(a)), b_(std::move(b)) {
  a_.canonicalize();
  b_.canonicalize();
}

void QuadElem::check_same_field(const QuadElem& o) const {
  if (d_ != o.d_) throw DomainError("mixed quadratic fields");
}

bool QuadElem::is_algebraic_integer() const {
  Rat t = trace(), n = norm();
  return t.get_den() == 1 && n.get_den() == 1;
}

QuadElem QuadElem::operator+(const QuadElem& o) const {
  check_same_field(o);
  return QuadElem(d_, a_ + o.a_, b_ + o.b_);
}

QuadElem QuadElem::operator-(const QuadElem& o) const {
  check_same_field(o);
  return QuadElem(d_, a_ - o.a_, b_ - o.b_);
}

QuadElem QuadElem::operator*(const QuadElem& o) const {
  check_same_field(o);
  return QuadElem(d_, a_ * o.a_ + Rat(d_) * b_ * o.b_, a_ * o.b_ + b_ * o.a_);
}

QuadElem QuadElem::inverse() const {
  Rat n = norm();
  if (n == 0) throw ZeroInput("inverse of zero");
  return QuadElem(d_, a_ / n, -b_ / n);
}

QuadElem QuadElem::operator/(const QuadElem& o) const {
  check_same_field(o);
  return *this * o.inverse();
}

QuadElem QuadElem::pow(long long e) const {
  if (e < 0) return inverse().pow(-e);
  QuadElem acc = from_rational(d_, Rat(1));
  QuadElem base = *this;
  unsigned long long u = static_cast<unsigned long long>(e);
  while (u != 0) {
    if (u & 1ull) acc = acc * base;
    base = base * base;
    u >>= 1;
  }
  return acc;
}

bool QuadElem::operator==(const QuadElem& o) const {
  return d_ == o.d_ && a_ == o.a_ && b_ == o.b_;
}

int QuadElem::sign_real() const {
  if (b_ == 0) return sgn(a_);
  if (d_ < 0) throw DomainError("real sign of imaginary element");
  int sa = sgn(a_), sb = sgn(b_);
  if (sa >= 0 && sb > 0) return 1;
  if (sa <= 0 && sb < 0) return -1;
  // a and b have opposite signs: compare a^2 with d b^2.
  Rat diff = a_ * a_ - Rat(d_) * b_ * b_;
  int sd = sgn(diff);
  // sign(a + b sqrt d) = sign(a) * sign(a^2 - d b^2) when |a| decides.
  return sa > 0 ? sd : -sd;
}

AdaptiveReal QuadElem::to_real() const {
  if (b_ == 0) return AdaptiveReal::from_rat(a_);
  if (d_ < 0) throw DomainError("real embedding of imaginary element");
  Rat a = a_, b = b_;
  long d = d_;
  return AdaptiveReal([a, b, d](Prec p) {
    RealBall s = RealBall::exact_int(Int(d), p).sqrt();
    return (s * RealBall::from_rat(b, p)).add_rat(a);
  });
}

AdaptiveReal QuadElem::complex_re() const {
  if (d_ > 0) throw DomainError("complex embedding of real element");
  return AdaptiveReal::from_rat(a_);
}

AdaptiveReal QuadElem::complex_im() const {
  if (d_ > 0) throw DomainError("complex embedding of real element");
  Rat b = b_;
  long ad = -d_;
  return AdaptiveReal([b, ad](Prec p) {
    RealBall s = RealBall::exact_int(Int(ad), p).sqrt();
    return s * RealBall::from_rat(b, p);
  });
}

std::string QuadElem::str() const {
  std::ostringstream os;
  os << a_.get_str();
  if (b_ != 0) {
    os << (b_ > 0 ? "+" : "-");
    Rat ab = b_ > 0 ? b_ : Rat(-b_);
    if (ab != 1) os << ab.get_str() << "*";
    os << "sqrt(" << d_ << ")";
  }
  return os.str();
}

TraceNormConj quad_trace_norm(const QuadElem& x) {
  return {x.trace(), x.norm(), x.conj()};
}

}  // namespace ek
