#include "ek/ostrowski.hpp"

#include <algorithm>

namespace ek {

ContinuedFraction::ContinuedFraction(AdaptiveReal x) : x_(std::move(x)) {}

void ContinuedFraction::extend_to(size_t k) {
  Prec cap = prec_cap();
  while (a_.size() <= k) {
    size_t next = a_.size();
    for (;;) {
      // Recompute the tail state x_next from scratch at the current
      // precision: x_0 = x, x_{i+1} = 1/(x_i - a_i).
      bool ok = true;
      Int digit;
      try {
        RealBall b = x_.eval(prec_);
        RealBall cur = b;
        for (size_t i = 0; i < next && ok; ++i) {
          RealBall frac = cur - RealBall::exact_int(a_[i], prec_);
          if (frac.contains_zero()) {
            ok = false;
            break;
          }
          cur = RealBall::exact_int(1, prec_) / frac;
        }
        if (ok) {
          Int f1 = cur.floor_lo(), f2 = cur.floor_hi();
          if (f1 == f2 || cur.exact()) {
            digit = f1;
          } else {
            ok = false;
          }
        }
      } catch (const DomainError&) {
        ok = false;
      }
      if (ok) {
        a_.push_back(digit);
        if (a_.size() == 1) {
          p_.push_back(digit);
          q_.push_back(Int(1));
        } else if (a_.size() == 2) {
          p_.push_back(digit * p_[0] + 1);
          q_.push_back(digit);
        } else {
          size_t i = a_.size() - 1;
          p_.push_back(digit * p_[i - 1] + p_[i - 2]);
          q_.push_back(digit * q_[i - 1] + q_[i - 2]);
        }
        break;
      }
      if (prec_ * 2 > cap)
        throw PrecisionExhausted("continued fraction stalled at the precision cap");
      prec_ *= 2;
    }
  }
}

AdaptiveReal dist_to_nearest_int(const AdaptiveReal& x) {
  return AdaptiveReal([x](Prec p) {
    RealBall b = x.eval(p);
    // Shift by the integer nearest the midpoint; min(|y|, 1-|y|) then
    // encloses the distance even when the shift choice is off by one.
    Rat mid = b.mid_rat() + Rat(1, 2);
    Int k;
    mpz_fdiv_q(k.get_mpz_t(), mid.get_num_mpz_t(), mid.get_den_mpz_t());
    RealBall y = b - RealBall::exact_int(k, p);
    RealBall z = y.abs();
    RealBall w = RealBall::exact_int(1, p) - z;
    // interval min of z and w
    Rat lo = std::min(z.lo_rat(), w.lo_rat());
    Rat hi = std::min(z.hi_rat(), w.hi_rat());
    if (lo < 0) lo = 0;
    return RealBall::from_endpoints(lo, hi, p);
  });
}

namespace {

int certified_le_or_throw(const AdaptiveReal& value, const Rat& bound) {
  Prec cap = prec_cap();
  for (Prec p = 64; p <= cap; p *= 2) {
    try {
      RealBall b = value.eval(p);
      if (b.certainly_le_rat(bound)) return 1;
      if (b.certainly_gt_rat(bound)) return 0;
    } catch (const DomainError&) {
    }
    if (p * 2 > cap) break;
  }
  throw PrecisionExhausted("comparison undecidable at the precision cap");
}

}  // namespace

long long ostrowski_epsilon(const AdaptiveReal& theta, const AdaptiveReal& xi,
                            const Rat& eps, long long n_cap) {
  if (eps <= 0) throw DomainError("epsilon must be positive");
  if (eps >= Rat(1, 2)) return 1;  // ||.|| <= 1/2 unconditionally
  for (long long n = 1; n <= n_cap; ++n) {
    AdaptiveReal d = dist_to_nearest_int(theta.mul_int(from_ll(n)) - xi);
    if (certified_le_or_throw(d, eps) == 1) return n;
  }
  throw SearchExhausted("no n within the scan cap satisfied the target");
}

std::vector<Int> ostrowski_sequence(const AdaptiveReal& theta, const AdaptiveReal& xi,
                                    size_t count, size_t max_levels) {
  std::vector<Int> out;
  if (count == 0) return out;
  ContinuedFraction cf(theta);
  cf.extend_to(1);
  Int n = 0;
  Int last = 0;
  auto product = [&](const Int& m) {
    return dist_to_nearest_int(theta.mul_int(m) - xi).mul_int(m);
  };
  for (size_t K = 1; K <= max_levels && out.size() < count; ++K) {
    cf.extend_to(K);
    const Int& qK1 = cf.den(K - 1);
    const Int& pK1 = cf.num(K - 1);
    // Greedy Ostrowski digit: shift n by c*q_{K-1} to cancel the residual
    // against D_{K-1} = q_{K-1}*theta - p_{K-1}.
    AdaptiveReal D = theta.mul_int(qK1) - AdaptiveReal::from_int(pK1);
    AdaptiveReal res = theta.mul_int(n) - xi;
    Int k0 = res.round_guided();
    AdaptiveReal e = res - AdaptiveReal::from_int(k0);
    Int c = (-e / D).round_guided();
    if (c < 0) c = 0;
    if (c > cf.a(K)) c = cf.a(K);
    n += c * qK1;
    // Candidate emissions, all re-certified: the current n, the stall
    // fallback n + q_K, and q_K itself while n is still 0.
    std::vector<Int> cands;
    if (n >= 1) cands.push_back(n);
    if (n == 0) cands.push_back(cf.den(K));
    cands.push_back(n + cf.den(K));
    std::sort(cands.begin(), cands.end());
    for (const Int& m : cands) {
      if (out.size() >= count) break;
      if (m <= last) continue;
      if (certify_le(product(m), Rat(3))) {
        out.push_back(m);
        last = m;
      }
    }
  }
  if (out.size() < count)
    throw PrecisionExhausted("ostrowski sequence stalled before the requested count");
  return out;
}

}  // namespace ek
