#pragma once

#include <vector>

#include "ek/ball.hpp"

namespace ek {

// Certified continued-fraction expansion of an adaptive real. Partial
// quotients are extracted with interval arithmetic; the working precision
// only grows, and extraction failures surface as PrecisionExhausted.
class ContinuedFraction {
public:
  explicit ContinuedFraction(AdaptiveReal x);

  // Ensure terms a_0..a_k and convergents p_k/q_k exist.
  void extend_to(size_t k);
  size_t terms() const { return a_.size(); }
  const Int& a(size_t k) const { return a_.at(k); }
  const Int& num(size_t k) const { return p_.at(k); }
  const Int& den(size_t k) const { return q_.at(k); }

private:
  AdaptiveReal x_;
  std::vector<Int> a_, p_, q_;
  Prec prec_ = 128;
};

// ||x||: distance from x to the nearest integer, as an adaptive real.
AdaptiveReal dist_to_nearest_int(const AdaptiveReal& x);

// Smallest n >= 1 with ||n*theta - xi|| <= eps, each comparison certified by
// interval refinement. Scans n upward; n_cap guards runaway inputs.
long long ostrowski_epsilon(const AdaptiveReal& theta, const AdaptiveReal& xi,
                            const Rat& eps, long long n_cap = 2000000);

// Strictly increasing n with n * ||n*theta - xi|| <= 3, certified. The
// values are guided by the Ostrowski expansion of xi in the numeration
// system of theta's continued fraction, and each emission is re-certified
// by interval arithmetic, so the guide never affects soundness.
std::vector<Int> ostrowski_sequence(const AdaptiveReal& theta, const AdaptiveReal& xi,
                                    size_t count, size_t max_levels = 400);

}  // namespace ek
