#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "ek/quad.hpp"

namespace ek {

// Truncated p-adic number: either an exact zero, a residue class
// p^v * u (mod p^N) with p not dividing u and v < N, or an "unknown zero"
// whose residue vanishes mod p^N (valuation >= N, nothing more known).
// All arithmetic propagates the absolute precision N pessimistically.
class PAdic {
public:
  static PAdic zero(long p);
  static PAdic zero_to_precision(long p, long N);
  // Exact inputs carry relative precision N (absolute v + N).
  static PAdic from_int(const Int& x, long p, long N);
  static PAdic from_rat(const Rat& x, long p, long N);
  // Residue interpretation: x mod p^N, absolute precision exactly N.
  static PAdic from_int_abs(const Int& x, long p, long N);
  static PAdic one(long p, long N) { return from_int(1, p, N); }

  long p() const { return p_; }
  bool exact_zero() const { return state_ == State::ExactZero; }
  bool unknown_zero() const { return state_ == State::UnknownZero; }
  bool zeroish() const { return state_ != State::Regular; }

  // Absolute precision; meaningless for an exact zero.
  long N() const;
  // Exact valuation (Regular); for UnknownZero this is the lower bound N.
  long valuation_lower() const;
  long valuation() const;  // throws on zeros
  const Int& unit() const;
  long rel_precision() const { return N() - valuation_lower(); }

  Rat abs_p() const;  // p^-v exactly; 0 for exact zero; throws on unknown zero
  // Integer residue in [0, p^N); requires valuation >= 0.
  Int residue() const;
  Int residue_mod(long K) const;  // residue mod p^K, requires K <= N

  PAdic operator+(const PAdic& o) const;
  PAdic operator-(const PAdic& o) const;
  PAdic operator*(const PAdic& o) const;
  PAdic operator/(const PAdic& o) const;
  PAdic operator-() const;
  PAdic inverse() const;
  PAdic mul_int(const Int& n) const;  // exact integer multiple
  PAdic div_int(const Int& n) const;  // exact integer divisor
  PAdic mul_pow_p(long k) const;      // multiply by p^k
  PAdic pow(const Int& e) const;
  PAdic reduce_to(long N) const;  // cap the absolute precision

  bool same_to_precision(const PAdic& o) const;  // equal mod p^min(N)

  std::string str() const;            // "p^v * u mod p^N"
  std::vector<long> digit_list() const;  // base-p digits of unit, LSB first

private:
  enum class State { ExactZero, UnknownZero, Regular };

  PAdic(long p, State s, long N, long v, Int u)
      : p_(p), state_(s), N_(N), v_(v), u_(std::move(u)) {}
  static PAdic make_regular(long p, long N, long v, const Int& scaled_residue);

  long p_;
  State state_;
  long N_;  // absolute precision (Regular/UnknownZero)
  long v_;  // valuation (Regular), == N_ for UnknownZero
  Int u_;   // unit part mod p^(N-v), 0 < u < p^(N-v)
};

// Element c0 + c1*sqrt(d) of the unramified quadratic extension of Q_p
// (d a non-residue mod p). The valuation is min of the coordinate
// valuations; the conjugation flips the sign of c1 and is isometric.
class PAdicQuad {
public:
  PAdicQuad(PAdic c0, PAdic c1, long d);

  long p() const { return c0_.p(); }
  long d() const { return d_; }
  const PAdic& c0() const { return c0_; }
  const PAdic& c1() const { return c1_; }

  bool exact_zero() const { return c0_.exact_zero() && c1_.exact_zero(); }
  bool zeroish() const { return c0_.zeroish() && c1_.zeroish(); }
  long valuation_lower() const;

  PAdicQuad operator+(const PAdicQuad& o) const;
  PAdicQuad operator-(const PAdicQuad& o) const;
  PAdicQuad operator*(const PAdicQuad& o) const;
  PAdicQuad operator/(const PAdicQuad& o) const;
  PAdicQuad operator-() const;
  PAdicQuad conj() const { return PAdicQuad(c0_, -c1_, d_); }
  PAdic norm() const { return c0_ * c0_ - (c1_ * c1_).mul_int(Int(d_)); }
  PAdicQuad inverse() const;
  PAdicQuad div_int(const Int& n) const;
  PAdicQuad pow(const Int& e) const;

  std::string str() const;

private:
  PAdic c0_, c1_;
  long d_;
};

// Square root of d mod p^N by Hensel lifting from the mod-p root.
// The default branch is the root in (0, p/2).
PAdic hensel_sqrt(const Int& d, long p, long N, std::optional<Int> branch = std::nullopt);

enum class Splitting { Split, Inert, Ramified };

// Embedding of Q(sqrt(d)) into Q_p (split) or its unramified quadratic
// extension (inert). Fixes sqrt(d) -> branch in the split case; the other
// embedding is sqrt(d) -> -branch and the two are swapped by conjugation.
class EmbeddingData {
public:
  EmbeddingData(const QuadField& f, long p, long N, std::optional<Int> branch);

  const QuadField& field() const { return field_; }
  long p() const { return p_; }
  long default_N() const { return N_; }
  Splitting splitting() const { return splitting_; }
  bool split() const { return splitting_ == Splitting::Split; }
  const Int& branch() const;  // split only, residue mod p

  // sqrt(d) mod p^K (split only), cached and extended on demand.
  Int root_mod(long K) const;

  PAdic map(const QuadElem& x, long N) const;       // sqrt(d) -> +branch
  PAdic map_conj(const QuadElem& x, long N) const;  // sqrt(d) -> -branch
  PAdicQuad map_inert(const QuadElem& x, long N) const;

  // Exact valuation of the image of a nonzero x (id-embedding).
  long vP(const QuadElem& x) const;
  long vP_conj(const QuadElem& x) const { return vP(x.conj()); }
  Rat abs_P(const QuadElem& x) const;

private:
  struct RootCache {
    std::mutex mu;
    Int lift;
    long N = 0;
  };

  PAdic map_branch(const QuadElem& x, long N, bool conjugate) const;

  QuadField field_;
  long p_;
  long N_;
  Splitting splitting_;
  Int branch_;
  std::shared_ptr<RootCache> cache_;
};

EmbeddingData embed_field(const QuadField& f, long p, long N,
                          std::optional<Int> branch = std::nullopt);

// p-adic logarithm on |z - 1|_p < p^(-1/(p-1)); for odd p this is
// v(z - 1) >= 1. Truncation index: the first M with
// n*v(z-1) - floor(log_p n) >= N for all n > M.
PAdic padic_log(const PAdic& z);
PAdicQuad padic_log(const PAdicQuad& z);

// Unique 0 <= n < p^N with |n - a/b|_p <= p^(-N).
Int zp_ratio_residue(const PAdic& a, const PAdic& b, long N);

long floor_log_base(long n, long base);

}  // namespace ek
