#pragma once

#include <optional>

#include "ek/padic.hpp"

namespace ek {

// Fundamental unit (> 1) of the maximal order of Q(sqrt(d)), d > 1
// squarefree. Continued-fraction (PQa) solution of x^2 - d y^2 = +-1,
// refined to the half-coordinate unit when the order index is 3.
QuadElem fundamental_unit(long d);

// Square of the fundamental unit: norm 1, real embedding > 1, with
// 0 < conjugate embedding < 1.
QuadElem make_omega1_real(long d);

struct PUnitPair {
  QuadElem eta;     // algebraic integer with |N(eta)| = p^k and |eta|_p = 1
  long k;           // norm exponent
  QuadElem omega2;  // eta^2: |omega2|_p = 1, |conj|_p = p^(-2t), N = p^(2t)
  long t;           // = k
};

// Bounded enumeration of algebraic integers by |N| = p^k (k <= k_max,
// coordinates <= coeff_bound), filtered by the Hensel-branch valuation.
// Deterministic order: k ascending, then b ascending, integral coordinates
// before half-integer ones, then a ascending.
PUnitPair p_unit_search(const QuadField& field, const EmbeddingData& emb,
                        long k_max = 8, long coeff_bound = 1000000);

struct ImaginaryPUnit {
  QuadElem eta;
  QuadElem omega1;  // eta^2: algebraic integer p-unit, |psi(omega1)| = p^t
  long t;
};

ImaginaryPUnit make_omega1_imaginary(const QuadField& field, const EmbeddingData& emb,
                                     long k_max = 8, long coeff_bound = 1000000);

struct ZetaResult {
  QuadElem zeta;  // norm 1, > 1, with |phi(zeta) - 1|_p <= 1/p verified exactly
  long nu;
};

// zeta0 = make_omega1_real(d) raised to nu = p^2 - 1 (p >= 5) or 24 (p = 3),
// with the log-domain inequality verified exactly at precision N in the
// split or inert embedding; nu escalates by factors of p on failure.
ZetaResult normalize_zeta(long d, long p, long N);

struct UnitSystem {
  enum class Kind { RealThm1, ImaginaryThm1, Thm2 };
  Kind kind = Kind::RealThm1;
  long d = 0;
  long p = 0;
  std::optional<QuadElem> omega1;
  std::optional<QuadElem> omega2;
  std::optional<QuadElem> eta;
  std::optional<QuadElem> zeta;
  long t = 0;
  long nu = 0;
};

}  // namespace ek
