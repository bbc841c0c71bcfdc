#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "ek/error.hpp"

namespace ek {

using Int = mpz_class;
using Rat = mpq_class;

inline bool is_prime(const Int& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

inline Int from_ll(long long v) { return Int(std::to_string(v)); }

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int pow_long(long base, unsigned long e) { return pow_int(Int(base), e); }

inline Int mod_pow(const Int& b, const Int& e, const Int& m) {
  Int r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Exact p-adic valuation of a nonzero integer.
long vp_int(const Int& x, const Int& p);

struct PadicAbs {
  long valuation;
  Rat abs_p;  // p^(-valuation), exact
};

// v_p and |x|_p of a nonzero rational; throws ZeroInput on 0.
PadicAbs vp_rat(const Rat& x, const Int& p);

// Square root mod an odd prime (Tonelli-Shanks); throws NonResidue.
Int sqrt_mod_prime(const Int& a, const Int& p);

bool is_square(const Int& n, Int* root = nullptr);

// n = core * square, core squarefree with the sign of n. Trial division;
// meant for discriminant-sized inputs.
Int squarefree_core(const Int& n, Int* sqrt_square_part = nullptr);

bool is_squarefree(long d);

Rat parse_rat(const std::string& s);  // "n" or "n/d"

}  // namespace ek
