#include "ek/intutil.hpp"

namespace ek {

long vp_int(const Int& x, const Int& p) {
  if (x == 0) throw ZeroInput("valuation of zero");
  Int a = x < 0 ? Int(-x) : x;
  long v = 0;
  Int q, r;
  for (;;) {
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
    if (r != 0) break;
    a = q;
    ++v;
  }
  return v;
}

PadicAbs vp_rat(const Rat& x, const Int& p) {
  if (x == 0) throw ZeroInput("valuation of zero");
  if (!is_prime(p)) throw DomainError("modulus is not prime");
  long v = vp_int(Int(x.get_num()), p) - vp_int(Int(x.get_den()), p);
  Rat abs;
  if (v >= 0) {
    abs = Rat(1, pow_int(p, static_cast<unsigned long>(v)));
  } else {
    abs = Rat(pow_int(p, static_cast<unsigned long>(-v)));
  }
  return {v, abs};
}

Int sqrt_mod_prime(const Int& a0, const Int& p) {
  Int a = a0 % p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  if (mpz_legendre(a.get_mpz_t(), p.get_mpz_t()) != 1)
    throw NonResidue("not a quadratic residue mod p");
  if (p % 4 == 3) {
    Int e = (p + 1) / 4;
    return mod_pow(a, e, p);
  }
  // Tonelli-Shanks
  Int q = p - 1;
  unsigned long s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  Int z = 2;
  while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
  Int m(s), c = mod_pow(z, q, p), t = mod_pow(a, q, p), r = mod_pow(a, (q + 1) / 2, p);
  while (t != 1) {
    Int tt = t;
    long i = 0;
    while (tt != 1) {
      tt = (tt * tt) % p;
      ++i;
      if (Int(i) >= m) throw NonResidue("Tonelli-Shanks failed (composite modulus?)");
    }
    Int b = c;
    for (Int j = 0; j < m - i - 1; ++j) b = (b * b) % p;
    m = i;
    c = (b * b) % p;
    t = (t * c) % p;
    r = (r * b) % p;
  }
  return r;
}

bool is_square(const Int& n, Int* root) {
  if (n < 0) return false;
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  if (r * r == n) {
    if (root != nullptr) *root = r;
    return true;
  }
  return false;
}

Int squarefree_core(const Int& n, Int* sqrt_square_part) {
  if (n == 0) throw ZeroInput("squarefree core of zero");
  Int m = n < 0 ? Int(-n) : n;
  Int core = 1, sq = 1;
  for (Int f = 2; f * f <= m; ++f) {
    if (m % f != 0) continue;
    long e = 0;
    while (m % f == 0) {
      m /= f;
      ++e;
    }
    for (long i = 0; i + 1 < e; i += 2) sq *= f;
    if (e % 2 == 1) core *= f;
  }
  core *= m;
  if (n < 0) core = -core;
  if (sqrt_square_part != nullptr) *sqrt_square_part = sq;
  return core;
}

bool is_squarefree(long d) {
  Int sq;
  squarefree_core(Int(d), &sq);
  return sq == 1;
}

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational");
  Rat q;
  if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
    throw ParseError("bad rational: " + s);
  if (q.get_den() == 0) throw ParseError("zero denominator: " + s);
  q.canonicalize();
  return q;
}

}  // namespace ek
