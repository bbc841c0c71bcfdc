#include "ek/units.hpp"

#include <vector>

namespace ek {

namespace {

// PQa continued-fraction loop for sqrt(d): returns the fundamental solution
// of x^2 - d y^2 = +-1 over Z[sqrt(d)].
QuadElem pell_unit(long d) {
  Int D(d);
  Int a0;
  mpz_sqrt(a0.get_mpz_t(), D.get_mpz_t());
  Int P = 0, Q = 1;
  Int h_prev = 1, h = a0;  // convergent numerators
  Int k_prev = 0, k = 1;   // convergent denominators
  Int a = a0;
  for (;;) {
    P = a * Q - P;
    Q = (D - P * P) / Q;
    if (Q == 1) break;
    a = (a0 + P) / Q;
    Int h_next = a * h + h_prev;
    Int k_next = a * k + k_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return QuadElem(d, Rat(h), Rat(k));
}

}  // namespace

QuadElem fundamental_unit(long d) {
  if (d <= 1) throw DomainError("d must exceed 1");
  QuadField f(d);  // validates squarefree
  QuadElem u1 = pell_unit(d);
  if (!f.ring_shift) return u1;
  // d = 1 mod 4: the maximal order may contain a cube root of u1 with
  // half-integer coordinates. From e^3 = u1 with e = (a + b sqrt d)/2,
  // N(e) = s: b(d b^2 + 3s) = 2 y1 and a(d b^2 + s) = 2 x1.
  Int x1(u1.a().get_num()), y1(u1.b().get_num());
  int s = u1.norm() == 1 ? 1 : -1;
  Int target = 2 * y1;
  Int guess;
  mpz_root(guess.get_mpz_t(), Int(target / d).get_mpz_t(), 3);
  for (Int b = guess - 2; b <= guess + 2; ++b) {
    if (b <= 0) continue;
    Int den_b = Int(d) * b * b + 3 * s;
    if (den_b == 0 || target % den_b != 0 || target / den_b != b) continue;
    Int den_a = Int(d) * b * b + s;
    if (den_a == 0 || (2 * x1) % den_a != 0) continue;
    Int a = (2 * x1) / den_a;
    if (a <= 0) continue;
    if (a * a - Int(d) * b * b != 4 * s) continue;
    if ((a - b) % 2 != 0) continue;
    if (a % 2 == 0) continue;  // even pair would already be a Z[sqrt d] unit
    QuadElem e(d, Rat(a, 2), Rat(b, 2));
    if (e.pow(3) == u1) return e;
  }
  return u1;
}

QuadElem make_omega1_real(long d) {
  QuadElem eps = fundamental_unit(d);
  QuadElem w = eps * eps;
  // eps > 1, so w > 1, N(w) = 1 and 0 < conj(w) = 1/w < 1.
  if (w.norm() != 1) throw DomainError("unit square must have norm 1");
  return w;
}

namespace {

struct Candidate {
  Int a;
  Int den;  // 1 or 2
};

// Collect integral then half-integer a-candidates for a fixed (b, k).
void collect_candidates(long d, const Int& pk, const Int& b, bool half_allowed,
                        std::vector<Candidate>& out) {
  out.clear();
  Int db2 = Int(d) * b * b;
  for (int sgn_norm : {+1, -1}) {
    Int t = db2 + sgn_norm * pk;
    Int a;
    if (t >= 0 && is_square(t, &a) && a > 0) out.push_back({a, Int(1)});
  }
  if (half_allowed && b % 2 != 0) {
    for (int sgn_norm : {+1, -1}) {
      Int t = db2 + sgn_norm * 4 * pk;
      Int a;
      if (t >= 0 && is_square(t, &a) && a > 0 && a % 2 != 0) out.push_back({a, Int(2)});
    }
  }
  // integral first (den 1 < 2), then a ascending
  std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) {
    if (x.den != y.den) return x.den < y.den;
    return x.a < y.a;
  });
}

}  // namespace

PUnitPair p_unit_search(const QuadField& field, const EmbeddingData& emb,
                        long k_max, long coeff_bound) {
  if (!emb.split())
    throw InertUnsupported("p-unit construction needs a split prime");
  long d = field.d;
  long p = emb.p();
  bool half_allowed = field.ring_shift;
  std::vector<Candidate> cands;
  for (long k = 1; k <= k_max; ++k) {
    Int pk = pow_long(p, static_cast<unsigned long>(k));
    Int b_cap(coeff_bound);
    if (d < 0) {
      // norms are positive: d b^2 + 4 p^k >= 0 bounds b
      Int lim;
      mpz_sqrt(lim.get_mpz_t(), Int(4 * pk / Int(-d)).get_mpz_t());
      if (lim + 1 < b_cap) b_cap = lim + 1;
    }
    for (Int b = 1; b <= b_cap; ++b) {
      collect_candidates(d, pk, b, half_allowed, cands);
      for (const Candidate& c : cands) {
        QuadElem eta(d, Rat(c.a, c.den), Rat(b, c.den));
        if (!eta.is_algebraic_integer()) continue;
        long v = emb.vP(eta);
        QuadElem chosen = eta;
        if (v == k) {
          chosen = eta.conj();
          v = 0;
        }
        if (v != 0) continue;  // imprimitive candidate (p divides it)
        QuadElem omega2 = chosen * chosen;
        return {chosen, k, omega2, k};
      }
    }
  }
  throw SearchExhausted("no p-unit inside the search bounds; raise k_max or coeff_bound");
}

ImaginaryPUnit make_omega1_imaginary(const QuadField& field, const EmbeddingData& emb,
                                     long k_max, long coeff_bound) {
  if (field.d >= 0) throw DomainError("imaginary construction needs d < 0");
  PUnitPair pr = p_unit_search(field, emb, k_max, coeff_bound);
  // In the imaginary case norms are positive, so eta/conj(eta) =
  // eta^2 / N(eta) and p^t * (eta/conj eta) = eta^2 is an algebraic integer.
  return {pr.eta, pr.omega2, pr.t};
}

ZetaResult normalize_zeta(long d, long p, long N) {
  if (p == 2) throw PTwoUnsupported("p = 2 normalization is out of scope");
  if (d <= 1) throw DomainError("d must exceed 1");
  QuadField f(d);
  EmbeddingData emb = embed_field(f, p, N);
  QuadElem zeta0 = make_omega1_real(d);
  long nu = (p == 3) ? 24 : p * p - 1;
  for (int tries = 0; tries < 4; ++tries) {
    QuadElem zeta = zeta0.pow(nu);
    bool ok;
    if (emb.split()) {
      PAdic z = emb.map(zeta, N);
      PAdic w = z - PAdic::one(p, N);
      ok = w.zeroish() || w.valuation_lower() >= 1;
    } else {
      PAdicQuad z = emb.map_inert(zeta, N);
      PAdicQuad one(PAdic::one(p, N), PAdic::zero(p), d);
      PAdicQuad w = z - one;
      ok = w.zeroish() || w.valuation_lower() >= 1;
    }
    if (ok) return {zeta, nu};
    nu *= p;  // Fermat-quotient fallback
  }
  throw PrecisionExhausted("log-domain normalization did not stabilize");
}

}  // namespace ek
