#include "ek/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

namespace ek {

namespace {

using i128 = __int128;

Int i128_to_mpz(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
  Int hi = from_ll((long)(unsigned long)(u >> 64));
  Int lo = from_ll((long)(unsigned long)(u & 0xffffffffffffffffULL));
  Int r = hi * Int("18446744073709551616") + lo;
  return neg ? Int(-r) : r;
}

int sign_quad_mpz(const Int& X, const Int& Y, long d) {
  int sx = sgn(X), sy = sgn(Y);
  if (sy == 0) return sx;
  if (sx == 0) return sy;
  if (sx > 0 && sy > 0) return 1;
  if (sx < 0 && sy < 0) return -1;
  Int diff = X * X - Int(d) * Y * Y;
  int sd = sgn(diff);
  return sx > 0 ? sd : -sd;
}

constexpr i128 kSignGuard = (i128)1000000000000000000LL;  // 1e18

int sign_quad_i128(i128 X, i128 Y, long d) {
  if (Y == 0) return X > 0 ? 1 : (X < 0 ? -1 : 0);
  if (X == 0) return Y > 0 ? 1 : -1;
  if (X > 0 && Y > 0) return 1;
  if (X < 0 && Y < 0) return -1;
  i128 ax = X > 0 ? X : -X, ay = Y > 0 ? Y : -Y;
  if (ax > kSignGuard || ay > kSignGuard)
    return sign_quad_mpz(i128_to_mpz(X), i128_to_mpz(Y), d);
  i128 lhs = ax * ax, rhs = (i128)d * ay * ay;
  int sd = lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
  return X > 0 ? sd : -sd;
}

// floor((A + B*sqrt(d))/C) exactly, C > 0, d > 1 non-square.
Int floor_quad(const Int& A, const Int& B, const Int& C, long d) {
  if (B == 0) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), A.get_mpz_t(), C.get_mpz_t());
    return q;
  }
  if (B < 0) {
    // irrational argument: floor(x) = -floor(-x) - 1
    return -floor_quad(Int(-A), Int(-B), C, d) - 1;
  }
  Int s;
  Int bbd = B * B * d;
  mpz_sqrt(s.get_mpz_t(), bbd.get_mpz_t());
  Int t = A + s;
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), t.get_mpz_t(), C.get_mpz_t());
  Int margin = C * (f + 1) - A;
  if (margin <= 0) return f + 1;
  if (bbd >= margin * margin) return f + 1;
  return f;
}

Int round_quad(const Int& A, const Int& B, const Int& C, long d) {
  return floor_quad(2 * A + C, 2 * B, 2 * C, d);
}

RealBall quad_value_ball(const Int& X, const Int& Y, const Int& den, long d, Prec prec) {
  AdaptiveReal v =
      (AdaptiveReal::from_int(X) + AdaptiveReal::sqrt_int(d).mul_int(Y)) /
      AdaptiveReal::from_int(den);
  return v.eval(prec);
}

}  // namespace

MetricVariant parse_variant(const std::string& s) {
  if (s == "EK" || s == "ek") return MetricVariant::EK;
  if (s == "EK+" || s == "ek+" || s == "ekplus") return MetricVariant::EKPlus;
  if (s == "M" || s == "m") return MetricVariant::M;
  if (s == "MU1" || s == "mu1") return MetricVariant::MU1;
  if (s == "MU2" || s == "mu2") return MetricVariant::MU2;
  throw ParseError("unknown metric variant: " + s);
}

PadicFactor qbr_valuation(const Int& q, const Int& r, const PadicSpec& beta, long p) {
  if (beta.kind == PadicSpec::Kind::Rational ||
      (beta.kind == PadicSpec::Kind::Quad && beta.qb == 0)) {
    Rat b = beta.kind == PadicSpec::Kind::Rational ? beta.rat : beta.qa;
    Rat t = b * Rat(q) - Rat(r);
    if (t == 0) return {true, 0};
    return {false, vp_rat(t, Int(p)).valuation};
  }
  QuadElem be = beta.to_elem();
  QuadElem diff = be.scale(Rat(q)) - QuadElem::from_rational(be.d(), Rat(r));
  EmbeddingData emb(QuadField(be.d()), p, 2, beta.branch);
  return {false, emb.vP(diff)};
}

RealBall ek_product(const Int& q, const Int& r, const RealSpec& alpha,
                    const PadicSpec& beta, long p, MetricVariant variant) {
  const Prec prec = 192;
  auto real_factor = [&](const Int& x, const Int& y) {
    if (alpha.kind == RealSpec::Kind::Rational) {
      Rat t = alpha.rat * Rat(x) - Rat(y);
      if (t < 0) t = -t;
      return RealBall::from_rat(t, prec);
    }
    AdaptiveReal v = (alpha.to_real().mul_int(x) - AdaptiveReal::from_int(y)).abs();
    return v.eval_settled(prec);
  };
  auto pfac_ball = [&](const PadicFactor& f) {
    if (f.infinite) return RealBall();
    Rat t = f.v >= 0 ? Rat(1, pow_long(p, static_cast<unsigned long>(f.v)))
                     : Rat(pow_long(p, static_cast<unsigned long>(-f.v)));
    return RealBall::from_rat(t, prec);
  };
  switch (variant) {
    case MetricVariant::EK: {
      if (q == 0 || r == 0) throw InvalidPair("EK requires q r != 0");
      return RealBall::exact_int(abs(q), prec) * real_factor(q, r) *
             pfac_ball(qbr_valuation(q, r, beta, p));
    }
    case MetricVariant::EKPlus: {
      if (q == 0 || r == 0) throw InvalidPair("EK+ requires q r != 0");
      return RealBall::exact_int(std::max(abs(q), abs(r)), prec) * real_factor(q, r) *
             pfac_ball(qbr_valuation(q, r, beta, p));
    }
    case MetricVariant::M: {
      if (r == 0) throw InvalidPair("M requires r != 0");
      Rat rp = vp_rat(Rat(r), Int(p)).abs_p;
      return RealBall::exact_int(abs(r), prec) * RealBall::from_rat(rp, prec) *
             real_factor(r, q);
    }
    case MetricVariant::MU1:
    case MetricVariant::MU2: {
      if (q == 0 || r == 0) throw InvalidPair("MU variants require q r != 0");
      if (variant == MetricVariant::MU1 && abs(q) > abs(r))
        throw InvalidPair("MU1 requires |q| <= |r|");
      if (variant == MetricVariant::MU2 && abs(r) > abs(q))
        throw InvalidPair("MU2 requires |r| <= |q|");
      return RealBall::exact_int(abs(q * r), prec) *
             pfac_ball(qbr_valuation(q, r, beta, p));
    }
  }
  throw DomainError("unreachable");
}

std::optional<ExactProduct> ek_plus_exact(const Int& q, const Int& r, const RealSpec& alpha,
                                          const PadicSpec& beta, long p) {
  if (alpha.kind != RealSpec::Kind::Quad || beta.kind != PadicSpec::Kind::Quad)
    return std::nullopt;
  if (alpha.d != beta.d) return std::nullopt;
  if (q == 0 || r == 0) throw InvalidPair("EK+ requires q r != 0");
  QuadElem ae = alpha.to_elem();
  QuadElem diff = ae.scale(Rat(q)) - QuadElem::from_rational(ae.d(), Rat(r));
  int s = diff.sign_real();
  QuadElem ad = s >= 0 ? diff : -diff;
  PadicFactor f = qbr_valuation(q, r, beta, p);
  if (f.infinite) return ExactProduct{true, QuadElem::from_rational(ae.d(), Rat(0))};
  Rat scale = Rat(std::max(abs(q), abs(r)));
  scale *= f.v >= 0 ? Rat(1, pow_long(p, static_cast<unsigned long>(f.v)))
                    : Rat(pow_long(p, static_cast<unsigned long>(-f.v)));
  return ExactProduct{false, ad.scale(scale)};
}

// ---------------------------------------------------------------------------
// Exact scan engine (same-field quadratic pairs, small data)

namespace {

struct QuadScanCtx {
  long d = 0;
  long p = 0;
  long k_max = 0;
  long ua = 0, va = 0, wa = 1;  // alpha = (ua + va sqrt d)/wa
  long ub = 0, vb = 0, wb = 1;  // beta likewise, along the branch lift
  int Kbig = 2;
  i128 pK = 1;
  i128 s_lift = 0;
  i128 inv_wb = 1;
  bool certify = false;
  long e0 = 0, e1 = 0, eden = 1;  // c0 = (e0 + e1 sqrt d)/eden

  long r_bound(long q) const {
    Int A = Int(ua) * q, B = Int(va) * q;
    if (sign_quad_mpz(A, B, d) < 0) {
      A = -A;
      B = -B;
    }
    Int f = floor_quad(A + Int(wa) * q, B, Int(wa), d);
    Int rb = f + 1 + pow_long(p, static_cast<unsigned long>(k_max));
    if (!rb.fits_slong_p()) throw DomainError("window too large for the fast path");
    return rb.get_si();
  }

  long pair_valuation(long q, long r) const {
    i128 X = (i128)q * ub - (i128)r * wb;
    i128 Y = (i128)q * vb;
    i128 e = ((X % pK) + ((Y % pK) * s_lift) % pK) % pK;
    if (e < 0) e += pK;
    if (e == 0) throw DomainError("valuation bound exceeded in the fast path (internal)");
    long v = 0;
    while (e % p == 0) {
      e /= p;
      ++v;
    }
    return v;
  }

  struct PairData {
    long aX = 0, aY = 0;  // |q alpha - r| coords over wa, normalized >= 0
    long v = 0;
    long maxqr = 0;
  };

  PairData eval(long q, long r) const {
    PairData pd;
    long XA = (long)((i128)q * ua - (i128)r * wa);
    long YA = (long)((i128)q * va);
    if (sign_quad_i128(XA, YA, d) >= 0) {
      pd.aX = XA;
      pd.aY = YA;
    } else {
      pd.aX = -XA;
      pd.aY = -YA;
    }
    pd.v = pair_valuation(q, r);
    pd.maxqr = std::max(q < 0 ? -q : q, r < 0 ? -r : r);
    return pd;
  }

  bool at_least_c0(const PairData& pd) const {
    i128 pv = 1;
    for (long i = 0; i < pd.v; ++i) pv *= p;
    i128 L0 = (i128)pd.maxqr * eden * pd.aX;
    i128 L1 = (i128)pd.maxqr * eden * pd.aY;
    i128 W0 = (i128)wa * pv * e0;
    i128 W1 = (i128)wa * pv * e1;
    return sign_quad_i128(L0 - W0, L1 - W1, d) >= 0;
  }

  bool less_product(const PairData& a, const PairData& b) const {
    Int pa = pow_long(p, static_cast<unsigned long>(b.v));
    Int pb = pow_long(p, static_cast<unsigned long>(a.v));
    Int X = Int(a.maxqr) * a.aX * pa - Int(b.maxqr) * b.aX * pb;
    Int Y = Int(a.maxqr) * a.aY * pa - Int(b.maxqr) * b.aY * pb;
    return sign_quad_mpz(X, Y, d) < 0;
  }

  RealBall product_ball(const PairData& pd) const {
    Int X = Int(pd.maxqr) * pd.aX;
    Int Y = Int(pd.maxqr) * pd.aY;
    Int den = Int(wa) * pow_long(p, static_cast<unsigned long>(pd.v));
    return quad_value_ball(X, Y, den, d, 192);
  }
};

// r values for one q, distance-from-q*alpha ascending (irrational alpha
// never ties). The stream ends once both directions leave the window.
template <class Sink>
void exhaustive_candidates(const QuadScanCtx& cx, long q, Sink&& sink) {
  long rb = cx.r_bound(q);
  long m = round_quad(Int(cx.ua) * q, Int(cx.va) * q, Int(cx.wa), cx.d).get_si();
  int fs = sign_quad_mpz(Int(cx.ua) * q - Int(m) * cx.wa, Int(cx.va) * q, cx.d);
  auto emit = [&](long r) {
    if (r != 0 && r >= -rb && r <= rb) sink(r);
  };
  emit(m);
  for (long o = 1; m - o >= -rb || m + o <= rb; ++o) {
    if (fs >= 0) {
      emit(m + o);
      emit(m - o);
    } else {
      emit(m - o);
      emit(m + o);
    }
  }
}

std::vector<long> residue_candidates(const QuadScanCtx& cx, long q) {
  std::vector<long> rs;
  long rb = cx.r_bound(q);
  long m = round_quad(Int(cx.ua) * q, Int(cx.va) * q, Int(cx.wa), cx.d).get_si();
  for (long k = 0; k <= cx.k_max; ++k) {
    i128 pk = 1;
    for (long i = 0; i < k; ++i) pk *= cx.p;
    long base;
    if (k == 0) {
      base = m;
    } else {
      i128 c = (((i128)q % pk) *
                ((((i128)cx.ub % pk) + (((i128)cx.vb % pk) * (cx.s_lift % pk)) % pk) % pk)) %
               pk;
      c = (c * (cx.inv_wb % pk)) % pk;
      if (c < 0) c += pk;
      i128 delta = (i128)m - c;
      i128 half = (pk - 1) / 2;
      i128 num = delta + half;
      i128 steps = num >= 0 ? num / pk : -(((-num) + pk - 1) / pk);
      base = (long)(c + steps * pk);
    }
    long step = (long)pk;
    for (long r : {base - step, base, base + step}) {
      if (r == 0 || r > rb || r < -rb) continue;
      rs.push_back(r);
    }
  }
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  std::sort(rs.begin(), rs.end(), [&](long r1, long r2) {
    Int X1 = Int(cx.ua) * q - Int(r1) * cx.wa, Y1 = Int(cx.va) * q;
    Int X2 = Int(cx.ua) * q - Int(r2) * cx.wa, Y2 = Int(cx.va) * q;
    if (sign_quad_mpz(X1, Y1, cx.d) < 0) {
      X1 = -X1;
      Y1 = -Y1;
    }
    if (sign_quad_mpz(X2, Y2, cx.d) < 0) {
      X2 = -X2;
      Y2 = -Y2;
    }
    int c = sign_quad_mpz(X1 - X2, Y1 - Y2, cx.d);
    if (c != 0) return c < 0;
    return r1 < r2;
  });
  return rs;
}

struct QuadBlockResult {
  unsigned long pairs = 0;
  unsigned long violations = 0;
  struct Cand {
    long q, r;
    QuadScanCtx::PairData pd;
  };
  std::vector<Cand> cands;
};

QuadBlockResult scan_quad_block(const QuadScanCtx& cx, long q_from, long q_to,
                                ScanStrategy strategy) {
  QuadBlockResult res;
  bool has_local = false;
  QuadScanCtx::PairData best{};
  auto visit = [&](long q, long r) {
    QuadScanCtx::PairData pd = cx.eval(q, r);
    ++res.pairs;
    if (cx.certify && !cx.at_least_c0(pd)) ++res.violations;
    if (!has_local || cx.less_product(pd, best)) {
      has_local = true;
      best = pd;
      res.cands.push_back({q, r, pd});
    }
  };
  for (long q = q_from; q <= q_to; ++q) {
    if (strategy == ScanStrategy::Exhaustive) {
      exhaustive_candidates(cx, q, [&](long r) { visit(q, r); });
    } else {
      for (long r : residue_candidates(cx, q)) visit(q, r);
    }
  }
  return res;
}

std::vector<QuadBlockResult> run_quad_blocks(const QuadScanCtx& cx, long q_max,
                                             ScanStrategy strategy, int threads) {
  if (threads < 1) threads = 1;
  if (threads == 1 || q_max < 64) {
    return {scan_quad_block(cx, 1, q_max, strategy)};
  }
  long per = (q_max + threads - 1) / threads;
  std::vector<QuadBlockResult> out(static_cast<size_t>(threads));
  std::vector<std::thread> ts;
  for (int i = 0; i < threads; ++i) {
    long from = 1 + per * i;
    long to = std::min(q_max, from + per - 1);
    if (from > to) continue;
    ts.emplace_back([&, i, from, to]() { out[static_cast<size_t>(i)] = scan_quad_block(cx, from, to, strategy); });
  }
  for (auto& t : ts) t.join();
  return out;
}

std::vector<ScanRecordRow> merge_quad_chain(const QuadScanCtx& cx,
                                            std::vector<QuadBlockResult>& blocks,
                                            unsigned long* pairs,
                                            unsigned long* violations) {
  std::vector<ScanRecordRow> chain;
  bool has_best = false;
  QuadScanCtx::PairData best{};
  for (auto& b : blocks) {
    if (pairs != nullptr) *pairs += b.pairs;
    if (violations != nullptr) *violations += b.violations;
    for (auto& c : b.cands) {
      if (!has_best || cx.less_product(c.pd, best)) {
        has_best = true;
        best = c.pd;
        chain.push_back({c.q, c.r, cx.product_ball(c.pd)});
      }
    }
  }
  return chain;
}

bool small_coords(const Rat& x) {
  return abs(Int(x.get_num())) <= 1000 && Int(x.get_den()) <= 1000;
}

bool fits_fast_path(const RealSpec& alpha, const PadicSpec& beta, long q_max,
                    long k_max, long p) {
  if (alpha.kind != RealSpec::Kind::Quad || beta.kind != PadicSpec::Kind::Quad) return false;
  if (alpha.d != beta.d || alpha.d <= 1 || alpha.d > 10000) return false;
  if (beta.qb == 0) return false;
  if (!small_coords(alpha.qa) || !small_coords(alpha.qb) || !small_coords(beta.qa) ||
      !small_coords(beta.qb))
    return false;
  if (q_max > 200000) return false;
  if (std::pow((double)p, (double)k_max) > 4e7) return false;
  if (beta.qa.get_den() % p == 0 || beta.qb.get_den() % p == 0) return false;
  return true;
}

QuadScanCtx build_quad_ctx(const RealSpec& alpha, const PadicSpec& beta, long p,
                           long k_max, long q_max) {
  QuadScanCtx cx;
  cx.d = alpha.d;
  cx.p = p;
  cx.k_max = k_max;
  QuadElem ae = alpha.to_elem();
  Int wa = lcm(Int(ae.a().get_den()), Int(ae.b().get_den()));
  cx.ua = Int(ae.a().get_num() * (wa / ae.a().get_den())).get_si();
  cx.va = Int(ae.b().get_num() * (wa / ae.b().get_den())).get_si();
  cx.wa = wa.get_si();
  Int wb = lcm(Int(beta.qa.get_den()), Int(beta.qb.get_den()));
  cx.ub = Int(beta.qa.get_num() * (wb / beta.qa.get_den())).get_si();
  cx.vb = Int(beta.qb.get_num() * (wb / beta.qb.get_den())).get_si();
  cx.wb = wb.get_si();
  // Valuation ceiling: v_P(q beta - r) <= v_p of the norm of
  // wb(q beta - r) = X + Y sqrt d over the scan window.
  Int rbmax(cx.r_bound(q_max));
  Int Xb = Int(q_max) * abs(Int(cx.ub)) + rbmax * cx.wb;
  Int Yb = Int(q_max) * abs(Int(cx.vb));
  Int norm_bound = Xb * Xb + Yb * Yb * std::abs(cx.d);
  int Kbig = 1;
  Int pk(p);
  while (pk <= norm_bound) {
    pk *= p;
    ++Kbig;
  }
  cx.Kbig = Kbig + 1;
  Int pK = pow_long(p, static_cast<unsigned long>(cx.Kbig));
  if (mpz_sizeinbase(pK.get_mpz_t(), 2) > 100)
    throw DomainError("valuation ceiling too large for the fast path");
  PAdic root = hensel_sqrt(Int(cx.d), p, cx.Kbig, beta.branch);
  Int s = root.residue();
  Int invw;
  if (mpz_invert(invw.get_mpz_t(), Int(cx.wb).get_mpz_t(), pK.get_mpz_t()) == 0)
    throw DomainError("beta denominator not invertible mod p^K");
  auto to_i128 = [](const Int& v) {
    i128 r = 0;
    Int t = v;
    bool neg = t < 0;
    if (neg) t = -t;
    std::string str = t.get_str(16);
    for (char c : str) {
      r = r * 16 + (c <= '9' ? c - '0' : c - 'a' + 10);
    }
    return neg ? -r : r;
  };
  cx.pK = to_i128(pK);
  cx.s_lift = to_i128(s);
  cx.inv_wb = to_i128(invw);
  return cx;
}

// ---------------------------------------------------------------------------
// Generic scan engine (any RealSpec alpha, any PadicSpec beta)

struct GenericCtx {
  RealSpec alpha;
  PadicSpec beta;
  long p = 0;
  long k_max = 0;
  Rat alpha_abs_hi;  // rational upper bound for |alpha|
  std::optional<EmbeddingData> bemb;
  bool beta_rat_valued = false;
  Rat brat;
  Int beta_num, beta_den;  // rational beta as integers (den > 0)

  long r_bound(long q) const {
    Rat w = (alpha_abs_hi + 1) * Rat(q);
    Int c;
    mpz_cdiv_q(c.get_mpz_t(), w.get_num_mpz_t(), w.get_den_mpz_t());
    Int rb = c + pow_long(p, static_cast<unsigned long>(k_max));
    if (!rb.fits_slong_p()) throw DomainError("window too large");
    return rb.get_si();
  }

  long round_alpha(long q) const {
    switch (alpha.kind) {
      case RealSpec::Kind::Rational: {
        Rat t = alpha.rat * Rat(q) + Rat(1, 2);
        Int f;
        mpz_fdiv_q(f.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
        return f.get_si();
      }
      case RealSpec::Kind::Quad: {
        QuadElem ae = alpha.to_elem();
        Int wa = lcm(Int(ae.a().get_den()), Int(ae.b().get_den()));
        Int A = Int(ae.a().get_num() * (wa / ae.a().get_den())) * q;
        Int B = Int(ae.b().get_num() * (wa / ae.b().get_den())) * q;
        return round_quad(A, B, wa, ae.d()).get_si();
      }
      case RealSpec::Kind::Decimal: {
        return alpha.to_real().mul_int(Int(q)).round_guided().get_si();
      }
    }
    throw DomainError("unreachable");
  }

  // -1 / 0 / +1: order of |q alpha - r1| vs |q alpha - r2|; 0 = tie
  int dist_cmp(long q, long r1, long r2) const {
    switch (alpha.kind) {
      case RealSpec::Kind::Rational: {
        Rat d1 = alpha.rat * Rat(q) - Rat(r1);
        if (d1 < 0) d1 = -d1;
        Rat d2 = alpha.rat * Rat(q) - Rat(r2);
        if (d2 < 0) d2 = -d2;
        return d1 < d2 ? -1 : (d1 > d2 ? 1 : 0);
      }
      case RealSpec::Kind::Quad: {
        QuadElem ae = alpha.to_elem();
        Int wa = lcm(Int(ae.a().get_den()), Int(ae.b().get_den()));
        Int A = Int(ae.a().get_num() * (wa / ae.a().get_den())) * q;
        Int B = Int(ae.b().get_num() * (wa / ae.b().get_den())) * q;
        Int X1 = A - Int(r1) * wa, Y1 = B;
        Int X2 = A - Int(r2) * wa, Y2 = B;
        if (sign_quad_mpz(X1, Y1, ae.d()) < 0) {
          X1 = -X1;
          Y1 = -Y1;
        }
        if (sign_quad_mpz(X2, Y2, ae.d()) < 0) {
          X2 = -X2;
          Y2 = -Y2;
        }
        return sign_quad_mpz(X1 - X2, Y1 - Y2, ae.d());
      }
      case RealSpec::Kind::Decimal: {
        AdaptiveReal diff = (alpha.to_real().mul_int(Int(q)) - AdaptiveReal::from_int(Int(r1))).abs() -
                            (alpha.to_real().mul_int(Int(q)) - AdaptiveReal::from_int(Int(r2))).abs();
        try {
          return diff.sign();
        } catch (const PrecisionExhausted&) {
          return 0;
        }
      }
    }
    throw DomainError("unreachable");
  }

  PadicFactor valuation(long q, long r) const {
    if (beta_rat_valued) {
      Rat t = brat * Rat(q) - Rat(r);
      if (t == 0) return {true, 0};
      return {false, vp_rat(t, Int(p)).valuation};
    }
    QuadElem be = beta.to_elem();
    QuadElem diff = be.scale(Rat(q)) - QuadElem::from_rational(be.d(), Rat(r));
    return {false, bemb->vP(diff)};
  }

  RealBall product(long q, long r) const {
    const Prec prec = 192;
    PadicFactor f = valuation(q, r);
    if (f.infinite) return RealBall();
    Rat pf = f.v >= 0 ? Rat(1, pow_long(p, static_cast<unsigned long>(f.v)))
                      : Rat(pow_long(p, static_cast<unsigned long>(-f.v)));
    RealBall rf = [&]() {
      if (alpha.kind == RealSpec::Kind::Rational) {
        Rat t = alpha.rat * Rat(q) - Rat(r);
        if (t < 0) t = -t;
        return RealBall::from_rat(t, prec);
      }
      return (alpha.to_real().mul_int(Int(q)) - AdaptiveReal::from_int(Int(r)))
          .abs()
          .eval_settled(prec);
    }();
    Int mx = std::max(Int(q < 0 ? -q : q), Int(r < 0 ? -r : r));
    return RealBall::exact_int(mx, prec) * rf * RealBall::from_rat(pf, prec);
  }

  std::optional<Int> beta_class(long q, long k) const {
    Int pk = pow_long(p, static_cast<unsigned long>(k));
    if (beta_rat_valued) {
      if (beta_den % p == 0) return std::nullopt;
      Int invd;
      mpz_invert(invd.get_mpz_t(), beta_den.get_mpz_t(), pk.get_mpz_t());
      Int c = (Int(q) * beta_num % pk) * invd % pk;
      if (c < 0) c += pk;
      return c;
    }
    QuadElem be = beta.to_elem();
    Int wb = lcm(Int(be.a().get_den()), Int(be.b().get_den()));
    if (wb % p == 0) return std::nullopt;
    Int ubz = Int(be.a().get_num() * (wb / be.a().get_den()));
    Int vbz = Int(be.b().get_num() * (wb / be.b().get_den()));
    Int s = bemb->root_mod(k);
    Int invw;
    mpz_invert(invw.get_mpz_t(), wb.get_mpz_t(), pk.get_mpz_t());
    Int c = ((Int(q) * (ubz + vbz * s)) % pk) * invw % pk;
    if (c < 0) c += pk;
    return c;
  }
};

struct GenericBlockResult {
  unsigned long pairs = 0;
  struct Cand {
    long q, r;
    RealBall prod;
  };
  std::vector<Cand> cands;
};

GenericBlockResult scan_generic_block(const GenericCtx& cx, long q_from, long q_to,
                                      ScanStrategy strategy) {
  GenericBlockResult res;
  bool has_local = false;
  Rat best_hi;
  auto visit = [&](long q, long r) {
    RealBall prod = cx.product(q, r);
    ++res.pairs;
    Rat hi = prod.hi_rat();
    if (!has_local || hi < best_hi) {
      has_local = true;
      best_hi = hi;
      res.cands.push_back({q, r, prod});
    }
  };
  for (long q = q_from; q <= q_to; ++q) {
    long rb = cx.r_bound(q);
    long m = cx.round_alpha(q);
    if (strategy == ScanStrategy::Exhaustive) {
      auto emit = [&](long r) {
        if (r != 0 && r >= -rb && r <= rb) visit(q, r);
      };
      emit(m);
      // side order by a single distance comparison per q
      int fs = (std::labs(m) <= rb + 1) ? cx.dist_cmp(q, m + 1, m - 1) : 0;
      for (long o = 1; m - o >= -rb || m + o <= rb; ++o) {
        if (fs <= 0) {
          emit(m + o);
          emit(m - o);
        } else {
          emit(m - o);
          emit(m + o);
        }
      }
    } else {
      std::vector<long> rs;
      for (long k = 0; k <= cx.k_max; ++k) {
        long base;
        Int pkz = pow_long(cx.p, static_cast<unsigned long>(k));
        long pk = pkz.get_si();
        if (k == 0) {
          base = m;
        } else {
          auto c = cx.beta_class(q, k);
          if (!c.has_value()) continue;
          long cv = c->get_si();
          long delta = m - cv;
          long half = (pk - 1) / 2;
          long num = delta + half;
          long steps = num >= 0 ? num / pk : -((-num + pk - 1) / pk);
          base = cv + steps * pk;
        }
        for (long r : {base - pk, base, base + pk}) {
          if (r == 0 || r > rb || r < -rb) continue;
          rs.push_back(r);
        }
      }
      std::sort(rs.begin(), rs.end());
      rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
      std::stable_sort(rs.begin(), rs.end(), [&](long r1, long r2) {
        int c = cx.dist_cmp(q, r1, r2);
        if (c != 0) return c < 0;
        return r1 < r2;
      });
      for (long r : rs) visit(q, r);
    }
  }
  return res;
}

}  // namespace

std::vector<ScanRecordRow> scan_records(const RealSpec& alpha, const PadicSpec& beta,
                                        long p, long q_max, ScanStrategy strategy,
                                        const ScanOptions& opt) {
  if (q_max < 1) throw DomainError("q_max must be at least 1");
  if (fits_fast_path(alpha, beta, q_max, opt.k_max, p)) {
    QuadScanCtx cx = build_quad_ctx(alpha, beta, p, opt.k_max, q_max);
    auto blocks = run_quad_blocks(cx, q_max, strategy, opt.threads);
    return merge_quad_chain(cx, blocks, nullptr, nullptr);
  }
  GenericCtx cx;
  cx.alpha = alpha;
  cx.beta = beta;
  cx.p = p;
  cx.k_max = opt.k_max;
  switch (alpha.kind) {
    case RealSpec::Kind::Rational:
      cx.alpha_abs_hi = alpha.rat < 0 ? Rat(-alpha.rat) : alpha.rat;
      break;
    case RealSpec::Kind::Quad:
    case RealSpec::Kind::Decimal: {
      RealBall b = alpha.to_real().abs().eval_settled(96);
      cx.alpha_abs_hi = b.hi_rat();
      break;
    }
  }
  if (beta.kind == PadicSpec::Kind::Rational) {
    cx.beta_rat_valued = true;
    cx.brat = beta.rat;
  } else if (beta.qb == 0) {
    cx.beta_rat_valued = true;
    cx.brat = beta.qa;
  } else {
    cx.bemb.emplace(QuadField(beta.d), p, 2, beta.branch);
  }
  if (cx.beta_rat_valued) {
    cx.beta_num = Int(cx.brat.get_num());
    cx.beta_den = Int(cx.brat.get_den());
  }
  int threads = opt.threads < 1 ? 1 : opt.threads;
  std::vector<GenericBlockResult> blocks;
  if (threads == 1 || q_max < 64) {
    blocks.push_back(scan_generic_block(cx, 1, q_max, strategy));
  } else {
    long per = (q_max + threads - 1) / threads;
    blocks.resize(static_cast<size_t>(threads));
    std::vector<std::thread> ts;
    for (int i = 0; i < threads; ++i) {
      long from = 1 + per * i;
      long to = std::min(q_max, from + per - 1);
      if (from > to) continue;
      ts.emplace_back([&, i, from, to]() {
        blocks[static_cast<size_t>(i)] = scan_generic_block(cx, from, to, strategy);
      });
    }
    for (auto& t : ts) t.join();
  }
  std::vector<ScanRecordRow> chain;
  bool has_best = false;
  Rat best_hi;
  for (auto& b : blocks) {
    for (auto& c : b.cands) {
      Rat hi = c.prod.hi_rat();
      if (!has_best || hi < best_hi) {
        has_best = true;
        best_hi = hi;
        chain.push_back({c.q, c.r, c.prod});
      }
    }
  }
  return chain;
}

// ---------------------------------------------------------------------------
// Counterexample lower bound

BoundCertificate conjugate_lowe_impl(const Int& a, const Int& b, const Int& c, long p) {
  if (a == 0) throw NotIrreducible("leading coefficient must be nonzero");
  if (p == 2 || !is_prime(Int(p))) throw DomainError("p must be an odd prime");
  Int disc = b * b - 4 * a * c;
  if (disc == 0) throw NotIrreducible("discriminant is zero");
  Int sq;
  if (disc > 0 && is_square(disc, &sq)) throw NotIrreducible("polynomial splits over Q");
  if (disc < 0) throw NoRealRoots("negative discriminant");
  if (disc % p == 0) throw DomainError("p divides the discriminant");
  Int m;
  Int core = squarefree_core(disc, &m);
  if (!core.fits_slong_p()) throw DomainError("discriminant core too large");
  long d0 = core.get_si();
  Int dp = Int(d0) % p;
  if (dp < 0) dp += p;
  if (mpz_legendre(dp.get_mpz_t(), Int(p).get_mpz_t()) != 1)
    throw NoPAdicRoots("discriminant is not a square mod p");
  QuadElem r_plus(d0, Rat(-b, 2 * a), Rat(m, 2 * a));
  QuadElem r_minus(d0, Rat(-b, 2 * a), Rat(-m, 2 * a));
  bool plus_larger = (r_plus - r_minus).sign_real() > 0;
  QuadElem alpha_root = plus_larger ? r_plus : r_minus;
  QuadElem alpha_other = plus_larger ? r_minus : r_plus;
  EmbeddingData emb(QuadField(d0), p, 2, std::nullopt);
  // beta = image of alpha_root along the canonical branch; beta' its conjugate
  long vb = emb.vP(alpha_other);
  Rat a_abs_p = vp_rat(Rat(a), Int(p)).abs_p;
  Rat beta_other_abs =
      vb >= 0 ? Rat(1) : Rat(pow_long(p, static_cast<unsigned long>(-vb)));
  // c0 = 1/(|a| |a|_p (|alpha'|+1) max{1,|beta'|_p})
  QuadElem abs_other = alpha_other.sign_real() < 0 ? -alpha_other : alpha_other;
  QuadElem denom = abs_other + QuadElem::from_rational(d0, Rat(1));
  Rat scalar = Rat(1) / (Rat(abs(a)) * a_abs_p * beta_other_abs);
  QuadElem c0_exact = denom.inverse().scale(scalar);
  RealBall c0 = c0_exact.to_real().refine(48, -120);
  return BoundCertificate{a,  b,          c,          p,       d0, m, alpha_root,
                          alpha_other,    emb.branch(), a_abs_p,
                          beta_other_abs, c0_exact,   c0};
}

BoundCertificate conjugate_lower_bound(const Int& a, const Int& b, const Int& c, long p) {
  return conjugate_lowe_impl(a, b, c, p);
}

CertifiedScanResult scan_certify_conjugate(const BoundCertificate& cert, long q_max,
                                           long k_max, int threads) {
  auto t0 = std::chrono::steady_clock::now();
  RealSpec alpha = RealSpec::quad(cert.d_core, cert.alpha_root.a(),
                                  cert.alpha_root.b(), +1);
  PadicSpec beta = PadicSpec::quad(cert.d_core, cert.alpha_root.a(), cert.alpha_root.b(),
                                   cert.branch);
  if (!fits_fast_path(alpha, beta, q_max, k_max, cert.p))
    throw DomainError("certificate data outside the exact scan engine's bounds");
  QuadScanCtx cx = build_quad_ctx(alpha, beta, cert.p, k_max, q_max);
  cx.certify = true;
  Int cw = lcm(Int(cert.c0_exact.a().get_den()), Int(cert.c0_exact.b().get_den()));
  cx.e0 = Int(cert.c0_exact.a().get_num() * (cw / cert.c0_exact.a().get_den())).get_si();
  cx.e1 = Int(cert.c0_exact.b().get_num() * (cw / cert.c0_exact.b().get_den())).get_si();
  cx.eden = cw.get_si();
  auto blocks = run_quad_blocks(cx, q_max, ScanStrategy::Exhaustive, threads);
  CertifiedScanResult res;
  unsigned long viol = 0;
  res.chain = merge_quad_chain(cx, blocks, &res.pairs_checked, &viol);
  res.all_at_least_c0 = viol == 0;
  auto t1 = std::chrono::steady_clock::now();
  res.seconds = std::chrono::duration<double>(t1 - t0).count();
  return res;
}

}  // namespace ek
