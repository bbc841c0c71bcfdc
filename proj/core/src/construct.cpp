#include "ek/construct.hpp"

#include <algorithm>
#include <climits>

namespace ek {

namespace {

// Least positive integer G with G*x an algebraic integer (bounded search
// through the divisors that can clear the coordinate denominators).
Int least_clearing_integer(const QuadElem& x) {
  Int cap = lcm(Int(x.a().get_den()), Int(x.b().get_den()));
  cap *= 2;  // half-coordinate orders
  for (Int g = 1; g <= cap; ++g) {
    if (x.scale(Rat(g)).is_algebraic_integer()) return g;
  }
  throw DomainError("no clearing integer below the bound (internal)");
}

// Least positive G with G*x and G*x*y both algebraic integers.
Int clearing_pair(const QuadElem& x, const QuadElem& y) {
  QuadElem xy = x * y;
  Int cap = lcm(lcm(Int(x.a().get_den()), Int(x.b().get_den())),
                lcm(Int(xy.a().get_den()), Int(xy.b().get_den())));
  cap *= 2;
  for (Int g = 1; g <= cap; ++g) {
    if (x.scale(Rat(g)).is_algebraic_integer() && xy.scale(Rat(g)).is_algebraic_integer())
      return g;
  }
  throw DomainError("no clearing integer below the bound (internal)");
}

// Exact min coordinate valuation of a PAdicQuad, or throw when the tracked
// precision cannot pin it.
long exact_min_valuation(const PAdicQuad& t) {
  const PAdic& a = t.c0();
  const PAdic& b = t.c1();
  long best = LONG_MAX;
  if (!a.zeroish()) best = std::min(best, a.valuation());
  if (!b.zeroish()) best = std::min(best, b.valuation());
  long unknown_floor = LONG_MAX;
  if (a.unknown_zero()) unknown_floor = std::min(unknown_floor, a.N());
  if (b.unknown_zero()) unknown_floor = std::min(unknown_floor, b.N());
  if (best == LONG_MAX || best > unknown_floor)
    throw InsufficientPrecision("coordinate valuation unresolved at this precision");
  return best;
}

EmbeddingData make_embedding(const QuadField& f, long p, long N,
                             const std::optional<Int>& branch) {
  EmbeddingData plain(f, p, N, std::nullopt);
  if (plain.split() && branch.has_value()) return EmbeddingData(f, p, N, branch);
  return plain;
}

RealBall exact_rat_ball(const Rat& q) { return RealBall::from_rat(q, 128); }

// Shared record assembly: the p-adic factor is exact, the real factor is a
// certified enclosure, and the products inherit both.
void finish_record(ApproxRecord& rec, const RealSpec& alpha, long p) {
  AdaptiveReal err;
  bool exact_err = false;
  Rat err_exact;
  if (rec.exact_qr && alpha.kind == RealSpec::Kind::Rational) {
    err_exact = alpha.rat * Rat(rec.q) - Rat(rec.r);
    if (err_exact < 0) err_exact = -err_exact;
    exact_err = true;
  }
  Int maxqr = rec.exact_qr ? std::max(abs(rec.q), abs(rec.r)) : Int(0);
  if (exact_err) {
    rec.real_err = exact_rat_ball(err_exact);
  } else {
    size_t qbits = rec.exact_qr ? mpz_sizeinbase(maxqr.get_mpz_t(), 2) : 64;
    err = (alpha.to_real().mul_int(rec.q) - AdaptiveReal::from_int(rec.r)).abs();
    rec.real_err = err.refine(48, -static_cast<long>(qbits) - 96);
  }
  rec.max_qr = RealBall::exact_int(maxqr, 128);
  Rat pfac;
  if (rec.vp_infinite) {
    pfac = 0;
  } else if (rec.vp >= 0) {
    pfac = Rat(1, pow_long(p, static_cast<unsigned long>(rec.vp)));
  } else {
    pfac = Rat(pow_long(p, static_cast<unsigned long>(-rec.vp)));
  }
  rec.ek_plus = rec.max_qr * rec.real_err * exact_rat_ball(pfac);
  rec.log_product = rec.ek_plus * rec.max_qr.log();
}

}  // namespace

GammaChoice choose_gamma_sign(const RealSpec& alpha, const QuadField& field,
                              const QuadElem& beta_elem) {
  if (beta_elem.is_rational()) throw InadmissibleInput("beta does not generate the field");
  Rat tr = beta_elem.trace(), nr = beta_elem.norm();
  int s = 0;
  switch (alpha.kind) {
    case RealSpec::Kind::Rational: {
      Rat v = alpha.rat * alpha.rat - tr * alpha.rat + nr;
      if (v == 0) throw InadmissibleInput("alpha is a root of beta's minimal polynomial");
      s = sgn(v);
      break;
    }
    case RealSpec::Kind::Quad: {
      QuadElem ae = alpha.to_elem();
      if (ae.d() == field.d && (ae == beta_elem || ae == beta_elem.conj()))
        throw InadmissibleInput("alpha is a root of beta's minimal polynomial");
      QuadElem prod = ae * ae - ae.scale(tr) + QuadElem::from_rational(ae.d(), nr);
      s = prod.sign_real();
      if (s == 0) throw InadmissibleInput("alpha is a root of beta's minimal polynomial");
      break;
    }
    case RealSpec::Kind::Decimal: {
      AdaptiveReal ar = alpha.to_real();
      AdaptiveReal prod = ar * ar - ar.mul_rat(tr) + AdaptiveReal::from_rat(nr);
      s = prod.sign();  // PrecisionExhausted when the interval encloses a root
      if (s == 0) throw InadmissibleInput("alpha is a root of beta's minimal polynomial");
      break;
    }
  }
  int i = s < 0 ? 0 : 1;
  QuadElem base = i == 0 ? QuadElem::from_rational(field.d, Rat(1))
                         : QuadElem(field.d, Rat(0), Rat(1));
  for (Int g = 1; g <= Int(1000000); ++g) {
    QuadElem gamma = base.scale(Rat(g));
    if (gamma.is_algebraic_integer() && (gamma * beta_elem).is_algebraic_integer())
      return {gamma, i, g};
  }
  throw DomainError("no admissible gamma below the bound");
}

// ---------------------------------------------------------------------------
// Theorem 1.1, imaginary case

namespace {

QuadElem check_beta_imaginary(const PadicSpec& beta) {
  if (beta.kind != PadicSpec::Kind::Quad)
    throw InadmissibleInput("beta must be an imaginary quadratic p-adic spec");
  QuadElem b = beta.to_elem();
  if (b.d() >= 0) throw InadmissibleInput("beta must be imaginary quadratic (d < 0)");
  if (b.is_rational()) throw InadmissibleInput("beta does not generate the field");
  return b;
}

}  // namespace

Thm1ImaginaryRun::Thm1ImaginaryRun(const RealSpec& alpha, const PadicSpec& beta, long p,
                                   const ConstructOptions& opt)
    : alpha_(alpha),
      beta_(check_beta_imaginary(beta)),
      p_(p),
      opt_(opt),
      emb_(make_embedding(QuadField(beta_.d()), p, opt.padic_N, beta.branch)),
      omega1_(QuadElem::from_rational(beta_.d(), Rat(0))),
      t_(0),
      base_vp_(0) {
  ImaginaryPUnit iw = make_omega1_imaginary(QuadField(beta_.d()), emb_, opt_.k_max,
                                            opt_.coeff_bound);
  omega1_ = iw.omega1;
  t_ = iw.t;
  units_.kind = UnitSystem::Kind::ImaginaryThm1;
  units_.d = beta_.d();
  units_.p = p_;
  units_.omega1 = omega1_;
  units_.eta = iw.eta;
  units_.t = t_;
  gamma_G_ = least_clearing_integer(beta_);
  // v_p(q beta - r) = v_P((beta - conj beta) * conj gamma) + 2nt; gamma is a
  // rational integer here so only beta's difference contributes.
  QuadElem bd = beta_ - beta_.conj();
  base_vp_ = emb_.vP(bd) + vp_int(gamma_G_, Int(p_));
  // theta = arg(psi(omega1)) / pi
  theta_ = AdaptiveReal::atan2(omega1_.complex_im(), omega1_.complex_re()) / AdaptiveReal::pi();
  // -e^{2 i pi xi} = (alpha - conj psi(beta)) / (alpha - psi(beta)); with
  // z = alpha - psi(beta) the right side is conj(z)/z, so
  // xi = -arg(z)/pi - 1/2 (mod 1).
  AdaptiveReal re_z = alpha_.to_real() - AdaptiveReal::from_rat(beta_.a());
  AdaptiveReal im_z = -beta_.complex_im();
  xi_ = -(AdaptiveReal::atan2(im_z, re_z) / AdaptiveReal::pi()) - AdaptiveReal::from_rat(Rat(1, 2));
}

ApproxRecord Thm1ImaginaryRun::record_at(long long n) const {
  if (n < 1) throw DomainError("n must be positive");
  QuadElem w = omega1_.pow(n);
  QuadElem x = w.scale(Rat(gamma_G_));
  Rat qt = x.trace();
  Rat rt = (beta_ * x).trace();
  if (qt.get_den() != 1 || rt.get_den() != 1)
    throw DomainError("trace of an algebraic integer must be integral (internal)");
  ApproxRecord rec;
  rec.kind = "thm1_imaginary";
  rec.q = Int(qt.get_num());
  rec.r = Int(rt.get_num());
  rec.n1 = n;
  QuadElem diff = beta_.scale(qt) - QuadElem::from_rational(beta_.d(), rt);
  long v = emb_.vP(diff);
  long v_cf = base_vp_ + 2 * static_cast<long>(n) * t_;
  if (v != v_cf)
    throw DomainError("closed-form valuation disagrees with direct evaluation (internal)");
  rec.vp = v;
  finish_record(rec, alpha_, p_);
  return rec;
}

std::vector<ApproxRecord> Thm1ImaginaryRun::records(size_t count) const {
  std::vector<ApproxRecord> out;
  std::vector<Int> ns = ostrowski_sequence(theta_, xi_, count);
  out.reserve(ns.size());
  for (const Int& n : ns) {
    if (!n.fits_slong_p()) throw DomainError("selected index exceeds the machine range");
    out.push_back(record_at(n.get_si()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Theorem 1.1, real case

namespace {

QuadElem check_beta_real(const PadicSpec& beta) {
  if (beta.kind != PadicSpec::Kind::Quad)
    throw InadmissibleInput("beta must be a real quadratic p-adic spec");
  QuadElem b = beta.to_elem();
  if (b.d() <= 1) throw InadmissibleInput("beta must be real quadratic (d > 1)");
  if (b.is_rational()) throw InadmissibleInput("beta does not generate the field");
  return b;
}

}  // namespace

Thm1RealRun::Thm1RealRun(const RealSpec& alpha, const PadicSpec& beta, long p,
                         const ConstructOptions& opt)
    : alpha_(alpha),
      beta_(check_beta_real(beta)),
      p_(p),
      opt_(opt),
      emb_(make_embedding(QuadField(beta_.d()), p, opt.padic_N, beta.branch)),
      omega1_(QuadElem::from_rational(beta_.d(), Rat(0))),
      omega2_(QuadElem::from_rational(beta_.d(), Rat(0))),
      t_(0),
      gamma_{QuadElem::from_rational(beta_.d(), Rat(1)), 0, Int(1)},
      base_vp_(0) {
  QuadField field(beta_.d());
  omega1_ = make_omega1_real(field.d);
  PUnitPair pu = p_unit_search(field, emb_, opt_.k_max, opt_.coeff_bound);
  omega2_ = pu.omega2;
  t_ = pu.t;
  // Lemma-level invariants, checked exactly.
  if (omega1_.norm() != 1) throw DomainError("omega1 must have norm 1");
  if ((omega1_ - QuadElem::from_rational(field.d, Rat(1))).sign_real() <= 0)
    throw DomainError("omega1 must exceed 1");
  QuadElem c = omega1_.conj();
  if (c.sign_real() <= 0 || (c - QuadElem::from_rational(field.d, Rat(1))).sign_real() >= 0)
    throw DomainError("conj(omega1) must lie in (0,1)");
  if (emb_.vP(omega2_) != 0) throw DomainError("omega2 must be a p-adic unit on the branch");
  if (emb_.vP(omega2_.conj()) != 2 * t_) throw DomainError("conj(omega2) valuation must be 2t");
  if (omega2_.norm() != Rat(pow_long(p_, static_cast<unsigned long>(2 * t_))))
    throw DomainError("N(omega2) must equal p^(2t)");
  if (omega2_.sign_real() <= 0) throw DomainError("omega2 must embed positively");
  if (!omega2_.is_algebraic_integer()) throw DomainError("omega2 must be integral");
  units_.kind = UnitSystem::Kind::RealThm1;
  units_.d = field.d;
  units_.p = p_;
  units_.omega1 = omega1_;
  units_.omega2 = omega2_;
  units_.eta = pu.eta;
  units_.t = t_;
  gamma_ = choose_gamma_sign(alpha_, field, beta_);
  base_vp_ = emb_.vP((beta_ - beta_.conj()) * gamma_.gamma.conj());
  L1_ = omega1_.to_real().log();
  L2_ = omega2_.to_real().log() -
        AdaptiveReal::from_int(Int(p_)).log().mul_int(Int(t_));
  AdaptiveReal ar = alpha_.to_real();
  T_ = (ar - beta_.conj().to_real()).abs().log() - (ar - beta_.to_real()).abs().log();
}

AdaptiveReal Thm1RealRun::bracket_defect(long long n1, long long n2) const {
  return (L1_.mul_int(from_ll(n1)) + L2_.mul_int(from_ll(n2)) - T_.mul_rat(Rat(1, 2))).abs();
}

ApproxRecord Thm1RealRun::record_at(long long n1, long long n2) const {
  if (n2 < 1) throw DomainError("n2 must be positive");
  QuadElem w = omega1_.pow(n1) * omega2_.pow(n2);
  QuadElem x = gamma_.gamma * w;
  Rat qt = x.trace();
  Rat rt = (beta_ * x).trace();
  if (qt.get_den() != 1 || rt.get_den() != 1)
    throw DomainError("trace of an algebraic integer must be integral (internal)");
  ApproxRecord rec;
  rec.kind = "thm1_real";
  rec.q = Int(qt.get_num());
  rec.r = Int(rt.get_num());
  rec.n1 = n1;
  rec.n2 = n2;
  QuadElem diff = beta_.scale(qt) - QuadElem::from_rational(beta_.d(), rt);
  long v = emb_.vP(diff);
  long v_cf = base_vp_ + 2 * static_cast<long>(n2) * t_;
  if (v != v_cf)
    throw DomainError("closed-form valuation disagrees with direct evaluation (internal)");
  rec.vp = v;
  finish_record(rec, alpha_, p_);
  return rec;
}

std::vector<ApproxRecord> Thm1RealRun::records(size_t count) const {
  std::vector<ApproxRecord> out;
  AdaptiveReal theta = L2_ / L1_;
  AdaptiveReal xi = T_.mul_rat(Rat(1, 2)) / L1_;
  size_t want = count + 12;
  std::vector<Int> ns = ostrowski_sequence(theta, xi, want);
  for (const Int& n2 : ns) {
    if (out.size() >= count) break;
    if (!n2.fits_slong_p()) throw DomainError("selected index exceeds the machine range");
    long long n2v = n2.get_si();
    AdaptiveReal guide = (T_.mul_rat(Rat(1, 2)) - L2_.mul_int(n2)) / L1_;
    Int n1 = guide.round_guided();
    if (!n1.fits_slong_p()) throw DomainError("selected index exceeds the machine range");
    long long n1v = n1.get_si();
    if (!certify_le(bracket_defect(n1v, n2v), Rat(1, 2))) continue;
    out.push_back(record_at(n1v, n2v));
  }
  if (out.size() < count)
    throw PrecisionExhausted("not enough bracket-certified pairs; raise the count margin");
  return out;
}

// ---------------------------------------------------------------------------
// Theorem 1.2

namespace {

QuadElem check_alpha_quad(const RealSpec& alpha) {
  if (alpha.kind != RealSpec::Kind::Quad)
    throw InadmissibleInput("alpha must be a real quadratic spec");
  QuadElem a = alpha.to_elem();
  if (a.d() <= 1) throw InadmissibleInput("alpha must be real quadratic (d > 1)");
  if (a.is_rational()) throw InadmissibleInput("alpha does not generate a quadratic field");
  return a;
}

}  // namespace

Thm2Run::Thm2Run(const RealSpec& alpha, const PadicSpec& beta, long p,
                 const ConstructOptions& opt)
    : alpha_(alpha),
      beta_spec_(beta),
      p_(p),
      opt_(opt),
      alpha_elem_(check_alpha_quad(alpha)),
      emb_(embed_field(QuadField(alpha_elem_.d()), p, opt.padic_N)),
      zeta_(QuadElem::from_rational(alpha_elem_.d(), Rat(0))),
      gamma_{QuadElem::from_rational(alpha_elem_.d(), Rat(1)), 0, Int(1)},
      selector_(PAdic::zero(p)) {
  // f(beta) != 0, decided exactly.
  Rat tr = alpha_elem_.trace(), nr = alpha_elem_.norm();
  if (beta_spec_.kind == PadicSpec::Kind::Rational) {
    Rat v = beta_spec_.rat * beta_spec_.rat - tr * beta_spec_.rat + nr;
    if (v == 0) throw InadmissibleInput("beta is a root of alpha's minimal polynomial");
  } else {
    QuadElem be = beta_spec_.to_elem();
    QuadElem v = be * be - be.scale(tr) + QuadElem::from_rational(be.d(), nr);
    if (v.is_zero()) throw InadmissibleInput("beta is a root of alpha's minimal polynomial");
    // validate the branch eagerly
    EmbeddingData check = make_embedding(QuadField(be.d()), p_, 8, beta_spec_.branch);
    if (!check.split())
      throw InadmissibleInput("beta's field must split at p for beta to lie in Q_p");
  }
  ZetaResult z = normalize_zeta(alpha_elem_.d(), p_, opt_.padic_N);
  zeta_ = z.zeta;
  nu_ = z.nu;
  units_.kind = UnitSystem::Kind::Thm2;
  units_.d = alpha_elem_.d();
  units_.p = p_;
  units_.zeta = zeta_;
  units_.nu = nu_;
  build_gamma();
  build_selector();
  // Fixed bracket for q_n |q_n alpha - r_n| over n >= 1:
  // |(alpha - tau alpha) tau gamma| * (psi gamma -+ |psi tau gamma| zeta^-2).
  AdaptiveReal lead =
      ((alpha_elem_ - alpha_elem_.conj()).to_real() * gamma_.gamma.conj().to_real()).abs();
  AdaptiveReal g = gamma_.gamma.to_real();
  AdaptiveReal gc_abs = gamma_.gamma.conj().to_real().abs();
  AdaptiveReal zpow = zeta_.to_real().pow_si(-2);
  AdaptiveReal lo = lead * (g - gc_abs * zpow);
  AdaptiveReal hi = lead * (g + gc_abs * zpow);
  bracket_lo_ = lo.refine(40, -80);
  bracket_hi_ = hi.refine(40, -80);
  if (!bracket_lo_.is_positive())
    throw PrecisionExhausted("product bracket did not separate from zero");
}

void Thm2Run::build_gamma() {
  Rat tr = alpha_elem_.trace();
  Rat tr2 = (alpha_elem_ * alpha_elem_).trace();
  long d = alpha_elem_.d();
  // Degenerate denominator: beta = Tr(alpha)/2 has the direct solution 1.
  bool degenerate = false;
  if (beta_spec_.kind == PadicSpec::Kind::Rational) {
    degenerate = (2 * beta_spec_.rat == tr);
  } else {
    QuadElem be = beta_spec_.to_elem();
    degenerate = be.is_rational() && 2 * be.a() == tr;
  }
  if (degenerate) {
    QuadElem one = QuadElem::from_rational(d, Rat(1));
    Int G = clearing_pair(one, alpha_elem_);
    gamma_ = {one.scale(Rat(G)), 0, G};
    lambda_one_ = true;
    return;
  }
  // Exact rational t1 when beta is rational (or rational-valued).
  std::optional<Rat> t1_exact;
  if (beta_spec_.kind == PadicSpec::Kind::Rational) {
    Rat b = beta_spec_.rat;
    t1_exact = (-b * tr + tr2) / (2 * b - tr);
  } else {
    QuadElem be = beta_spec_.to_elem();
    if (be.is_rational()) {
      Rat b = be.a();
      t1_exact = (-b * tr + tr2) / (2 * b - tr);
    } else {
      QuadElem num = -be.scale(tr) + QuadElem::from_rational(be.d(), tr2);
      QuadElem den = be.scale(Rat(2)) - QuadElem::from_rational(be.d(), tr);
      // t1 rational iff num * conj(den) is rational.
      QuadElem prod = num * den.conj();
      if (prod.is_rational()) t1_exact = prod.a() / den.norm();
    }
  }
  if (t1_exact.has_value()) {
    Int x(t1_exact->get_num()), y(t1_exact->get_den());
    QuadElem g0 = alpha_elem_.scale(Rat(y)) + QuadElem::from_rational(d, Rat(x));
    Int G = clearing_pair(g0, alpha_elem_);
    QuadElem g = g0.scale(Rat(G));
    if (g.sign_real() < 0) g = -g;
    // The defining identity of the exact solution: Tr(gamma) beta = Tr(gamma alpha).
    if (beta_spec_.kind == PadicSpec::Kind::Rational ||
        beta_spec_.to_elem().is_rational()) {
      Rat b = beta_spec_.kind == PadicSpec::Kind::Rational ? beta_spec_.rat
                                                           : beta_spec_.to_elem().a();
      if (g.trace() * b != (g * alpha_elem_).trace())
        throw DomainError("exact gamma identity failed (internal)");
    }
    gamma_ = {g, 0, G};
    lambda_one_ = true;
    return;
  }
  // beta genuinely irrational in Q_p: approximate t1 p-adically and verify
  // the lambda inequality exactly, escalating the congruence depth.
  lambda_one_ = false;
  QuadElem be = beta_spec_.to_elem();
  QuadField fb(be.d());
  long NW = opt_.padic_N;
  EmbeddingData embB = make_embedding(fb, p_, NW, beta_spec_.branch);
  auto beta_at = [&](long K) { return embB.map(be, K); };
  PAdic t1 = [&]() {
    PAdic b = beta_at(NW);
    PAdic num = -b.mul_int(Int(tr.get_num())).div_int(Int(tr.get_den())) +
                PAdic::from_rat(tr2, p_, NW);
    PAdic den = b.mul_int(Int(2)) - PAdic::from_rat(tr, p_, NW);
    return num / den;
  }();
  long vt1 = t1.zeroish() ? 0 : t1.valuation();
  Int y = vt1 < 0 ? pow_long(p_, static_cast<unsigned long>(-vt1)) : Int(1);
  // target: |lambda - 1| < |phi(zeta) - 1|
  long v_z1 = [&]() {
    if (emb_.split()) {
      PAdic z = emb_.map(zeta_, NW) - PAdic::one(p_, NW);
      return z.zeroish() ? z.N() : z.valuation();
    }
    PAdicQuad z = emb_.map_inert(zeta_, NW);
    PAdicQuad one(PAdic::one(p_, NW), PAdic::zero(p_), alpha_elem_.d());
    return (z - one).valuation_lower();
  }();
  PAdic t1y = t1.mul_int(y);
  for (long M = std::max(v_z1 + 1, 1L); M <= NW - 4; ++M) {
    if (t1y.N() < M) throw InsufficientPrecision("raise padic_N for the gamma search");
    Int x = t1y.residue_mod(M);
    QuadElem g0 = alpha_elem_.scale(Rat(y)) + QuadElem::from_rational(d, Rat(x));
    if (g0.is_zero()) continue;
    Int G = clearing_pair(g0, alpha_elem_);
    QuadElem g = g0.scale(Rat(G));
    if (g.sign_real() < 0) g = -g;
    // verify (lambda - 1) valuation strictly above v(phi(zeta) - 1)
    bool ok = false;
    if (emb_.split()) {
      PAdic bp = beta_at(NW);
      PAdic fa = emb_.map(alpha_elem_, NW);
      PAdic fac = emb_.map_conj(alpha_elem_, NW);
      PAdic fg = emb_.map(g, NW);
      PAdic fgc = emb_.map_conj(g, NW);
      PAdic lambda = -((bp - fac) * fgc) / ((bp - fa) * fg);
      PAdic w = lambda - PAdic::one(p_, NW);
      ok = w.valuation_lower() > v_z1;
    } else {
      PAdic bp = beta_at(NW);
      PAdicQuad bq(bp, PAdic::zero(p_), d);
      PAdicQuad fa = emb_.map_inert(alpha_elem_, NW);
      PAdicQuad fg = emb_.map_inert(g, NW);
      PAdicQuad lambda = -((bq - fa.conj()) * fg.conj()) / ((bq - fa) * fg);
      PAdicQuad one(PAdic::one(p_, NW), PAdic::zero(p_), d);
      PAdicQuad w = lambda - one;
      ok = w.valuation_lower() > v_z1;
    }
    if (ok) {
      gamma_ = {g, 0, G};
      return;
    }
  }
  throw PrecisionExhausted("no gamma verified the lambda inequality below the cap");
}

void Thm2Run::build_selector() {
  long NW = opt_.padic_N;
  long d = alpha_elem_.d();
  if (emb_.split()) {
    PAdic z = emb_.map(zeta_, NW);
    PAdic logz = padic_log(z);
    PAdic two_logz = logz.mul_int(Int(2));
    if (two_logz.zeroish())
      throw InsufficientPrecision("log of zeta unresolved; raise padic_N");
    vlog_ = two_logz.valuation();
    if (lambda_one_) {
      selector_ = PAdic::zero(p_);
      inert_coord_prec_ = LONG_MAX;
    } else {
      PAdic bp = [&]() {
        QuadElem be = beta_spec_.to_elem();
        EmbeddingData embB = make_embedding(QuadField(be.d()), p_, NW, beta_spec_.branch);
        return embB.map(be, NW);
      }();
      PAdic fa = emb_.map(alpha_elem_, NW);
      PAdic fac = emb_.map_conj(alpha_elem_, NW);
      PAdic fg = emb_.map(gamma_.gamma, NW);
      PAdic fgc = emb_.map_conj(gamma_.gamma, NW);
      PAdic lambda = -((bp - fac) * fgc) / ((bp - fa) * fg);
      selector_ = padic_log(lambda) / two_logz;
      inert_coord_prec_ = LONG_MAX;
    }
    // base valuation v_p((beta - phi alpha) phi gamma)
    PAdic bp = [&]() {
      if (beta_spec_.kind == PadicSpec::Kind::Rational)
        return PAdic::from_rat(beta_spec_.rat, p_, NW);
      QuadElem be = beta_spec_.to_elem();
      EmbeddingData embB = make_embedding(QuadField(be.d()), p_, NW, beta_spec_.branch);
      return embB.map(be, NW);
    }();
    PAdic t = (bp - emb_.map(alpha_elem_, NW)) * emb_.map(gamma_.gamma, NW);
    if (t.zeroish()) throw PrecisionExhausted("beta - phi(alpha) unresolved; raise padic_N");
    base_vp_ = t.valuation();
  } else {
    PAdicQuad z = emb_.map_inert(zeta_, NW);
    PAdicQuad logz = padic_log(z);
    PAdicQuad two_logz = logz + logz;
    vlog_ = exact_min_valuation(two_logz);
    if (lambda_one_) {
      selector_ = PAdic::zero(p_);
      inert_coord_prec_ = LONG_MAX;
    } else {
      PAdic bp = [&]() {
        QuadElem be = beta_spec_.to_elem();
        EmbeddingData embB = make_embedding(QuadField(be.d()), p_, NW, beta_spec_.branch);
        return embB.map(be, NW);
      }();
      PAdicQuad bq(bp, PAdic::zero(p_), d);
      PAdicQuad fa = emb_.map_inert(alpha_elem_, NW);
      PAdicQuad fg = emb_.map_inert(gamma_.gamma, NW);
      PAdicQuad lambda = -((bq - fa.conj()) * fg.conj()) / ((bq - fa) * fg);
      PAdicQuad ratio = padic_log(lambda) / two_logz;
      const PAdic& c1 = ratio.c1();
      if (!c1.zeroish())
        throw InertProjectionFailure("sqrt(d)-coordinate of the log ratio is nonzero");
      inert_coord_prec_ = c1.exact_zero() ? LONG_MAX : c1.N();
      selector_ = ratio.c0();
    }
    PAdic b0 = [&]() {
      if (beta_spec_.kind == PadicSpec::Kind::Rational)
        return PAdic::from_rat(beta_spec_.rat, p_, NW);
      QuadElem be = beta_spec_.to_elem();
      EmbeddingData embB = make_embedding(QuadField(be.d()), p_, NW, beta_spec_.branch);
      return embB.map(be, NW);
    }();
    PAdicQuad bq(b0, PAdic::zero(p_), d);
    PAdicQuad t = (bq - emb_.map_inert(alpha_elem_, NW)) * emb_.map_inert(gamma_.gamma, NW);
    base_vp_ = exact_min_valuation(t);
  }
  if (!lambda_one_) {
    // |selector| <= 1 (integrality of the ratio)
    if (!selector_.zeroish() && selector_.valuation() < 0)
      throw DomainError("log ratio fell outside Z_p (internal)");
  }
}

Int Thm2Run::select_n(long N) const {
  // Congruence depth: mod p^N per the construction, deepened when the
  // additive constants would otherwise undershoot the valuation target.
  long M = std::max(N, N - (base_vp_ + vlog_));
  if (!selector_.exact_zero() && selector_.N() < M)
    throw InsufficientPrecision("selector precision below the target; raise padic_N");
  Int pM = pow_long(p_, static_cast<unsigned long>(M));
  Int n = selector_.exact_zero() ? Int(0) : selector_.residue_mod(M);
  AdaptiveReal g = gamma_.gamma.to_real();
  AdaptiveReal gc = gamma_.gamma.conj().to_real();
  AdaptiveReal zr = zeta_.to_real();
  for (int tries = 0; tries < 64; ++tries) {
    if (n >= 1) {
      if (!n.fits_slong_p()) throw DomainError("selected index exceeds the machine range");
      AdaptiveReal qn = g * zr.pow_si(n.get_si()) + gc * zr.pow_si(-n.get_si());
      if (qn.sign() > 0) return n;
    }
    n += pM;
  }
  throw PrecisionExhausted("positivity threshold not reached within the class");
}

ApproxRecord Thm2Run::record_for(long N) const {
  if (N <= 0) throw DomainError("N must be positive");
  Int n = select_n(N);
  long long nv = n.get_si();
  ApproxRecord rec;
  rec.kind = "thm2";
  rec.n_big = n;
  rec.targetN = N;
  // Decide materialization from the decimal size of zeta^n.
  RealBall zlog = zeta_.to_real().log().refine(20, -20);
  Rat digits_est = zlog.hi_rat() * Rat(n) / Rat(Rat(2302585, 1000000));  // ln 10
  bool materialize = digits_est <= Rat(opt_.qr_digit_cap);
  long d = alpha_elem_.d();
  // Closed-form valuation: v((beta - phi alpha) phi gamma) + v(phi zeta^{2n} - lambda).
  long v_second;  // v(zeta^{2n} - lambda) = vlog + v(n - c)
  {
    PAdic nmc = PAdic::from_int(n, p_, std::max(8L, opt_.padic_N)) - selector_;
    if (nmc.exact_zero()) throw DomainError("n matched the selector exactly (internal)");
    if (nmc.zeroish())
      throw InsufficientPrecision("v_p(n - c) unresolved; raise padic_N");
    v_second = vlog_ + nmc.valuation();
  }
  long v_cf = base_vp_ + v_second;
  // Direct p-adic route at precision v_cf + guard.
  long K = v_cf + 8;
  long vp_direct;
  bool vp_inf = false;
  {
    PAdic qn_p = PAdic::zero(p_), rn_p = PAdic::zero(p_);
    if (emb_.split()) {
      PAdic fz = emb_.map(zeta_, K + 4);
      PAdic fzc = emb_.map_conj(zeta_, K + 4);
      PAdic fg = emb_.map(gamma_.gamma, K + 4);
      PAdic fgc = emb_.map_conj(gamma_.gamma, K + 4);
      PAdic fa = emb_.map(alpha_elem_, K + 4);
      PAdic fac = emb_.map_conj(alpha_elem_, K + 4);
      PAdic zn = fz.pow(n), znc = fzc.pow(n);
      qn_p = fg * zn + fgc * znc;
      rn_p = fa * fg * zn + fac * fgc * znc;
    } else {
      PAdicQuad fz = emb_.map_inert(zeta_, K + 4);
      PAdicQuad fg = emb_.map_inert(gamma_.gamma, K + 4);
      PAdicQuad fa = emb_.map_inert(alpha_elem_, K + 4);
      PAdicQuad zn = fz.pow(n);
      PAdicQuad znc = fz.conj().pow(n);
      PAdicQuad q2 = fg * zn + fg.conj() * znc;
      PAdicQuad r2 = fa * fg * zn + (fa * fg).conj() * znc;
      if (!q2.c1().zeroish() || !r2.c1().zeroish())
        throw DomainError("trace lost its rationality (internal)");
      qn_p = q2.c0();
      rn_p = r2.c0();
    }
    PAdic bp = [&]() {
      if (beta_spec_.kind == PadicSpec::Kind::Rational)
        return PAdic::from_rat(beta_spec_.rat, p_, K + 4);
      QuadElem be = beta_spec_.to_elem();
      EmbeddingData embB = make_embedding(QuadField(be.d()), p_, K + 4, beta_spec_.branch);
      return embB.map(be, K + 4);
    }();
    PAdic diff = qn_p * bp - rn_p;
    if (diff.zeroish()) {
      vp_direct = diff.N();  // at least this; the closed form pins it
      if (v_cf < vp_direct) vp_direct = v_cf;
    } else {
      vp_direct = diff.valuation();
    }
  }
  if (vp_direct != v_cf)
    throw DomainError("closed-form valuation disagrees with direct evaluation (internal)");
  rec.vp = v_cf;
  rec.vp_infinite = vp_inf;
  if (rec.vp < N) throw DomainError("valuation target missed (internal)");
  AdaptiveReal zr = zeta_.to_real();
  AdaptiveReal g = gamma_.gamma.to_real();
  AdaptiveReal gc = gamma_.gamma.conj().to_real();
  AdaptiveReal fa = alpha_elem_.to_real();
  AdaptiveReal fac = alpha_elem_.conj().to_real();
  if (materialize) {
    QuadElem w = zeta_.pow(nv);
    QuadElem x = gamma_.gamma * w;
    Rat qt = x.trace();
    Rat rt = (alpha_elem_ * x).trace();
    if (qt.get_den() != 1 || rt.get_den() != 1)
      throw DomainError("trace of an algebraic integer must be integral (internal)");
    rec.q = Int(qt.get_num());
    rec.r = Int(rt.get_num());
    rec.exact_qr = true;
    // cross-check the valuation on the exact integers when beta is rational
    if (beta_spec_.kind == PadicSpec::Kind::Rational) {
      Rat diff = beta_spec_.rat * qt - rt;
      if (diff == 0) {
        if (!rec.vp_infinite) throw DomainError("unexpected exact p-adic zero (internal)");
      } else {
        long vd = vp_rat(diff, Int(p_)).valuation;
        if (vd != rec.vp)
          throw DomainError("integer valuation cross-check failed (internal)");
      }
    }
  } else {
    rec.exact_qr = false;
    long Kq = rec.vp + 8;
    // store residues mod p^Kq for reference
    if (emb_.split()) {
      PAdic fz = emb_.map(zeta_, Kq + 4);
      PAdic fzc = emb_.map_conj(zeta_, Kq + 4);
      PAdic fg = emb_.map(gamma_.gamma, Kq + 4);
      PAdic fgc = emb_.map_conj(gamma_.gamma, Kq + 4);
      PAdic fap = emb_.map(alpha_elem_, Kq + 4);
      PAdic facp = emb_.map_conj(alpha_elem_, Kq + 4);
      PAdic zn = fz.pow(n), znc = fzc.pow(n);
      rec.q = (fg * zn + fgc * znc).reduce_to(Kq).residue();
      rec.r = (fap * fg * zn + facp * fgc * znc).reduce_to(Kq).residue();
    } else {
      PAdicQuad fz = emb_.map_inert(zeta_, Kq + 4);
      PAdicQuad fg = emb_.map_inert(gamma_.gamma, Kq + 4);
      PAdicQuad fap = emb_.map_inert(alpha_elem_, Kq + 4);
      PAdicQuad zn = fz.pow(n);
      PAdicQuad znc = fz.conj().pow(n);
      rec.q = (fg * zn + fg.conj() * znc).c0().reduce_to(Kq).residue();
      rec.r = (fap * fg * zn + (fap * fg).conj() * znc).c0().reduce_to(Kq).residue();
    }
  }
  // Real-side enclosures through the closed forms (precision-cap friendly
  // even for gigantic n): q_n alpha - r_n = (alpha - tau alpha) tau(gamma) zeta^{-n}.
  AdaptiveReal err = ((fa - fac) * gc).abs() * zr.pow_si(-nv);
  rec.real_err = err.refine(48, -200);
  AdaptiveReal qn_ball = g * zr.pow_si(nv) + gc * zr.pow_si(-nv);
  AdaptiveReal rn_ball = fa * g * zr.pow_si(nv) + fac * gc * zr.pow_si(-nv);
  AdaptiveReal mx = AdaptiveReal([qn_ball, rn_ball](Prec pr) {
    return qn_ball.eval(pr).abs().max_with(rn_ball.eval(pr).abs());
  });
  rec.max_qr = mx.refine(48, -80);
  Rat pfac = rec.vp >= 0 ? Rat(1, pow_long(p_, static_cast<unsigned long>(rec.vp)))
                         : Rat(pow_long(p_, static_cast<unsigned long>(-rec.vp)));
  rec.ek_plus = rec.max_qr * rec.real_err * exact_rat_ball(pfac);
  rec.log_product = rec.ek_plus * rec.max_qr.log();
  return rec;
}

std::vector<ApproxRecord> Thm2Run::records(const std::vector<long>& N_list) const {
  std::vector<ApproxRecord> out;
  out.reserve(N_list.size());
  for (long N : N_list) out.push_back(record_for(N));
  return out;
}

}  // namespace ek
