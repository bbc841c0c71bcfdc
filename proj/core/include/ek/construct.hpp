#pragma once

#include <string>
#include <vector>

#include "ek/ostrowski.hpp"
#include "ek/realspec.hpp"
#include "ek/units.hpp"

namespace ek {

// One witness pair (Q, R) with a rigorous enclosure of |Q*alpha - R|, the
// exact valuation v_p(Q*beta - R), and the EK/EK+ products. For indices so
// large that Q, R cannot be materialized, exact_qr is false and q, r hold
// only residues mod p^(vp + guard); the enclosures and the valuation are
// still exact/certified through the closed forms.
struct ApproxRecord {
  std::string kind;  // "thm1_imaginary" | "thm1_real" | "thm2"
  Int q, r;
  bool exact_qr = true;
  long long n1 = 0;       // thm1 imaginary: n; thm1 real: n1
  long long n2 = 0;       // thm1 real: n2
  Int n_big;              // thm2: n
  long targetN = 0;       // thm2: N
  RealBall real_err;      // |q*alpha - r|
  bool vp_infinite = false;
  long vp = 0;            // v_p(q*beta - r)
  RealBall max_qr;        // max{|q|, |r|}
  RealBall ek_plus;       // max{|q|,|r|} * |q*alpha-r| * |q*beta-r|_p
  RealBall log_product;   // ek_plus * log max{|q|,|r|}
};

struct GammaChoice {
  QuadElem gamma;
  int parity_i = 0;  // conj(gamma) = (-1)^i gamma
  Int scale_G;
};

struct ConstructOptions {
  long k_max = 8;
  long coeff_bound = 1000000;
  long padic_N = 64;          // working p-adic precision
  long qr_digit_cap = 100000; // materialization bound for thm2 records (decimal digits)
};

// Sign choice (2.15-style): i = 0 iff (alpha - psi(beta))(alpha - tau psi(beta)) < 0,
// gamma = G or G*sqrt(d) accordingly, G minimal positive clearing denominators.
GammaChoice choose_gamma_sign(const RealSpec& alpha, const QuadField& field,
                              const QuadElem& beta_elem);

// Theorem 1.1, imaginary embedding: the trace sequence of gamma * omega1^n.
class Thm1ImaginaryRun {
public:
  Thm1ImaginaryRun(const RealSpec& alpha, const PadicSpec& beta, long p,
                   const ConstructOptions& opt = {});

  const UnitSystem& units() const { return units_; }
  const Int& gamma() const { return gamma_G_; }
  long t() const { return t_; }
  // Constant c0 in v_p(q_n beta - r_n) = 2nt - c0 (here written additively:
  // the exact valuation is base_vp() + 2nt).
  long base_vp() const { return base_vp_; }

  ApproxRecord record_at(long long n) const;
  std::vector<ApproxRecord> records(size_t count) const;  // Ostrowski-selected n

private:
  RealSpec alpha_;
  QuadElem beta_;
  long p_;
  ConstructOptions opt_;
  EmbeddingData emb_;
  UnitSystem units_;
  QuadElem omega1_;
  long t_;
  Int gamma_G_;
  long base_vp_;
  AdaptiveReal theta_, xi_;
};

// Theorem 1.1, real embedding: traces of gamma * omega1^n1 * omega2^n2.
class Thm1RealRun {
public:
  Thm1RealRun(const RealSpec& alpha, const PadicSpec& beta, long p,
              const ConstructOptions& opt = {});

  const UnitSystem& units() const { return units_; }
  const GammaChoice& gamma() const { return gamma_; }
  long t() const { return t_; }
  long base_vp() const { return base_vp_; }

  ApproxRecord record_at(long long n1, long long n2) const;
  // Pairs (n1, n2) from the one-dimensional reduction, bracket-certified.
  std::vector<ApproxRecord> records(size_t count) const;
  // |n1 L1 + n2 L2 - T/2| as an adaptive real (bracket quantity).
  AdaptiveReal bracket_defect(long long n1, long long n2) const;

private:
  RealSpec alpha_;
  QuadElem beta_;
  long p_;
  ConstructOptions opt_;
  EmbeddingData emb_;
  UnitSystem units_;
  QuadElem omega1_, omega2_;
  long t_;
  GammaChoice gamma_;
  long base_vp_;
  AdaptiveReal L1_, L2_, T_;
};

// Theorem 1.2: traces of gamma * zeta^n with n selected p-adically.
class Thm2Run {
public:
  Thm2Run(const RealSpec& alpha, const PadicSpec& beta, long p,
          const ConstructOptions& opt = {});

  const UnitSystem& units() const { return units_; }
  const QuadElem& zeta() const { return zeta_; }
  long nu() const { return nu_; }
  const GammaChoice& gamma() const { return gamma_; }
  bool lambda_is_one() const { return lambda_one_; }
  bool inert() const { return !emb_.split(); }
  // Tracked precision of the sqrt(d)-coordinate of log(lambda)/(2 log phi(zeta))
  // in the inert case (LONG_MAX when the coordinate is exactly zero).
  long inert_coord_precision() const { return inert_coord_prec_; }

  ApproxRecord record_for(long N) const;
  std::vector<ApproxRecord> records(const std::vector<long>& N_list) const;

  // Certified enclosure of q_n |q_n alpha - r_n| and its fixed bracket
  // [lo, hi] valid for every n >= 1.
  RealBall product_bracket_lo() const { return bracket_lo_; }
  RealBall product_bracket_hi() const { return bracket_hi_; }

private:
  void build_gamma();
  void build_selector();
  Int select_n(long N) const;

  RealSpec alpha_;
  PadicSpec beta_spec_;
  long p_;
  ConstructOptions opt_;
  QuadElem alpha_elem_;
  EmbeddingData emb_;
  UnitSystem units_;
  QuadElem zeta_;
  long nu_ = 0;
  GammaChoice gamma_;
  bool lambda_one_ = true;
  long inert_coord_prec_ = 0;
  PAdic selector_;  // log(lambda) / (2 log phi(zeta)) in Z_p
  long base_vp_ = 0;  // v_p((beta - phi alpha) phi gamma)
  long vlog_ = 0;     // v_p(2 log phi zeta)
  RealBall bracket_lo_, bracket_hi_;
};

}  // namespace ek
