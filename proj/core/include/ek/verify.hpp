#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ek/construct.hpp"

namespace ek {

enum class MetricVariant { EK, EKPlus, M, MU1, MU2 };

MetricVariant parse_variant(const std::string& s);

struct PadicFactor {
  bool infinite;  // q*beta - r = 0 exactly (|0|_p treated as 0)
  long v;
};

// Exact valuation data of q*beta - r.
PadicFactor qbr_valuation(const Int& q, const Int& r, const PadicSpec& beta, long p);

// Rigorous enclosure of the requested metric. The p-adic factor is exact,
// the real factor is a certified interval.
RealBall ek_product(const Int& q, const Int& r, const RealSpec& alpha,
                    const PadicSpec& beta, long p, MetricVariant variant);

// Exact field value of the EK+ product when alpha and beta are quad specs
// over the same d (value = max{|q|,|r|} |q alpha - r| p^-v as an element).
struct ExactProduct {
  bool infinite;
  QuadElem value;
};
std::optional<ExactProduct> ek_plus_exact(const Int& q, const Int& r, const RealSpec& alpha,
                                          const PadicSpec& beta, long p);

enum class ScanStrategy { Exhaustive, ResidueWindow };

struct ScanRecordRow {
  long q;
  long r;
  RealBall product;
};

struct ScanOptions {
  long k_max = 3;
  int threads = 1;
};

// Record chain of EK+ products over the certified window
// |r| <= ceil((|alpha|+1) q) + p^k_max, 1 <= q <= q_max, r != 0.
// Candidates stream in a deterministic order (q ascending, then distance
// from q*alpha); a pair becomes a record when its product strictly beats
// the previous record.
std::vector<ScanRecordRow> scan_records(const RealSpec& alpha, const PadicSpec& beta,
                                        long p, long q_max, ScanStrategy strategy,
                                        const ScanOptions& opt = {});

struct BoundCertificate {
  Int fa, fb, fc;
  long p = 0;
  long d_core = 0;      // squarefree core of the discriminant
  Int disc_sqrt_part;   // disc = disc_sqrt_part^2 * d_core
  QuadElem alpha_root;  // larger real root
  QuadElem alpha_other;
  Int branch;           // canonical sqrt(d_core) branch pairing the p-adic root
  Rat a_abs_p;          // |a|_p
  Rat beta_other_abs;   // max{1, |beta'|_p}
  QuadElem c0_exact;    // 1/(|a| |a|_p (|alpha'|+1) max{1,|beta'|_p})
  RealBall c0;
};

BoundCertificate conjugate_lower_bound(const Int& a, const Int& b, const Int& c, long p);

// Scan of the conjugate pair built from a certificate, certifying
// product >= c0 on every scanned pair with exact arithmetic.
struct CertifiedScanResult {
  bool all_at_least_c0 = false;
  unsigned long pairs_checked = 0;
  std::vector<ScanRecordRow> chain;
  double seconds = 0.0;
};

CertifiedScanResult scan_certify_conjugate(const BoundCertificate& cert, long q_max,
                                           long k_max, int threads = 1);

}  // namespace ek
