#include "ek/padic.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

namespace ek {

namespace {

Int p_pow(long p, long k) {
  if (k < 0) throw DomainError("negative power of p requested as integer");
  return pow_int(Int(p), static_cast<unsigned long>(k));
}

Int inv_mod(const Int& a, const Int& m) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw DomainError("not invertible");
  return r;
}

void check_prime(long p) {
  if (p < 2 || !is_prime(Int(p))) throw DomainError("p must be prime");
}

}  // namespace

long floor_log_base(long n, long base) {
  long r = 0;
  while (n >= base) {
    n /= base;
    ++r;
  }
  return r;
}

PAdic PAdic::zero(long p) {
  check_prime(p);
  return PAdic(p, State::ExactZero, 0, 0, Int(0));
}

PAdic PAdic::zero_to_precision(long p, long N) {
  check_prime(p);
  return PAdic(p, State::UnknownZero, N, N, Int(0));
}

PAdic PAdic::make_regular(long p, long N, long base_v, const Int& scaled_residue) {
  // scaled_residue represents value / p^base_v, known mod p^(N - base_v).
  if (scaled_residue == 0) return zero_to_precision(p, N);
  long shift = vp_int(scaled_residue, Int(p));
  long v = base_v + shift;
  if (v >= N) return zero_to_precision(p, N);
  Int u = scaled_residue / p_pow(p, shift);
  Int m = p_pow(p, N - v);
  u %= m;
  if (u < 0) u += m;
  if (u == 0) return zero_to_precision(p, N);
  return PAdic(p, State::Regular, N, v, u);
}

PAdic PAdic::from_int(const Int& x, long p, long N) {
  check_prime(p);
  if (N <= 0) throw DomainError("precision must be positive");
  if (x == 0) return zero(p);
  long v = vp_int(x, Int(p));
  Int u = x / p_pow(p, v);
  Int m = p_pow(p, N);
  u %= m;
  if (u < 0) u += m;
  return PAdic(p, State::Regular, v + N, v, u);
}

PAdic PAdic::from_rat(const Rat& x, long p, long N) {
  check_prime(p);
  if (N <= 0) throw DomainError("precision must be positive");
  if (x == 0) return zero(p);
  Int num(x.get_num()), den(x.get_den());
  long vn = vp_int(num, Int(p)), vd = vp_int(den, Int(p));
  long v = vn - vd;
  Int m = p_pow(p, N);
  Int un = (num / p_pow(p, vn)) % m;
  if (un < 0) un += m;
  Int ud = (den / p_pow(p, vd)) % m;
  Int u = (un * inv_mod(ud, m)) % m;
  return PAdic(p, State::Regular, v + N, v, u);
}

PAdic PAdic::from_int_abs(const Int& x, long p, long N) {
  check_prime(p);
  if (N <= 0) throw DomainError("precision must be positive");
  Int m = p_pow(p, N);
  Int r = x % m;
  if (r < 0) r += m;
  return make_regular(p, N, 0, r);
}

long PAdic::N() const {
  if (exact_zero()) return LONG_MAX;
  return N_;
}

long PAdic::valuation_lower() const {
  if (exact_zero()) return LONG_MAX;
  return v_;
}

long PAdic::valuation() const {
  if (state_ != State::Regular)
    throw InsufficientPrecision("valuation of a (possibly) zero value");
  return v_;
}

const Int& PAdic::unit() const {
  if (state_ != State::Regular) throw InsufficientPrecision("unit of a zero value");
  return u_;
}

Rat PAdic::abs_p() const {
  if (exact_zero()) return Rat(0);
  long v = valuation();
  return v >= 0 ? Rat(1, p_pow(p_, v)) : Rat(p_pow(p_, -v));
}

Int PAdic::residue() const {
  if (zeroish()) return Int(0);
  if (v_ < 0) throw NotIntegral("negative valuation has no integer residue");
  return p_pow(p_, v_) * u_;
}

Int PAdic::residue_mod(long K) const {
  if (K > N()) throw InsufficientPrecision("residue requested beyond known precision");
  Int m = p_pow(p_, K);
  Int r = residue() % m;
  if (r < 0) r += m;
  return r;
}

PAdic PAdic::operator-() const {
  if (state_ != State::Regular) return *this;
  Int m = p_pow(p_, N_ - v_);
  return PAdic(p_, State::Regular, N_, v_, m - u_);
}

PAdic PAdic::operator+(const PAdic& o) const {
  if (p_ != o.p_) throw DomainError("mixed primes");
  if (exact_zero()) return o;
  if (o.exact_zero()) return *this;
  long N = std::min(N_, o.N_);
  if (unknown_zero() && o.unknown_zero()) return zero_to_precision(p_, N);
  long base = std::min({v_, o.v_, 0L});
  Int m = p_pow(p_, N - base);
  Int ra = unknown_zero() ? Int(0) : (p_pow(p_, v_ - base) * u_) % m;
  Int rb = o.unknown_zero() ? Int(0) : (p_pow(p_, o.v_ - base) * o.u_) % m;
  Int r = (ra + rb) % m;
  return make_regular(p_, N, base, r);
}

PAdic PAdic::operator-(const PAdic& o) const { return *this + (-o); }

PAdic PAdic::operator*(const PAdic& o) const {
  if (p_ != o.p_) throw DomainError("mixed primes");
  if (exact_zero() || o.exact_zero()) return zero(p_);
  if (unknown_zero() || o.unknown_zero()) {
    // |xy|_p <= p^-(va + vb) with the unknown factor's N as its valuation bound
    long v = valuation_lower() + o.valuation_lower();
    return zero_to_precision(p_, v);
  }
  long rel = std::min(N_ - v_, o.N_ - o.v_);
  long v = v_ + o.v_;
  Int m = p_pow(p_, rel);
  Int u = (u_ * o.u_) % m;
  return PAdic(p_, State::Regular, v + rel, v, u);
}

PAdic PAdic::inverse() const {
  if (exact_zero()) throw ZeroInput("inverse of zero");
  if (unknown_zero()) throw InsufficientPrecision("inverse of possible zero");
  long rel = N_ - v_;
  Int m = p_pow(p_, rel);
  Int u = inv_mod(u_, m);
  return PAdic(p_, State::Regular, -v_ + rel, -v_, u);
}

PAdic PAdic::operator/(const PAdic& o) const { return *this * o.inverse(); }

PAdic PAdic::mul_int(const Int& n) const {
  if (n == 0) return zero(p_);
  if (exact_zero()) return *this;
  long vn = vp_int(n, Int(p_));
  if (unknown_zero()) return zero_to_precision(p_, N_ + vn);
  long rel = N_ - v_;
  Int m = p_pow(p_, rel);
  Int nu = (n / p_pow(p_, vn)) % m;
  if (nu < 0) nu += m;
  Int u = (u_ * nu) % m;
  return PAdic(p_, State::Regular, v_ + vn + rel, v_ + vn, u);
}

PAdic PAdic::div_int(const Int& n) const {
  if (n == 0) throw ZeroInput("division by zero integer");
  if (exact_zero()) return *this;
  long vn = vp_int(n, Int(p_));
  if (unknown_zero()) return zero_to_precision(p_, N_ - vn);
  long rel = N_ - v_;
  Int m = p_pow(p_, rel);
  Int nu = (n / p_pow(p_, vn)) % m;
  if (nu < 0) nu += m;
  Int u = (u_ * inv_mod(nu, m)) % m;
  return PAdic(p_, State::Regular, v_ - vn + rel, v_ - vn, u);
}

PAdic PAdic::mul_pow_p(long k) const {
  if (exact_zero()) return *this;
  if (unknown_zero()) return zero_to_precision(p_, N_ + k);
  return PAdic(p_, State::Regular, N_ + k, v_ + k, u_);
}

PAdic PAdic::pow(const Int& e) const {
  if (e < 0) return inverse().pow(Int(-e));
  if (e == 0) {
    if (exact_zero() || unknown_zero()) throw DomainError("0^0");
    return PAdic(p_, State::Regular, N_ - v_, 0, Int(1));
  }
  if (exact_zero()) return *this;
  if (unknown_zero()) {
    long ve = (N_ > LONG_MAX / 4 || !e.fits_slong_p()) ? LONG_MAX / 4 : N_ * e.get_si();
    return zero_to_precision(p_, std::min(ve, LONG_MAX / 4));
  }
  PAdic acc = PAdic(p_, State::Regular, N_ - v_, 0, Int(1));
  PAdic base = *this;
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    acc = acc * acc;
    if (mpz_tstbit(e.get_mpz_t(), i)) acc = acc * base;
  }
  return acc;
}

PAdic PAdic::reduce_to(long N) const {
  if (exact_zero()) return zero_to_precision(p_, N);
  if (N >= N_) return *this;
  if (unknown_zero() || v_ >= N) return zero_to_precision(p_, N);
  Int m = p_pow(p_, N - v_);
  Int u = u_ % m;
  if (u == 0) return zero_to_precision(p_, N);
  return PAdic(p_, State::Regular, N, v_, u);
}

bool PAdic::same_to_precision(const PAdic& o) const {
  PAdic d = *this - o;
  return d.zeroish();
}

std::string PAdic::str() const {
  std::ostringstream os;
  if (exact_zero()) {
    os << "0";
    return os.str();
  }
  if (unknown_zero()) {
    os << "O(" << p_ << "^" << N_ << ")";
    return os.str();
  }
  os << p_ << "^" << v_ << " * " << u_.get_str() << " mod " << p_ << "^" << N_;
  return os.str();
}

std::vector<long> PAdic::digit_list() const {
  std::vector<long> ds;
  if (zeroish()) return ds;
  Int u = u_;
  long count = N_ - v_;
  for (long i = 0; i < count; ++i) {
    Int d = u % p_;
    ds.push_back(d.get_si());
    u /= p_;
  }
  return ds;
}

// ---------------------------------------------------------------------------
// PAdicQuad

PAdicQuad::PAdicQuad(PAdic c0, PAdic c1, long d)
    : c0_(std::move(c0)), c1_(std::move(c1)), d_(d) {
  if (c0_.p() != c1_.p()) throw DomainError("mixed primes in quadratic extension");
}

long PAdicQuad::valuation_lower() const {
  return std::min(c0_.valuation_lower(), c1_.valuation_lower());
}

PAdicQuad PAdicQuad::operator+(const PAdicQuad& o) const {
  return PAdicQuad(c0_ + o.c0_, c1_ + o.c1_, d_);
}

PAdicQuad PAdicQuad::operator-(const PAdicQuad& o) const {
  return PAdicQuad(c0_ - o.c0_, c1_ - o.c1_, d_);
}

PAdicQuad PAdicQuad::operator*(const PAdicQuad& o) const {
  PAdic x0 = c0_ * o.c0_ + (c1_ * o.c1_).mul_int(Int(d_));
  PAdic x1 = c0_ * o.c1_ + c1_ * o.c0_;
  return PAdicQuad(x0, x1, d_);
}

PAdicQuad PAdicQuad::operator-() const { return PAdicQuad(-c0_, -c1_, d_); }

PAdicQuad PAdicQuad::inverse() const {
  PAdic n = norm();
  PAdicQuad c = conj();
  return PAdicQuad(c.c0() / n, c.c1() / n, d_);
}

PAdicQuad PAdicQuad::operator/(const PAdicQuad& o) const { return *this * o.inverse(); }

PAdicQuad PAdicQuad::div_int(const Int& n) const {
  return PAdicQuad(c0_.div_int(n), c1_.div_int(n), d_);
}

PAdicQuad PAdicQuad::pow(const Int& e) const {
  if (e < 0) return inverse().pow(Int(-e));
  long p = c0_.p();
  long relN = 1;
  if (!c0_.exact_zero() && !c0_.unknown_zero()) relN = std::max(relN, c0_.rel_precision());
  if (!c1_.exact_zero() && !c1_.unknown_zero()) relN = std::max(relN, c1_.rel_precision());
  if (e == 0) return PAdicQuad(PAdic::from_int(1, p, relN), PAdic::zero(p), d_);
  PAdicQuad acc(PAdic::from_int(1, p, relN), PAdic::zero(p), d_);
  PAdicQuad base = *this;
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    acc = acc * acc;
    if (mpz_tstbit(e.get_mpz_t(), i)) acc = acc * base;
  }
  return acc;
}

std::string PAdicQuad::str() const {
  std::ostringstream os;
  os << "(" << c0_.str() << ") + (" << c1_.str() << ")*sqrt(" << d_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Hensel square roots and embeddings

PAdic hensel_sqrt(const Int& d, long p, long N, std::optional<Int> branch) {
  check_prime(p);
  if (p == 2) throw PTwoUnsupported("p = 2 square roots are out of scope");
  if (N <= 0) throw DomainError("precision must be positive");
  Int dp = d % p;
  if (dp < 0) dp += p;
  if (dp == 0) throw RamifiedUnsupported("p divides d");
  Int r0 = sqrt_mod_prime(dp, Int(p));  // throws NonResidue
  Int other = p - r0;
  Int canonical = 2 * r0 < p ? r0 : other;
  Int start = canonical;
  if (branch.has_value()) {
    Int b = *branch % p;
    if (b < 0) b += p;
    if (b == r0) {
      start = r0;
    } else if (b == other) {
      start = other;
    } else {
      throw DomainError("branch is not a square root of d mod p");
    }
  }
  // Newton lifting x -> (x + d/x)/2, doubling the modulus exponent.
  Int x = start;
  long k = 1;
  while (k < N) {
    long k2 = std::min(2 * k, N);
    Int m = p_pow(p, k2);
    Int xi = inv_mod(x, m);
    Int two_inv = inv_mod(Int(2), m);
    x = ((x + d * xi) % m) * two_inv % m;
    if (x < 0) x += m;
    k = k2;
  }
  return PAdic::from_int_abs(x, p, N);
}

EmbeddingData::EmbeddingData(const QuadField& f, long p, long N, std::optional<Int> branch)
    : field_(f), p_(p), N_(N) {
  check_prime(p);
  if (p == 2) throw PTwoUnsupported("p = 2 embeddings are out of scope");
  if (N <= 0) throw DomainError("precision must be positive");
  Int d(f.d);
  Int dp = d % p;
  if (dp < 0) dp += p;
  if (dp == 0) {
    splitting_ = Splitting::Ramified;
    throw RamifiedUnsupported("p divides d: ramified embeddings are out of scope");
  }
  int leg = mpz_legendre(dp.get_mpz_t(), Int(p).get_mpz_t());
  cache_ = std::make_shared<RootCache>();
  if (leg == 1) {
    splitting_ = Splitting::Split;
    PAdic r = hensel_sqrt(d, p, 1, branch);
    branch_ = r.residue();
    cache_->lift = branch_;
    cache_->N = 1;
  } else {
    splitting_ = Splitting::Inert;
    if (branch.has_value())
      throw DomainError("branch given for an inert prime");
  }
}

EmbeddingData embed_field(const QuadField& f, long p, long N, std::optional<Int> branch) {
  return EmbeddingData(f, p, N, branch);
}

const Int& EmbeddingData::branch() const {
  if (!split()) throw InertUnsupported("no branch: prime is inert");
  return branch_;
}

Int EmbeddingData::root_mod(long K) const {
  if (!split()) throw InertUnsupported("no Hensel root: prime is inert");
  std::lock_guard<std::mutex> lk(cache_->mu);
  if (cache_->N < K) {
    PAdic r = hensel_sqrt(Int(field_.d), p_, K, branch_);
    cache_->lift = r.residue();
    cache_->N = K;
  }
  Int m = p_pow(p_, K);
  return cache_->lift % m;
}

PAdic EmbeddingData::map_branch(const QuadElem& x, long N, bool conjugate) const {
  if (!split()) throw InertUnsupported("id-embedding requires a split prime");
  // x = (u + v*sqrt(d))/w over a common denominator.
  Int w = lcm(Int(x.a().get_den()), Int(x.b().get_den()));
  Int u = Int(x.a().get_num()) * (w / Int(x.a().get_den()));
  Int v = Int(x.b().get_num()) * (w / Int(x.b().get_den()));
  if (conjugate) v = -v;
  long vw = vp_int(w, Int(p_));
  long K = N + vw + 2;
  Int s = root_mod(K);
  Int m = p_pow(p_, K);
  Int t = (u + v * s) % m;
  if (t < 0) t += m;
  return PAdic::from_int_abs(t, p_, K).div_int(w);
}

PAdic EmbeddingData::map(const QuadElem& x, long N) const { return map_branch(x, N, false); }
PAdic EmbeddingData::map_conj(const QuadElem& x, long N) const { return map_branch(x, N, true); }

PAdicQuad EmbeddingData::map_inert(const QuadElem& x, long N) const {
  if (split()) throw DomainError("map_inert on a split prime");
  return PAdicQuad(PAdic::from_rat(x.a(), p_, N), PAdic::from_rat(x.b(), p_, N), field_.d);
}

long EmbeddingData::vP(const QuadElem& x) const {
  if (x.is_zero()) throw ZeroInput("valuation of zero");
  Int w = lcm(Int(x.a().get_den()), Int(x.b().get_den()));
  Int u = Int(x.a().get_num()) * (w / Int(x.a().get_den()));
  Int v = Int(x.b().get_num()) * (w / Int(x.b().get_den()));
  long vw = vp_int(w, Int(p_));
  if (!split()) {
    long vu = u == 0 ? LONG_MAX : vp_int(u, Int(p_));
    long vv = v == 0 ? LONG_MAX : vp_int(v, Int(p_));
    return std::min(vu, vv) - vw;
  }
  // v_P(u + v s) <= v_p(norm), so a lift one step beyond that bound decides.
  Int nrm = u * u - Int(field_.d) * v * v;
  if (nrm == 0) throw DomainError("zero norm for a nonzero element");
  long bound = vp_int(nrm, Int(p_));
  long K = bound + 1;
  Int s = root_mod(K);
  Int m = p_pow(p_, K);
  Int t = (u + v * s) % m;
  if (t < 0) t += m;
  if (t == 0) throw DomainError("valuation bound violated (internal error)");
  return vp_int(t, Int(p_)) - vw;
}

Rat EmbeddingData::abs_P(const QuadElem& x) const {
  long v = vP(x);
  return v >= 0 ? Rat(1, p_pow(p_, v)) : Rat(p_pow(p_, -v));
}

// ---------------------------------------------------------------------------
// p-adic logarithm

namespace {

template <class T>
T padic_log_impl(const T& z, const T& one, long p) {
  T w = z - one;
  if (w.exact_zero()) return w;
  if (w.zeroish()) return w;  // log(1 + O(p^N)) = O(p^N)
  long vw = w.valuation_lower();
  if (vw < 1) throw DomainError("outside the log domain: |z-1|_p >= p^(-1/(p-1))");
  long N = 0;
  if constexpr (std::is_same_v<T, PAdic>) {
    N = w.N();
  } else {
    N = std::min(w.c0().exact_zero() ? LONG_MAX : w.c0().N(),
                 w.c1().exact_zero() ? LONG_MAX : w.c1().N());
  }
  long M = 1;
  while (!((M + 1) * vw - floor_log_base(M + 1, p) >= N)) ++M;
  T sum = w;
  T wpow = w;
  for (long n = 2; n <= M; ++n) {
    wpow = wpow * w;
    T term = wpow.div_int(Int(n));
    if (n % 2 == 0) {
      sum = sum - term;
    } else {
      sum = sum + term;
    }
  }
  return sum;
}

}  // namespace

PAdic padic_log(const PAdic& z) {
  PAdic one = PAdic::from_int(1, z.p(), std::max(1L, z.zeroish() ? z.N() : z.rel_precision()));
  PAdic r = padic_log_impl(z, one, z.p());
  return r;
}

PAdicQuad padic_log(const PAdicQuad& z) {
  long p = z.p();
  long rel = 1;
  if (!z.c0().exact_zero()) rel = std::max(rel, z.c0().rel_precision());
  PAdicQuad one(PAdic::from_int(1, p, rel), PAdic::zero(p), z.d());
  return padic_log_impl(z, one, p);
}

// ---------------------------------------------------------------------------

Int zp_ratio_residue(const PAdic& a, const PAdic& b, long N) {
  if (a.p() != b.p()) throw DomainError("mixed primes");
  long p = a.p();
  if (b.exact_zero()) throw ZeroInput("ratio with zero denominator");
  if (b.unknown_zero()) throw InsufficientPrecision("denominator may be zero");
  if (a.exact_zero()) return Int(0);
  if (a.unknown_zero()) {
    if (a.N() - b.valuation() >= N) return Int(0);
    throw InsufficientPrecision("numerator precision too shallow");
  }
  if (a.valuation() < b.valuation())
    throw NotIntegral("|a|_p > |b|_p: ratio is not a p-adic integer");
  PAdic q = a / b;
  if (q.zeroish()) {
    if (q.N() >= N) return Int(0);
    throw InsufficientPrecision("ratio known only to a precision below the target");
  }
  if (q.N() < N) throw InsufficientPrecision("inputs too shallow for the target residue");
  return q.residue_mod(N);
}

}  // namespace ek
