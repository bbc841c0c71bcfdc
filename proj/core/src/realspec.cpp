#include "ek/realspec.hpp"

#include <map>
#include <sstream>

namespace ek {

namespace {

// "k1=v1,k2=v2,..." -> map
std::map<std::string, std::string> parse_kv(const std::string& body) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value in: " + item);
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& k) {
  auto it = kv.find(k);
  if (it == kv.end()) throw ParseError("missing field: " + k);
  return it->second;
}

// Decimal digit string ("-12.345" or "1e-3" style not accepted for the value
// part; exponents are allowed in the error part).
Rat parse_decimal(const std::string& s) {
  if (s.empty()) throw ParseError("empty decimal");
  std::string t = s;
  bool neg = false;
  size_t i = 0;
  if (t[0] == '+' || t[0] == '-') {
    neg = t[0] == '-';
    i = 1;
  }
  Int num = 0;
  long frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < t.size(); ++i) {
    char c = t[i];
    if (c == '.') {
      if (seen_dot) throw ParseError("bad decimal: " + s);
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      num = num * 10 + (c - '0');
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else if (c == 'e' || c == 'E') {
      long e = std::stol(t.substr(i + 1));
      Rat base(num, pow_int(Int(10), static_cast<unsigned long>(frac_digits)));
      Rat scale = e >= 0 ? Rat(pow_int(Int(10), static_cast<unsigned long>(e)))
                         : Rat(1, pow_int(Int(10), static_cast<unsigned long>(-e)));
      Rat r = base * scale;
      r.canonicalize();
      return neg ? Rat(-r) : r;
    } else {
      throw ParseError("bad decimal: " + s);
    }
  }
  if (!seen_digit) throw ParseError("bad decimal: " + s);
  Rat r(num, pow_int(Int(10), static_cast<unsigned long>(frac_digits)));
  r.canonicalize();
  return neg ? Rat(-r) : r;
}

}  // namespace

RealSpec RealSpec::rational(const Rat& q) {
  RealSpec s;
  s.kind = Kind::Rational;
  s.rat = q;
  return s;
}

RealSpec RealSpec::quad(long d, const Rat& a, const Rat& b, int sign) {
  RealSpec s;
  s.kind = Kind::Quad;
  s.d = d;
  s.qa = a;
  s.qb = b;
  s.embed_sign = sign >= 0 ? 1 : -1;
  QuadField check(d);  // validates d
  if (d < 0) throw ParseError("real quad spec requires d > 1");
  return s;
}

RealSpec RealSpec::parse(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ParseError("real spec needs a kind prefix: " + s);
  std::string kind = s.substr(0, colon), body = s.substr(colon + 1);
  if (kind == "rat") return rational(parse_rat(body));
  if (kind == "quad") {
    auto kv = parse_kv(body);
    std::string sg = require(kv, "sign");
    if (sg != "+" && sg != "-") throw ParseError("sign must be + or -");
    return quad(std::stol(require(kv, "d")), parse_rat(require(kv, "a")),
                parse_rat(require(kv, "b")), sg == "+" ? 1 : -1);
  }
  if (kind == "dec") {
    auto tilde = body.find('~');
    if (tilde == std::string::npos) throw ParseError("dec spec needs ~err: " + s);
    Rat mid = parse_decimal(body.substr(0, tilde));
    Rat err = parse_decimal(body.substr(tilde + 1));
    if (err < 0) throw ParseError("negative error bound");
    RealSpec r;
    r.kind = Kind::Decimal;
    r.dec_lo = mid - err;
    r.dec_hi = mid + err;
    return r;
  }
  throw ParseError("unknown real spec kind: " + kind);
}

QuadElem RealSpec::to_elem() const {
  if (kind == Kind::Rational) throw DomainError("rational spec has no quad element");
  if (kind == Kind::Decimal) throw DomainError("decimal spec has no quad element");
  return QuadElem(d, qa, embed_sign > 0 ? qb : Rat(-qb));
}

AdaptiveReal RealSpec::to_real() const {
  switch (kind) {
    case Kind::Rational:
      return AdaptiveReal::from_rat(rat);
    case Kind::Quad:
      return to_elem().to_real();
    case Kind::Decimal:
      return AdaptiveReal::from_interval(dec_lo, dec_hi);
  }
  throw DomainError("unreachable");
}

std::string RealSpec::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Rational:
      os << "rat:" << rat.get_str();
      break;
    case Kind::Quad:
      os << "quad:d=" << d << ",a=" << qa.get_str() << ",b=" << qb.get_str()
         << ",sign=" << (embed_sign > 0 ? "+" : "-");
      break;
    case Kind::Decimal:
      os << "dec:[" << dec_lo.get_str() << "," << dec_hi.get_str() << "]";
      break;
  }
  return os.str();
}

PadicSpec PadicSpec::rational(const Rat& q) {
  PadicSpec s;
  s.kind = Kind::Rational;
  s.rat = q;
  return s;
}

PadicSpec PadicSpec::quad(long d, const Rat& a, const Rat& b, const Int& branch) {
  PadicSpec s;
  s.kind = Kind::Quad;
  s.d = d;
  s.qa = a;
  s.qb = b;
  s.branch = branch;
  QuadField check(d);
  return s;
}

PadicSpec PadicSpec::parse(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ParseError("p-adic spec needs a kind prefix: " + s);
  std::string kind = s.substr(0, colon), body = s.substr(colon + 1);
  if (kind == "rat") return rational(parse_rat(body));
  if (kind == "quad") {
    auto kv = parse_kv(body);
    return quad(std::stol(require(kv, "d")), parse_rat(require(kv, "a")),
                parse_rat(require(kv, "b")), Int(require(kv, "branch")));
  }
  throw ParseError("unknown p-adic spec kind: " + kind);
}

QuadElem PadicSpec::to_elem() const {
  if (kind != Kind::Quad) throw DomainError("rational p-adic spec has no quad element");
  return QuadElem(d, qa, qb);
}

std::string PadicSpec::str() const {
  std::ostringstream os;
  if (kind == Kind::Rational) {
    os << "rat:" << rat.get_str();
  } else {
    os << "quad:d=" << d << ",a=" << qa.get_str() << ",b=" << qb.get_str()
       << ",branch=" << branch.get_str();
  }
  return os.str();
}

}  // namespace ek
