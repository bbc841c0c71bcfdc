#pragma once

#include <stdexcept>
#include <string>

namespace ek {

// Domain failures carry a stable machine-readable code; the CLI maps them
// to exit status 1 with a JSON error object on stderr.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

#define EK_DEFINE_ERROR(Name)                                         \
  class Name : public Error {                                         \
  public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  }

EK_DEFINE_ERROR(ZeroInput);
EK_DEFINE_ERROR(PrecisionExhausted);
EK_DEFINE_ERROR(NonResidue);
EK_DEFINE_ERROR(RamifiedUnsupported);
EK_DEFINE_ERROR(PTwoUnsupported);
EK_DEFINE_ERROR(DomainError);
EK_DEFINE_ERROR(NotIntegral);
EK_DEFINE_ERROR(InsufficientPrecision);
EK_DEFINE_ERROR(SearchExhausted);
EK_DEFINE_ERROR(InertUnsupported);
EK_DEFINE_ERROR(InadmissibleInput);
EK_DEFINE_ERROR(DegenerateDenominator);
EK_DEFINE_ERROR(InertProjectionFailure);
EK_DEFINE_ERROR(NotIrreducible);
EK_DEFINE_ERROR(NoRealRoots);
EK_DEFINE_ERROR(NoPAdicRoots);
EK_DEFINE_ERROR(InvalidPair);
EK_DEFINE_ERROR(ParseError);

#undef EK_DEFINE_ERROR

}  // namespace ek
