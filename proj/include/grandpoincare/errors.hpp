#pragma once

#include <stdexcept>
#include <string>

namespace gp {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GP_DEFINE_ERROR(name)                                 \
  class name : public Error {                                 \
   public:                                                    \
    explicit name(const std::string& msg) : Error(msg) {}     \
  }

GP_DEFINE_ERROR(DisconnectedGraph);
GP_DEFINE_ERROR(NonPositiveInput);
GP_DEFINE_ERROR(SizeOverflow);
GP_DEFINE_ERROR(ParseError);
GP_DEFINE_ERROR(InsufficientSamples);
GP_DEFINE_ERROR(DegenerateRadii);
GP_DEFINE_ERROR(FieldSpaceMismatch);
GP_DEFINE_ERROR(InvalidExponent);
GP_DEFINE_ERROR(IsolatedPoint);
GP_DEFINE_ERROR(EmptySet);
GP_DEFINE_ERROR(IndexOutOfRange);
GP_DEFINE_ERROR(OutOfDomain);
GP_DEFINE_ERROR(InvalidPsi);
GP_DEFINE_ERROR(NormDiverged);
GP_DEFINE_ERROR(UnboundedFamily);
GP_DEFINE_ERROR(EmptyFamily);
GP_DEFINE_ERROR(EmptyBracket);
GP_DEFINE_ERROR(NotProbability);
GP_DEFINE_ERROR(AfeViolated);
GP_DEFINE_ERROR(OrderMismatch);
GP_DEFINE_ERROR(SearchFailed);
GP_DEFINE_ERROR(ConfigError);
GP_DEFINE_ERROR(IoError);

#undef GP_DEFINE_ERROR

/// Triangle-inequality (or other metric axiom) failure; carries the offending triple.
class MetricViolation : public Error {
 public:
  MetricViolation(int i, int j, int k, const std::string& msg)
      : Error(msg), i_(i), j_(j), k_(k) {}
  int i() const { return i_; }
  int j() const { return j_; }
  int k() const { return k_; }

 private:
  int i_, j_, k_;
};

}  // namespace gp
