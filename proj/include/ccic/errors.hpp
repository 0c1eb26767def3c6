#ifndef CCIC_ERRORS_HPP
#define CCIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ccic {

enum class Errc {
  // naming
  EmptyComponent,
  OversizeName,
  BadIdentifier,
  // lite-query
  BadTaskLength,
  BadFieldLength,
  UnknownComparator,
  MissingOperand,
  ConflictingModifiers,
  UnknownKeyword,
  // wire
  Oversize,
  Truncated,
  BadKindTag,
  BadLength,
  // node
  NoCandidates,
  RoleMismatch,
  NotAssociated,
  // medium / engine
  ChannelSaturated,
  InfeasibleRange,
  // cli
  UnknownParameter,
  MismatchedRuns,
  BadConfig,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

} // namespace ccic

#endif
