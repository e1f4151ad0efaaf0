#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hpdesign {

enum class Errc {
  InvalidCharacter,
  SelfIntersection,
  InvalidContact,
  LengthMismatch,
  InvalidArgument,
  LimitExceeded,
  CompositionOutOfRange,
  ComponentTooLarge,
  TooLarge,
  DegenerateSpectrum,
  NonpositiveParameter,
  MissingComposition,
  DimensionMismatch,
  CgNoConvergence,
  StateTooLarge,
  EmptyGroundSet,
  DegenerateDifference,
  SolverCapExceeded,
  ParseError,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidCharacter: return "InvalidCharacter";
    case Errc::SelfIntersection: return "SelfIntersection";
    case Errc::InvalidContact: return "InvalidContact";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::LimitExceeded: return "LimitExceeded";
    case Errc::CompositionOutOfRange: return "CompositionOutOfRange";
    case Errc::ComponentTooLarge: return "ComponentTooLarge";
    case Errc::TooLarge: return "TooLarge";
    case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
    case Errc::NonpositiveParameter: return "NonpositiveParameter";
    case Errc::MissingComposition: return "MissingComposition";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::CgNoConvergence: return "CgNoConvergence";
    case Errc::StateTooLarge: return "StateTooLarge";
    case Errc::EmptyGroundSet: return "EmptyGroundSet";
    case Errc::DegenerateDifference: return "DegenerateDifference";
    case Errc::SolverCapExceeded: return "SolverCapExceeded";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::int64_t index = -1)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        index_(index) {}

  Errc code() const noexcept { return code_; }
  /// Position associated with the failure (e.g. first colliding bead), or -1.
  std::int64_t index() const noexcept { return index_; }

 private:
  Errc code_;
  std::int64_t index_;
};

}  // namespace hpdesign
