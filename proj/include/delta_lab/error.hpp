#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace delta_lab {

enum class ErrorCode {
  InvalidArgument,
  MixedSpaces,
  EmptyInput,
  NotPolyhedral,
  EmptySlice,
  AtomIndivisible,
  NotUnitNorm,
  BoundVoid,
  NotDaugavetPoint,
  IsDaugavetPoint,
  NonNormAttaining,
  LadderTooShort,
  VerificationFailed,
  InsufficientCertificate,
  CertificateScope,
  SearchCapReached,
  Unsupported,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::MixedSpaces: return "MIXED_SPACES";
    case ErrorCode::EmptyInput: return "EMPTY_INPUT";
    case ErrorCode::NotPolyhedral: return "NOT_POLYHEDRAL";
    case ErrorCode::EmptySlice: return "EMPTY_SLICE";
    case ErrorCode::AtomIndivisible: return "ATOM_INDIVISIBLE";
    case ErrorCode::NotUnitNorm: return "NOT_UNIT_NORM";
    case ErrorCode::BoundVoid: return "BOUND_VOID";
    case ErrorCode::NotDaugavetPoint: return "NOT_DAUGAVET_POINT";
    case ErrorCode::IsDaugavetPoint: return "IS_DAUGAVET_POINT";
    case ErrorCode::NonNormAttaining: return "NON_NORM_ATTAINING";
    case ErrorCode::LadderTooShort: return "LADDER_TOO_SHORT";
    case ErrorCode::VerificationFailed: return "VERIFICATION_FAILED";
    case ErrorCode::InsufficientCertificate: return "INSUFFICIENT_CERTIFICATE";
    case ErrorCode::CertificateScope: return "CERTIFICATE_SCOPE";
    case ErrorCode::SearchCapReached: return "SEARCH_CAP_REACHED";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::ParseError: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace delta_lab
