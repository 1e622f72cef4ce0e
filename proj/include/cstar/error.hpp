#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cstar {

enum class ErrorCode {
  NonFinite,
  NoConvergence,
  SignatureMismatch,
  DependentBasis,
  CertificateNotFound,
  TooManyDimensions,
  NotAContraction,
  ZeroElement,
  NotSmooth,
  UnsupportedForm,
  TooSmall,
  NoFiniteN,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::DependentBasis: return "DependentBasis";
    case ErrorCode::CertificateNotFound: return "CertificateNotFound";
    case ErrorCode::TooManyDimensions: return "TooManyDimensions";
    case ErrorCode::NotAContraction: return "NotAContraction";
    case ErrorCode::ZeroElement: return "ZeroElement";
    case ErrorCode::NotSmooth: return "NotSmooth";
    case ErrorCode::UnsupportedForm: return "UnsupportedForm";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::NoFiniteN: return "NoFiniteN";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cstar
