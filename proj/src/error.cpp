#include "tcs/error.hpp"

namespace tcs {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NegativeSaving: return "NegativeSaving";
    case Errc::AuthMissing: return "AuthMissing";
    case Errc::RateLimited: return "RateLimited";
    case Errc::Transport: return "Transport";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::DuplicateInquiry: return "DuplicateInquiry";
    case Errc::EmptyStore: return "EmptyStore";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionUnsupported: return "VersionUnsupported";
    case Errc::Corrupt: return "Corrupt";
    case Errc::MissingGold: return "MissingGold";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

bool Error::is_provider_error() const noexcept {
  switch (code_) {
    case Errc::AuthMissing:
    case Errc::RateLimited:
    case Errc::Transport:
    case Errc::MalformedResponse:
      return true;
    default:
      return false;
  }
}

}  // namespace tcs
