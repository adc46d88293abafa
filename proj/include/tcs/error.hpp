#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcs {

enum class Errc {
  InvalidArgument,
  Io,
  MalformedRecord,
  DuplicateId,
  DimensionMismatch,
  ZeroVector,
  NegativeSaving,
  AuthMissing,
  RateLimited,
  Transport,
  MalformedResponse,
  InvalidParams,
  DuplicateInquiry,
  EmptyStore,
  BadMagic,
  VersionUnsupported,
  Corrupt,
  MissingGold,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library. The code identifies the failure
/// class; what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

  /// True for failures raised by a chat/embedding backend.
  bool is_provider_error() const noexcept;

 private:
  Errc code_;
};

}  // namespace tcs
