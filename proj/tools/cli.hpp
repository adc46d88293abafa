#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "tcs/provider.hpp"
#include "tcs/vectorstore.hpp"

namespace tcs::cli {

struct AppConfig {
  ProviderConfig provider;
  ChunkParams chunk;
  std::filesystem::path store_path = "tcs.store";
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "reports";
};

/// Applies a nested key-value (INI) file on top of `config`.
void apply_config_file(AppConfig& config, const std::filesystem::path& path);

/// Entry point. Exit status: 0 success, 1 input/corpus/store errors,
/// 2 provider errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tcs::cli
