#pragma once

#include <string>
#include <vector>

namespace ebill::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

/// Environment variable naming the coupling-table cache directory.
inline constexpr const char* kCacheEnv = "EBILL_CACHE_DIR";

/// Entry point of the `ebill` executable; returns the process exit status.
int run(const std::vector<std::string>& args);

}  // namespace ebill::cli
