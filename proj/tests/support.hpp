#pragma once

#include <cstdlib>
#include <filesystem>
#include <map>

#include "rsbound/wightman.hpp"

namespace rsbound::test {

inline std::filesystem::path cache_dir() {
  if (const char* env = std::getenv("RSBOUND_TEST_CACHE"); env != nullptr && *env != '\0') {
    return env;
  }
  return std::filesystem::temp_directory_path() / "rsbound-test-cache";
}

/// Default-settings table for unit amplitude, shared by the whole test process.
inline const OverlapTable& unit_table(double r_ratio) {
  static std::map<double, OverlapTable> tables;
  auto it = tables.find(r_ratio);
  if (it == tables.end()) {
    std::filesystem::create_directories(cache_dir());
    it = tables
             .emplace(r_ratio, cached_overlap_table(ModelParams{1.0, r_ratio}, OverlapSettings{},
                                                    cache_dir()))
             .first;
  }
  return it->second;
}

inline OverlapTable table_for(double alpha, double r_ratio) {
  return unit_table(r_ratio).with_alpha(alpha);
}

}  // namespace rsbound::test
