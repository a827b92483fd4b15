#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace claytonboost::testing {

// Harrell's index by direct enumeration of ordered pairs, the reference the
// production concordance must match exactly.
struct BruteConcordance {
  double concordant = 0.0;  // in pair units; ties add one half
  std::uint64_t usable = 0;

  double Index() const { return usable == 0 ? 0.5 : concordant / static_cast<double>(usable); }
};

inline BruteConcordance BruteForceConcordance(std::span<const double> time,
                                              std::span<const int> event,
                                              std::span<const double> predicted) {
  BruteConcordance out;
  const std::size_t n = time.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // i must be the earlier member of the ordered pair
      const bool earlier = time[i] < time[j] && event[i] == 1;
      const bool tie_event_first = time[i] == time[j] && event[i] == 1 && event[j] == 0;
      if (!earlier && !tie_event_first) continue;
      ++out.usable;
      if (predicted[i] < predicted[j]) {
        out.concordant += 1.0;
      } else if (predicted[i] == predicted[j]) {
        out.concordant += 0.5;
      }
    }
  }
  return out;
}

inline std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("claytonboost_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace claytonboost::testing
