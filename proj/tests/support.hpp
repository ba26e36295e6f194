#pragma once

// Random inputs and scratch directories for tests. Generators draw raw words
// from std::mt19937_64 (fully specified by the standard) and map them by hand,
// so sequences are the same on every platform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "segdecide/tensor.hpp"

namespace testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t next() { return g_(); }
  /// Uniform integer in [0, n).
  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(next() % n); }
  /// Uniform integer in [lo, hi].
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint32_t>(hi - lo + 1))); }
  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 g_;
};

inline segdecide::LabelMap random_labels(Rng& rng, std::uint32_t h, std::uint32_t w, int n) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w);
  for (auto& v : data) v = static_cast<std::uint8_t>(rng.below(static_cast<std::uint32_t>(n)));
  return segdecide::LabelMap(h, w, n, std::move(data));
}

/// Label map made of a few random rectangles on background 0, so that
/// components have realistic sizes.
inline segdecide::LabelMap blocky_labels(Rng& rng, std::uint32_t h, std::uint32_t w, int n,
                                         int rectangles) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w, 0);
  for (int i = 0; i < rectangles; ++i) {
    const auto cls = static_cast<std::uint8_t>(rng.below(static_cast<std::uint32_t>(n)));
    const std::uint32_t rh = 1 + rng.below(std::max(1u, h / 3));
    const std::uint32_t rw = 1 + rng.below(std::max(1u, w / 3));
    const std::uint32_t top = rng.below(h);
    const std::uint32_t left = rng.below(w);
    for (std::uint32_t r = top; r < std::min(h, top + rh); ++r) {
      for (std::uint32_t c = left; c < std::min(w, left + rw); ++c) {
        data[static_cast<std::size_t>(r) * w + c] = cls;
      }
    }
  }
  return segdecide::LabelMap(h, w, n, std::move(data));
}

/// Softmax of random logits, so values are strictly positive and normalized.
inline segdecide::ProbabilityMap random_probs(Rng& rng, std::uint32_t h, std::uint32_t w, int n,
                                              double spread = 4.0) {
  std::vector<float> data(static_cast<std::size_t>(h) * w * n);
  std::vector<double> logits(n);
  for (std::size_t p = 0; p < static_cast<std::size_t>(h) * w; ++p) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      logits[k] = std::exp(rng.uniform(-spread, spread));
      sum += logits[k];
    }
    for (int k = 0; k < n; ++k) data[p * n + k] = static_cast<float>(logits[k] / sum);
  }
  return segdecide::ProbabilityMap(h, w, n, std::move(data));
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("segdecide-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
