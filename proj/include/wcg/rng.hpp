#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace wcg {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Child stream for replication r of a master seed. Documented contract:
// identical (master_seed, r) always yields the identical episode.
inline std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t r) {
  return splitmix64(master_seed ^ splitmix64(0x9E3779B97F4A7C15ULL * (r + 1)));
}

// Uniform double in [0, 1) built from the top 53 bits, so sampling does not
// depend on library-specific distribution internals.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::int64_t binomial_count(std::mt19937_64& rng, std::int64_t n, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::int64_t hits = 0;
  for (std::int64_t k = 0; k < n; ++k)
    if (uniform01(rng) < p) ++hits;
  return hits;
}

// One multinomial draw of n items over probs, via sequential conditional
// binomials. Exact for any probability vector summing to one.
inline std::vector<std::int64_t> multinomial_counts(std::mt19937_64& rng, std::int64_t n,
                                                    const std::vector<double>& probs) {
  std::vector<std::int64_t> out(probs.size(), 0);
  double rest = 1.0;
  std::int64_t remaining = n;
  int last_positive = -1;
  for (size_t k = 0; k < probs.size(); ++k)
    if (probs[k] > 0.0) last_positive = static_cast<int>(k);
  for (size_t k = 0; k < probs.size() && remaining > 0; ++k) {
    const double pk = probs[k];
    if (pk <= 0.0) continue;
    if (static_cast<int>(k) == last_positive || pk >= rest) {
      out[k] = remaining;
      remaining = 0;
      break;
    }
    const std::int64_t draw = binomial_count(rng, remaining, pk / rest);
    out[k] = draw;
    remaining -= draw;
    rest -= pk;
  }
  return out;
}

}  // namespace wcg
