#ifndef GREEDYLAB_RANDOM_HPP
#define GREEDYLAB_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace greedylab {

using Rng = std::mt19937_64;

/// Generator for the substream identified by (seed, lanes...). Distinct lane
/// tuples give unrelated streams, so trial i of a sweep never depends on how
/// many trials ran before it.
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> lanes = {}) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * lanes.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto lane : lanes) push(lane);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace greedylab

#endif  // GREEDYLAB_RANDOM_HPP
