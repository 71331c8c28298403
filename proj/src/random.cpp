#include "uvlink/random.hpp"

namespace uvlink {

std::uint64_t substream_key(std::uint64_t seed,
                            std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t key = mix64(seed);
  for (const std::uint64_t step : path) {
    key = mix64(key ^ mix64(step + 0x632be59bd9b4e019ULL));
  }
  return key;
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t key) noexcept {
  std::uint64_t x = key;
  for (auto& word : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    word = mix64(x);
  }
}

}  // namespace uvlink
