#include "xrl/seeding.hpp"

namespace xrl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (stream * 0xd1b54a32d192ed03ULL));
  return splitmix64(h ^ (index * 0x8cb92ba72f3d8dd7ULL));
}

std::uint64_t training_episode_seed(std::uint64_t raw) { return raw << 1; }

std::uint64_t evaluation_episode_seed(std::uint64_t base_seed,
                                      std::uint64_t episode) {
  return ((base_seed + episode) << 1) | 1ULL;
}

}  // namespace xrl
