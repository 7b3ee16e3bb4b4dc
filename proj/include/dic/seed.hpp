#pragma once

#include <cstdint>

namespace dic {

// splitmix64; used to derive independent per-episode seeds from a master seed
// so that results do not depend on evaluation order or worker count.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mixSeed(uint64_t master, uint64_t stream, uint64_t index) {
  return splitmix64(splitmix64(master ^ (stream * 0x9e3779b97f4a7c15ULL)) ^ index);
}

}  // namespace dic
