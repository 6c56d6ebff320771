#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pfe {

// FNV-1a, used for deterministic content-derived identifiers and digests.
// Not cryptographic; grouping never relies on hash equality alone.
inline uint64_t fnv1a64(std::string_view s, uint64_t seed = 0xcbf29ce484222325ull) {
  uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// 128-bit identifier from two independently-seeded FNV streams, rendered as
// 32 lowercase hex digits.
std::string content_id(std::string_view s);

// Hex digest of a file's bytes (fnv1a64), for run manifests.
std::string file_digest(const std::string& path);

// Mixes a seed with an index into a fresh 64-bit stream seed (splitmix64
// finalizer), used to derive independent per-driver RNG substreams.
inline uint64_t mix_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace pfe
