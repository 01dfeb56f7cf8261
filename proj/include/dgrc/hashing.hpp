#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dgrc {

// FNV-1a 64-bit (offset basis 0xcbf29ce484222325, prime 0x100000001b3).
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t state = 0xcbf29ce484222325ULL);

// SplitMix64 finalizer (Steele, Lea & Flood constants).
std::uint64_t splitmix64(std::uint64_t x);

// Streaming hash over a sequence of fields. Each field is length-prefixed so
// ("ab","c") and ("a","bc") hash differently. Platform independent.
class Hasher64 {
 public:
  explicit Hasher64(std::uint64_t seed = 0);

  Hasher64& add(std::string_view field);
  Hasher64& add(std::uint64_t value);
  Hasher64& add_double(double value);

  std::uint64_t digest() const { return splitmix64(state_); }

 private:
  std::uint64_t state_;
};

// Deterministic SplitMix64 generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, 1) from the top 53 bits.
  double uniform();
  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

double unit_interval(std::uint64_t bits);

// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

}  // namespace dgrc
