#pragma once

#include <cstdint>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace bbcg {

using Vector = Eigen::VectorXd;
using Index = std::int64_t;

/// Raised when parameters violate a precondition of an algorithm or set.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a set does not support an operation an algorithm needs
/// (for example Euclidean projection, or a full-dimensional interior).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_dim(const Vector& v, Index dim, std::string_view what) {
  if (v.size() != dim) {
    throw ConfigurationError(std::string(what) + ": dimension " + std::to_string(v.size()) +
                             " does not match " + std::to_string(dim));
  }
}

/// Bitwise equality of two vectors (no tolerance, -0.0 != 0.0).
inline bool bitwise_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         (a.size() == 0 ||
          std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0);
}

inline bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

// ---------------------------------------------------------------------------
// Deterministic stream splitting.
//
// Every consumer of randomness derives its engine from (seed, stream tag,
// index) so draws never depend on execution order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

/// FNV-1a, used to fold string tags into seeds.
inline std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

enum class Stream : std::uint64_t {
  Exploration = 1,
  Adversary = 2,
  Testing = 3,
};

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t index) {
  const std::uint64_t s = hash_combine(hash_combine(seed, static_cast<std::uint64_t>(stream)), index);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  return Engine(seq);
}

}  // namespace bbcg
