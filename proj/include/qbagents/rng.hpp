#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

namespace qbagents {

/// Counter-based random stream.
///
/// Output i of a stream is splitmix64(key + (i + 1) * golden). Streams are
/// addressed by name: `derive(seed, "alice/outcome")` always yields the same
/// sequence, independent of how many draws any other stream has made. That
/// isolation is what lets a pair run with a delta-prior partner reproduce a
/// single-agent run draw for draw.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key = 0) : key_(key) {}

  static RngStream derive(std::uint64_t master_seed, std::string_view name);
  RngStream split(std::string_view name) const;

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_name(std::string_view name);

}  // namespace qbagents
