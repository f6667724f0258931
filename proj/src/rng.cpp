#include "qbagents/rng.hpp"

#include <random>

namespace qbagents {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a
std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

RngStream RngStream::derive(std::uint64_t master_seed, std::string_view name) {
  return RngStream(splitmix64(splitmix64(master_seed + kGolden) ^ hash_name(name)));
}

RngStream RngStream::split(std::string_view name) const {
  return RngStream(splitmix64(key_ ^ hash_name(name)));
}

RngStream::result_type RngStream::operator()() {
  ++counter_;
  return splitmix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  // A fresh distribution per call: no cached spare value leaks between calls.
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(*this);
}

std::size_t RngStream::below(std::size_t n) {
  auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return k < n ? k : n - 1;
}

}  // namespace qbagents
