#include "msnet/rng.hpp"

namespace msnet {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), index_(index), engine_(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL))) {}

RngStream RngStream::for_replication(std::uint64_t seed, std::uint64_t replication, Lane lane) {
  return RngStream(seed, replication * 4 + static_cast<std::uint64_t>(lane));
}

double RngStream::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace msnet
