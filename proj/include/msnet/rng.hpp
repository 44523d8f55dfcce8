#pragma once

#include <cstdint>
#include <random>

namespace msnet {

// Independent sub-streams drawn by one replication. Services and interarrivals
// live on separate lanes so the arrival process can be swapped while the
// service sequence stays fixed.
enum class Lane : std::uint64_t { service = 0, arrival = 1, routing = 2, auxiliary = 3 };

/// Reproducible random stream identified by (master seed, stream index).
///
/// Streams are single-owner. Identical (seed, index) pairs reproduce the same
/// sequence bit for bit; distinct pairs are seeded through a 64-bit mixing
/// function and are treated as independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index);

  /// Stream for one lane of one replication: index = 4 * replication + lane.
  static RngStream for_replication(std::uint64_t seed, std::uint64_t replication, Lane lane);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace msnet
