#pragma once

#include <array>
#include <cstdint>

namespace underlay {

// Names one logical random stream.  Estimators derive one child generator
// per trial from (seed, stream, trial), so results depend only on these
// values and never on thread count or scheduling.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// xoshiro256++ with splitmix64-based seeding.  Distribution sampling is
// implemented here rather than with std::<distribution> so that sequences
// are identical across standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0,
      std::uint64_t substream = 0);
  explicit Rng(const RngSpec& spec, std::uint64_t substream = 0)
      : Rng(spec.seed, spec.stream, substream) {}

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform();
  double uniform(double lo, double hi);

  // Exponential with mean 1.
  double exponential();

  bool bernoulli(double p);

  // Exact inversion-style sampling for small means, transformed rejection
  // for large ones.
  std::int64_t poisson(double mean);

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace underlay
