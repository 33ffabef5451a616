#ifndef QDEF_RNG_HPP
#define QDEF_RNG_HPP

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "qdef/types.hpp"

namespace qdef {

// Deterministic random stream with named substreams.
//
// Every randomized operation in the toolkit draws from one of these, and a
// substream is a pure function of (parent seed, name), so a run is fully
// reproducible from the master seed alone: trial 17 always derives
// substream("trial/17") no matter what ran before it. Substreams are derived
// from the stored seed, not from the engine state, so consuming numbers never
// perturbs later derivations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Child stream keyed by name ("trial/17/state", "rhs", ...). FNV-1a over
  // the parent seed bytes followed by the name bytes.
  RngStream substream(std::string_view name) const;

  // Uniform on [0, 1).
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t integer(std::uint64_t bound);
  // Standard normal.
  double gaussian();
  // (gaussian + i*gaussian), unnormalized Ginibre entry.
  Complex complex_gaussian();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qdef

#endif  // QDEF_RNG_HPP
