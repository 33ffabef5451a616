#include "qdef/rng.hpp"

namespace qdef {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a_bytes(std::uint64_t hash, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= p[i];
    hash *= kFnvPrime;
  }
  return hash;
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view name) {
  std::uint64_t h = kFnvOffset;
  // Little-endian byte order fixed explicitly so the derivation (and with it
  // every report) is platform-stable.
  unsigned char seed_bytes[8];
  for (int i = 0; i < 8; ++i) {
    seed_bytes[i] = static_cast<unsigned char>((parent >> (8 * i)) & 0xff);
  }
  h = fnv1a_bytes(h, seed_bytes, sizeof(seed_bytes));
  h = fnv1a_bytes(h, name.data(), name.size());
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RngStream RngStream::substream(std::string_view name) const {
  return RngStream(derive_seed(seed_, name));
}

double RngStream::uniform() {
  // 53-bit mantissa construction: uniform on [0,1), never returns 1.
  return (engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t RngStream::integer(std::uint64_t bound) {
  if (bound == 0) {
    throw DimensionError("integer() needs a positive bound");
  }
  // Rejection sampling to stay unbiased.
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

double RngStream::gaussian() { return normal_(engine_); }

Complex RngStream::complex_gaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return {re, im};
}

}  // namespace qdef
