#pragma once

// Counter-based sample generation: sample i of stream `tag` draws from an
// engine seeded by (seed, tag, i) only, so samples can be produced in any
// order and on any thread.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

#include "znlab/rochberg.hpp"
#include "znlab/seqcore.hpp"

namespace znlab {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  /// uniform on {lo, ..., hi}
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
  }

  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }

 private:
  std::mt19937_64 engine_;
};

/// Nonzero vector supported in 1..dim with a random support of random size
/// and Gaussian values.
inline CoordVector random_dense(SampleRng& rng, std::size_t dim) {
  std::vector<Index> idx(dim);
  std::iota(idx.begin(), idx.end(), Index{1});
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  const auto s = static_cast<std::size_t>(rng.integer(1, dim));
  std::vector<Entry> e;
  e.reserve(s);
  for (std::size_t k = 0; k < s; ++k) {
    double v = 0.0;
    while (v == 0.0) v = rng.normal();
    e.push_back({idx[k], v});
  }
  return CoordVector::from_entries(std::move(e));
}

/// Random vector inside 1..dim; one draw in eight is Flat.
inline CoordVector random_coord(SampleRng& rng, std::size_t dim) {
  if (dim >= 2 && rng.coin(0.125)) {
    const auto len = rng.integer(1, dim);
    const auto off = rng.integer(0, dim - len);
    double v = 0.0;
    while (v == 0.0) v = rng.normal();
    return CoordVector::flat(len, v, off);
  }
  return random_dense(rng, dim);
}

/// Random element of Z_n; each coordinate is zero with probability 1/4 but the
/// vector as a whole is never zero.
inline RochbergVector random_rochberg(SampleRng& rng, unsigned n, std::size_t dim) {
  std::vector<CoordVector> c(n);
  bool any = false;
  for (auto& x : c)
    if (!rng.coin(0.25)) {
      x = random_coord(rng, dim);
      any = true;
    }
  if (!any) c[rng.integer(0, n - 1)] = random_coord(rng, dim);
  return RochbergVector(std::move(c));
}

/// count disjoint normalised blocks with random supports inside 1..dim.
inline std::vector<CoordVector> random_blocks(SampleRng& rng, std::size_t count, std::size_t dim) {
  if (count == 0 || count > dim) throw InvalidArgument("random_blocks needs 1 <= count <= dim");
  std::vector<Index> idx(dim);
  std::iota(idx.begin(), idx.end(), Index{1});
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  // cut points split the shuffled indices into count nonempty groups
  std::vector<std::size_t> cuts;
  std::vector<std::size_t> pool(dim - 1);
  std::iota(pool.begin(), pool.end(), std::size_t{1});
  std::shuffle(pool.begin(), pool.end(), rng.engine());
  cuts.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(dim);
  std::vector<CoordVector> blocks;
  std::size_t start = 0;
  for (std::size_t end : cuts) {
    std::vector<Entry> e;
    for (std::size_t k = start; k < end; ++k) {
      double v = 0.0;
      while (v == 0.0) v = rng.normal();
      e.push_back({idx[k], v});
    }
    auto w = CoordVector::from_entries(std::move(e));
    blocks.push_back(scale(1.0 / l2_norm(w), w));
    start = end;
  }
  return blocks;
}

}  // namespace znlab
