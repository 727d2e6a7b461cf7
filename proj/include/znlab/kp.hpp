#pragma once

// Kalton-Peck differential: KP^k x = (2^k / k!) x log^k(|x| / ||x||_2), with
// natural logarithms and the convention 0 * log^k 0 = 0.

#include <cmath>
#include <cstdint>
#include <vector>

#include "znlab/seqcore.hpp"

namespace znlab {

/// 2^k / k!
inline double kp_coefficient(unsigned k) {
  double c = 1.0;
  for (unsigned i = 1; i <= k; ++i) c *= 2.0 / static_cast<double>(i);
  return c;
}

namespace detail {

inline double ipow(double base, unsigned k) {
  double r = 1.0;
  for (unsigned i = 0; i < k; ++i) r *= base;
  return r;
}

/// log(|x_i| / ||x||_2) for the single value of a Flat vector: -log(N)/2.
inline double flat_log_ratio(const CoordVector::Flat& f) {
  return -0.5 * std::log(static_cast<double>(f.length));
}

inline double kp_value(unsigned k, double v, double log_ratio) {
  return kp_coefficient(k) * v * ipow(log_ratio, k);
}

}  // namespace detail

inline CoordVector kp_component(unsigned k, const CoordVector& x) {
  if (k == 0 || x.is_zero()) return x;
  if (const auto* f = x.as_flat()) {
    const double lr = detail::flat_log_ratio(*f);
    return CoordVector::flat(f->length, detail::kp_value(k, f->value, lr), f->offset);
  }
  const double norm = l2_norm(x);
  return x.map_values(
      [&](double v) { return detail::kp_value(k, v, std::log(std::abs(v) / norm)); });
}

/// (KP^m x, KP^{m-1} x, ..., KP^1 x): highest derivative first.
inline std::vector<CoordVector> kp_map(unsigned m, const CoordVector& x) {
  if (m == 0) throw InvalidArgument("kp_map needs m >= 1");
  std::vector<CoordVector> out;
  out.reserve(m);
  for (unsigned k = m; k >= 1; --k) out.push_back(kp_component(k, x));
  return out;
}

struct BoundedValue {
  double value;
  double bound;
};

/// |sum_{k=0}^{n-1} (-1)^k <KP^{n-1-k} x, KP^k x'>| against 2^{n-1} ||x|| ||x'||.
inline BoundedValue lemma4_sum(unsigned n, const CoordVector& x, const CoordVector& xp) {
  if (n == 0) throw InvalidArgument("lemma4_sum needs n >= 1");
  std::vector<CoordVector> kx, kxp;
  kx.reserve(n);
  kxp.reserve(n);
  for (unsigned k = 0; k < n; ++k) {
    kx.push_back(kp_component(k, x));
    kxp.push_back(kp_component(k, xp));
  }
  double s = 0.0;
  for (unsigned k = 0; k < n; ++k) {
    const double term = pair(kx[n - 1 - k], kxp[k]);
    s += (k % 2 == 0) ? term : -term;
  }
  return {std::abs(s), std::ldexp(1.0, static_cast<int>(n) - 1) * l2_norm(x) * l2_norm(xp)};
}

}  // namespace znlab
