#pragma once

// Orlicz sequence-space numerics for the functions t^2 log^{2j} t that
// describe the symmetric basic sequences of Z_n.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <vector>

#include "znlab/kp.hpp"
#include "znlab/rochberg.hpp"
#include "znlab/seqcore.hpp"

namespace znlab {

/// Normalised germ of t^2 log^{2j}(1/t):
///   f(t) = t^2 log^{2j}(1/t) / j^{2j}   for 0 <= t <= e^{-j},
///   f(t) = t^2                           for t > e^{-j}.
/// Both pieces meet at e^{-j} with value e^{-2j}; f(1) = 1 and f_0(t) = t^2.
/// The lower piece is increasing on its interval, so f is continuous and
/// strictly increasing, but it is not convex around the switch point.
class OrliczFunction {
 public:
  explicit OrliczFunction(unsigned j)
      : j_(j),
        switch_point_(std::exp(-static_cast<double>(j))),
        normalization_(j == 0 ? 1.0 : std::pow(static_cast<double>(j), 2.0 * j)) {}

  unsigned order() const noexcept { return j_; }
  double switch_point() const noexcept { return switch_point_; }
  double normalization() const noexcept { return normalization_; }

  double operator()(double t) const {
    if (t < 0.0) throw InvalidArgument("Orlicz function evaluated at a negative point");
    if (t == 0.0) return 0.0;
    if (j_ == 0 || t > switch_point_) return t * t;
    const double l = -std::log(t);
    return t * t * std::pow(l, 2.0 * j_) / normalization_;
  }

 private:
  unsigned j_;
  double switch_point_;
  double normalization_;
};

/// sum_i f(|x_i| / rho)
inline double orlicz_modular(const OrliczFunction& f, const CoordVector& x, double rho) {
  if (const auto* fl = x.as_flat()) return static_cast<double>(fl->length) * f(std::abs(fl->value) / rho);
  double s = 0.0;
  for (const auto& e : x.dense_entries()) s += f(std::abs(e.value) / rho);
  return s;
}

struct LuxemburgResult {
  double norm;
  double residual;
  unsigned iterations;
};

/// Bisection (on log rho) for the unique rho with modular(x / rho) = 1. The
/// bracket [max|x_i|, ||x||_1] always holds: f(1) = 1 and f(t) <= t on [0,1].
inline LuxemburgResult luxemburg(const OrliczFunction& f, const CoordVector& x, double tol = 1e-12,
                                 unsigned max_iterations = 200) {
  if (!(tol > 0.0)) throw InvalidArgument("Luxemburg tolerance must be positive");
  if (x.is_zero()) return {0.0, 0.0, 0};
  double lo = x.max_abs();
  double hi = x.l1_norm();
  const double r_lo = orlicz_modular(f, x, lo) - 1.0;
  if (std::abs(r_lo) <= tol) return {lo, std::abs(r_lo), 0};
  const double r_hi = orlicz_modular(f, x, hi) - 1.0;
  if (std::abs(r_hi) <= tol) return {hi, std::abs(r_hi), 0};
  // Rounding in ||x||_1 can leave the upper end marginally inside the level set.
  while (orlicz_modular(f, x, hi) > 1.0) hi *= 2.0;
  double log_lo = std::log(lo);
  double log_hi = std::log(hi);
  for (unsigned it = 1; it <= max_iterations; ++it) {
    const double rho = std::exp(0.5 * (log_lo + log_hi));
    const double r = orlicz_modular(f, x, rho) - 1.0;
    if (std::abs(r) <= tol) return {rho, std::abs(r), it};
    if (r > 0.0)
      log_lo = std::log(rho);
    else
      log_hi = std::log(rho);
  }
  throw ToleranceNotReached("Luxemburg bisection did not reach tolerance " + std::to_string(tol));
}

inline double luxemburg_norm(const OrliczFunction& f, const CoordVector& x, double tol = 1e-12) {
  return luxemburg(f, x, tol).norm;
}

using Rational = boost::multiprecision::cpp_rational;

struct TelescopeCoefficients {
  unsigned n;
  std::vector<Rational> alphas;  // alpha_1, ..., alpha_{n-1}
  Rational final;                // leading coefficient left after n-1 steps
};

/// Exact coefficient recursion of the log-power telescoping that reduces
/// ||(0,...,0,x)||_{Z_n} to a single weighted l_2 norm. Coefficient lists are
/// indexed by j = 1..len (rightmost entry j = 1):
///   c^{(1)}_j = 2^j / j!,   alpha_s = c^{(s)}_1,
///   c^{(s+1)}_j = c^{(s)}_{j+1} - alpha_s 2^j / j!.
inline TelescopeCoefficients telescope_coefficients(unsigned n) {
  if (n < 2) throw InvalidArgument("telescope_coefficients needs n >= 2");
  auto coef = [](unsigned j) {
    Rational c = 1;
    for (unsigned i = 1; i <= j; ++i) c = c * 2 / i;
    return c;
  };
  std::vector<Rational> c(n - 1);  // c[j-1] holds c_j
  for (unsigned j = 1; j <= n - 1; ++j) c[j - 1] = coef(j);
  TelescopeCoefficients out{n, {}, 0};
  while (true) {
    const Rational alpha = c.front();
    out.alphas.push_back(alpha);
    if (c.size() == 1) break;
    std::vector<Rational> next(c.size() - 1);
    for (std::size_t j = 1; j <= next.size(); ++j) next[j - 1] = c[j] - alpha * coef(static_cast<unsigned>(j));
    c = std::move(next);
  }
  out.final = out.alphas.back();
  return out;
}

/// ||(0,...,0,x)||_{Z_{n}} = ||KP_{1,n-1}(x)||_{Z_{n-1}} + ||x||_2.
inline double domain_norm(unsigned n, const CoordVector& x) {
  if (n < 2) throw InvalidArgument("domain_norm needs n >= 2");
  return quasinorm(RochbergVector(kp_map(n - 1, x))) + l2_norm(x);
}

struct GrowthRow {
  unsigned n;
  std::uint64_t length;
  double quasinorm;
  double logpow;  // log^{n-1} N
  double ratio;
};

/// Quasinorm of (0,...,0, N^{-1/2} 1_{[1,N]}) against log^{n-1} N. Flat vectors
/// keep every step O(1), so N up to 2^62 is fine.
inline std::vector<GrowthRow> growth_profile(unsigned n, std::span<const std::uint64_t> lengths) {
  if (n < 2) throw InvalidArgument("growth_profile needs n >= 2");
  std::vector<GrowthRow> rows;
  rows.reserve(lengths.size());
  for (std::uint64_t N : lengths) {
    if (N < 2) throw InvalidArgument("growth_profile needs N >= 2");
    const auto x = CoordVector::flat(N, 1.0 / std::sqrt(static_cast<double>(N)));
    const double q = quasinorm(RochbergVector::bottom(n, x));
    const double lp = std::pow(std::log(static_cast<double>(N)), static_cast<double>(n - 1));
    rows.push_back({n, N, q, lp, q / lp});
  }
  return rows;
}

inline void write_growth_csv(std::ostream& os, std::span<const GrowthRow> rows) {
  os << "n,N,quasinorm,logpow,ratio\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%u,%llu,%.17g,%.17g,%.17g\n", r.n,
                  static_cast<unsigned long long>(r.length), r.quasinorm, r.logpow, r.ratio);
    os << buf;
  }
}

}  // namespace znlab
