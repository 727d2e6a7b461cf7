#pragma once

// Finitely supported real sequences on the 1-based index set, with a
// compressed "flat" form a * (e_{off+1} + ... + e_{off+len}) that keeps
// constant-modulus vectors of astronomical length at O(1) cost.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "znlab/error.hpp"

namespace znlab {

using Index = std::uint64_t;

inline constexpr std::uint64_t kMaxFlatLength = std::uint64_t{1} << 62;

struct Entry {
  Index index;
  double value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

namespace detail {

inline std::atomic<std::uint64_t>& entry_budget_storage() {
  static std::atomic<std::uint64_t> budget{std::uint64_t{1} << 24};
  return budget;
}

inline void require_finite(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("non-finite value in CoordVector");
}

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline std::size_t hash_double(double v) {
  // +0.0 and -0.0 never reach here: zeros are not stored.
  return std::hash<double>{}(v);
}

}  // namespace detail

/// Largest number of explicit entries a Flat vector may expand into.
inline std::uint64_t entry_budget() { return detail::entry_budget_storage().load(); }
inline void set_entry_budget(std::uint64_t budget) { detail::entry_budget_storage().store(budget); }

class CoordVector {
 public:
  struct Flat {
    std::uint64_t length;
    double value;
    std::uint64_t offset;

    friend bool operator==(const Flat&, const Flat&) = default;
  };

  CoordVector() = default;

  /// Entries may come in any order; duplicated indices are rejected and
  /// zero values dropped.
  static CoordVector from_entries(std::vector<Entry> entries) {
    for (const auto& e : entries) {
      if (e.index == 0) throw InvalidArgument("indices are 1-based");
      detail::require_finite(e.value);
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < entries.size(); ++i)
      if (entries[i].index == entries[i - 1].index)
        throw InvalidArgument("duplicate index " + std::to_string(entries[i].index));
    std::erase_if(entries, [](const Entry& e) { return e.value == 0.0; });
    CoordVector out;
    out.rep_ = std::move(entries);
    return out;
  }

  /// values[k] becomes the coordinate at index first + k.
  static CoordVector from_values(std::span<const double> values, Index first = 1) {
    std::vector<Entry> entries;
    entries.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) entries.push_back({first + k, values[k]});
    return from_entries(std::move(entries));
  }

  static CoordVector unit(Index i, double value = 1.0) { return from_entries({{i, value}}); }

  static CoordVector flat(std::uint64_t length, double value, std::uint64_t offset = 0) {
    detail::require_finite(value);
    if (length > kMaxFlatLength) throw InvalidArgument("flat length exceeds 2^62");
    if (offset > std::numeric_limits<std::uint64_t>::max() - length)
      throw InvalidArgument("flat support overflows the index range");
    CoordVector out;
    if (length == 0 || value == 0.0) return out;
    out.rep_ = Flat{length, value, offset};
    return out;
  }

  bool is_flat() const noexcept { return std::holds_alternative<Flat>(rep_); }
  bool is_zero() const noexcept { return !is_flat() && dense().empty(); }

  /// nullptr when the vector is stored densely.
  const Flat* as_flat() const noexcept { return std::get_if<Flat>(&rep_); }

  /// Explicit entries of a dense vector; empty for a Flat one.
  std::span<const Entry> dense_entries() const noexcept {
    if (const auto* d = std::get_if<std::vector<Entry>>(&rep_)) return *d;
    return {};
  }

  std::uint64_t support_size() const noexcept {
    if (const auto* f = as_flat()) return f->length;
    return dense().size();
  }

  Index min_index() const noexcept {
    if (const auto* f = as_flat()) return f->offset + 1;
    return dense().empty() ? 0 : dense().front().index;
  }

  /// 0 for the zero vector.
  Index max_index() const noexcept {
    if (const auto* f = as_flat()) return f->offset + f->length;
    return dense().empty() ? 0 : dense().back().index;
  }

  double at(Index i) const noexcept {
    if (const auto* f = as_flat()) return (i > f->offset && i <= f->offset + f->length) ? f->value : 0.0;
    const auto& d = dense();
    auto it = std::lower_bound(d.begin(), d.end(), i,
                               [](const Entry& e, Index idx) { return e.index < idx; });
    return (it != d.end() && it->index == i) ? it->value : 0.0;
  }

  double max_abs() const noexcept {
    if (const auto* f = as_flat()) return std::abs(f->value);
    double m = 0.0;
    for (const auto& e : dense()) m = std::max(m, std::abs(e.value));
    return m;
  }

  double l1_norm() const noexcept {
    if (const auto* f = as_flat()) return std::abs(f->value) * static_cast<double>(f->length);
    double s = 0.0;
    for (const auto& e : dense()) s += std::abs(e.value);
    return s;
  }

  /// Explicit entry list, expanding a Flat vector if it fits the budget.
  std::vector<Entry> to_entries(std::uint64_t budget = entry_budget()) const {
    if (const auto* f = as_flat()) {
      if (f->length > budget) throw EntryBudgetExceeded(f->length, budget);
      std::vector<Entry> out;
      out.reserve(static_cast<std::size_t>(f->length));
      for (std::uint64_t k = 1; k <= f->length; ++k) out.push_back({f->offset + k, f->value});
      return out;
    }
    return dense();
  }

  CoordVector densified(std::uint64_t budget = entry_budget()) const {
    CoordVector out;
    out.rep_ = to_entries(budget);
    return out;
  }

  /// Applies fn(value) to every stored value. A Flat vector stays Flat.
  template <class Fn>
  CoordVector map_values(Fn&& fn) const {
    if (const auto* f = as_flat()) return flat(f->length, fn(f->value), f->offset);
    std::vector<Entry> out;
    out.reserve(dense().size());
    for (const auto& e : dense()) {
      const double v = fn(e.value);
      detail::require_finite(v);
      if (v != 0.0) out.push_back({e.index, v});
    }
    return from_sorted(std::move(out));
  }

  /// Entries must already be strictly index-sorted, finite and nonzero.
  static CoordVector from_sorted(std::vector<Entry> entries) {
    CoordVector out;
    out.rep_ = std::move(entries);
    return out;
  }

  friend bool operator==(const CoordVector& a, const CoordVector& b) {
    const auto* fa = a.as_flat();
    const auto* fb = b.as_flat();
    if (fa && fb) return *fa == *fb;
    if (!fa && !fb) return a.dense() == b.dense();
    const Flat& f = fa ? *fa : *fb;
    const auto& d = fa ? b.dense() : a.dense();
    if (d.size() != f.length) return false;
    for (std::size_t k = 0; k < d.size(); ++k)
      if (d[k].index != f.offset + 1 + k || d[k].value != f.value) return false;
    return true;
  }

  /// Equal vectors hash equal regardless of representation: a dense vector
  /// that is a contiguous constant run hashes as the matching Flat.
  std::size_t hash() const noexcept {
    if (const auto* f = as_flat()) return hash_run(f->length, f->value, f->offset);
    const auto& d = dense();
    if (d.empty()) return 0;
    bool run = true;
    for (std::size_t k = 1; k < d.size() && run; ++k)
      run = d[k].index == d[k - 1].index + 1 && d[k].value == d[0].value;
    if (run) return hash_run(d.size(), d[0].value, d[0].index - 1);
    std::size_t h = 0x51ed27;
    for (const auto& e : d) {
      h = detail::hash_mix(h, std::hash<Index>{}(e.index));
      h = detail::hash_mix(h, detail::hash_double(e.value));
    }
    return h;
  }

 private:
  const std::vector<Entry>& dense() const { return std::get<std::vector<Entry>>(rep_); }

  static std::size_t hash_run(std::uint64_t length, double value, std::uint64_t offset) {
    std::size_t h = 0xf1a7;
    h = detail::hash_mix(h, std::hash<std::uint64_t>{}(length));
    h = detail::hash_mix(h, detail::hash_double(value));
    return detail::hash_mix(h, std::hash<std::uint64_t>{}(offset));
  }

  std::variant<std::vector<Entry>, Flat> rep_;
};

namespace detail {

inline bool same_support(const CoordVector::Flat& a, const CoordVector::Flat& b) {
  return a.length == b.length && a.offset == b.offset;
}

/// Overlap of two flat supports as (offset, length); length 0 when disjoint.
inline std::pair<std::uint64_t, std::uint64_t> flat_overlap(const CoordVector::Flat& a,
                                                            const CoordVector::Flat& b) {
  const std::uint64_t lo = std::max(a.offset, b.offset);
  const std::uint64_t hi = std::min(a.offset + a.length, b.offset + b.length);
  return {lo, hi > lo ? hi - lo : 0};
}

template <class Combine>
std::vector<Entry> merge(std::span<const Entry> a, std::span<const Entry> b, Combine combine) {
  std::vector<Entry> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  auto push = [&out](Index idx, double v) {
    require_finite(v);
    if (v != 0.0) out.push_back({idx, v});
  };
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      push(a[i].index, combine(a[i].value, 0.0));
      ++i;
    } else if (i == a.size() || b[j].index < a[i].index) {
      push(b[j].index, combine(0.0, b[j].value));
      ++j;
    } else {
      push(a[i].index, combine(a[i].value, b[j].value));
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace detail

inline double l2_norm(const CoordVector& x) {
  if (const auto* f = x.as_flat()) return std::abs(f->value) * std::sqrt(static_cast<double>(f->length));
  double s = 0.0;
  for (const auto& e : x.dense_entries()) s += e.value * e.value;
  return std::sqrt(s);
}

/// Bilinear pairing sum_i x_i y_i (no conjugation).
inline double pair(const CoordVector& x, const CoordVector& y) {
  const auto* fx = x.as_flat();
  const auto* fy = y.as_flat();
  if (fx && fy) {
    const auto [lo, len] = detail::flat_overlap(*fx, *fy);
    return static_cast<double>(len) * (fx->value * fy->value);
  }
  if (fx || fy) {
    const auto& f = fx ? *fx : *fy;
    const auto& d = fx ? y : x;
    double s = 0.0;
    for (const auto& e : d.dense_entries())
      if (e.index > f.offset && e.index <= f.offset + f.length) s += e.value;
    return s * f.value;
  }
  auto a = x.dense_entries();
  auto b = y.dense_entries();
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index < b[j].index) {
      ++i;
    } else if (b[j].index < a[i].index) {
      ++j;
    } else {
      s += a[i].value * b[j].value;
      ++i;
      ++j;
    }
  }
  return s;
}

inline CoordVector scale(double lambda, const CoordVector& x) {
  detail::require_finite(lambda);
  if (lambda == 0.0) return {};
  return x.map_values([lambda](double v) { return lambda * v; });
}

inline CoordVector add(const CoordVector& x, const CoordVector& y) {
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  const auto* fx = x.as_flat();
  const auto* fy = y.as_flat();
  if (fx && fy && detail::same_support(*fx, *fy))
    return CoordVector::flat(fx->length, fx->value + fy->value, fx->offset);
  const auto a = x.to_entries();
  const auto b = y.to_entries();
  return CoordVector::from_sorted(detail::merge(a, b, [](double u, double v) { return u + v; }));
}

inline CoordVector sub(const CoordVector& x, const CoordVector& y) {
  if (y.is_zero()) return x;
  if (x.is_zero()) return scale(-1.0, y);
  const auto* fx = x.as_flat();
  const auto* fy = y.as_flat();
  if (fx && fy && detail::same_support(*fx, *fy))
    return CoordVector::flat(fx->length, fx->value - fy->value, fx->offset);
  const auto a = x.to_entries();
  const auto b = y.to_entries();
  return CoordVector::from_sorted(detail::merge(a, b, [](double u, double v) { return u - v; }));
}

/// Coordinatewise product. Never densifies: the support of the result is the
/// intersection of the two supports.
inline CoordVector hadamard(const CoordVector& x, const CoordVector& y) {
  const auto* fx = x.as_flat();
  const auto* fy = y.as_flat();
  if (fx && fy) {
    const auto [lo, len] = detail::flat_overlap(*fx, *fy);
    return CoordVector::flat(len, fx->value * fy->value, lo);
  }
  if (fx || fy) {
    const auto& f = fx ? *fx : *fy;
    const auto& d = fx ? y : x;
    std::vector<Entry> out;
    for (const auto& e : d.dense_entries()) {
      if (e.index > f.offset && e.index <= f.offset + f.length) {
        const double v = e.value * f.value;
        detail::require_finite(v);
        if (v != 0.0) out.push_back({e.index, v});
      }
    }
    return CoordVector::from_sorted(std::move(out));
  }
  return CoordVector::from_sorted(detail::merge(x.dense_entries(), y.dense_entries(),
                                                [](double u, double v) { return u * v; }));
}

inline CoordVector operator+(const CoordVector& x, const CoordVector& y) { return add(x, y); }
inline CoordVector operator-(const CoordVector& x, const CoordVector& y) { return sub(x, y); }
inline CoordVector operator-(const CoordVector& x) { return scale(-1.0, x); }
inline CoordVector operator*(double lambda, const CoordVector& x) { return scale(lambda, x); }

}  // namespace znlab

template <>
struct std::hash<znlab::CoordVector> {
  std::size_t operator()(const znlab::CoordVector& x) const noexcept { return x.hash(); }
};
