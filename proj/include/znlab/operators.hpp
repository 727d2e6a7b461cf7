#pragma once

// Operators on Z_n: coordinate atoms acting on l_2 sequences, triangular
// matrices of atoms indexed by derivative order, block operators T_U, the
// pairing adjoint T^+ on finite truncations, and ratio diagnostics.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "znlab/kp.hpp"
#include "znlab/rochberg.hpp"
#include "znlab/seqcore.hpp"

namespace znlab {

class OperatorAtom;

struct ZeroOp {
  friend bool operator==(const ZeroOp&, const ZeroOp&) = default;
};

struct IdentityOp {
  friend bool operator==(const IdentityOp&, const IdentityOp&) = default;
};

/// lambda * Identity
struct ScaleOp {
  double lambda;
  friend bool operator==(const ScaleOp&, const ScaleOp&) = default;
};

/// Diagonal multiplication x -> d * x; zero outside the support of d.
struct Multiplier {
  CoordVector diagonal;
  friend bool operator==(const Multiplier&, const Multiplier&) = default;
};

/// e_i -> e_{images[i-1]} for i <= images.size(), identity beyond. images is
/// a bijection of {1, ..., images.size()}.
struct Permutation {
  std::vector<Index> images;
  friend bool operator==(const Permutation&, const Permutation&) = default;
};

/// e_v -> KP^k(w_v) for v <= blocks.size(), e_v -> 0 beyond; k = 0 is the
/// plain block embedding. Blocks are disjoint and normalised.
struct BlockMap {
  std::vector<CoordVector> blocks;
  unsigned kp_order = 0;
  std::vector<CoordVector> images;  // KP^k(w_v), cached

  friend bool operator==(const BlockMap& a, const BlockMap& b) {
    return a.kp_order == b.kp_order && a.blocks == b.blocks;
  }
};

struct SumOp {
  std::vector<OperatorAtom> terms;
};

/// factors[0] * factors[1] * ...: the last factor acts first.
struct ComposeOp {
  std::vector<OperatorAtom> factors;
};

class OperatorAtom {
 public:
  using Node = std::variant<ZeroOp, IdentityOp, ScaleOp, Multiplier, Permutation, BlockMap, SumOp,
                            ComposeOp>;

  OperatorAtom() : node_(ZeroOp{}) {}

  static OperatorAtom zero() { return OperatorAtom(ZeroOp{}); }
  static OperatorAtom identity() { return OperatorAtom(IdentityOp{}); }

  static OperatorAtom scaled(double lambda) {
    if (lambda == 0.0) return zero();
    if (lambda == 1.0) return identity();
    return OperatorAtom(ScaleOp{lambda});
  }

  static OperatorAtom multiplier(CoordVector d) {
    if (d.is_zero()) return zero();
    return OperatorAtom(Multiplier{std::move(d)});
  }

  static OperatorAtom permutation(std::vector<Index> images) {
    std::vector<bool> seen(images.size() + 1, false);
    for (Index im : images) {
      if (im == 0 || im > images.size() || seen[im])
        throw InvalidArgument("permutation images must be a bijection of 1..m");
      seen[im] = true;
    }
    return OperatorAtom(Permutation{std::move(images)});
  }

  /// Throws BlockOverlap if two blocks share an index.
  static OperatorAtom block_map(std::vector<CoordVector> blocks, unsigned kp_order = 0) {
    validate_blocks(blocks);
    std::vector<CoordVector> images;
    images.reserve(blocks.size());
    for (const auto& w : blocks) images.push_back(kp_component(kp_order, w));
    return OperatorAtom(BlockMap{std::move(blocks), kp_order, std::move(images)});
  }

  static OperatorAtom sum(std::vector<OperatorAtom> terms) {
    std::vector<OperatorAtom> kept;
    for (auto& t : terms) {
      if (t.is_zero()) continue;
      if (auto* s = std::get_if<SumOp>(&t.node_))
        kept.insert(kept.end(), s->terms.begin(), s->terms.end());
      else
        kept.push_back(std::move(t));
    }
    if (kept.empty()) return zero();
    if (kept.size() == 1) return std::move(kept.front());
    return OperatorAtom(SumOp{std::move(kept)});
  }

  static OperatorAtom compose(std::vector<OperatorAtom> factors) {
    std::vector<OperatorAtom> kept;
    for (auto& f : factors) {
      if (f.is_zero()) return zero();
      if (f.is_identity()) continue;
      if (auto* c = std::get_if<ComposeOp>(&f.node_))
        kept.insert(kept.end(), c->factors.begin(), c->factors.end());
      else
        kept.push_back(std::move(f));
    }
    if (kept.empty()) return identity();
    if (kept.size() == 1) return std::move(kept.front());
    return OperatorAtom(ComposeOp{std::move(kept)});
  }

  const Node& node() const noexcept { return node_; }
  bool is_zero() const noexcept { return std::holds_alternative<ZeroOp>(node_); }
  bool is_identity() const noexcept { return std::holds_alternative<IdentityOp>(node_); }

  CoordVector apply(const CoordVector& x) const {
    return std::visit([&x](const auto& op) { return apply_node(op, x); }, node_);
  }

  friend bool operator==(const OperatorAtom& a, const OperatorAtom& b) { return a.node_ == b.node_; }

 private:
  explicit OperatorAtom(Node n) : node_(std::move(n)) {}

  static void validate_blocks(const std::vector<CoordVector>& blocks) {
    std::vector<std::pair<Index, Index>> spans;  // [min, max] per block
    for (std::size_t v = 0; v < blocks.size(); ++v) {
      const auto& w = blocks[v];
      if (w.is_zero()) throw InvalidArgument("block " + std::to_string(v + 1) + " is zero");
      if (std::abs(l2_norm(w) - 1.0) > 1e-12)
        throw InvalidArgument("block " + std::to_string(v + 1) + " is not normalised");
      spans.emplace_back(w.min_index(), w.max_index());
    }
    // Disjoint index ranges are sufficient; interleaved sparse blocks fall
    // back to an exact support check.
    std::vector<std::size_t> order(blocks.size());
    for (std::size_t v = 0; v < order.size(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return spans[a] < spans[b]; });
    bool ranges_disjoint = true;
    for (std::size_t k = 1; k < order.size(); ++k)
      if (spans[order[k]].first <= spans[order[k - 1]].second) ranges_disjoint = false;
    if (ranges_disjoint) return;
    std::vector<Index> all;
    for (const auto& w : blocks)
      for (const auto& e : w.to_entries()) all.push_back(e.index);
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
      throw BlockOverlap("blocks are not disjointly supported");
  }

  static CoordVector apply_node(const ZeroOp&, const CoordVector&) { return {}; }
  static CoordVector apply_node(const IdentityOp&, const CoordVector& x) { return x; }
  static CoordVector apply_node(const ScaleOp& s, const CoordVector& x) { return scale(s.lambda, x); }
  static CoordVector apply_node(const Multiplier& m, const CoordVector& x) {
    return hadamard(m.diagonal, x);
  }

  static CoordVector apply_node(const Permutation& p, const CoordVector& x) {
    const Index m = p.images.size();
    if (const auto* f = x.as_flat(); f && f->offset >= m) return x;
    auto entries = x.to_entries();
    for (auto& e : entries)
      if (e.index <= m) e.index = p.images[e.index - 1];
    return CoordVector::from_entries(std::move(entries));
  }

  static CoordVector apply_node(const BlockMap& b, const CoordVector& x) {
    std::vector<Entry> out;
    for (const auto& e : x.to_entries()) {
      if (e.index > b.images.size()) break;
      for (const auto& w : b.images[e.index - 1].to_entries()) {
        const double v = e.value * w.value;
        if (v != 0.0) out.push_back({w.index, v});
      }
    }
    return CoordVector::from_entries(std::move(out));
  }

  static CoordVector apply_node(const SumOp& s, const CoordVector& x) {
    CoordVector acc;
    for (const auto& t : s.terms) acc = acc + t.apply(x);
    return acc;
  }

  static CoordVector apply_node(const ComposeOp& c, const CoordVector& x) {
    CoordVector y = x;
    for (auto it = c.factors.rbegin(); it != c.factors.rend(); ++it) y = it->apply(y);
    return y;
  }

  Node node_;
};

inline bool operator==(const SumOp& a, const SumOp& b) { return a.terms == b.terms; }
inline bool operator==(const ComposeOp& a, const ComposeOp& b) { return a.factors == b.factors; }

/// Matrix of atoms indexed by derivative order: entry(i, j) maps the input
/// coordinate of order j into the output coordinate of order i. Only j <= i
/// may be nonzero, so (Av)_i = sum_{j <= i} A(i, j) v_j. Rectangular shapes
/// cover iota_{k,n} and pi_{n,k}.
class OperatorMatrix {
 public:
  /// entries[i * in_order + j] = entry(i, j).
  OperatorMatrix(unsigned out_order, unsigned in_order, std::vector<OperatorAtom> entries)
      : out_(out_order), in_(in_order), entries_(std::move(entries)) {
    if (out_ == 0 || in_ == 0) throw InvalidArgument("operator matrix orders must be >= 1");
    if (entries_.size() != static_cast<std::size_t>(out_) * in_)
      throw InvalidArgument("operator matrix has the wrong number of entries");
    for (unsigned i = 0; i < out_; ++i)
      for (unsigned j = i + 1; j < in_; ++j)
        if (!entry(i, j).is_zero())
          throw InvalidArgument("operator matrix is not triangular: order " + std::to_string(j) +
                                " feeds lower order " + std::to_string(i));
  }

  static OperatorMatrix zero(unsigned out_order, unsigned in_order) {
    return OperatorMatrix(out_order, in_order,
                          std::vector<OperatorAtom>(static_cast<std::size_t>(out_order) * in_order));
  }

  static OperatorMatrix diagonal(unsigned n, const OperatorAtom& atom) {
    auto m = zero(n, n);
    for (unsigned i = 0; i < n; ++i) m.entries_[i * n + i] = atom;
    return m;
  }

  static OperatorMatrix identity(unsigned n) { return diagonal(n, OperatorAtom::identity()); }

  /// From a square display written in 1-based labels, rows[a][b] with label 1
  /// the highest order; entries below the diagonal must be zero.
  static OperatorMatrix from_labels(const std::vector<std::vector<OperatorAtom>>& rows) {
    const auto n = static_cast<unsigned>(rows.size());
    std::vector<OperatorAtom> e(static_cast<std::size_t>(n) * n);
    for (unsigned a = 0; a < n; ++a) {
      if (rows[a].size() != n) throw InvalidArgument("label display must be square");
      for (unsigned b = 0; b < n; ++b) e[(n - 1 - a) * n + (n - 1 - b)] = rows[a][b];
    }
    return OperatorMatrix(n, n, std::move(e));
  }

  unsigned out_order() const noexcept { return out_; }
  unsigned in_order() const noexcept { return in_; }
  bool is_square() const noexcept { return out_ == in_; }

  const OperatorAtom& entry(unsigned i, unsigned j) const { return entries_.at(i * in_ + j); }

  bool is_zero() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const OperatorAtom& a) { return a.is_zero(); });
  }

  RochbergVector apply(const RochbergVector& v) const {
    if (v.order() != in_)
      throw OrderMismatch("operator expects order " + std::to_string(in_) + ", got " +
                          std::to_string(v.order()));
    std::vector<CoordVector> out(out_);
    for (unsigned i = 0; i < out_; ++i) {
      CoordVector acc;
      for (unsigned j = 0; j <= i && j < in_; ++j) {
        const auto& a = entry(i, j);
        if (a.is_zero()) continue;
        acc = acc + a.apply(v.at_order(j));
      }
      out[out_ - 1 - i] = std::move(acc);
    }
    return RochbergVector(std::move(out));
  }

  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.in_ != b.out_)
      throw OrderMismatch("cannot compose: inner orders " + std::to_string(a.in_) + " and " +
                          std::to_string(b.out_));
    std::vector<OperatorAtom> e(static_cast<std::size_t>(a.out_) * b.in_);
    for (unsigned i = 0; i < a.out_; ++i)
      for (unsigned j = 0; j < b.in_; ++j) {
        std::vector<OperatorAtom> terms;
        for (unsigned k = 0; k < a.in_; ++k)
          terms.push_back(OperatorAtom::compose({a.entry(i, k), b.entry(k, j)}));
        e[i * b.in_ + j] = OperatorAtom::sum(std::move(terms));
      }
    return OperatorMatrix(a.out_, b.in_, std::move(e));
  }

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.out_ != b.out_ || a.in_ != b.in_) throw OrderMismatch("cannot add operators of different shape");
    std::vector<OperatorAtom> e(a.entries_.size());
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = OperatorAtom::sum({a.entries_[k], b.entries_[k]});
    return OperatorMatrix(a.out_, a.in_, std::move(e));
  }

  friend OperatorMatrix operator*(double lambda, const OperatorMatrix& a) {
    std::vector<OperatorAtom> e(a.entries_.size());
    for (std::size_t k = 0; k < e.size(); ++k)
      e[k] = OperatorAtom::compose({OperatorAtom::scaled(lambda), a.entries_[k]});
    return OperatorMatrix(a.out_, a.in_, std::move(e));
  }

  friend bool operator==(const OperatorMatrix&, const OperatorMatrix&) = default;

 private:
  unsigned out_;
  unsigned in_;
  std::vector<OperatorAtom> entries_;
};

inline RochbergVector apply(const OperatorMatrix& a, const RochbergVector& v) { return a.apply(v); }

/// iota_{k,n} as an n-by-k operator matrix.
inline OperatorMatrix embed_matrix(unsigned k, unsigned n) {
  if (k == 0 || k > n) throw OrderMismatch("iota needs 1 <= k <= n");
  std::vector<OperatorAtom> e(static_cast<std::size_t>(n) * k);
  for (unsigned j = 0; j < k; ++j) e[(j + n - k) * k + j] = OperatorAtom::identity();
  return OperatorMatrix(n, k, std::move(e));
}

/// pi_{n,k} as a k-by-n operator matrix.
inline OperatorMatrix project_matrix(unsigned n, unsigned k) {
  if (k == 0 || k > n) throw OrderMismatch("pi needs 1 <= k <= n");
  std::vector<OperatorAtom> e(static_cast<std::size_t>(k) * n);
  for (unsigned i = 0; i < k; ++i) e[i * n + i] = OperatorAtom::identity();
  return OperatorMatrix(k, n, std::move(e));
}

/// T^k with T = iota_{n-1,n} pi_{n,n-1}: (x_{n-1},...,x_0) -> (x_{n-2},...,x_0,0).
inline OperatorMatrix shift_power(unsigned n, unsigned k) {
  if (n == 0) throw InvalidArgument("shift_power needs n >= 1");
  if (k > n) throw InvalidArgument("shift_power needs k <= n");
  const OperatorMatrix shift =
      n == 1 ? OperatorMatrix::zero(1, 1) : embed_matrix(n - 1, n) * project_matrix(n, n - 1);
  auto out = OperatorMatrix::identity(n);
  for (unsigned s = 0; s < k; ++s) out = shift * out;
  return out;
}

/// T_U^n: entry(i, j) = (e_v -> KP^{i-j} w_v) for i >= j.
inline OperatorMatrix block_operator(unsigned n, const std::vector<CoordVector>& blocks) {
  if (n == 0) throw InvalidArgument("block_operator needs n >= 1");
  std::vector<OperatorAtom> e(static_cast<std::size_t>(n) * n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j <= i; ++j) e[i * n + j] = OperatorAtom::block_map(blocks, i - j);
  return OperatorMatrix(n, n, std::move(e));
}

/// count disjoint flat blocks of the given length, L^{-1/2} on (v-1)L+1..vL.
inline std::vector<CoordVector> flat_blocks(std::uint64_t length, std::size_t count) {
  std::vector<CoordVector> w;
  w.reserve(count);
  const double a = 1.0 / std::sqrt(static_cast<double>(length));
  for (std::size_t v = 0; v < count; ++v) w.push_back(CoordVector::flat(length, a, v * length));
  return w;
}

struct Corners {
  OperatorMatrix leading;   // R_k on the k highest orders
  OperatorMatrix trailing;  // R^{n-k} on the n-k lowest orders
};

/// R_k commutes with iota_{k,n} and R^{n-k} with pi_{n,n-k}:
///   R iota_{k,n} = iota_{k,n} R_k,   pi_{n,n-k} R = R^{n-k} pi_{n,n-k}.
inline Corners corner_extract(const OperatorMatrix& r, unsigned k) {
  if (!r.is_square()) throw OrderMismatch("corner extraction needs a square operator");
  const unsigned n = r.out_order();
  if (k < 1 || k >= n) throw OrderMismatch("corner extraction needs 1 <= k < n");
  const unsigned lo = n - k;
  std::vector<OperatorAtom> lead(static_cast<std::size_t>(k) * k);
  for (unsigned i = 0; i < k; ++i)
    for (unsigned j = 0; j < k; ++j) lead[i * k + j] = r.entry(i + lo, j + lo);
  std::vector<OperatorAtom> trail(static_cast<std::size_t>(lo) * lo);
  for (unsigned i = 0; i < lo; ++i)
    for (unsigned j = 0; j < lo; ++j) trail[i * lo + j] = r.entry(i, j);
  return {OperatorMatrix(k, k, std::move(lead)), OperatorMatrix(lo, lo, std::move(trail))};
}

/// Dense (n m)-by-(n m) realisation on coordinates 1..m, laid out like
/// PairingGram: component (label a, index i) at (a-1) m + (i-1).
struct FiniteOperator {
  unsigned n;
  std::size_t m;
  Eigen::MatrixXd matrix;

  RochbergVector apply(const RochbergVector& v) const {
    if (v.order() != n) throw OrderMismatch("finite operator order mismatch");
    return from_stacked(matrix * to_stacked(v, m), n);
  }
};

/// Throws InvalidArgument if A maps some e_i (i <= m) outside 1..m.
inline FiniteOperator to_finite(const OperatorMatrix& a, std::size_t m) {
  if (!a.is_square()) throw OrderMismatch("finite realisation needs a square operator");
  const unsigned n = a.in_order();
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n * m, n * m);
  for (unsigned b = 0; b < n; ++b)
    for (std::size_t i = 1; i <= m; ++i) {
      std::vector<CoordVector> c(n);
      c[b] = CoordVector::unit(i);
      const auto out = a.apply(RochbergVector(std::move(c)));
      if (out.max_index() > m)
        throw InvalidArgument("operator output leaves the truncation 1.." + std::to_string(m));
      mat.col(b * m + (i - 1)) = to_stacked(out, m);
    }
  return {n, m, std::move(mat)};
}

/// T^+ with D_n(T^+ x)(y) = D_n(x)(T y), i.e. J^{-1} T^T J. J is a signed
/// block permutation, so block (a, b) of T^+ is (-1)^{a+b} (T_{n+1-b, n+1-a})^T.
inline FiniteOperator adjoint_plus(const FiniteOperator& t) {
  const unsigned n = t.n;
  const auto m = static_cast<Eigen::Index>(t.m);
  Eigen::MatrixXd out(t.matrix.rows(), t.matrix.cols());
  for (unsigned a = 1; a <= n; ++a)
    for (unsigned b = 1; b <= n; ++b) {
      const double sign = ((a + b) % 2 == 0) ? 1.0 : -1.0;
      out.block((a - 1) * m, (b - 1) * m, m, m) =
          sign * t.matrix.block((n - b) * m, (n - a) * m, m, m).transpose();
    }
  return {n, t.m, std::move(out)};
}

inline FiniteOperator operator*(const FiniteOperator& a, const FiniteOperator& b) {
  if (a.n != b.n || a.m != b.m) throw OrderMismatch("finite operators of different shape");
  return {a.n, a.m, a.matrix * b.matrix};
}

/// max over samples of |D_n(T x)(T y) - D_n(x)(y)|.
inline double pairing_preservation_check(
    const OperatorMatrix& t, std::span<const std::pair<RochbergVector, RochbergVector>> samples) {
  double worst = 0.0;
  for (const auto& [x, y] : samples)
    worst = std::max(worst, std::abs(duality_pairing(t.apply(x), t.apply(y)) - duality_pairing(x, y)));
  return worst;
}

/// ||A v|| / ||v|| along a family.
inline std::vector<double> singularity_profile(const OperatorMatrix& a,
                                               std::span<const RochbergVector> family) {
  std::vector<double> ratios;
  ratios.reserve(family.size());
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double q = quasinorm(family[k]);
    if (q == 0.0) throw ZeroVectorInFamily(k);
    ratios.push_back(quasinorm(a.apply(family[k])) / q);
  }
  return ratios;
}

}  // namespace znlab
