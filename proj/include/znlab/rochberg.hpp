#pragma once

// The Rochberg space Z_n over the l_2 scale as a concrete type.
//
// Index convention: a RochbergVector of order n stores (x_{n-1}, ..., x_0),
// position 0 holding the highest derivative order n-1. The duality formula is
// written with 1-based labels (x_1, ..., x_n); label i is position i-1. That
// translation happens in this header and nowhere else.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "znlab/kp.hpp"
#include "znlab/seqcore.hpp"

namespace znlab {

class RochbergVector {
 public:
  /// coords ordered highest derivative first.
  explicit RochbergVector(std::vector<CoordVector> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw InvalidArgument("a RochbergVector needs order >= 1");
  }

  static RochbergVector zero(unsigned n) { return RochbergVector(std::vector<CoordVector>(n)); }

  /// (0, ..., 0, x): x in the derivative-order-0 slot.
  static RochbergVector bottom(unsigned n, CoordVector x) {
    std::vector<CoordVector> c(n);
    c.back() = std::move(x);
    return RochbergVector(std::move(c));
  }

  /// (x, 0, ..., 0): x in the highest-order slot.
  static RochbergVector top(unsigned n, CoordVector x) {
    std::vector<CoordVector> c(n);
    c.front() = std::move(x);
    return RochbergVector(std::move(c));
  }

  unsigned order() const noexcept { return static_cast<unsigned>(coords_.size()); }
  std::span<const CoordVector> coords() const noexcept { return coords_; }

  /// position 0 is the highest derivative order.
  const CoordVector& operator[](std::size_t position) const { return coords_.at(position); }

  /// Coordinate of derivative order p.
  const CoordVector& at_order(unsigned p) const { return coords_.at(order() - 1 - p); }

  bool is_zero() const noexcept {
    for (const auto& c : coords_)
      if (!c.is_zero()) return false;
    return true;
  }

  Index max_index() const noexcept {
    Index m = 0;
    for (const auto& c : coords_) m = std::max(m, c.max_index());
    return m;
  }

  friend bool operator==(const RochbergVector&, const RochbergVector&) = default;

  friend RochbergVector operator+(const RochbergVector& a, const RochbergVector& b) {
    return zip(a, b, [](const CoordVector& x, const CoordVector& y) { return x + y; });
  }
  friend RochbergVector operator-(const RochbergVector& a, const RochbergVector& b) {
    return zip(a, b, [](const CoordVector& x, const CoordVector& y) { return x - y; });
  }
  friend RochbergVector operator*(double lambda, const RochbergVector& a) {
    std::vector<CoordVector> c;
    c.reserve(a.order());
    for (const auto& x : a.coords_) c.push_back(scale(lambda, x));
    return RochbergVector(std::move(c));
  }

 private:
  template <class Fn>
  static RochbergVector zip(const RochbergVector& a, const RochbergVector& b, Fn fn) {
    if (a.order() != b.order())
      throw OrderMismatch("orders " + std::to_string(a.order()) + " and " +
                          std::to_string(b.order()) + " differ");
    std::vector<CoordVector> c;
    c.reserve(a.order());
    for (unsigned i = 0; i < a.order(); ++i) c.push_back(fn(a.coords_[i], b.coords_[i]));
    return RochbergVector(std::move(c));
  }

  std::vector<CoordVector> coords_;
};

/// Recursive twisted-sum quasinorm:
///   ||(x_0)|| = ||x_0||_2,
///   ||(x_{n-1},...,x_0)|| = ||(x_{n-1},...,x_1) - KP_{1,n-1}(x_0)||_{Z_{n-1}} + ||x_0||_2.
inline double quasinorm(const RochbergVector& v) {
  std::vector<CoordVector> cur(v.coords().begin(), v.coords().end());
  double total = 0.0;
  while (cur.size() > 1) {
    const CoordVector x0 = std::move(cur.back());
    cur.pop_back();
    total += l2_norm(x0);
    if (x0.is_zero()) continue;
    const auto kp = kp_map(static_cast<unsigned>(cur.size()), x0);
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = cur[i] - kp[i];
  }
  return total + l2_norm(cur.front());
}

/// (KP_{1,n-1}(u), u).
inline RochbergVector graph_vector(unsigned n, const CoordVector& u) {
  if (n == 0) throw InvalidArgument("graph_vector needs n >= 1");
  if (n == 1) return RochbergVector({u});
  auto c = kp_map(n - 1, u);
  c.push_back(u);
  return RochbergVector(std::move(c));
}

/// iota_{k,n}: pads n-k zero coordinates on the low-order side.
inline RochbergVector embed(const RochbergVector& v, unsigned n) {
  if (v.order() > n)
    throw OrderMismatch("cannot embed order " + std::to_string(v.order()) + " into order " +
                        std::to_string(n));
  std::vector<CoordVector> c(v.coords().begin(), v.coords().end());
  c.resize(n);
  return RochbergVector(std::move(c));
}

/// pi_{n,k}: keeps the k lowest-order coordinates.
inline RochbergVector project(const RochbergVector& v, unsigned k) {
  if (k == 0 || k > v.order())
    throw OrderMismatch("cannot project order " + std::to_string(v.order()) + " onto order " +
                        std::to_string(k));
  return RochbergVector(std::vector<CoordVector>(v.coords().end() - k, v.coords().end()));
}

/// D_n(x)(y) = sum_{i+j=n+1} (-1)^i <x_i, y_j> in 1-based labels.
/// Mirror terms are added in pairs so the form vanishes exactly on the
/// diagonal for even n.
inline double duality_pairing(const RochbergVector& x, const RochbergVector& y) {
  if (x.order() != y.order())
    throw OrderMismatch("duality pairing of orders " + std::to_string(x.order()) + " and " +
                        std::to_string(y.order()));
  const unsigned n = x.order();
  auto term = [&](unsigned pos) {
    // label i = pos + 1 pairs with label j = n - pos, i.e. position n - 1 - pos.
    const double p = pair(x[pos], y[n - 1 - pos]);
    return (pos % 2 == 0) ? -p : p;
  };
  double s = 0.0;
  for (unsigned pos = 0; pos < n / 2; ++pos) s += term(pos) + term(n - 1 - pos);
  if (n % 2 == 1) s += term(n / 2);
  return s;
}

/// graph_vector(n, +-e_i) for every i in the support of x, plus the graph
/// vector of each nonzero coordinate of x normalised.
inline std::vector<RochbergVector> default_witnesses(const RochbergVector& x) {
  std::vector<RochbergVector> w;
  std::vector<Index> support;
  for (const auto& c : x.coords()) {
    if (c.is_zero()) continue;
    for (const auto& e : c.to_entries()) support.push_back(e.index);
    w.push_back(graph_vector(x.order(), scale(1.0 / l2_norm(c), c)));
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  for (Index i : support) {
    w.push_back(graph_vector(x.order(), CoordVector::unit(i, 1.0)));
    w.push_back(graph_vector(x.order(), CoordVector::unit(i, -1.0)));
  }
  return w;
}

/// max_w |D_n(x)(w)| / ||w||: a lower bound for the dual norm omega_n(x).
/// Zero witnesses are skipped.
inline double omega_lower_bound(const RochbergVector& x, std::span<const RochbergVector> witnesses) {
  if (witnesses.empty()) throw EmptyWitnessSet();
  double best = 0.0;
  for (const auto& w : witnesses) {
    if (w.order() != x.order()) throw OrderMismatch("witness order differs from vector order");
    const double q = quasinorm(w);
    if (q == 0.0) continue;
    best = std::max(best, std::abs(duality_pairing(x, w)) / q);
  }
  return best;
}

inline double omega_lower_bound(const RochbergVector& x) {
  if (x.is_zero()) return 0.0;
  const auto w = default_witnesses(x);
  return omega_lower_bound(x, w);
}

/// Matrix of D_n on vectors supported in 1..m, stacked by label:
/// component (label i, index k) lives at row (i-1)*m + (k-1).
/// J is a signed block permutation, so J^{-1} = J^T and applying either is
/// pure index bookkeeping.
class PairingGram {
 public:
  PairingGram(unsigned n, std::size_t m) : n_(n), m_(m) {
    if (n == 0 || m == 0) throw InvalidArgument("pairing_gram needs n, m >= 1");
  }

  unsigned order() const noexcept { return n_; }
  std::size_t truncation() const noexcept { return m_; }
  std::size_t size() const noexcept { return n_ * m_; }

  /// Block (i, j) of J for 1-based labels: (-1)^i if i + j = n + 1, else 0.
  int block_sign(unsigned i, unsigned j) const noexcept {
    if (i + j != n_ + 1) return 0;
    return (i % 2 == 0) ? 1 : -1;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    check(v);
    Eigen::VectorXd out(size());
    for (unsigned i = 1; i <= n_; ++i) {
      const unsigned j = n_ + 1 - i;
      out.segment((i - 1) * m_, m_) = block_sign(i, j) * v.segment((j - 1) * m_, m_);
    }
    return out;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& v) const {
    check(v);
    Eigen::VectorXd out(size());
    for (unsigned j = 1; j <= n_; ++j) {
      const unsigned i = n_ + 1 - j;
      out.segment((j - 1) * m_, m_) = block_sign(i, j) * v.segment((i - 1) * m_, m_);
    }
    return out;
  }

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(size(), size());
    for (unsigned i = 1; i <= n_; ++i) {
      const unsigned j = n_ + 1 - i;
      J.block((i - 1) * m_, (j - 1) * m_, m_, m_).diagonal().setConstant(block_sign(i, j));
    }
    return J;
  }

  Eigen::MatrixXd inverse() const { return matrix().transpose(); }

 private:
  void check(const Eigen::VectorXd& v) const {
    if (static_cast<std::size_t>(v.size()) != size())
      throw OrderMismatch("vector length does not match the pairing Gram");
  }

  unsigned n_;
  std::size_t m_;
};

inline PairingGram pairing_gram(unsigned n, std::size_t m) { return PairingGram(n, m); }

/// Stacks v (supported in 1..m) by label, matching PairingGram's layout.
inline Eigen::VectorXd to_stacked(const RochbergVector& v, std::size_t m) {
  if (v.max_index() > m) throw InvalidArgument("vector support exceeds the truncation");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.order() * m);
  for (unsigned pos = 0; pos < v.order(); ++pos)
    for (const auto& e : v[pos].to_entries()) out(pos * m + (e.index - 1)) = e.value;
  return out;
}

inline RochbergVector from_stacked(const Eigen::VectorXd& s, unsigned n) {
  if (n == 0 || s.size() % n != 0) throw OrderMismatch("stacked length is not a multiple of n");
  const std::size_t m = s.size() / n;
  std::vector<CoordVector> c;
  c.reserve(n);
  for (unsigned pos = 0; pos < n; ++pos) {
    std::vector<double> vals(s.data() + pos * m, s.data() + (pos + 1) * m);
    c.push_back(CoordVector::from_values(vals));
  }
  return RochbergVector(std::move(c));
}

struct DefectSample {
  double defect;
  double budget;
};

/// ||KP_{1,m}(x+y) - KP_{1,m}(x) - KP_{1,m}(y)||_{Z_m} together with
/// ||x|| + ||y||, so callers form the ratio.
inline DefectSample quasilinearity_defect(unsigned m, const CoordVector& x, const CoordVector& y) {
  const RochbergVector sum(kp_map(m, x + y));
  const RochbergVector kx(kp_map(m, x));
  const RochbergVector ky(kp_map(m, y));
  return {quasinorm(sum - kx - ky), l2_norm(x) + l2_norm(y)};
}

}  // namespace znlab
