#pragma once

// Operators acting on the scale (l_inf, l_1), their diagonal lifts to Z_n,
// and the commutator defect against KP_{1,k}.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "znlab/kp.hpp"
#include "znlab/operators.hpp"
#include "znlab/orlicz.hpp"
#include "znlab/rochberg.hpp"

namespace znlab {

class ScaleOperator {
 public:
  static ScaleOperator identity() { return ScaleOperator(OperatorAtom::identity(), 1.0); }

  /// bound = sup |d_i|
  static ScaleOperator multiplier(CoordVector d) {
    const double b = d.max_abs();
    return ScaleOperator(OperatorAtom::multiplier(std::move(d)), b);
  }

  static ScaleOperator permutation(std::vector<Index> images) {
    return ScaleOperator(OperatorAtom::permutation(std::move(images)), 1.0);
  }

  /// e_v -> w_v; declared with bound 1 on the l_2 scale.
  static ScaleOperator block_map(std::vector<CoordVector> blocks) {
    return ScaleOperator(OperatorAtom::block_map(std::move(blocks)), 1.0);
  }

  const OperatorAtom& atom() const noexcept { return atom_; }
  double bound() const noexcept { return bound_; }

  CoordVector apply(const CoordVector& x) const { return atom_.apply(x); }

 private:
  ScaleOperator(OperatorAtom atom, double bound) : atom_(std::move(atom)), bound_(bound) {}

  OperatorAtom atom_;
  double bound_;
};

/// T_n (x_{n-1}, ..., x_0) = (tau x_{n-1}, ..., tau x_0)
inline OperatorMatrix lift(const OperatorAtom& tau, unsigned n) {
  if (n == 0) throw InvalidArgument("lift needs n >= 1");
  return OperatorMatrix::diagonal(n, tau);
}

inline OperatorMatrix lift(const ScaleOperator& tau, unsigned n) { return lift(tau.atom(), n); }

/// ||T_k KP_{1,k}(x) - KP_{1,k}(tau x)||_{Z_k} / ||x||_2
inline double commutator_defect(const OperatorAtom& tau, unsigned k, const CoordVector& x) {
  if (k == 0) throw InvalidArgument("commutator_defect needs k >= 1");
  if (x.is_zero()) return 0.0;
  const RochbergVector lifted = lift(tau, k).apply(RochbergVector(kp_map(k, x)));
  const RochbergVector direct(kp_map(k, tau.apply(x)));
  return quasinorm(lifted - direct) / l2_norm(x);
}

inline double commutator_defect(const ScaleOperator& tau, unsigned k, const CoordVector& x) {
  return commutator_defect(tau.atom(), k, x);
}

/// max over samples of domain_norm(n, tau x) / domain_norm(n, x).
inline double domain_invariance_check(const OperatorAtom& tau, unsigned n,
                                      std::span<const CoordVector> samples) {
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].is_zero()) throw ZeroVectorInFamily(i);
    worst = std::max(worst, domain_norm(n, tau.apply(samples[i])) / domain_norm(n, samples[i]));
  }
  return worst;
}

inline double domain_invariance_check(const ScaleOperator& tau, unsigned n,
                                      std::span<const CoordVector> samples) {
  return domain_invariance_check(tau.atom(), n, samples);
}

}  // namespace znlab
