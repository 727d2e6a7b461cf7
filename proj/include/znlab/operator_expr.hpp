#pragma once

// Operator expressions:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := '-' unary | number ('·' | '*') unary | power
//   power   := primary ('^' integer)?
//   primary := 'id' | 'zero' | 'mult[' d1,d2,... ']' | 'perm[' s1,s2,... ']'
//            | 'block[len:' L ',count:' C ']' | 'iota(' k ',' n ')' | 'pi(' n ',' k ')'
//            | 'shift(' n ')' | '(' expr ')'
//
// id, zero, mult, perm and block take the order of whatever they act on; the
// orders of iota, pi and shift are explicit. A * B applies B first.

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "znlab/format.hpp"
#include "znlab/operators.hpp"

namespace znlab {

struct OpExpr {
  enum class Kind { Identity, Zero, Mult, Perm, Block, Iota, Pi, Shift, Sum, Product, Scaled, Power };

  Kind kind = Kind::Identity;
  std::vector<double> values;       // mult diagonal
  std::vector<Index> images;        // perm
  std::uint64_t a = 0, b = 0;       // block len/count, iota (k,n), pi (n,k), shift n, power k
  double lambda = 1.0;              // Scaled
  std::vector<std::shared_ptr<const OpExpr>> children;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : c_(s) {}

  std::shared_ptr<const OpExpr> parse() {
    auto e = expr();
    if (!c_.at_end()) c_.fail("unexpected input");
    return e;
  }

 private:
  using Ptr = std::shared_ptr<const OpExpr>;

  static Ptr node(OpExpr e) { return std::make_shared<const OpExpr>(std::move(e)); }

  static Ptr scaled(double lambda, Ptr inner) {
    OpExpr e;
    e.kind = OpExpr::Kind::Scaled;
    e.lambda = lambda;
    e.children = {std::move(inner)};
    return node(std::move(e));
  }

  Ptr expr() {
    std::vector<Ptr> terms{term()};
    while (true) {
      if (c_.consume("+"))
        terms.push_back(term());
      else if (c_.consume("-"))
        terms.push_back(scaled(-1.0, term()));
      else
        break;
    }
    if (terms.size() == 1) return terms.front();
    OpExpr e;
    e.kind = OpExpr::Kind::Sum;
    e.children = std::move(terms);
    return node(std::move(e));
  }

  Ptr term() {
    std::vector<Ptr> factors{unary()};
    while (c_.consume("*")) factors.push_back(unary());
    if (factors.size() == 1) return factors.front();
    OpExpr e;
    e.kind = OpExpr::Kind::Product;
    e.children = std::move(factors);
    return node(std::move(e));
  }

  bool starts_number() {
    c_.skip_ws();
    return c_.peek_digit();
  }

  Ptr unary() {
    if (c_.consume("-")) {
      if (starts_number()) {
        const double v = -c_.number();
        if (!c_.consume("·") && !c_.consume("*")) c_.fail("expected '·' after scalar");
        return scaled(v, unary());
      }
      return scaled(-1.0, unary());
    }
    if (starts_number()) {
      const double v = c_.number();
      if (!c_.consume("·") && !c_.consume("*")) c_.fail("expected '·' after scalar");
      return scaled(v, unary());
    }
    auto p = primary();
    if (c_.consume("^")) {
      OpExpr e;
      e.kind = OpExpr::Kind::Power;
      e.a = c_.integer();
      e.children = {std::move(p)};
      return node(std::move(e));
    }
    return p;
  }

  Ptr primary() {
    OpExpr e;
    if (c_.consume("(")) {
      auto inner = expr();
      c_.expect(")");
      return inner;
    }
    if (c_.consume("id")) return node(e);
    if (c_.consume("zero")) {
      e.kind = OpExpr::Kind::Zero;
      return node(e);
    }
    if (c_.consume("mult[")) {
      e.kind = OpExpr::Kind::Mult;
      do e.values.push_back(c_.number());
      while (c_.consume(","));
      c_.expect("]");
      return node(e);
    }
    if (c_.consume("perm[")) {
      e.kind = OpExpr::Kind::Perm;
      do e.images.push_back(c_.integer());
      while (c_.consume(","));
      c_.expect("]");
      return node(e);
    }
    if (c_.consume("block[")) {
      e.kind = OpExpr::Kind::Block;
      c_.expect("len");
      c_.expect(":");
      e.a = c_.integer();
      c_.expect(",");
      c_.expect("count");
      c_.expect(":");
      e.b = c_.integer();
      c_.expect("]");
      if (e.a == 0 || e.b == 0) c_.fail("block length and count must be positive");
      return node(e);
    }
    if (c_.consume("iota(")) {
      e.kind = OpExpr::Kind::Iota;
      return pair_args(std::move(e));
    }
    if (c_.consume("pi(")) {
      e.kind = OpExpr::Kind::Pi;
      return pair_args(std::move(e));
    }
    if (c_.consume("shift(")) {
      e.kind = OpExpr::Kind::Shift;
      e.a = c_.integer();
      c_.expect(")");
      return node(e);
    }
    c_.fail("expected an operator");
  }

  Ptr pair_args(OpExpr e) {
    e.a = c_.integer();
    c_.expect(",");
    e.b = c_.integer();
    c_.expect(")");
    return node(std::move(e));
  }

  TextCursor c_;
};

}  // namespace detail

inline std::shared_ptr<const OpExpr> parse_operator(std::string_view text) {
  return detail::ExprParser(text).parse();
}

/// Builds the operator acting on vectors of the given order.
inline OperatorMatrix build(const OpExpr& e, unsigned input_order) {
  using K = OpExpr::Kind;
  const unsigned n = input_order;
  auto need = [n](std::uint64_t expected, const char* what) {
    if (expected != n)
      throw OrderMismatch(std::string(what) + " acts on order " + std::to_string(expected) +
                          ", got order " + std::to_string(n));
  };
  switch (e.kind) {
    case K::Identity:
      return OperatorMatrix::identity(n);
    case K::Zero:
      return OperatorMatrix::zero(n, n);
    case K::Mult:
      return OperatorMatrix::diagonal(n, OperatorAtom::multiplier(CoordVector::from_values(e.values)));
    case K::Perm:
      return OperatorMatrix::diagonal(n, OperatorAtom::permutation(e.images));
    case K::Block:
      return block_operator(n, flat_blocks(e.a, static_cast<std::size_t>(e.b)));
    case K::Iota:
      need(e.a, "iota");
      return embed_matrix(static_cast<unsigned>(e.a), static_cast<unsigned>(e.b));
    case K::Pi:
      need(e.a, "pi");
      return project_matrix(static_cast<unsigned>(e.a), static_cast<unsigned>(e.b));
    case K::Shift:
      need(e.a, "shift");
      return shift_power(n, 1);
    case K::Sum: {
      auto acc = build(*e.children.front(), n);
      for (std::size_t i = 1; i < e.children.size(); ++i) acc = acc + build(*e.children[i], n);
      return acc;
    }
    case K::Product: {
      auto acc = build(*e.children.back(), n);
      for (std::size_t i = e.children.size() - 1; i-- > 0;)
        acc = build(*e.children[i], acc.out_order()) * acc;
      return acc;
    }
    case K::Scaled:
      return e.lambda * build(*e.children.front(), n);
    case K::Power: {
      const auto base = build(*e.children.front(), n);
      if (!base.is_square()) throw OrderMismatch("only square operators have powers");
      auto acc = OperatorMatrix::identity(n);
      for (std::uint64_t k = 0; k < e.a; ++k) acc = base * acc;
      return acc;
    }
  }
  throw InvalidArgument("unknown operator expression");
}

inline OperatorMatrix build(std::string_view text, unsigned input_order) {
  return build(*parse_operator(text), input_order);
}

}  // namespace znlab
