#pragma once

// Text and JSON forms of CoordVector and RochbergVector.
//
//   dense:[(1,0.6),(2,0.8)]      flat:{1024,0.03125,0}
//   {order: 2, coords: [dense:[], flat:{4,0.5,0}]}
//
// JSON: {"kind":"dense","entries":[[1,0.6],[2,0.8]]},
//       {"kind":"flat","length":4,"value":0.5,"offset":0},
//       {"order":2,"coords":[...]}.

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "znlab/rochberg.hpp"
#include "znlab/seqcore.hpp"

namespace znlab {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace detail {

class TextCursor {
 public:
  explicit TextCursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }

  bool consume(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!consume(tok)) fail("expected '" + std::string(tok) + "'");
  }

  double number() {
    skip_ws();
    double v = 0.0;
    auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(p - s_.data());
    return v;
  }

  std::uint64_t integer() {
    skip_ws();
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a non-negative integer");
    pos_ = static_cast<std::size_t>(p - s_.data());
    return v;
  }

  bool peek_digit() const {
    return pos_ < s_.size() && ((s_[pos_] >= '0' && s_[pos_] <= '9') || s_[pos_] == '.');
  }

  bool at_end() {
    skip_ws();
    return pos_ == s_.size();
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidArgument(what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

inline CoordVector parse_coord(TextCursor& c) {
  if (c.consume("flat:")) {
    c.expect("{");
    const auto len = c.integer();
    c.expect(",");
    const double val = c.number();
    c.expect(",");
    const auto off = c.integer();
    c.expect("}");
    if (len > kMaxFlatLength) c.fail("flat length exceeds 2^62");
    return CoordVector::flat(len, val, off);
  }
  c.expect("dense:");
  c.expect("[");
  std::vector<Entry> entries;
  if (!c.consume("]")) {
    do {
      c.expect("(");
      const auto i = c.integer();
      c.expect(",");
      const double v = c.number();
      c.expect(")");
      entries.push_back({i, v});
    } while (c.consume(","));
    c.expect("]");
  }
  return CoordVector::from_entries(std::move(entries));
}

}  // namespace detail

inline std::string to_text(const CoordVector& x) {
  if (const auto* f = x.as_flat())
    return "flat:{" + std::to_string(f->length) + "," + format_double(f->value) + "," +
           std::to_string(f->offset) + "}";
  std::string s = "dense:[";
  bool first = true;
  for (const auto& e : x.dense_entries()) {
    if (!first) s += ",";
    first = false;
    s += "(" + std::to_string(e.index) + "," + format_double(e.value) + ")";
  }
  return s + "]";
}

inline std::string to_text(const RochbergVector& v) {
  std::string s = "{order: " + std::to_string(v.order()) + ", coords: [";
  for (unsigned p = 0; p < v.order(); ++p) {
    if (p) s += ", ";
    s += to_text(v[p]);
  }
  return s + "]}";
}

inline CoordVector parse_coord_vector(std::string_view text) {
  detail::TextCursor c(text);
  auto x = detail::parse_coord(c);
  if (!c.at_end()) c.fail("trailing input");
  return x;
}

inline RochbergVector parse_rochberg_vector(std::string_view text) {
  detail::TextCursor c(text);
  c.expect("{");
  c.expect("order");
  c.expect(":");
  const auto n = c.integer();
  c.expect(",");
  c.expect("coords");
  c.expect(":");
  c.expect("[");
  std::vector<CoordVector> coords;
  if (!c.consume("]")) {
    do coords.push_back(detail::parse_coord(c));
    while (c.consume(","));
    c.expect("]");
  }
  c.expect("}");
  if (!c.at_end()) c.fail("trailing input");
  if (coords.size() != n)
    throw OrderMismatch("order " + std::to_string(n) + " but " + std::to_string(coords.size()) + " coords");
  return RochbergVector(std::move(coords));
}

inline void to_json(nlohmann::json& j, const CoordVector& x) {
  if (const auto* f = x.as_flat()) {
    j = {{"kind", "flat"}, {"length", f->length}, {"value", f->value}, {"offset", f->offset}};
    return;
  }
  auto entries = nlohmann::json::array();
  for (const auto& e : x.dense_entries()) entries.push_back({e.index, e.value});
  j = {{"kind", "dense"}, {"entries", std::move(entries)}};
}

inline void from_json(const nlohmann::json& j, CoordVector& x) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "flat") {
    const auto len = j.at("length").get<std::uint64_t>();
    if (len > kMaxFlatLength) throw InvalidArgument("flat length exceeds 2^62");
    x = CoordVector::flat(len, j.at("value").get<double>(), j.value("offset", std::uint64_t{0}));
  } else if (kind == "dense") {
    std::vector<Entry> entries;
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 2) throw InvalidArgument("dense entry must be [index, value]");
      entries.push_back({e[0].get<Index>(), e[1].get<double>()});
    }
    x = CoordVector::from_entries(std::move(entries));
  } else {
    throw InvalidArgument("unknown CoordVector kind '" + kind + "'");
  }
}

inline nlohmann::json rochberg_to_json(const RochbergVector& v) {
  auto coords = nlohmann::json::array();
  for (const auto& c : v.coords()) coords.push_back(c);
  return {{"order", v.order()}, {"coords", std::move(coords)}};
}

inline RochbergVector rochberg_from_json(const nlohmann::json& j) {
  const auto n = j.at("order").get<unsigned>();
  auto coords = j.at("coords").get<std::vector<CoordVector>>();
  if (coords.size() != n)
    throw OrderMismatch("order " + std::to_string(n) + " but " + std::to_string(coords.size()) + " coords");
  return RochbergVector(std::move(coords));
}

}  // namespace znlab
