#pragma once

// Experiment runner behind zn-lab: a registry of gates, deterministic
// parallel sampling, CSV/JSON reports and replay of single rows.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <typeinfo>
#include <utility>
#include <vector>

#include "znlab/commutator.hpp"
#include "znlab/format.hpp"
#include "znlab/kp.hpp"
#include "znlab/operator_expr.hpp"
#include "znlab/operators.hpp"
#include "znlab/orlicz.hpp"
#include "znlab/rochberg.hpp"
#include "znlab/sampling.hpp"

namespace znlab {

inline constexpr const char* kLabVersion = "0.1.0";

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"norm",       "pairing",   "lemma4",        "quasilinearity",
                                              "growth",     "witness",   "commutator",    "telescope",
                                              "adjoint-check", "corners", "report-all"};
  return names;
}

/// Parses "1024,2^20,2^30..2^40": plain integers, powers of two, and runs of
/// consecutive powers of two.
inline std::vector<std::uint64_t> parse_lengths(const std::string& text) {
  auto one = [](const std::string& s) -> std::uint64_t {
    try {
      std::size_t used = 0;
      if (s.rfind("2^", 0) == 0) {
        const auto e = std::stoul(s.substr(2), &used);
        if (used != s.size() - 2 || e > 62) throw ConfigInvalid("");
        return std::uint64_t{1} << e;
      }
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw ConfigInvalid("");
      return v;
    } catch (const std::exception&) {
      throw ConfigInvalid("cannot read length '" + s + "'");
    }
  };
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    if (item.empty()) continue;
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const auto lo = one(item.substr(0, dots));
      const auto hi = one(item.substr(dots + 2));
      if (std::popcount(lo) != 1 || std::popcount(hi) != 1 || lo > hi)
        throw ConfigInvalid("length range '" + item + "' must run between powers of two");
      for (auto v = lo; v <= hi && v != 0; v <<= 1) out.push_back(v);
    } else {
      out.push_back(one(item));
    }
  }
  if (out.empty()) throw ConfigInvalid("no lengths given");
  return out;
}

struct ExperimentConfig {
  std::string experiment;
  std::vector<unsigned> n;                 // empty: experiment defaults
  std::size_t dim = 64;
  std::optional<std::uint64_t> samples;    // empty: per-gate defaults
  std::uint64_t seed = 1;
  double tol = 1e-12;
  std::map<std::string, double> budgets;
  std::string out;
  std::string format = "csv";
  std::vector<std::uint64_t> lengths;      // growth; empty: 2^10..2^60
  std::string op;                          // corners
  std::string profile;                     // growth CSV path

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["n"] = n;
    j["dim"] = dim;
    j["samples"] = samples ? nlohmann::ordered_json(*samples) : nlohmann::ordered_json(nullptr);
    j["seed"] = seed;
    j["tol"] = tol;
    j["budgets"] = budgets;
    j["Ns"] = lengths;
    j["op"] = op;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.experiment = j.at("experiment").get<std::string>();
    c.n = j.value("n", std::vector<unsigned>{});
    c.dim = j.value("dim", std::size_t{64});
    if (j.contains("samples") && !j["samples"].is_null()) c.samples = j["samples"].get<std::uint64_t>();
    c.seed = j.value("seed", std::uint64_t{1});
    c.tol = j.value("tol", 1e-12);
    c.budgets = j.value("budgets", std::map<std::string, double>{});
    c.lengths = j.value("Ns", std::vector<std::uint64_t>{});
    c.op = j.value("op", std::string{});
    return c;
  }

  std::uint64_t hash() const { return fnv1a(to_json().dump()); }
};

enum class Provenance { TheoremConstant, ConfiguredBudget, ExactIdentity, NegativeControl, Recorded };

inline const char* provenance_tag(Provenance p) {
  switch (p) {
    case Provenance::TheoremConstant: return "theorem constant";
    case Provenance::ConfiguredBudget: return "configured budget";
    case Provenance::ExactIdentity: return "exact identity";
    case Provenance::NegativeControl: return "negative control";
    case Provenance::Recorded: return "recorded";
  }
  return "";
}

/// How value is compared with bound.
enum class Compare { AtMost, AtLeast, Above, Record };

struct ReportRow {
  std::string experiment;
  std::string gate;
  unsigned n = 0;
  int variant = -1;              // extra gate parameter (k, trial), -1 if none
  std::string variant_name;
  std::int64_t sample = -1;      // worst sample, -1 for deterministic rows
  std::string detail;
  double value = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  Compare compare = Compare::AtMost;
  Provenance provenance = Provenance::Recorded;
  bool pass = false;

  double ratio() const {
    if (bound == 0.0) return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return value / bound;
  }

  std::string param() const {
    std::string p = gate;
    if (variant >= 0) p += ";" + variant_name + "=" + std::to_string(variant);
    if (sample >= 0) p += ";sample=" + std::to_string(sample);
    if (!detail.empty()) p += ";" + detail;
    return p;
  }
};

struct ExperimentReport {
  nlohmann::ordered_json meta;
  std::vector<ReportRow> rows;

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
  }
};

/// A sample that threw, with everything needed to replay it.
class SampleError : public error {
 public:
  SampleError(std::string kind, const ReportRow& where, std::uint64_t seed, const std::string& what)
      : error(kind + " in " + where.experiment + "/" + where.gate + " n=" + std::to_string(where.n) +
              (where.variant >= 0 ? " " + where.variant_name + "=" + std::to_string(where.variant) : "") +
              " sample=" + std::to_string(where.sample) + " seed=" + std::to_string(seed) + ": " + what),
        kind_(std::move(kind)),
        sample_(where.sample) {}

  const std::string& kind() const noexcept { return kind_; }
  std::int64_t sample() const noexcept { return sample_; }

 private:
  std::string kind_;
  std::int64_t sample_;
};

/// Worker count: ZN_LAB_THREADS if set, else the hardware concurrency.
inline unsigned lab_threads() {
  if (const char* env = std::getenv("ZN_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    throw ConfigInvalid(std::string("ZN_LAB_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// fn(i) for i in [0, count) on up to `threads` workers. The first exception
/// by index is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  constexpr std::uint64_t chunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::mutex mu;
  std::uint64_t failed_at = count;
  std::exception_ptr failure;
  auto body = [&] {
    while (true) {
      const auto begin = next.fetch_add(chunk);
      if (begin >= count) return;
      const auto end = std::min(count, begin + chunk);
      for (auto i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (i < failed_at) {
            failed_at = i;
            failure = std::current_exception();
          }
          return;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace detail {

struct LabContext {
  ExperimentConfig cfg;
  std::shared_ptr<const OpExpr> op;
  std::vector<std::uint64_t> lengths;

  double budget(const std::string& key, double fallback) const {
    const auto it = cfg.budgets.find(key);
    return it == cfg.budgets.end() ? fallback : it->second;
  }
};

using Trace = nlohmann::ordered_json;

struct Gate {
  std::string experiment;
  std::string name;
  std::string budget_key;
  Provenance provenance;
  Compare compare;
  std::vector<unsigned> default_ns;
  std::function<bool(unsigned)> applies;                        // null: every n
  std::string variant_name;                                     // empty: no variants
  std::function<std::vector<int>(const LabContext&, unsigned)> variants;
  std::uint64_t default_samples;                                // 0: deterministic, one evaluation
  std::function<std::uint64_t(const LabContext&, unsigned)> sample_count;  // overrides the above
  std::function<double(const LabContext&, unsigned)> bound;
  double slack = 0.0;
  std::function<double(const LabContext&, unsigned n, int variant, std::uint64_t sample, Trace*)> measure;
  std::function<std::string(const LabContext&, unsigned n, int variant)> describe;
};

inline double pow4(unsigned n) { return std::ldexp(1.0, 2 * static_cast<int>(n)); }

inline std::vector<unsigned> range_ns(unsigned lo, unsigned hi) {
  std::vector<unsigned> v;
  for (unsigned n = lo; n <= hi; ++n) v.push_back(n);
  return v;
}

/// Stream per (gate, n, variant); the key is "experiment/gate".
inline SampleRng rng_for(const LabContext& ctx, std::string_view key, unsigned n, int variant, std::uint64_t i) {
  const auto tag = fnv1a(std::to_string(n) + ":" + std::to_string(variant), fnv1a(key));
  return SampleRng(ctx.cfg.seed, tag, i);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double max_coord_diff(const RochbergVector& a, const RochbergVector& b) {
  double m = 0.0;
  for (unsigned p = 0; p < a.order(); ++p) m = std::max(m, l2_norm(a[p] - b[p]));
  return m;
}

inline void trace_vec(Trace* t, const char* key, const CoordVector& x) {
  if (t) (*t)[key] = to_text(x);
}
inline void trace_vec(Trace* t, const char* key, const RochbergVector& x) {
  if (t) (*t)[key] = to_text(x);
}

inline std::vector<Index> random_permutation(SampleRng& rng, std::size_t dim) {
  std::vector<Index> p(dim);
  for (std::size_t i = 0; i < dim; ++i) p[i] = i + 1;
  std::shuffle(p.begin(), p.end(), rng.engine());
  return p;
}

// Flat sample for the domain band: length 2^e, e in 1..60, random scale.
inline CoordVector band_sample(SampleRng& rng, std::size_t dim) {
  if (rng.coin()) {
    const auto e = rng.integer(1, 60);
    const double scale_by = std::exp(rng.uniform(-3.0, 3.0));
    return CoordVector::flat(std::uint64_t{1} << e, scale_by * std::ldexp(1.0, -static_cast<int>(e) / 2) /
                                                        (e % 2 ? std::sqrt(2.0) : 1.0));
  }
  return random_dense(rng, dim);
}

struct BlockSystem {
  std::vector<CoordVector> blocks;
  std::size_t count;
};

inline BlockSystem random_block_system(SampleRng& rng, std::size_t dim) {
  const auto c = static_cast<std::size_t>(rng.integer(1, std::min<std::size_t>(8, dim)));
  return {random_blocks(rng, c, dim), c};
}

inline RochbergVector random_on(SampleRng& rng, unsigned n, std::size_t support) {
  std::vector<CoordVector> c(n);
  for (auto& x : c) x = random_dense(rng, support);
  return RochbergVector(std::move(c));
}

inline OperatorMatrix random_triangular(SampleRng& rng, unsigned n, std::size_t dim) {
  std::vector<OperatorAtom> e(static_cast<std::size_t>(n) * n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j <= i; ++j) {
      std::vector<double> d(dim);
      for (auto& v : d) v = rng.normal();
      e[i * n + j] = OperatorAtom::multiplier(CoordVector::from_values(d));
    }
  return OperatorMatrix(n, n, std::move(e));
}

inline std::vector<int> iota_variants(const LabContext&, unsigned n) {
  std::vector<int> v;
  for (unsigned k = 1; k <= n; ++k) v.push_back(static_cast<int>(k));
  return v;
}

inline std::size_t finite_truncation(int trial) { return std::size_t{16} << trial; }  // 16..128

inline FiniteOperator finite_block_operator(const LabContext& ctx, unsigned n, int trial) {
  auto rng = rng_for(ctx, "adjoint-check/adjoint_identity", n, trial, 0);
  const std::size_t m = finite_truncation(trial);
  return to_finite(block_operator(n, random_blocks(rng, m / 8, m)), m);
}

inline const std::vector<Gate>& gates() {
  static const std::vector<Gate> all = [] {
    std::vector<Gate> g;
    const auto every = [](unsigned) { return true; };
    auto fixed = [](double v) { return [v](const LabContext&, unsigned) { return v; }; };
    auto pow4_budget = [](const LabContext&, unsigned n) { return pow4(n); };

    // ---- norm
    g.push_back({"norm", "graph_isometry", "graph_isometry", Provenance::ExactIdentity, Compare::AtMost,
                 range_ns(1, 6), every, "", nullptr, 10000, nullptr, fixed(1e-9), 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "norm/graph_isometry", n, -1, i);
                   const auto u = random_coord(rng, c.cfg.dim);
                   trace_vec(t, "u", u);
                   return rel_err(quasinorm(graph_vector(n, u)), l2_norm(u));
                 },
                 nullptr});
    g.push_back({"norm", "iota_isometry", "iota_isometry", Provenance::ExactIdentity, Compare::AtMost,
                 range_ns(1, 5), every, "k", iota_variants, 1000, nullptr, fixed(1e-12), 0.0,
                 [](const LabContext& c, unsigned n, int k, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "norm/iota_isometry", n, k, i);
                   const auto v = random_rochberg(rng, static_cast<unsigned>(k), c.cfg.dim);
                   trace_vec(t, "v", v);
                   return rel_err(quasinorm(embed(v, n)), quasinorm(v));
                 },
                 nullptr});
    g.push_back({"norm", "quasi_triangle", "quasi_triangle", Provenance::ConfiguredBudget, Compare::AtMost,
                 range_ns(1, 6), every, "", nullptr, 10000, nullptr, pow4_budget, 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "norm/quasi_triangle", n, -1, i);
                   const auto v = random_rochberg(rng, n, c.cfg.dim);
                   const auto w = random_rochberg(rng, n, c.cfg.dim);
                   trace_vec(t, "v", v);
                   trace_vec(t, "w", w);
                   return quasinorm(v + w) / (quasinorm(v) + quasinorm(w));
                 },
                 nullptr});
    g.push_back({"norm", "luxemburg_residual", "luxemburg_residual", Provenance::ExactIdentity,
                 Compare::AtMost, range_ns(1, 6), every, "", nullptr, 10000, nullptr, fixed(1e-10), 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "norm/luxemburg_residual", n, -1, i);
                   const auto x = random_coord(rng, c.cfg.dim);
                   trace_vec(t, "x", x);
                   const OrliczFunction f(n - 1);
                   const auto r = luxemburg(f, x, c.cfg.tol);
                   return std::abs(orlicz_modular(f, x, r.norm) - 1.0);
                 },
                 nullptr});
    g.push_back({"norm", "luxemburg_l2", "luxemburg_l2", Provenance::ExactIdentity, Compare::AtMost, {1},
                 [](unsigned n) { return n == 1; }, "", nullptr, 10000, nullptr, fixed(1e-9), 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "norm/luxemburg_l2", n, -1, i);
                   const auto x = random_coord(rng, c.cfg.dim);
                   trace_vec(t, "x", x);
                   return rel_err(luxemburg_norm(OrliczFunction(0), x, c.cfg.tol), l2_norm(x));
                 },
                 nullptr});
    g.push_back({"norm", "domain_band", "domain_band", Provenance::ConfiguredBudget, Compare::AtMost,
                 range_ns(2, 4), [](unsigned n) { return n >= 2 && n <= 4; }, "", nullptr, 10000, nullptr,
                 [](const LabContext&, unsigned n) { return n >= 4 ? 64.0 : n == 3 ? 16.0 : 10.0; }, 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "norm/domain_band", n, -1, i);
                   const auto x = band_sample(rng, c.cfg.dim);
                   trace_vec(t, "x", x);
                   const double r = domain_norm(n, x) / luxemburg_norm(OrliczFunction(n - 1), x, c.cfg.tol);
                   return std::max(r, 1.0 / r);
                 },
                 nullptr});

    // ---- pairing
    g.push_back({"pairing", "duality_bound", "duality_bound", Provenance::ConfiguredBudget, Compare::AtMost,
                 range_ns(2, 5), every, "", nullptr, 10000, nullptr, pow4_budget, 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "pairing/duality_bound", n, -1, i);
                   const auto x = random_rochberg(rng, n, c.cfg.dim);
                   const auto y = random_rochberg(rng, n, c.cfg.dim);
                   trace_vec(t, "x", x);
                   trace_vec(t, "y", y);
                   return std::abs(duality_pairing(x, y)) / (quasinorm(x) * quasinorm(y));
                 },
                 nullptr});
    g.push_back({"pairing", "symmetry", "symmetry", Provenance::ExactIdentity, Compare::AtMost,
                 range_ns(2, 5), every, "", nullptr, 10000, nullptr, fixed(1e-12), 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "pairing/symmetry", n, -1, i);
                   const auto x = random_rochberg(rng, n, c.cfg.dim);
                   const auto y = random_rochberg(rng, n, c.cfg.dim);
                   trace_vec(t, "x", x);
                   trace_vec(t, "y", y);
                   const double s = (n % 2 == 0) ? -1.0 : 1.0;
                   const double a = duality_pairing(x, y);
                   return std::abs(a - s * duality_pairing(y, x)) / (1.0 + std::abs(a));
                 },
                 nullptr});
    g.push_back({"pairing", "diagonal_zero", "diagonal_zero", Provenance::ExactIdentity, Compare::AtMost,
                 {2, 4}, [](unsigned n) { return n % 2 == 0; }, "", nullptr, 10000, nullptr, fixed(0.0), 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "pairing/diagonal_zero", n, -1, i);
                   const auto x = random_rochberg(rng, n, c.cfg.dim);
                   trace_vec(t, "x", x);
                   return std::abs(duality_pairing(x, x));
                 },
                 nullptr});
    g.push_back({"pairing", "omega_top", "omega_top", Provenance::ExactIdentity, Compare::AtMost,
                 range_ns(2, 5), every, "", nullptr, 10000, nullptr, fixed(1.0), 1e-12,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "pairing/omega_top", n, -1, i);
                   const auto u = random_dense(rng, c.cfg.dim);
                   trace_vec(t, "u", u);
                   return u.max_abs() / omega_lower_bound(RochbergVector::top(n, u));
                 },
                 nullptr});

    // ---- lemma4
    g.push_back({"lemma4", "alternating_sum", "lemma4_slack", Provenance::TheoremConstant, Compare::AtMost,
                 range_ns(1, 5), every, "", nullptr, 100000, nullptr,
                 [](const LabContext&, unsigned n) { return std::ldexp(1.0, static_cast<int>(n) - 1); }, 1e-9,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "lemma4/alternating_sum", n, -1, i);
                   const auto x = random_coord(rng, c.cfg.dim);
                   const auto xp = random_coord(rng, c.cfg.dim);
                   trace_vec(t, "x", x);
                   trace_vec(t, "xp", xp);
                   return lemma4_sum(n, x, xp).value / (l2_norm(x) * l2_norm(xp));
                 },
                 nullptr});

    // ---- quasilinearity
    g.push_back({"quasilinearity", "defect", "quasilinearity", Provenance::ConfiguredBudget, Compare::AtMost,
                 range_ns(1, 4), every, "", nullptr, 10000, nullptr, pow4_budget, 0.0,
                 [](const LabContext& c, unsigned m, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "quasilinearity/defect", m, -1, i);
                   const auto x = random_coord(rng, c.cfg.dim);
                   const auto y = random_coord(rng, c.cfg.dim);
                   trace_vec(t, "x", x);
                   trace_vec(t, "y", y);
                   const auto d = quasilinearity_defect(m, x, y);
                   return d.defect / d.budget;
                 },
                 nullptr});

    // ---- growth
    auto growth_at = [](unsigned n, std::uint64_t N) {
      const std::uint64_t Ns[1] = {N};
      return growth_profile(n, Ns).front();
    };
    g.push_back({"growth", "ln_identity", "growth_ln", Provenance::ExactIdentity, Compare::AtMost, {2},
                 [](unsigned n) { return n == 2; }, "", nullptr, 1,
                 [](const LabContext& c, unsigned) { return static_cast<std::uint64_t>(c.lengths.size()); },
                 fixed(1e-9), 0.0,
                 [growth_at](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   const auto N = c.lengths.at(i);
                   const auto row = growth_at(n, N);
                   if (t) (*t)["N"] = N;
                   return rel_err(row.quasinorm, std::log(static_cast<double>(N)) + 1.0);
                 },
                 nullptr});
    g.push_back({"growth", "top_ratio", "growth_top", Provenance::ConfiguredBudget, Compare::AtMost, {2},
                 [](unsigned n) { return n == 2; }, "", nullptr, 0, nullptr,
                 [](const LabContext& c, unsigned) { return 1.0 + c.budget("growth_top", 0.05); }, 0.0,
                 [growth_at](const LabContext& c, unsigned n, int, std::uint64_t, Trace*) {
                   return growth_at(n, *std::max_element(c.lengths.begin(), c.lengths.end())).ratio;
                 },
                 [](const LabContext& c, unsigned, int) {
                   return "N=" + std::to_string(*std::max_element(c.lengths.begin(), c.lengths.end()));
                 }});
    g.push_back({"growth", "ratio_drift", "growth_drift", Provenance::ConfiguredBudget, Compare::AtMost,
                 {3, 4}, [](unsigned n) { return n >= 3; }, "", nullptr, 0, nullptr, fixed(0.05), 0.0,
                 [growth_at](const LabContext&, unsigned n, int, std::uint64_t, Trace*) {
                   const double r30 = growth_at(n, std::uint64_t{1} << 30).ratio;
                   const double r60 = growth_at(n, std::uint64_t{1} << 60).ratio;
                   return std::abs(r60 - r30) / r30;
                 },
                 [](const LabContext&, unsigned, int) { return std::string("N=2^30..2^60"); }});

    // ---- witness
    g.push_back({"witness", "shift_nilpotent", "shift_nilpotent", Provenance::ExactIdentity, Compare::AtMost,
                 range_ns(2, 4), every, "", nullptr, 0, nullptr, fixed(0.0), 0.0,
                 [](const LabContext&, unsigned n, int, std::uint64_t, Trace*) {
                   return shift_power(n, n).is_zero() ? 0.0 : 1.0;
                 },
                 nullptr});
    g.push_back({"witness", "noncompact_unit", "noncompact", Provenance::ExactIdentity, Compare::AtMost,
                 range_ns(2, 4), every, "", nullptr, 0,
                 [](const LabContext& c, unsigned) { return static_cast<std::uint64_t>(c.cfg.dim); },
                 fixed(1e-9), 0.0,
                 [](const LabContext&, unsigned n, int, std::uint64_t i, Trace* t) {
                   const RochbergVector fam[1] = {graph_vector(n, CoordVector::unit(i + 1))};
                   if (t) (*t)["v"] = i + 1;
                   return std::abs(singularity_profile(shift_power(n, n - 1), fam).front() - 1.0);
                 },
                 nullptr});
    g.push_back({"witness", "noncompact_flat", "noncompact", Provenance::ExactIdentity, Compare::AtMost,
                 range_ns(2, 4), every, "", nullptr, 0, [](const LabContext&, unsigned) { return std::uint64_t{40}; },
                 fixed(1e-9), 0.0,
                 [](const LabContext&, unsigned n, int, std::uint64_t i, Trace* t) {
                   // block v (v = i + 1) has length 2^v and starts after blocks 1..v-1
                   const std::uint64_t len = std::uint64_t{1} << (i + 1);
                   const auto u = CoordVector::flat(len, 1.0 / std::sqrt(static_cast<double>(len)), len - 2);
                   trace_vec(t, "u", u);
                   const RochbergVector fam[1] = {graph_vector(n, u)};
                   return std::abs(singularity_profile(shift_power(n, n - 1), fam).front() - 1.0);
                 },
                 nullptr});

    // ---- commutator
    g.push_back({"commutator", "permutation_defect", "commutator_exact", Provenance::ExactIdentity,
                 Compare::AtMost, range_ns(1, 5), every, "", nullptr, 10000, nullptr, fixed(1e-12), 0.0,
                 [](const LabContext& c, unsigned k, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "commutator/permutation_defect", k, -1, i);
                   const auto x = random_coord(rng, c.cfg.dim);
                   const auto tau = ScaleOperator::permutation(random_permutation(rng, c.cfg.dim));
                   trace_vec(t, "x", x);
                   return commutator_defect(tau, k, x);
                 },
                 nullptr});
    g.push_back({"commutator", "unimodular_defect", "commutator_exact", Provenance::ExactIdentity,
                 Compare::AtMost, range_ns(1, 5), every, "", nullptr, 10000, nullptr, fixed(1e-12), 0.0,
                 [](const LabContext& c, unsigned k, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "commutator/unimodular_defect", k, -1, i);
                   const auto x = random_coord(rng, c.cfg.dim);
                   std::vector<double> d(c.cfg.dim);
                   for (auto& v : d) v = rng.coin() ? 1.0 : -1.0;
                   const auto dv = CoordVector::from_values(d);
                   trace_vec(t, "x", x);
                   trace_vec(t, "d", dv);
                   return commutator_defect(ScaleOperator::multiplier(dv), k, x);
                 },
                 nullptr});
    g.push_back({"commutator", "contractive_defect", "commutator_contractive", Provenance::ConfiguredBudget,
                 Compare::AtMost, range_ns(1, 4), every, "", nullptr, 10000, nullptr,
                 [](const LabContext&, unsigned k) { return 8.0 * k; }, 0.0,
                 [](const LabContext& c, unsigned k, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "commutator/contractive_defect", k, -1, i);
                   const auto x = random_coord(rng, c.cfg.dim);
                   std::vector<double> d(c.cfg.dim);
                   for (auto& v : d) v = 1.0 - rng.uniform(0.0, 1.0);  // (0, 1]
                   const auto dv = CoordVector::from_values(d);
                   trace_vec(t, "x", x);
                   trace_vec(t, "d", dv);
                   return commutator_defect(ScaleOperator::multiplier(dv), k, x);
                 },
                 nullptr});
    g.push_back({"commutator", "domain_invariance", "domain_invariance", Provenance::ConfiguredBudget,
                 Compare::AtMost, range_ns(1, 4), every, "", nullptr, 10000, nullptr,
                 [](const LabContext&, unsigned k) { return pow4(k + 1); }, 0.0,
                 [](const LabContext& c, unsigned k, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "commutator/domain_invariance", k, -1, i);
                   const CoordVector x[1] = {random_coord(rng, c.cfg.dim)};
                   std::vector<double> d(c.cfg.dim);
                   for (std::size_t v = 0; v < d.size(); ++v) d[v] = std::ldexp(1.0, -static_cast<int>(v));
                   trace_vec(t, "x", x[0]);
                   return domain_invariance_check(ScaleOperator::multiplier(CoordVector::from_values(d)), k + 1, x);
                 },
                 [](const LabContext&, unsigned k, int) { return "domain_order=" + std::to_string(k + 1); }});
    g.push_back({"commutator", "non_scale_control", "non_scale_control", Provenance::NegativeControl,
                 Compare::AtLeast, range_ns(1, 4), every, "", nullptr, 0, nullptr,
                 [](const LabContext& c, unsigned) { return 0.5 * static_cast<double>(c.cfg.dim); }, 0.0,
                 [](const LabContext& c, unsigned k, int, std::uint64_t, Trace*) {
                   // e_v -> v e_v on 1..dim is bounded on each l_p but not uniformly in dim
                   std::vector<double> d(c.cfg.dim);
                   for (std::size_t v = 0; v < d.size(); ++v) d[v] = static_cast<double>(v + 1);
                   const auto tau = OperatorAtom::multiplier(CoordVector::from_values(d));
                   std::vector<CoordVector> fam;
                   for (std::size_t v = 1; v <= c.cfg.dim; ++v) fam.push_back(CoordVector::unit(v));
                   return domain_invariance_check(tau, k + 1, fam);
                 },
                 nullptr});
    g.push_back({"commutator", "block_defect", "block_defect", Provenance::Recorded, Compare::Record,
                 range_ns(1, 4), every, "", nullptr, 1000, nullptr, fixed(0.0), 0.0,
                 [](const LabContext& c, unsigned k, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "commutator/block_defect", k, -1, i);
                   const auto len = rng.integer(1, 16);
                   const auto blocks = flat_blocks(len, 8);
                   const auto x = random_dense(rng, 8);
                   trace_vec(t, "x", x);
                   if (t) (*t)["block_length"] = len;
                   return commutator_defect(ScaleOperator::block_map(blocks), k, x);
                 },
                 nullptr});

    // ---- telescope
    auto final_of = [](unsigned n) { return telescope_coefficients(n).final; };
    g.push_back({"telescope", "final_nonzero", "telescope", Provenance::ExactIdentity, Compare::Above,
                 range_ns(2, 8), [](unsigned n) { return n >= 2; }, "", nullptr, 0, nullptr, fixed(0.0), 0.0,
                 [final_of](const LabContext&, unsigned n, int, std::uint64_t, Trace*) {
                   return std::abs(static_cast<double>(final_of(n)));
                 },
                 [](const LabContext&, unsigned n, int) {
                   const auto tc = telescope_coefficients(n);
                   std::string s = "final=" + tc.final.str() + ";alphas=";
                   for (std::size_t i = 0; i < tc.alphas.size(); ++i) s += (i ? " " : "") + tc.alphas[i].str();
                   return s;
                 }});
    g.push_back({"telescope", "alpha_1", "telescope", Provenance::TheoremConstant, Compare::AtMost, {2},
                 [](unsigned n) { return n == 2; }, "", nullptr, 0, nullptr, fixed(0.0), 0.0,
                 [](const LabContext&, unsigned n, int, std::uint64_t, Trace*) {
                   return std::abs(static_cast<double>(telescope_coefficients(n).alphas.at(0) - 2));
                 },
                 [](const LabContext&, unsigned, int) { return std::string("alpha_1=2"); }});
    g.push_back({"telescope", "alpha_2", "telescope", Provenance::ExactIdentity, Compare::AtMost, {3},
                 [](unsigned n) { return n == 3; }, "", nullptr, 0, nullptr, fixed(0.0), 0.0,
                 [](const LabContext&, unsigned n, int, std::uint64_t, Trace*) {
                   return std::abs(static_cast<double>(telescope_coefficients(n).alphas.at(1) + 2));
                 },
                 [](const LabContext&, unsigned, int) { return std::string("alpha_2=-2"); }});

    // ---- adjoint-check
    g.push_back({"adjoint-check", "lemma_domain_identity", "lemma_domain", Provenance::ExactIdentity,
                 Compare::AtMost, range_ns(1, 5), every, "", nullptr, 1000, nullptr, fixed(1e-12), 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "adjoint-check/lemma_domain_identity", n, -1, i);
                   const auto sys = random_block_system(rng, c.cfg.dim);
                   const auto x = random_dense(rng, sys.count);
                   trace_vec(t, "x", x);
                   const auto lhs = block_operator(n, sys.blocks).apply(RochbergVector::bottom(n, x));
                   auto rhs = RochbergVector::zero(n);
                   for (const auto& e : x.dense_entries())
                     rhs = rhs + e.value * graph_vector(n, sys.blocks[e.index - 1]);
                   return max_coord_diff(lhs, rhs) / std::max(1.0, l2_norm(x));
                 },
                 nullptr});
    g.push_back({"adjoint-check", "pairing_preservation", "pairing_preservation", Provenance::ExactIdentity,
                 Compare::AtMost, range_ns(2, 4), every, "", nullptr, 1000, nullptr, fixed(1e-9), 0.0,
                 [](const LabContext& c, unsigned n, int, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "adjoint-check/pairing_preservation", n, -1, i);
                   const auto sys = random_block_system(rng, c.cfg.dim);
                   const std::pair<RochbergVector, RochbergVector> s[1] = {
                       {random_on(rng, n, sys.count), random_on(rng, n, sys.count)}};
                   trace_vec(t, "x", s[0].first);
                   trace_vec(t, "y", s[0].second);
                   return pairing_preservation_check(block_operator(n, sys.blocks), s);
                 },
                 nullptr});
    g.push_back({"adjoint-check", "adjoint_identity", "adjoint_identity", Provenance::TheoremConstant,
                 Compare::AtMost, range_ns(2, 4), every, "trial", [](const LabContext&, unsigned) {
                   return std::vector<int>{0, 1, 2, 3};
                 },
                 0, nullptr, fixed(1e-9), 0.0,
                 [](const LabContext& c, unsigned n, int trial, std::uint64_t, Trace*) {
                   const auto T = finite_block_operator(c, n, trial);
                   const auto m = static_cast<Eigen::Index>(T.m);
                   const Eigen::MatrixXd prod = adjoint_plus(T).matrix * T.matrix;
                   Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(prod.rows(), prod.cols());
                   for (unsigned b = 0; b < n; ++b)
                     for (Eigen::Index v = 0; v < m / 8; ++v) expect(b * m + v, b * m + v) = 1.0;
                   return (prod - expect).cwiseAbs().maxCoeff();
                 },
                 [](const LabContext&, unsigned, int trial) { return "m=" + std::to_string(finite_truncation(trial)); }});
    g.push_back({"adjoint-check", "projector", "projector", Provenance::ExactIdentity, Compare::AtMost,
                 range_ns(2, 4), every, "trial", [](const LabContext&, unsigned) {
                   return std::vector<int>{0, 1, 2, 3};
                 },
                 0, nullptr, fixed(1e-9), 0.0,
                 [](const LabContext& c, unsigned n, int trial, std::uint64_t, Trace*) {
                   const auto T = finite_block_operator(c, n, trial);
                   const Eigen::MatrixXd P = T.matrix * adjoint_plus(T).matrix;
                   return std::max((P * P - P).cwiseAbs().maxCoeff(), (P * T.matrix - T.matrix).cwiseAbs().maxCoeff());
                 },
                 [](const LabContext&, unsigned, int trial) { return "m=" + std::to_string(finite_truncation(trial)); }});

    // ---- corners
    g.push_back({"corners", "corner_commute", "corner_commute", Provenance::ExactIdentity, Compare::AtMost,
                 range_ns(2, 4), [](unsigned n) { return n >= 2; }, "k",
                 [](const LabContext&, unsigned n) {
                   std::vector<int> v;
                   for (unsigned k = 1; k < n; ++k) v.push_back(static_cast<int>(k));
                   return v;
                 },
                 1000, nullptr, fixed(0.0), 0.0,
                 [](const LabContext& c, unsigned n, int k, std::uint64_t i, Trace* t) {
                   auto rng = rng_for(c, "corners/corner_commute", n, k, i);
                   const auto R = c.op ? build(*c.op, n) : random_triangular(rng, n, c.cfg.dim);
                   const auto kk = static_cast<unsigned>(k);
                   const auto corners = corner_extract(R, kk);
                   const auto v = random_rochberg(rng, n, c.cfg.dim);
                   const auto w = random_rochberg(rng, kk, c.cfg.dim);
                   trace_vec(t, "v", v);
                   trace_vec(t, "w", w);
                   const double lower = max_coord_diff(project(R.apply(v), n - kk),
                                                       corners.trailing.apply(project(v, n - kk)));
                   const double upper = max_coord_diff(R.apply(embed(w, n)), embed(corners.leading.apply(w), n));
                   return std::max(lower, upper);
                 },
                 nullptr});
    return g;
  }();
  return all;
}

inline const Gate& find_gate(const std::string& experiment, const std::string& name) {
  for (const auto& g : gates())
    if (g.experiment == experiment && g.name == name) return g;
  throw RowNotFound("no gate " + experiment + "/" + name);
}

inline std::uint64_t samples_for(const LabContext& ctx, const Gate& g, unsigned n) {
  if (g.sample_count) return g.sample_count(ctx, n);
  if (g.default_samples == 0) return 1;
  return ctx.cfg.samples.value_or(g.default_samples);
}

inline bool sampled(const Gate& g) { return g.default_samples != 0 || g.sample_count; }

inline double gate_bound(const LabContext& ctx, const Gate& g, unsigned n) {
  if (g.name != "top_ratio") {
    const auto it = ctx.cfg.budgets.find(g.budget_key);
    if (it != ctx.cfg.budgets.end() && g.provenance != Provenance::TheoremConstant) return it->second;
  }
  return g.bound(ctx, n);
}

inline double gate_slack(const LabContext& ctx, const Gate& g) {
  if (g.provenance == Provenance::TheoremConstant) return ctx.budget(g.budget_key, g.slack);
  return g.slack;
}

inline bool judge(Compare c, double value, double bound, double slack) {
  if (std::isnan(value)) return false;
  switch (c) {
    case Compare::AtMost: return value <= bound * (1.0 + slack) || value <= bound;
    case Compare::AtLeast: return value >= bound;
    case Compare::Above: return value > bound;
    case Compare::Record: return true;
  }
  return false;
}

// worse(a, b): a is a worse sample than b for the gate's comparison
inline bool worse(Compare c, double a, double b) {
  if (std::isnan(a)) return !std::isnan(b);
  if (std::isnan(b)) return false;
  return (c == Compare::AtLeast || c == Compare::Above) ? a < b : a > b;
}

inline std::string exception_kind(const std::exception& e) {
  if (dynamic_cast<const EntryBudgetExceeded*>(&e)) return "EntryBudgetExceeded";
  if (dynamic_cast<const ToleranceNotReached*>(&e)) return "ToleranceNotReached";
  if (dynamic_cast<const ConfigInvalid*>(&e)) return "ConfigInvalid";
  if (dynamic_cast<const OrderMismatch*>(&e)) return "OrderMismatch";
  return "error";
}

inline std::vector<ReportRow> run_gate(const LabContext& ctx, const Gate& g, unsigned n, unsigned threads) {
  std::vector<int> variants = g.variants ? g.variants(ctx, n) : std::vector<int>{-1};
  std::vector<ReportRow> rows;
  for (int variant : variants) {
    ReportRow row;
    row.experiment = g.experiment;
    row.gate = g.name;
    row.n = n;
    row.variant = variant;
    row.variant_name = g.variant_name;
    row.compare = g.compare;
    row.provenance = g.provenance;
    row.bound = gate_bound(ctx, g, n);
    row.slack = gate_slack(ctx, g);
    if (g.describe) row.detail = g.describe(ctx, n, variant);
    const auto count = samples_for(ctx, g, n);
    std::vector<double> values(count);
    try {
      parallel_for(count, threads, [&](std::uint64_t i) { values[i] = g.measure(ctx, n, variant, i, nullptr); });
    } catch (const std::exception& e) {
      // find the failing index again serially so the report names it exactly
      for (std::uint64_t i = 0; i < count; ++i) {
        try {
          g.measure(ctx, n, variant, i, nullptr);
        } catch (const std::exception& inner) {
          row.sample = static_cast<std::int64_t>(i);
          throw SampleError(exception_kind(inner), row, ctx.cfg.seed, inner.what());
        }
      }
      throw;
    }
    std::uint64_t arg = 0;
    for (std::uint64_t i = 1; i < count; ++i)
      if (worse(g.compare, values[i], values[arg])) arg = i;
    row.value = count ? values[arg] : 0.0;
    row.sample = sampled(g) ? static_cast<std::int64_t>(arg) : -1;
    row.pass = judge(g.compare, row.value, row.bound, row.slack);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline LabContext make_context(const ExperimentConfig& cfg) {
  LabContext ctx{cfg, nullptr, cfg.lengths};
  if (ctx.lengths.empty()) ctx.lengths = parse_lengths("2^10..2^60");
  if (!cfg.op.empty()) {
    try {
      ctx.op = parse_operator(cfg.op);
    } catch (const error& e) {
      throw ConfigInvalid(std::string("operator expression: ") + e.what());
    }
  }
  return ctx;
}

}  // namespace detail

/// Throws ConfigInvalid on the first problem found.
inline void validate(const ExperimentConfig& cfg) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
    throw ConfigInvalid("unknown experiment '" + cfg.experiment + "'");
  if (cfg.dim < 2 || cfg.dim > 4096) throw ConfigInvalid("dim must lie in 2..4096");
  if (cfg.samples && *cfg.samples < 1) throw ConfigInvalid("samples must be >= 1");
  if (!(cfg.tol > 0.0)) throw ConfigInvalid("tol must be positive");
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigInvalid("format must be csv or json");
  for (unsigned n : cfg.n)
    if (n < 1 || n > 12) throw ConfigInvalid("n must lie in 1..12");
  if (cfg.experiment == "report-all" && !cfg.n.empty())
    throw ConfigInvalid("report-all runs every experiment at its default orders; drop --n");
  for (const auto& [name, value] : cfg.budgets) {
    bool known = false;
    for (const auto& g : detail::gates()) known = known || g.budget_key == name;
    if (!known) throw ConfigInvalid("unknown budget '" + name + "'");
    if (std::isnan(value)) throw ConfigInvalid("budget '" + name + "' is not a number");
  }
  for (auto N : cfg.lengths)
    if (N < 2 || N > kMaxFlatLength) throw ConfigInvalid("growth lengths must lie in 2..2^62");
  if (!cfg.op.empty() && cfg.experiment != "corners" && cfg.experiment != "report-all")
    throw ConfigInvalid("--op only applies to corners");
  if (!cfg.op.empty()) {
    auto ctx = detail::make_context(cfg);
    for (unsigned n : cfg.n.empty() ? std::vector<unsigned>{2, 3, 4} : cfg.n) {
      try {
        const auto R = build(*ctx.op, n);
        if (!R.is_square()) throw ConfigInvalid("operator is not square");
      } catch (const error& e) {
        throw ConfigInvalid("operator expression at n=" + std::to_string(n) + ": " + e.what());
      }
    }
  }
}

inline ExperimentReport run(const ExperimentConfig& cfg, unsigned threads = lab_threads()) {
  validate(cfg);
  const auto ctx = detail::make_context(cfg);
  ExperimentReport report;
  report.meta["tool"] = "zn-lab";
  report.meta["version"] = kLabVersion;
  report.meta["seed"] = cfg.seed;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  report.meta["config_hash"] = hash;
  report.meta["config"] = cfg.to_json();
  const bool all = cfg.experiment == "report-all";
  for (const auto& exp : experiment_names()) {
    if (exp == "report-all" || (!all && exp != cfg.experiment)) continue;
    for (const auto& g : detail::gates()) {
      if (g.experiment != exp) continue;
      const auto ns = cfg.n.empty() ? g.default_ns : cfg.n;
      for (unsigned n : ns) {
        if (g.applies && !g.applies(n)) continue;
        auto rows = detail::run_gate(ctx, g, n, threads);
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
      }
    }
  }
  return report;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const ExperimentReport& r) {
  os << "experiment,n,param,value,bound,ratio,pass\n";
  for (const auto& row : r.rows)
    os << row.experiment << ',' << row.n << ',' << row.param() << ',' << format_number(row.value) << ','
       << format_number(row.bound) << ',' << format_number(row.ratio()) << ',' << (row.pass ? "true" : "false")
       << '\n';
}

inline nlohmann::ordered_json row_to_json(const ReportRow& row) {
  nlohmann::ordered_json j;
  j["experiment"] = row.experiment;
  j["n"] = row.n;
  j["param"] = row.param();
  j["value"] = row.value;
  j["bound"] = row.bound;
  j["ratio"] = row.ratio();
  j["pass"] = row.pass;
  j["gate"] = row.gate;
  j["variant"] = row.variant;
  j["variant_name"] = row.variant_name;
  j["sample"] = row.sample;
  j["detail"] = row.detail;
  j["slack"] = row.slack;
  j["provenance"] = provenance_tag(row.provenance);
  return j;
}

inline nlohmann::ordered_json report_to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["meta"] = r.meta;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) rows.push_back(row_to_json(row));
  j["rows"] = std::move(rows);
  nlohmann::ordered_json summary;
  std::size_t passed = 0;
  auto constants = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    passed += row.pass ? 1 : 0;
    constants.push_back({{"gate", row.experiment + "/" + row.gate},
                         {"n", row.n},
                         {"measured", row.value},
                         {"bound", row.bound},
                         {"provenance", provenance_tag(row.provenance)},
                         {"pass", row.pass}});
  }
  summary["gates"] = r.rows.size();
  summary["passed"] = passed;
  summary["pass"] = r.all_pass();
  summary["constants"] = std::move(constants);
  j["summary"] = std::move(summary);
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.meta = j.at("meta");
  for (const auto& jr : j.at("rows")) {
    ReportRow row;
    row.experiment = jr.at("experiment").get<std::string>();
    row.gate = jr.at("gate").get<std::string>();
    row.n = jr.at("n").get<unsigned>();
    row.variant = jr.at("variant").get<int>();
    row.variant_name = jr.at("variant_name").get<std::string>();
    row.sample = jr.at("sample").get<std::int64_t>();
    row.detail = jr.at("detail").get<std::string>();
    row.value = jr.at("value").is_null() ? std::nan("") : jr.at("value").get<double>();
    row.bound = jr.at("bound").get<double>();
    row.slack = jr.at("slack").get<double>();
    row.pass = jr.at("pass").get<bool>();
    const auto& g = detail::find_gate(row.experiment, row.gate);
    row.compare = g.compare;
    row.provenance = g.provenance;
    r.rows.push_back(std::move(row));
  }
  return r;
}

/// Gate list with budget provenance, one line per row.
inline void write_gate_list(std::ostream& os, const ExperimentReport& r) {
  for (const auto& row : r.rows)
    os << (row.pass ? "PASS " : "FAIL ") << row.experiment << " n=" << row.n << ' ' << row.param()
       << " value=" << format_number(row.value) << " bound=" << format_number(row.bound) << " ["
       << provenance_tag(row.provenance) << "]\n";
}

struct ReplayResult {
  ReportRow row;
  double value;
  bool matches;                  // bitwise equal to the recorded value
  nlohmann::ordered_json sample; // regenerated inputs
};

/// Recomputes one row's recorded sample. seed_override replays under a
/// different seed (values then differ).
inline ReplayResult replay(const ExperimentReport& report, std::size_t row_index,
                           std::optional<std::uint64_t> seed_override = std::nullopt) {
  if (row_index >= report.rows.size())
    throw RowNotFound("row " + std::to_string(row_index) + " not in report (" +
                      std::to_string(report.rows.size()) + " rows)");
  auto cfg = ExperimentConfig::from_json(report.meta.at("config"));
  if (seed_override) cfg.seed = *seed_override;
  const auto ctx = detail::make_context(cfg);
  const auto& row = report.rows[row_index];
  const auto& g = detail::find_gate(row.experiment, row.gate);
  detail::Trace trace;
  const auto sample = row.sample < 0 ? std::uint64_t{0} : static_cast<std::uint64_t>(row.sample);
  const double v = g.measure(ctx, row.n, row.variant, sample, &trace);
  const bool same = (v == row.value) || (std::isnan(v) && std::isnan(row.value));
  return {row, v, same, std::move(trace)};
}

/// Finds a row by its param text and n.
inline std::size_t find_row(const ExperimentReport& report, const std::string& experiment, unsigned n,
                            const std::string& param) {
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    if (r.experiment == experiment && r.n == n && r.param() == param) return i;
  }
  throw RowNotFound("no row " + experiment + " n=" + std::to_string(n) + " " + param);
}

}  // namespace znlab
