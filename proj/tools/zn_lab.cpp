#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "znlab/lab.hpp"

namespace {

std::vector<unsigned> parse_orders(const std::string& text) {
  std::vector<unsigned> out;
  std::stringstream ss(text);
  std::string item;
  auto num = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const auto v = std::stoul(s, &used);
      if (used != s.size()) throw znlab::ConfigInvalid("");
      return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw znlab::ConfigInvalid("cannot read order '" + s + "'");
    }
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const auto lo = num(item.substr(0, dots));
      const auto hi = num(item.substr(dots + 2));
      for (auto n = lo; n <= hi; ++n) out.push_back(n);
    } else {
      out.push_back(num(item));
    }
  }
  return out;
}

std::map<std::string, double> parse_budgets(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw znlab::ConfigInvalid("budget '" + item + "' is not name=value");
    try {
      std::size_t used = 0;
      const auto rest = item.substr(eq + 1);
      out[item.substr(0, eq)] = std::stod(rest, &used);
      if (used != rest.size()) throw znlab::ConfigInvalid("");
    } catch (const std::exception&) {
      throw znlab::ConfigInvalid("budget '" + item + "' has no numeric value");
    }
  }
  return out;
}

int do_replay(const std::string& report_path, std::size_t row, const std::string& seed_text) {
  std::ifstream in(report_path);
  if (!in) throw znlab::ConfigInvalid("cannot open report " + report_path);
  const auto report = znlab::report_from_json(nlohmann::json::parse(in));
  std::optional<std::uint64_t> seed;
  if (!seed_text.empty()) seed = std::stoull(seed_text);
  const auto r = znlab::replay(report, row, seed);
  nlohmann::ordered_json out;
  out["row"] = znlab::row_to_json(r.row);
  out["replayed"] = r.value;
  out["matches"] = r.matches;
  out["sample"] = r.sample;
  std::cout << out.dump(2) << '\n';
  return r.matches ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zn-lab: numerics and verification runs on the Rochberg spaces over l_2"};
  app.set_config("--config", "", "key = value configuration file; flags override it");

  std::string experiment;
  std::string orders, lengths, samples, seed_text, report_path;
  std::vector<std::string> budgets;
  znlab::ExperimentConfig cfg;
  std::size_t row = 0;

  app.add_option("experiment", experiment, "experiment to run, or replay")
      ->required()
      ->check(CLI::IsMember([] {
        auto names = znlab::experiment_names();
        names.push_back("replay");
        return names;
      }()));
  app.add_option("--n", orders, "orders, e.g. 3 or 2,3 or 1..5");
  app.add_option("--dim", cfg.dim, "maximal support index of random vectors");
  app.add_option("--samples", samples, "samples per gate (default: per-gate)");
  app.add_option("--seed", seed_text, "64-bit seed");
  app.add_option("--tol", cfg.tol, "Luxemburg bisection tolerance");
  app.add_option("--budget", budgets, "budget override name=value")->take_all();
  app.add_option("--out", cfg.out, "output file (default: stdout)");
  app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--Ns", lengths, "growth lengths, e.g. 2^10..2^60");
  app.add_option("--op", cfg.op, "operator expression for corners");
  app.add_option("--profile", cfg.profile, "write the growth table to this CSV file");
  app.add_option("--report", report_path, "replay: JSON report to read");
  app.add_option("--row", row, "replay: row index in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (experiment == "replay") {
      if (report_path.empty()) throw znlab::ConfigInvalid("replay needs --report");
      return do_replay(report_path, row, seed_text);
    }
    cfg.experiment = experiment;
    if (!orders.empty()) cfg.n = parse_orders(orders);
    if (!samples.empty()) cfg.samples = std::stoull(samples);
    if (!seed_text.empty()) cfg.seed = std::stoull(seed_text);
    cfg.budgets = parse_budgets(budgets);
    if (!lengths.empty()) cfg.lengths = znlab::parse_lengths(lengths);

    const auto report = znlab::run(cfg);

    if (!cfg.profile.empty()) {
      std::ofstream prof(cfg.profile);
      if (!prof) throw znlab::ConfigInvalid("cannot write " + cfg.profile);
      const auto Ns = cfg.lengths.empty() ? znlab::parse_lengths("2^10..2^60") : cfg.lengths;
      std::vector<znlab::GrowthRow> rows;
      for (unsigned n : cfg.n.empty() ? std::vector<unsigned>{2, 3, 4} : cfg.n) {
        if (n < 2) continue;
        const auto part = znlab::growth_profile(n, Ns);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      znlab::write_growth_csv(prof, rows);
    }

    std::ofstream file;
    if (!cfg.out.empty()) {
      file.open(cfg.out);
      if (!file) throw znlab::ConfigInvalid("cannot write " + cfg.out);
    }
    std::ostream& os = cfg.out.empty() ? std::cout : file;
    if (cfg.format == "json")
      os << znlab::report_to_json(report).dump(2) << '\n';
    else
      znlab::write_csv(os, report);
    znlab::write_gate_list(std::cerr, report);
    return report.all_pass() ? 0 : 1;
  } catch (const znlab::error& e) {
    std::cerr << "zn-lab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "zn-lab: " << e.what() << '\n';
    return 2;
  }
}
