// andor: command-line front end for costs, optima, verification batteries and
// equilibrium searches.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "andor/catalog.hpp"
#include "andor/equilibrium.hpp"
#include "andor/optimal.hpp"
#include "andor/verify.hpp"

namespace {

using namespace andor;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kInternal = 1, kParse = 2, kValidation = 3, kBudget = 4, kInfeasible = 5 };

struct ValidationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string tree, dist, strategy, cls = "general", r, eps, out, backend, csv, manifest, config, suite;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> battery_seed;
  int starts = 16;
  double tol = 1e-10;
  int budget_leaves = 16;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Inline JSON when the argument starts with '{', otherwise a file path.
std::string json_arg(const std::string& arg) { return !arg.empty() && arg.front() == '{' ? arg : slurp(arg); }

void write_out(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text << "\n";
}

std::string fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::shared_ptr<const Tree> load_tree(const Options& o) {
  if (o.tree.empty()) throw ParseError("--tree is required");
  return std::make_shared<const Tree>(parse_tree(o.tree));
}

/// Distribution from --dist, or the d_eps family from --eps ("0" selects the
/// limit distribution), converted to --backend when given.
AnyDistribution load_distribution(const Options& o, std::shared_ptr<const Tree> tree) {
  AnyDistribution d = [&]() -> AnyDistribution {
    if (!o.eps.empty()) {
      if (!(*tree == Tree::uniform(Label::Or, 2, 3))) throw ParseError("--eps requires --tree uniform:OR:2:3");
      const bool decimal = o.eps.find_first_of(".eE") != std::string::npos;
      if (decimal) {
        auto fd = make_d_epsilon<double>(parse_decimal(o.eps));
        return FloatDistribution(tree, fd.leaf_probs());
      }
      const Rational eps = parse_rational(o.eps);
      auto ed = eps == 0 ? make_d_epsilon_limit() : make_d_epsilon<Rational>(eps);
      return ExactDistribution(tree, ed.leaf_probs());
    }
    if (o.dist.empty()) throw ParseError("--dist or --eps is required");
    return parse_distribution_json(tree, json_arg(o.dist));
  }();
  if (o.backend == "float") {
    if (auto* e = std::get_if<ExactDistribution>(&d)) {
      std::vector<double> v;
      for (const auto& p : e->leaf_probs()) v.push_back(to_double(p));
      return FloatDistribution(tree, v);
    }
  } else if (o.backend == "exact") {
    if (auto* f = std::get_if<FloatDistribution>(&d)) {
      std::vector<Rational> v;
      for (double p : f->leaf_probs()) v.push_back(Rational(p));
      return ExactDistribution(tree, v);
    }
  } else if (!o.backend.empty()) {
    throw ParseError("--backend must be exact or float");
  }
  return d;
}

/// Strategy from a JSON file (or inline JSON), or one of the built-in names
/// solve, solve-prime, a0.
Strategy load_strategy(const Options& o, const Tree& tree) {
  if (o.strategy == "solve") return make_solve(tree);
  if (o.strategy == "solve-prime") return catalog::build_solve_prime(tree);
  if (o.strategy == "a0") return catalog::build_a0_height3(tree);
  if (o.strategy.empty()) throw ParseError("--strategy is required");
  return strategy_from_json(tree, json_arg(o.strategy));
}

template <class T>
json value_json(const T& v) {
  if constexpr (std::is_same_v<T, double>) return {{"float", v}};
  else return {{"exact", format_value(v)}, {"float", to_double(v)}};
}

json path_json(const Tree& tree, std::span<const PathStep> path) { return render_path(tree, path); }

json cmd_cost(const Options& o) {
  auto tree = load_tree(o);
  auto d = load_distribution(o, tree);
  auto s = load_strategy(o, *tree);
  auto v = validate(*tree, s);
  if (!v.ok) {
    throw ValidationFailed(json{{"violation", v.violation}, {"path", path_json(*tree, v.path)}}.dump());
  }
  json j;
  j["tree"] = tree->render();
  j["cost"] = std::visit([&](const auto& dd) { return value_json(expected_cost(dd, s)); }, d);
  j["valid"] = true;
  j["warnings"] = v.warnings;
  auto df = is_depth_first(*tree, s);
  j["depth_first"] = df.depth_first;
  if (!df.depth_first) {
    j["depth_first_witness"] = {{"path", path_json(*tree, df.path)},
                                {"open_node", tree->render_id(tree->node(df.open_node).id)},
                                {"interrupting_leaf", tree->leaf_name(df.interrupting_leaf)}};
  }
  auto dir = is_directional(*tree, s);
  j["directional"] = dir.directional;
  std::vector<std::string> names;
  for (int leaf : dir.directional ? dir.order : dir.cycle) names.push_back(tree->leaf_name(leaf));
  j[dir.directional ? "order" : "cycle"] = names;
  return j;
}

json cmd_optimal(const Options& o) {
  auto tree = load_tree(o);
  auto d = load_distribution(o, tree);
  OptimalOptions opt;
  opt.leaf_budget = o.budget_leaves;
  const auto cls = parse_algorithm_class(o.cls);
  return std::visit(
      [&](const auto& dd) {
        auto rep = optimal_cost(dd, cls, opt);
        if (!o.out.empty()) write_out(o.out, strategy_to_json(*tree, rep.witness));
        return json::parse(report_to_json(*tree, rep));
      },
      d);
}

json cmd_catalog(const Options& o) {
  auto tree = load_tree(o);
  auto d = load_distribution(o, tree);
  return std::visit(
      [&](const auto& dd) {
        json rows = json::array();
        for (const auto& id : catalog::all_height2_ids()) {
          auto s = catalog::build_height2_algorithm(id, dd);
          auto a = catalog::f_arguments(id, dd);
          rows.push_back({{"algorithm", id.name()},
                          {"cost", value_json(expected_cost(dd, s))},
                          {"f", value_json(catalog::f(a[0], a[1], a[2], a[3]))}});
        }
        return rows;
      },
      d);
}

int cmd_verify(const Options& o, json& result) {
  verify::BatteryConfig cfg;
  if (o.battery_seed) cfg.seed = *o.battery_seed;
  auto results = verify::run_suite(o.suite, cfg);
  for (const auto& r : results) {
    std::fprintf(stderr, "%-28s %s  %8.2fs  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.seconds,
                 r.detail.c_str());
  }
  result = json::parse(verify::junit_json(o.suite, results));
  return result["failures"].get<int>() == 0 ? kOk : kInternal;
}

json cmd_equilibrium(const Options& o) {
  EquilibriumProblem p;
  p.tree = load_tree(o);
  p.algorithm_class = parse_algorithm_class(o.cls);
  p.config.starts = o.starts;
  p.config.seed = o.seed;
  p.config.tol_value = o.tol;
  std::string r = o.r;
  if (!o.config.empty()) {
    auto c = json::parse(json_arg(o.config));
    p.config.starts = c.value("starts", p.config.starts);
    p.config.seed = c.value("seed", p.config.seed);
    p.config.tol_value = c.value("tol_value", p.config.tol_value);
    p.config.tol_coordinate = c.value("tol_coordinate", p.config.tol_coordinate);
    p.config.max_cycles = c.value("max_cycles", p.config.max_cycles);
    if (c.contains("class")) p.algorithm_class = parse_algorithm_class(c["class"].get<std::string>());
    if (c.contains("r") && !c["r"].is_null()) r = c["r"].is_string() ? c["r"].get<std::string>() : c["r"].dump();
  }
  if (!r.empty()) {
    p.root_probability =
        r.find('/') != std::string::npos ? to_double(parse_rational(r)) : parse_decimal(r);
  }
  if (p.algorithm_class == AlgorithmClass::directional) {
    throw ParseError("equilibrium search supports --class general or depth");
  }
  auto rep = search(p);
  if (!o.csv.empty()) write_out(o.csv, trajectories_to_csv(rep));
  return json::parse(equilibrium_report_to_json(rep, p));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected query cost, optimal strategies and equilibria on AND-OR trees"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto add_tree = [&](CLI::App* c) { c->add_option("--tree", o.tree, "tree spec, e.g. uniform:AND:2:2 or AND(OR(l,l),OR(l,l))"); };
  auto add_dist = [&](CLI::App* c) {
    c->add_option("--dist", o.dist, "distribution JSON file or inline JSON");
    c->add_option("--eps", o.eps, "use d_eps on uniform:OR:2:3 (0 = limit distribution)");
    c->add_option("--backend", o.backend, "exact | float")->check(CLI::IsMember({"exact", "float"}));
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "output file");
    c->add_option("--manifest", o.manifest, "write the run manifest here instead of stderr");
  };

  auto* cost = app.add_subcommand("cost", "expected cost of a strategy");
  add_tree(cost);
  add_dist(cost);
  add_common(cost);
  cost->add_option("--strategy", o.strategy, "strategy JSON file, inline JSON, or solve | solve-prime | a0");

  auto* optimal = app.add_subcommand("optimal", "optimal cost over an algorithm class");
  add_tree(optimal);
  add_dist(optimal);
  add_common(optimal);
  optimal->add_option("--class", o.cls, "general | depth | directional");
  optimal->add_option("--budget-leaves", o.budget_leaves, "largest leaf count the optimizer accepts");

  auto* catalog_cmd = app.add_subcommand("catalog", "costs of the sixteen height-2 algorithms");
  add_tree(catalog_cmd);
  add_dist(catalog_cmd);
  add_common(catalog_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "run a verification battery");
  verify_cmd->add_option("suite", o.suite, "prop31 | prop32 | tarsi | theorem41 | corollary42 | all")->required();
  verify_cmd->add_option("--seed", o.battery_seed, "seed for the randomized batteries");
  add_common(verify_cmd);

  auto* eq = app.add_subcommand("equilibrium", "max-min equilibrium search over independent distributions");
  add_tree(eq);
  add_common(eq);
  eq->add_option("--class", o.cls, "general | depth");
  eq->add_option("--r", o.r, "root zero-probability constraint (rational or decimal)");
  eq->add_option("--seed", o.seed);
  eq->add_option("--starts", o.starts);
  eq->add_option("--tol", o.tol, "stop when a full cycle gains less than this");
  eq->add_option("--config", o.config, "search config JSON file or inline JSON");
  eq->add_option("--csv", o.csv, "per-start trajectories as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const std::string command = app.get_subcommands().front()->get_name();
  json result;
  int code = kOk;
  try {
    if (command == "cost") result = cmd_cost(o);
    else if (command == "optimal") result = cmd_optimal(o);
    else if (command == "catalog") result = cmd_catalog(o);
    else if (command == "verify") code = cmd_verify(o, result);
    else result = cmd_equilibrium(o);
  } catch (const ValidationFailed& e) {
    std::cerr << "invalid strategy: " << e.what() << "\n";
    return kValidation;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }

  const std::string payload = result.dump(2);
  if (!o.out.empty() && command != "optimal") write_out(o.out, payload);
  else std::cout << payload << "\n";

  json config = {{"tree", o.tree}, {"dist", o.dist},       {"strategy", o.strategy}, {"class", o.cls},
                 {"r", o.r},       {"eps", o.eps},         {"seed", o.seed},         {"starts", o.starts},
                 {"tol", o.tol},   {"budget_leaves", o.budget_leaves}, {"backend", o.backend},
                 {"config", o.config}, {"suite", o.suite}};
  json manifest = {{"command", command},
                   {"config", config},
                   {"version", kVersion},
                   {"seed", o.seed},
                   {"wall_clock_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                   {"results_digest", fnv1a(payload)}};
  if (!o.manifest.empty()) write_out(o.manifest, manifest.dump(2));
  else std::cerr << "manifest " << manifest.dump() << "\n";
  return code;
}
