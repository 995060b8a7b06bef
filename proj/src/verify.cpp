#include "andor/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "andor/catalog.hpp"
#include "andor/equilibrium.hpp"
#include "andor/optimal.hpp"
#include "andor/parallel.hpp"

namespace andor::verify {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

OptimalOptions value_only() {
  OptimalOptions opt;
  opt.extract_witness = false;
  return opt;
}

Rational q(std::string_view text) { return parse_rational(text); }

std::shared_ptr<const Tree> tree_of(std::string_view spec) { return std::make_shared<const Tree>(parse_tree(spec)); }

/// Uniform over fractions a/b with 2 <= b <= 1000 and 0 < a < b.
Rational random_open_unit(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> den(2, 1000);
  const int b = den(rng);
  std::uniform_int_distribution<int> num(1, b - 1);
  return Rational(num(rng)) / b;
}

std::string leaf_list(const std::vector<Rational>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_value(v[i]);
  return out + ")";
}

/// Collects the first few failure messages and a count.
class Failures {
 public:
  void add(std::string msg) {
    if (count_++ < 3) first_.push_back(std::move(msg));
  }
  bool empty() const { return count_ == 0; }
  std::string summary(std::string_view ok) const {
    if (empty()) return std::string(ok);
    std::string out = std::to_string(count_) + " failure(s)";
    for (const auto& m : first_) out += "; " + m;
    return out;
  }

 private:
  int count_ = 0;
  std::vector<std::string> first_;
};

}  // namespace

// --- domination chain -------------------------------------------------------

void DominationLog::add(std::string label, const ExactDistribution& d, std::optional<Rational> general,
                        std::optional<Rational> depth_first, std::optional<Rational> directional) {
  exact_.push_back({std::move(label), d, std::move(general), std::move(depth_first), std::move(directional)});
}

void DominationLog::add(std::string label, const FloatDistribution& d) { float_.push_back({std::move(label), d}); }

CheckResult DominationLog::check() const {
  const auto t0 = Clock::now();
  std::map<const Tree*, Strategy> solve;
  for (const auto& e : exact_) solve.try_emplace(&e.d.tree(), make_solve(e.d.tree()));
  for (const auto& e : float_) solve.try_emplace(&e.d.tree(), make_solve(e.d.tree()));

  std::vector<std::string> exact_err(exact_.size()), float_err(float_.size());
  parallel_for(exact_.size(), [&](std::size_t i) {
    const auto& e = exact_[i];
    const auto opt = value_only();
    const Rational g = e.general ? *e.general : optimal_cost_general(e.d, opt).value;
    const Rational df = e.depth_first ? *e.depth_first : optimal_cost_depth_first(e.d, opt).value;
    const Rational dir = e.directional ? *e.directional : optimal_cost_directional(e.d, opt).value;
    const Rational s = expected_cost(e.d, solve.at(&e.d.tree()));
    if (!(g <= df && df <= dir && dir <= s)) {
      exact_err[i] = e.label + ": " + format_value(g) + ", " + format_value(df) + ", " + format_value(dir) + ", " +
                     format_value(s);
    }
  });
  parallel_for(float_.size(), [&](std::size_t i) {
    const auto& e = float_[i];
    const auto opt = value_only();
    const double g = optimal_cost_general(e.d, opt).value;
    const double df = optimal_cost_depth_first(e.d, opt).value;
    const double dir = optimal_cost_directional(e.d, opt).value;
    const double s = expected_cost(e.d, solve.at(&e.d.tree()));
    const double tol = 1e-12 * std::max(1.0, s);
    if (!(g <= df + tol && df <= dir + tol && dir <= s + tol)) {
      float_err[i] = e.label + ": " + format_value(g) + ", " + format_value(df) + ", " + format_value(dir) + ", " +
                     format_value(s);
    }
  });

  Failures f;
  for (const auto& m : exact_err) {
    if (!m.empty()) f.add(m);
  }
  for (const auto& m : float_err) {
    if (!m.empty()) f.add(m);
  }
  return {"domination_chain", f.empty(),
          f.summary("general <= depth-first <= directional <= SOLVE on " + std::to_string(size()) + " instances"),
          since(t0)};
}

// --- separating example -------------------------------------------------------

CheckResult limit_constants(DominationLog& log) {
  const auto t0 = Clock::now();
  const auto d = make_d_epsilon_limit();
  const auto opt = value_only();
  const Rational df = optimal_cost_depth_first(d, opt).value;
  const Rational g = optimal_cost_general(d, opt).value;
  const Rational a0 = expected_cost(d, catalog::build_a0_height3(d.tree()));
  const double secs = since(t0);
  log.add("d_eps limit", d, g, df);
  const bool ok = df == q("63/16") && g == q("31/8") && secs < 1.0;
  std::ostringstream detail;
  detail << "depth-first " << format_value(df) << " (want 63/16), general " << format_value(g)
         << " (want 31/8), cost(A_0) " << format_value(a0);
  return {"limit_constants", ok, detail.str(), secs};
}

CheckResult strict_separation(DominationLog& log) {
  const auto t0 = Clock::now();
  Failures f;
  std::ostringstream detail;
  for (const char* eps_text : {"1/100", "1/1000"}) {
    const auto d = make_d_epsilon<Rational>(q(eps_text));
    const auto opt = value_only();
    const Rational a0 = expected_cost(d, catalog::build_a0_height3(d.tree()));
    const Rational df = optimal_cost_depth_first(d, opt).value;
    const Rational g = optimal_cost_general(d, opt).value;
    log.add(std::string("d_eps ") + eps_text, d, g, df);
    detail << "eps=" << eps_text << ": A_0 " << to_double(a0) << " general " << to_double(g) << " < depth-first "
           << to_double(df) << "; ";
    if (!(a0 < df)) f.add(std::string("cost(A_0) >= depth-first at eps=") + eps_text);
    if (!(g < df)) f.add(std::string("general >= depth-first at eps=") + eps_text);
  }
  const double secs = since(t0);
  if (secs >= 5.0) f.add("runtime " + format_value(secs) + " s");
  return {"strict_separation", f.empty(), f.summary(detail.str()), secs};
}

CheckResult solve_closed_form(DominationLog& log) {
  const auto t0 = Clock::now();
  Failures f;
  for (const char* eps_text : {"1/2", "1/3", "1/10", "1/100", "1/1000"}) {
    const Rational eps = q(eps_text);
    const auto d = make_d_epsilon<Rational>(eps);
    const Rational got = expected_cost(d, make_solve(d.tree()));
    const Rational want = q("7/4") * q("3/2") * (1 + (1 + eps) / 2);
    log.add(std::string("d_eps ") + eps_text, d);
    if (got != want) f.add(std::string("eps=") + eps_text + ": " + format_value(got) + " != " + format_value(want));
  }
  return {"solve_closed_form", f.empty(), f.summary("5 values of eps match exactly"), since(t0)};
}

CheckResult monte_carlo_agreement(const BatteryConfig& cfg, DominationLog& log) {
  const auto t0 = Clock::now();
  const auto exact_d = make_d_epsilon<Rational>(q("1/100"));
  const auto float_d = make_d_epsilon<double>(0.01);
  log.add("d_eps 1/100 (Monte Carlo)", exact_d);
  struct Named {
    const char* name;
    Strategy s;
  };
  const Named algs[] = {{"SOLVE", make_solve(exact_d.tree())}, {"A_0", catalog::build_a0_height3(exact_d.tree())}};
  Failures f;
  std::ostringstream detail;
  for (const auto& [name, s] : algs) {
    const double exact = to_double(expected_cost(exact_d, s));
    int within = 0;
    for (int seed = 1; seed <= cfg.mc_seeds; ++seed) {
      const auto mc = monte_carlo_cost(float_d, s, cfg.mc_samples, static_cast<std::uint64_t>(seed));
      if (std::abs(mc.mean - exact) <= 3 * mc.std_error) ++within;
    }
    detail << name << ": " << within << "/" << cfg.mc_seeds << " seeds within 3 s.e.; ";
    // 99 of 100 seeds, scaled to the configured seed count.
    if (within * 100 < 99 * cfg.mc_seeds) f.add(std::string(name) + " only " + std::to_string(within) + " seeds");
  }
  return {"monte_carlo_agreement", f.empty(), f.summary(detail.str()), since(t0)};
}

// --- height-2 catalog ------------------------------------------------------------

CheckResult height2_equivalence(const BatteryConfig& cfg, DominationLog& log) {
  const auto t0 = Clock::now();
  const auto tree = tree_of("uniform:AND:2:2");
  std::mt19937_64 rng(cfg.seed);
  const auto ids = catalog::all_height2_ids();
  Failures f;
  for (int n = 0; n < cfg.random_ids; ++n) {
    std::vector<Rational> probs(4);
    for (auto& p : probs) p = random_open_unit(rng);
    const ExactDistribution d(tree, probs);
    const Rational g = optimal_cost_general(d, value_only()).value;
    const auto df = optimal_cost_depth_first(d);
    log.add("height-2 ID " + leaf_list(probs), d, g, df.value);
    const std::string where = " at " + leaf_list(probs);
    if (g != df.value) f.add("general " + format_value(g) + " != depth-first " + format_value(df.value) + where);
    Rational best16 = expected_cost(d, catalog::build_height2_algorithm(ids.front(), d));
    for (const auto& id : ids) best16 = std::min(best16, expected_cost(d, catalog::build_height2_algorithm(id, d)));
    if (best16 < g) f.add("catalog beats the optimum" + where);
    if (!is_depth_first(*tree, df.witness).depth_first || !validate(*tree, df.witness).ok ||
        expected_cost(d, df.witness) != df.value) {
      f.add("depth-first witness does not attain the optimum" + where);
    }
  }
  const double secs = since(t0);
  if (secs >= 60.0) f.add("runtime " + format_value(secs) + " s");
  return {"height2_equivalence", f.empty(),
          f.summary(std::to_string(cfg.random_ids) + " IDs: general = depth-first, catalog minimum >= optimum"), secs};
}

CheckResult selection_rule(const BatteryConfig& cfg, DominationLog& log) {
  const auto t0 = Clock::now();
  const auto tree = tree_of("uniform:AND:2:2");
  std::mt19937_64 rng(cfg.seed + 1);
  const auto ids = catalog::all_height2_ids();
  Failures f;
  int ties = 0;
  for (int n = 0; n < cfg.random_ids; ++n) {
    std::vector<Rational> p(4);
    for (auto& v : p) v = random_open_unit(rng);
    // Normalise: q_{i0} <= q_{i1}, then q_{00} q_{01} >= q_{10} q_{11}.
    for (int i : {0, 2}) {
      if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(i + 1)]) {
        std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i + 1)]);
      }
    }
    if (p[0] * p[1] < p[2] * p[3]) {
      std::swap(p[0], p[2]);
      std::swap(p[1], p[3]);
    }
    const ExactDistribution d(tree, p);
    log.add("normalised height-2 ID " + leaf_list(p), d);
    std::vector<Rational> costs;
    for (const auto& id : ids) costs.push_back(expected_cost(d, catalog::build_height2_algorithm(id, d)));
    const auto best = std::min_element(costs.begin(), costs.end());
    const auto rule = catalog::claim2_choice(p[1], p[3]);
    const auto pos = std::find(ids.begin(), ids.end(), rule) - ids.begin();
    const Rational& rule_cost = costs[static_cast<std::size_t>(pos)];
    if (rule_cost != *best) {
      f.add(rule.name() + " costs " + format_value(rule_cost) + ", " + ids[static_cast<std::size_t>(best - costs.begin())].name() +
            " costs " + format_value(*best) + " at " + leaf_list(p));
    } else if (ids[static_cast<std::size_t>(best - costs.begin())] != rule) {
      ++ties;
    }
  }
  return {"selection_rule", f.empty(),
          f.summary(std::to_string(cfg.random_ids) + " normalised IDs, rule attains the minimum (" +
                    std::to_string(ties) + " exact ties)"),
          since(t0)};
}

// --- Tarsi ------------------------------------------------------------------------

CheckResult tarsi_property(const BatteryConfig& cfg, DominationLog& log) {
  const auto t0 = Clock::now();
  Failures f;
  std::ostringstream detail;
  std::mt19937_64 rng(cfg.seed + 2);
  std::uniform_int_distribution<int> tenk(101, 9899);  // p in (0.01, 0.99)
  for (const char* spec : {"uniform:AND:2:1", "uniform:AND:2:2", "uniform:AND:2:3", "uniform:AND:2:4",
                           "uniform:AND:3:1", "uniform:AND:3:2"}) {
    const auto t1 = Clock::now();
    const auto tree = tree_of(spec);
    std::vector<Rational> ps(static_cast<std::size_t>(cfg.iid_samples));
    for (auto& p : ps) p = Rational(tenk(rng)) / 10000;
    std::vector<Rational> g(ps.size()), dir(ps.size());
    parallel_for(ps.size(), [&](std::size_t i) {
      const auto d = ExactDistribution::iid(tree, ps[i]);
      g[i] = optimal_cost_general(d, value_only()).value;
      dir[i] = optimal_cost_directional(d, value_only()).value;
    });
    for (std::size_t i = 0; i < ps.size(); ++i) {
      log.add(std::string(spec) + " iid " + format_value(ps[i]), ExactDistribution::iid(tree, ps[i]), g[i], {},
              dir[i]);
      if (g[i] != dir[i]) {
        f.add(std::string(spec) + " p=" + format_value(ps[i]) + ": general " + format_value(g[i]) +
              " != directional " + format_value(dir[i]));
      }
    }
    const double secs = since(t1);
    detail << spec << " " << std::fixed << std::setprecision(2) << secs << "s; ";
    if (secs >= 300.0) f.add(std::string(spec) + " batch took " + format_value(secs) + " s");
  }
  return {"tarsi_property", f.empty(), f.summary(detail.str()), since(t0)};
}

// --- equilibria -------------------------------------------------------------------------

namespace {

EquilibriumProblem problem_for(std::string_view spec, AlgorithmClass cls, std::optional<double> r = {}) {
  EquilibriumProblem p;
  p.tree = tree_of(spec);
  p.algorithm_class = cls;
  p.root_probability = r;
  return p;
}

}  // namespace

CheckResult unconstrained_equilibria(DominationLog& log) {
  const auto t0 = Clock::now();
  Failures f;
  std::ostringstream detail;
  for (const char* spec : {"uniform:AND:2:2", "uniform:OR:2:2"}) {
    double values[2] = {0, 0};
    int slot = 0;
    for (auto cls : {AlgorithmClass::general, AlgorithmClass::depth_first}) {
      const auto p = problem_for(spec, cls);
      const auto rep = search_unconstrained(p);
      const auto line = iid_line_search(p.tree, cls);
      log.add(std::string(spec) + " maximizer (" + std::string(to_string(cls)) + ")", rep.maximizer);
      values[slot++] = rep.value;
      const std::string tag = std::string(spec) + " " + std::string(to_string(cls));
      if (rep.iid_deviation > 1e-6) f.add(tag + ": iid deviation " + format_value(rep.iid_deviation));
      if (std::abs(rep.value - line.value) > 1e-8) {
        f.add(tag + ": value " + format_value(rep.value) + " vs IID line " + format_value(line.value));
      }
      detail << tag << " value " << std::setprecision(12) << rep.value << " dev " << std::setprecision(3)
             << rep.iid_deviation << "; ";
    }
    if (std::abs(values[0] - values[1]) > 1e-8) {
      f.add(std::string(spec) + ": general " + format_value(values[0]) + " vs depth-first " + format_value(values[1]));
    }
  }
  const double secs = since(t0);
  if (secs >= 120.0) f.add("runtime " + format_value(secs) + " s");
  return {"unconstrained_equilibria", f.empty(), f.summary(detail.str()), secs};
}

CheckResult constrained_equilibria(DominationLog& log) {
  const auto t0 = Clock::now();
  Failures f;
  double worst_dev = 0.0, worst_root = 0.0;
  int runs = 0;
  for (const char* spec : {"uniform:AND:2:2", "uniform:AND:3:1"}) {
    for (double r : {0.3, 0.5, 0.7}) {
      for (auto cls : {AlgorithmClass::general, AlgorithmClass::depth_first}) {
        const auto rep = search_constrained(problem_for(spec, cls, r));
        ++runs;
        const std::string tag = std::string(spec) + " r=" + format_value(r) + " " + std::string(to_string(cls));
        log.add(tag + " maximizer", rep.maximizer);
        worst_dev = std::max(worst_dev, rep.iid_deviation);
        worst_root = std::max(worst_root, std::abs(rep.root_probability - r));
        if (rep.iid_deviation > 1e-6) f.add(tag + ": iid deviation " + format_value(rep.iid_deviation));
        if (std::abs(rep.root_probability - r) > 1e-12) {
          f.add(tag + ": root probability " + format_value(rep.root_probability));
        }
      }
    }
  }
  std::ostringstream detail;
  detail << runs << " searches; worst iid deviation " << worst_dev << ", worst |root - r| " << worst_root;
  return {"constrained_equilibria", f.empty(), f.summary(detail.str()), since(t0)};
}

CheckResult multi_branching_equilibria(DominationLog& log) {
  const auto t0 = Clock::now();
  Failures f;
  std::ostringstream detail;
  struct Case {
    const char* spec;
    std::optional<double> r;
  };
  for (const Case& c : {Case{"AND(OR(l,l,l),OR(l,l,l))", 0.5}, Case{"AND(OR(l,l,l),OR(l,l,l))", {}},
                        Case{"uniform:OR:3:1", 0.4}, Case{"uniform:AND:3:1", {}}, Case{"uniform:AND:2:1", {}}}) {
    const auto p = problem_for(c.spec, AlgorithmClass::general, c.r);
    const auto rep = search(p);
    const std::string tag = std::string(c.spec) + (c.r ? " r=" + format_value(*c.r) : std::string(" unconstrained"));
    log.add(tag + " maximizer", rep.maximizer);
    // A depth-first directional algorithm matches the unrestricted optimum at the maximizer.
    const double dir = optimal_cost_directional(rep.maximizer, value_only()).value;
    if (std::abs(dir - rep.value) > 1e-9) {
      f.add(tag + ": directional " + format_value(dir) + " vs general " + format_value(rep.value));
    }
    if (rep.root_degenerate) {
      std::vector<Rational> exact;
      for (const auto& s : rep.rationalized_maximizer) exact.push_back(parse_rational(s));
      const ExactDistribution d(p.tree, exact);
      const auto opt = value_only();
      if (optimal_cost_directional(d, opt).value != optimal_cost_general(d, opt).value) {
        f.add(tag + ": degenerate maximizer without an equal-cost directional algorithm");
      }
      detail << tag << ": root probability " << rep.root_probability << ", value " << rep.value << "; ";
    } else {
      if (rep.iid_deviation > 1e-6) f.add(tag + ": iid deviation " + format_value(rep.iid_deviation));
      detail << tag << ": IID, value " << std::setprecision(12) << rep.value << "; ";
    }
  }
  return {"multi_branching_equilibria", f.empty(), f.summary(detail.str()), since(t0)};
}

// --- suites -------------------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"prop31", "prop32", "tarsi", "theorem41", "corollary42", "all"};
  return names;
}

std::vector<CheckResult> run_suite(std::string_view suite, const BatteryConfig& cfg) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw UnknownSuite("unknown suite '" + std::string(suite) + "'");
  }
  const bool all = suite == "all";
  DominationLog log;
  std::vector<CheckResult> out;
  if (all || suite == "prop32") {
    out.push_back(limit_constants(log));
    out.push_back(strict_separation(log));
    out.push_back(solve_closed_form(log));
  }
  if (all || suite == "prop31") {
    out.push_back(height2_equivalence(cfg, log));
    out.push_back(selection_rule(cfg, log));
  }
  if (all || suite == "tarsi") out.push_back(tarsi_property(cfg, log));
  if (all || suite == "theorem41") {
    out.push_back(unconstrained_equilibria(log));
    out.push_back(constrained_equilibria(log));
  }
  if (all || suite == "prop32") out.push_back(monte_carlo_agreement(cfg, log));
  if (all || suite == "corollary42") out.push_back(multi_branching_equilibria(log));
  out.push_back(log.check());
  return out;
}

std::string junit_json(std::string_view suite, const std::vector<CheckResult>& results) {
  nlohmann::json j;
  j["name"] = std::string(suite);
  j["tests"] = results.size();
  int failures = 0;
  double total = 0.0;
  auto& cases = j["testcases"] = nlohmann::json::array();
  for (const auto& r : results) {
    failures += r.passed ? 0 : 1;
    total += r.seconds;
    cases.push_back({{"name", r.name}, {"status", r.passed ? "passed" : "failed"}, {"time", r.seconds},
                     {"message", r.detail}});
  }
  j["failures"] = failures;
  j["time"] = total;
  return j.dump(2);
}

}  // namespace andor::verify
