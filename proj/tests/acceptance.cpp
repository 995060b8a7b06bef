// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "andor/optimal.hpp"
#include "andor/verify.hpp"
#include "oracles.hpp"

using namespace andor;
using verify::CheckResult;

namespace {

/// Criterion 6: the optimizer against brute force. Trees of at most four
/// leaves are checked against every enumerated strategy; larger ones against
/// the raw-state recursion, which minimizes over the same strategy set.
CheckResult oracle_equivalence(verify::DominationLog& log) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20180906);
  std::uniform_int_distribution<int> den(2, 1000);
  int checked = 0, mismatches = 0, enumerated = 0;
  std::ostringstream first_bad;
  for (const char* spec : {"uniform:AND:2:2", "uniform:OR:2:3", "AND(l,l,l)", "AND(OR(l,l),OR(l,l,l))"}) {
    auto t = std::make_shared<const Tree>(parse_tree(spec));
    const bool explicit_enum = t->leaf_count() <= 4;
    const auto all = explicit_enum ? oracle::all_strategies(*t) : std::vector<Strategy>{};
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Rational> q;
      for (std::size_t i = 0; i < t->leaf_count(); ++i) {
        const int b = den(rng);
        q.push_back(Rational(std::uniform_int_distribution<int>(1, b - 1)(rng)) / b);
      }
      Rational best;
      if (explicit_enum) {
        best = oracle::expected_cost(q, all.front());
        for (const auto& s : all) best = std::min(best, oracle::expected_cost(q, s));
        ++enumerated;
      } else {
        best = oracle::min_cost_general(*t, q);
      }
      ExactDistribution d(t, q);
      const auto g = optimal_cost_general(d).value;
      ++checked;
      if (g != best) {
        if (mismatches++ == 0) first_bad << spec << " trial " << trial << ": " << g << " vs " << best;
      }
      log.add(std::string("oracle ") + spec, d, g);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream detail;
  detail << checked << " instances (" << enumerated << " by explicit enumeration), " << mismatches << " mismatches";
  if (mismatches) detail << "; first: " << first_bad.str();
  return {"oracle_equivalence", mismatches == 0 && secs < 600, detail.str(), secs};
}

}  // namespace

int main() {
  verify::BatteryConfig cfg;
  verify::DominationLog log;
  const std::vector<std::pair<int, std::function<CheckResult()>>> criteria = {
      {1, [&] { return verify::limit_constants(log); }},
      {2, [&] { return verify::strict_separation(log); }},
      {3, [&] { return verify::solve_closed_form(log); }},
      {4, [&] { return verify::height2_equivalence(cfg, log); }},
      {5, [&] { return verify::selection_rule(cfg, log); }},
      {6, [&] { return oracle_equivalence(log); }},
      {7, [&] { return verify::tarsi_property(cfg, log); }},
      {8, [&] { return verify::unconstrained_equilibria(log); }},
      {9, [&] { return verify::constrained_equilibria(log); }},
      {10, [&] { return verify::monte_carlo_agreement(cfg, log); }},
      {11, [&] { return log.check(); }},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    CheckResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.name = "criterion " + std::to_string(id);
      r.detail = std::string("threw: ") + e.what();
    }
    failures += r.passed ? 0 : 1;
    std::printf("criterion %2d  %-4s  %-26s %8.2fs  %s\n", id, r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
