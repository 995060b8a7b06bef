#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "andor/distribution.hpp"

namespace andor::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Sizes and seeds of the randomized batteries.
struct BatteryConfig {
  std::uint64_t seed = 20180901;
  int random_ids = 1000;         // height-2 equivalence and selection-rule instances
  int iid_samples = 200;         // per tree in the Tarsi battery
  int mc_seeds = 100;
  std::int64_t mc_samples = 1000000;
};

/// Every distribution a battery touched, with whatever optima it already
/// computed; `check` fills in the rest and tests
/// general <= depth-first <= directional <= SOLVE.
class DominationLog {
 public:
  void add(std::string label, const ExactDistribution& d, std::optional<Rational> general = {},
           std::optional<Rational> depth_first = {}, std::optional<Rational> directional = {});
  void add(std::string label, const FloatDistribution& d);

  std::size_t size() const { return exact_.size() + float_.size(); }
  CheckResult check() const;

 private:
  struct ExactEntry {
    std::string label;
    ExactDistribution d;
    std::optional<Rational> general, depth_first, directional;
  };
  struct FloatEntry {
    std::string label;
    FloatDistribution d;
  };
  std::vector<ExactEntry> exact_;
  std::vector<FloatEntry> float_;
};

// Individual batteries. Each records the instances it evaluates in the log.
CheckResult limit_constants(DominationLog& log);
CheckResult strict_separation(DominationLog& log);
CheckResult solve_closed_form(DominationLog& log);
CheckResult height2_equivalence(const BatteryConfig& cfg, DominationLog& log);
CheckResult selection_rule(const BatteryConfig& cfg, DominationLog& log);
CheckResult tarsi_property(const BatteryConfig& cfg, DominationLog& log);
CheckResult unconstrained_equilibria(DominationLog& log);
CheckResult constrained_equilibria(DominationLog& log);
CheckResult monte_carlo_agreement(const BatteryConfig& cfg, DominationLog& log);
CheckResult multi_branching_equilibria(DominationLog& log);

class UnknownSuite : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& suite_names();

/// Runs a named battery group followed by the domination-chain check over
/// everything it touched. Throws UnknownSuite.
std::vector<CheckResult> run_suite(std::string_view suite, const BatteryConfig& cfg = {});

/// {"name":..,"tests":n,"failures":f,"time":s,"testcases":[{"name","status","time","message"}]}
std::string junit_json(std::string_view suite, const std::vector<CheckResult>& results);

}  // namespace andor::verify
