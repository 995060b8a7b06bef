#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "andor/distribution.hpp"
#include "andor/optimal.hpp"

namespace andor {

struct SearchConfig {
  int starts = 16;
  std::uint64_t seed = 1;
  double tol_value = 1e-10;       // stop when a full cycle gains less than this
  double tol_coordinate = 1e-12;  // golden-section bracket width
  int max_cycles = 500;
  int grid_points = 33;           // per-coordinate scan before golden refinement
};

struct EquilibriumProblem {
  std::shared_ptr<const Tree> tree;
  AlgorithmClass algorithm_class = AlgorithmClass::general;
  /// Root zero-probability constraint, strictly inside (0,1) when present.
  std::optional<double> root_probability;
  SearchConfig config;
};

class ConstraintViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TrajectoryPoint {
  int cycle = 0;
  double value = 0.0;
  std::vector<double> point;
};

struct StartSummary {
  int start = 0;
  std::vector<double> initial;
  std::vector<double> final_point;
  double value = 0.0;
  int cycles = 0;
  bool converged = false;
  std::vector<TrajectoryPoint> trajectory;
};

struct EquilibriumReport {
  explicit EquilibriumReport(FloatDistribution m) : maximizer(std::move(m)) {}

  FloatDistribution maximizer;
  double value = 0.0;
  double iid_deviation = 0.0;
  double root_probability = 0.0;
  bool converged = false;
  /// Root probability of the maximizer is 0 or 1 (within 1e-12).
  bool root_degenerate = false;
  /// Other start results within 1e-9 of the best value whose points differ from
  /// the maximizer by more than 1e-6 in some leaf.
  std::vector<std::vector<double>> alternative_maximizers;
  /// Objective re-evaluated exactly at the maximizer rounded to fractions with
  /// denominator <= 10^6.
  std::vector<std::string> rationalized_maximizer;
  std::string rationalized_value;
  std::vector<StartSummary> starts;
};

/// Optimal cost of the problem's algorithm class at d (float backend).
double objective(const EquilibriumProblem& problem, const FloatDistribution& d);

/// Multistart cyclic coordinate ascent over all leaf probabilities.
EquilibriumReport search_unconstrained(const EquilibriumProblem& problem);

/// Coordinate ascent over all leaves but the last, which is solved to keep the
/// root probability at r. Throws Infeasible when r is not attainable.
EquilibriumReport search_constrained(const EquilibriumProblem& problem);

/// Dispatches on whether the problem carries a root-probability constraint.
EquilibriumReport search(const EquilibriumProblem& problem);

struct IidLineResult {
  double p_star = 0.0;
  double value = 0.0;
};

/// Maximizes the objective over IIDs (1001-point scan + golden refinement).
IidLineResult iid_line_search(std::shared_ptr<const Tree> tree, AlgorithmClass algorithm_class);

std::string equilibrium_report_to_json(const EquilibriumReport& r, const EquilibriumProblem& problem);
std::string trajectories_to_csv(const EquilibriumReport& r);

}  // namespace andor
