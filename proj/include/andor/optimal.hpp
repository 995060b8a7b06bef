#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "andor/distribution.hpp"
#include "andor/strategy.hpp"

namespace andor {

enum class AlgorithmClass { general, depth_first, directional };

std::string_view to_string(AlgorithmClass c);
AlgorithmClass parse_algorithm_class(std::string_view text);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OptimalOptions {
  int leaf_budget = 16;
  /// Child orders are enumerated exhaustively up to this arity.
  int permutation_budget = 6;
  bool extract_witness = true;
};

template <Scalar T>
struct OptimumReport {
  T value{};
  Strategy witness;
  AlgorithmClass algorithm_class = AlgorithmClass::general;
  std::int64_t states_explored = 0;
  /// Set when some gate's child order came from the ratio sort instead of
  /// exhaustive enumeration.
  bool heuristic = false;
};

/// Minimum expected cost over every deterministic strategy. Memoized over
/// residual states: resolved subtrees are erased, single-child gates are
/// collapsed, same-label gates are flattened and siblings sorted, and leaves
/// are keyed by probability rather than identity. The witness breaks ties
/// toward the smallest leaf index.
template <Scalar T>
OptimumReport<T> optimal_cost_general(const IndependentDistribution<T>& d, const OptimalOptions& opt = {});

/// Minimum over depth-first strategies: each gate resolves its children one
/// at a time, choosing the next child by a DP over the set of children still
/// unvisited.
template <Scalar T>
OptimumReport<T> optimal_cost_depth_first(const IndependentDistribution<T>& d, const OptimalOptions& opt = {});

/// Minimum over depth-first directional strategies: one fixed child order per
/// gate, enumerated up to the permutation budget, ratio-sorted beyond it.
template <Scalar T>
OptimumReport<T> optimal_cost_directional(const IndependentDistribution<T>& d, const OptimalOptions& opt = {});

template <Scalar T>
OptimumReport<T> optimal_cost(const IndependentDistribution<T>& d, AlgorithmClass c, const OptimalOptions& opt = {});

/// Depth-first directional strategy probing leaves in lexicographic order.
Strategy make_solve(const Tree& tree);

template <Scalar T>
std::string report_to_json(const Tree& tree, const OptimumReport<T>& r);

}  // namespace andor
