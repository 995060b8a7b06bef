#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "andor/distribution.hpp"
#include "andor/tree.hpp"

namespace andor {

/// Deterministic query algorithm as a binary decision structure over leaf
/// queries. Subtrees may be shared (the structure is a DAG); every path
/// property is defined on the unfolding.
class Strategy {
 public:
  struct Node {
    bool terminal = true;
    int value = 0;  // root value claimed at a terminal
    int leaf = -1;  // queried leaf index
    std::shared_ptr<const Node> on_zero;
    std::shared_ptr<const Node> on_one;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Strategy() = default;
  explicit Strategy(NodePtr root) : root_(std::move(root)) {}

  static Strategy terminal(int root_value);
  static Strategy query(int leaf, Strategy on_zero, Strategy on_one);

  const NodePtr& root() const { return root_; }
  bool empty() const { return !root_; }
  bool is_terminal() const { return root_->terminal; }
  int value() const { return root_->value; }
  int leaf() const { return root_->leaf; }
  Strategy on_zero() const { return Strategy(root_->on_zero); }
  Strategy on_one() const { return Strategy(root_->on_one); }

  /// Number of distinct nodes in the shared structure.
  std::size_t dag_size() const;

 private:
  NodePtr root_;
};

/// One step of an execution path: the queried leaf and the value observed.
struct PathStep {
  int leaf = -1;
  int value = 0;
  friend bool operator==(const PathStep&, const PathStep&) = default;
};

std::string render_path(const Tree& tree, std::span<const PathStep> path);

struct ValidationReport {
  bool ok = true;
  std::string violation;             // first violation, empty when ok
  std::vector<PathStep> path;        // path leading to the violation
  std::vector<std::string> warnings; // e.g. queries below an already-resolved gate
};

ValidationReport validate(const Tree& tree, const Strategy& s);

struct DepthFirstReport {
  bool depth_first = true;
  std::vector<PathStep> path;  // path up to (not including) the interrupting query
  int open_node = -1;          // tree node index left unresolved
  int interrupting_leaf = -1;
};

/// Once a query enters the subtree of a gate, all further queries stay in it
/// until its value is logically forced, and the subtree is never re-entered.
DepthFirstReport is_depth_first(const Tree& tree, const Strategy& s);

struct DirectionalReport {
  bool directional = true;
  std::vector<int> order;    // witness leaf order (lexicographically least topological order)
  std::vector<int> cycle;    // leaves on a precedence cycle when not directional
};

DirectionalReport is_directional(const Tree& tree, const Strategy& s);

template <Scalar T>
T expected_cost(const IndependentDistribution<T>& d, const Strategy& s);

struct TraceOutcome {
  std::vector<int> assignment;
  std::vector<int> queries;
  int root_value = 0;
};

/// Executes the strategy on a total assignment.
TraceOutcome run(const Tree& tree, const Strategy& s, std::span<const int> assignment);

struct MonteCarloResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Sample mean of query counts; samples are split into fixed-size shards with
/// per-shard seeds so the result depends only on (samples, seed).
MonteCarloResult monte_carlo_cost(const FloatDistribution& d, const Strategy& s, std::int64_t samples,
                                  std::uint64_t seed);

/// Chooses the next leaf to query given leaf statuses and per-node resolution.
/// Only consulted while the root is unresolved.
using QueryPolicy = std::function<int(std::span<const Status> leaf_status, std::span<const Status> resolution)>;

/// Materializes a policy into a strategy, sharing sub-strategies between
/// identical leaf-status states.
Strategy build_from_policy(const Tree& tree, const QueryPolicy& policy);

/// Depth-first skipping over a fixed leaf priority: always queries the
/// highest-priority leaf that is unknown and has no resolved ancestor.
Strategy make_priority_strategy(const Tree& tree, std::span<const int> leaf_order);

/// True when `leaf` is unknown and none of its ancestors is resolved.
bool is_live_leaf(const Tree& tree, std::span<const Status> leaf_status, std::span<const Status> resolution, int leaf);

/// Canonical JSON: {"query":"00","on_one":{...},"on_zero":{...}} | {"terminal":0},
/// keys sorted, no whitespace.
std::string strategy_to_json(const Tree& tree, const Strategy& s);
Strategy strategy_from_json(const Tree& tree, std::string_view json_text);

}  // namespace andor
