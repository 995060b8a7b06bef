#include "andor/optimal.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace andor {

std::string_view to_string(AlgorithmClass c) {
  switch (c) {
    case AlgorithmClass::general: return "general";
    case AlgorithmClass::depth_first: return "depth_first";
    case AlgorithmClass::directional: return "directional";
  }
  return "?";
}

AlgorithmClass parse_algorithm_class(std::string_view text) {
  if (text == "general" || text == "non-depth") return AlgorithmClass::general;
  if (text == "depth" || text == "depth_first" || text == "depth-first") return AlgorithmClass::depth_first;
  if (text == "directional") return AlgorithmClass::directional;
  throw ParseError("unknown algorithm class '" + std::string(text) + "' (general|depth|directional)");
}

Strategy make_solve(const Tree& tree) {
  std::vector<int> order(tree.leaf_count());
  std::iota(order.begin(), order.end(), 0);
  return make_priority_strategy(tree, order);
}

namespace {

void check_budget(const Tree& tree, const OptimalOptions& opt) {
  if (static_cast<int>(tree.leaf_count()) > opt.leaf_budget) {
    throw BudgetExceeded("tree has " + std::to_string(tree.leaf_count()) + " leaves, budget is " +
                         std::to_string(opt.leaf_budget));
  }
}

/// Residual read-once formula in canonical form. kind: 'L' leaf, 'A'/'O' gate.
struct Residual {
  char kind = 'L';
  std::string key;
  std::vector<Residual> members;
};

template <Scalar T>
class GeneralSolver {
 public:
  GeneralSolver(const IndependentDistribution<T>& d) : d_(d), tree_(d.tree()) {
    std::map<T, int> ids;
    for (const T& p : d.leaf_probs()) {
      auto [it, fresh] = ids.emplace(p, static_cast<int>(ids.size()));
      leaf_key_.push_back("#" + std::to_string(it->second));
    }
  }

  T value(std::vector<Status>& status) {
    auto res = resolve(tree_, status);
    if (res[0] != Status::Unknown) return T(0);
    std::string key = canonical(0, res).key;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    T best{};
    bool have = false;
    std::unordered_set<std::string> tried;
    for (int leaf = 0; leaf < static_cast<int>(tree_.leaf_count()); ++leaf) {
      if (!is_live_leaf(tree_, status, res, leaf)) continue;
      auto& slot = status[static_cast<std::size_t>(leaf)];
      slot = Status::Zero;
      std::string k0 = key_of(status);
      slot = Status::One;
      std::string k1 = key_of(status);
      slot = Status::Unknown;
      // Leaves whose two restrictions coincide canonically have equal cost.
      if (!tried.insert(k0 + '|' + k1).second) continue;
      T v = candidate(status, leaf);
      if (!have || v < best) {
        best = v;
        have = true;
      }
    }
    if (!have) throw std::logic_error("optimal_cost_general: unresolved root with no live leaf");
    memo_.emplace(std::move(key), best);
    return best;
  }

  /// 1 + q*C(leaf:=0) + (1-q)*C(leaf:=1).
  T candidate(std::vector<Status>& status, int leaf) {
    auto& slot = status[static_cast<std::size_t>(leaf)];
    slot = Status::Zero;
    T c0 = value(status);
    slot = Status::One;
    T c1 = value(status);
    slot = Status::Unknown;
    const T& q = d_.leaf_prob(leaf);
    return 1 + q * c0 + (1 - q) * c1;
  }

  Strategy witness() {
    return build_from_policy(tree_, [this](std::span<const Status> st, std::span<const Status> res) {
      std::vector<Status> status(st.begin(), st.end());
      int arg = -1;
      T best{};
      for (int leaf = 0; leaf < static_cast<int>(tree_.leaf_count()); ++leaf) {
        if (!is_live_leaf(tree_, status, res, leaf)) continue;
        T v = candidate(status, leaf);
        if (arg < 0 || v < best) {
          best = v;
          arg = leaf;
        }
      }
      return arg;
    });
  }

  std::int64_t states() const { return static_cast<std::int64_t>(memo_.size()); }

 private:
  std::string key_of(const std::vector<Status>& status) {
    auto res = resolve(tree_, status);
    if (res[0] != Status::Unknown) return res[0] == Status::One ? "=1" : "=0";
    return canonical(0, res).key;
  }

  // Precondition: node unresolved.
  Residual canonical(int node, const std::vector<Status>& res) const {
    const auto& n = tree_.node(node);
    if (n.is_leaf) return Residual{'L', leaf_key_[static_cast<std::size_t>(n.leaf)], {}};
    const char kind = n.label == Label::And ? 'A' : 'O';
    std::vector<Residual> members;
    for (int c : n.children) {
      if (res[static_cast<std::size_t>(c)] != Status::Unknown) continue;
      Residual r = canonical(c, res);
      if (r.kind == kind) {
        for (auto& m : r.members) members.push_back(std::move(m));
      } else {
        members.push_back(std::move(r));
      }
    }
    if (members.size() == 1) return std::move(members.front());
    std::sort(members.begin(), members.end(), [](const Residual& a, const Residual& b) { return a.key < b.key; });
    Residual out{kind, std::string(1, kind) + "(", {}};
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i) out.key += ',';
      out.key += members[i].key;
    }
    out.key += ')';
    out.members = std::move(members);
    return out;
  }

  const IndependentDistribution<T>& d_;
  const Tree& tree_;
  std::vector<std::string> leaf_key_;
  std::unordered_map<std::string, T> memo_;
};

/// Optimal depth-first evaluation cost and child order of every subtree.
template <Scalar T>
struct DepthFirstTables {
  std::vector<T> cost;           // per node
  std::vector<T> zero_prob;      // per node
  std::vector<std::vector<int>> order;  // per gate: child positions in visit order
  bool heuristic = false;
  std::int64_t states = 0;
};

/// Probability that the child's value decides its parent gate.
template <Scalar T>
T short_circuit_prob(Label parent, const T& child_zero_prob) {
  return parent == Label::And ? child_zero_prob : T(1 - child_zero_prob);
}

/// Expected cost of visiting children in the given order until one short-circuits.
template <Scalar T>
T order_cost(std::span<const int> order, std::span<const T> cost, std::span<const T> shorts) {
  T total = 0;
  T reach = 1;
  for (int i : order) {
    total += reach * cost[static_cast<std::size_t>(i)];
    reach *= 1 - shorts[static_cast<std::size_t>(i)];
  }
  return total;
}

enum class OrderMode { subset_dp, permutations };

template <Scalar T>
DepthFirstTables<T> depth_first_tables(const IndependentDistribution<T>& d, OrderMode mode, int permutation_budget) {
  const Tree& tree = d.tree();
  DepthFirstTables<T> t;
  t.cost.assign(tree.node_count(), T(0));
  t.zero_prob = d.node_zero_probabilities();
  t.order.assign(tree.node_count(), {});
  for (int x = static_cast<int>(tree.node_count()) - 1; x >= 0; --x) {
    const auto& node = tree.node(x);
    if (node.is_leaf) {
      t.cost[static_cast<std::size_t>(x)] = 1;
      continue;
    }
    const std::size_t k = node.children.size();
    std::vector<T> c(k), s(k);
    for (std::size_t i = 0; i < k; ++i) {
      c[i] = t.cost[static_cast<std::size_t>(node.children[i])];
      s[i] = short_circuit_prob(node.label, t.zero_prob[static_cast<std::size_t>(node.children[i])]);
    }
    std::vector<int> best_order;
    T best{};
    if (mode == OrderMode::subset_dp) {
      // F(R) = min_{i in R} c_i + (1 - s_i) F(R \ {i}); ties to the smallest child.
      const std::size_t full = (std::size_t{1} << k) - 1;
      std::vector<T> f(full + 1, T(0));
      std::vector<int> choice(full + 1, -1);
      for (std::size_t mask = 1; mask <= full; ++mask) {
        bool have = false;
        for (std::size_t i = 0; i < k; ++i) {
          if (!(mask >> i & 1)) continue;
          T v = c[i] + (1 - s[i]) * f[mask & ~(std::size_t{1} << i)];
          if (!have || v < f[mask]) {
            f[mask] = v;
            choice[mask] = static_cast<int>(i);
            have = true;
          }
        }
      }
      t.states += static_cast<std::int64_t>(full);
      best = f[full];
      for (std::size_t mask = full; mask; mask &= ~(std::size_t{1} << choice[mask])) best_order.push_back(choice[mask]);
    } else if (static_cast<int>(k) <= permutation_budget) {
      std::vector<int> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      bool have = false;
      do {
        T v = order_cost<T>(perm, c, s);
        ++t.states;
        if (!have || v < best) {
          best = v;
          best_order = perm;
          have = true;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
      // Ratio rule: ascending c_i / s_i (children that never short-circuit go last).
      t.heuristic = true;
      best_order.resize(k);
      std::iota(best_order.begin(), best_order.end(), 0);
      std::stable_sort(best_order.begin(), best_order.end(), [&](int a, int b) {
        // c_a / s_a < c_b / s_b  <=>  c_a * s_b < c_b * s_a (s >= 0)
        return c[static_cast<std::size_t>(a)] * s[static_cast<std::size_t>(b)] <
               c[static_cast<std::size_t>(b)] * s[static_cast<std::size_t>(a)];
      });
      best = order_cost<T>(best_order, c, s);
      // Local check: no adjacent swap improves.
      for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t i = 0; i + 1 < k; ++i) {
          std::swap(best_order[i], best_order[i + 1]);
          T v = order_cost<T>(best_order, c, s);
          if (v < best) {
            best = v;
            improved = true;
          } else {
            std::swap(best_order[i], best_order[i + 1]);
          }
        }
      }
    }
    t.cost[static_cast<std::size_t>(x)] = best;
    t.order[static_cast<std::size_t>(x)] = std::move(best_order);
  }
  return t;
}

/// Leaf priority order realising the per-gate child orders.
template <Scalar T>
std::vector<int> leaf_order_from(const Tree& tree, const DepthFirstTables<T>& t) {
  std::vector<int> out;
  auto rec = [&](auto&& self, int x) -> void {
    const auto& node = tree.node(x);
    if (node.is_leaf) {
      out.push_back(node.leaf);
      return;
    }
    for (int pos : t.order[static_cast<std::size_t>(x)]) self(self, node.children[static_cast<std::size_t>(pos)]);
  };
  rec(rec, 0);
  return out;
}

}  // namespace

template <Scalar T>
OptimumReport<T> optimal_cost_general(const IndependentDistribution<T>& d, const OptimalOptions& opt) {
  check_budget(d.tree(), opt);
  GeneralSolver<T> solver(d);
  std::vector<Status> status(d.tree().leaf_count(), Status::Unknown);
  OptimumReport<T> r;
  r.algorithm_class = AlgorithmClass::general;
  r.value = solver.value(status);
  if (opt.extract_witness) r.witness = solver.witness();
  r.states_explored = solver.states();
  return r;
}

template <Scalar T>
OptimumReport<T> optimal_cost_depth_first(const IndependentDistribution<T>& d, const OptimalOptions& opt) {
  check_budget(d.tree(), opt);
  auto t = depth_first_tables(d, OrderMode::subset_dp, opt.permutation_budget);
  OptimumReport<T> r;
  r.algorithm_class = AlgorithmClass::depth_first;
  r.value = t.cost[0];
  r.states_explored = t.states;
  if (opt.extract_witness) r.witness = make_priority_strategy(d.tree(), leaf_order_from(d.tree(), t));
  return r;
}

template <Scalar T>
OptimumReport<T> optimal_cost_directional(const IndependentDistribution<T>& d, const OptimalOptions& opt) {
  check_budget(d.tree(), opt);
  auto t = depth_first_tables(d, OrderMode::permutations, opt.permutation_budget);
  OptimumReport<T> r;
  r.algorithm_class = AlgorithmClass::directional;
  r.value = t.cost[0];
  r.states_explored = t.states;
  r.heuristic = t.heuristic;
  if (opt.extract_witness) r.witness = make_priority_strategy(d.tree(), leaf_order_from(d.tree(), t));
  return r;
}

template <Scalar T>
OptimumReport<T> optimal_cost(const IndependentDistribution<T>& d, AlgorithmClass c, const OptimalOptions& opt) {
  switch (c) {
    case AlgorithmClass::general: return optimal_cost_general(d, opt);
    case AlgorithmClass::depth_first: return optimal_cost_depth_first(d, opt);
    case AlgorithmClass::directional: return optimal_cost_directional(d, opt);
  }
  throw std::logic_error("unknown algorithm class");
}

template <Scalar T>
std::string report_to_json(const Tree& tree, const OptimumReport<T>& r) {
  nlohmann::json j;
  j["value"] = format_value(r.value);
  j["class"] = std::string(to_string(r.algorithm_class));
  j["states_explored"] = r.states_explored;
  j["heuristic"] = r.heuristic;
  if (!r.witness.empty()) j["witness"] = nlohmann::json::parse(strategy_to_json(tree, r.witness));
  return j.dump();
}

#define ANDOR_INSTANTIATE(T)                                                                             \
  template OptimumReport<T> optimal_cost_general(const IndependentDistribution<T>&, const OptimalOptions&); \
  template OptimumReport<T> optimal_cost_depth_first(const IndependentDistribution<T>&, const OptimalOptions&); \
  template OptimumReport<T> optimal_cost_directional(const IndependentDistribution<T>&, const OptimalOptions&); \
  template OptimumReport<T> optimal_cost(const IndependentDistribution<T>&, AlgorithmClass, const OptimalOptions&); \
  template std::string report_to_json(const Tree&, const OptimumReport<T>&);

ANDOR_INSTANTIATE(Rational)
ANDOR_INSTANTIATE(double)

#undef ANDOR_INSTANTIATE

}  // namespace andor
