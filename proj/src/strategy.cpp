#include "andor/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "andor/parallel.hpp"

namespace andor {

Strategy Strategy::terminal(int root_value) {
  auto n = std::make_shared<Node>();
  n->terminal = true;
  n->value = root_value;
  return Strategy(std::move(n));
}

Strategy Strategy::query(int leaf, Strategy on_zero, Strategy on_one) {
  auto n = std::make_shared<Node>();
  n->terminal = false;
  n->leaf = leaf;
  n->on_zero = on_zero.root_;
  n->on_one = on_one.root_;
  return Strategy(std::move(n));
}

std::size_t Strategy::dag_size() const {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{root_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!n || !seen.insert(n).second) continue;
    if (!n->terminal) {
      stack.push_back(n->on_zero.get());
      stack.push_back(n->on_one.get());
    }
  }
  return seen.size();
}

std::string render_path(const Tree& tree, std::span<const PathStep> path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ' ';
    out += "x" + tree.leaf_name(path[i].leaf) + "=" + std::to_string(path[i].value);
  }
  return out.empty() ? "(start)" : out;
}

bool is_live_leaf(const Tree& tree, std::span<const Status> leaf_status, std::span<const Status> resolution,
                  int leaf) {
  if (leaf_status[static_cast<std::size_t>(leaf)] != Status::Unknown) return false;
  for (int n = tree.node(tree.leaf_node(leaf)).parent; n >= 0; n = tree.node(n).parent) {
    if (resolution[static_cast<std::size_t>(n)] != Status::Unknown) return false;
  }
  return true;
}

namespace {

Status to_status(int v) { return v ? Status::One : Status::Zero; }

struct Validator {
  const Tree& tree;
  ValidationReport report;
  std::vector<Status> status;
  std::vector<PathStep> path;
  std::unordered_set<std::string> warned;

  bool fail(std::string msg) {
    report.ok = false;
    report.violation = std::move(msg);
    report.path = path;
    return false;
  }

  bool walk(const Strategy::Node* n) {
    if (!n) return fail("missing branch");
    auto res = resolve(tree, status);
    if (n->terminal) {
      if (n->value != 0 && n->value != 1) return fail("terminal value must be 0 or 1");
      if (res[0] == Status::Unknown) return fail("terminal claims root=" + std::to_string(n->value) + " but the root is not forced");
      if (res[0] != to_status(n->value)) {
        return fail("terminal claims root=" + std::to_string(n->value) + " but revealed leaves force root=" +
                    std::to_string(res[0] == Status::One ? 1 : 0));
      }
      return true;
    }
    if (n->leaf < 0 || n->leaf >= static_cast<int>(tree.leaf_count())) {
      return fail("query references unknown leaf index " + std::to_string(n->leaf));
    }
    if (res[0] != Status::Unknown) return fail("query to x" + tree.leaf_name(n->leaf) + " after the root is resolved");
    if (status[static_cast<std::size_t>(n->leaf)] != Status::Unknown) {
      return fail("leaf x" + tree.leaf_name(n->leaf) + " queried twice");
    }
    if (!is_live_leaf(tree, status, res, n->leaf)) {
      std::string w = "x" + tree.leaf_name(n->leaf) + " queried below a resolved gate after " + render_path(tree, path);
      if (warned.insert(w).second && report.warnings.size() < 64) report.warnings.push_back(w);
    }
    for (int v : {0, 1}) {
      status[static_cast<std::size_t>(n->leaf)] = to_status(v);
      path.push_back({n->leaf, v});
      bool ok = walk(v == 0 ? n->on_zero.get() : n->on_one.get());
      path.pop_back();
      status[static_cast<std::size_t>(n->leaf)] = Status::Unknown;
      if (!ok) return false;
    }
    return true;
  }
};

}  // namespace

ValidationReport validate(const Tree& tree, const Strategy& s) {
  Validator v{tree, {}, std::vector<Status>(tree.leaf_count(), Status::Unknown), {}, {}};
  v.walk(s.root().get());
  return v.report;
}

namespace {

struct DepthFirstChecker {
  const Tree& tree;
  DepthFirstReport report;
  std::vector<Status> status;
  std::vector<PathStep> path;

  // entered: some query descended from the node; exited: a later query left it.
  bool walk(const Strategy::Node* n, std::vector<char> entered, std::vector<char> exited) {
    if (n->terminal) return true;
    auto res = resolve(tree, status);
    const int leaf = n->leaf;
    // Open gates lie on one chain; preorder puts the innermost last.
    int offender = -1;
    for (std::size_t x = 0; x < tree.node_count(); ++x) {
      const auto& node = tree.node(static_cast<int>(x));
      if (node.is_leaf) continue;
      const bool under = tree.leaf_under(static_cast<int>(x), leaf);
      if ((entered[x] && !under && res[x] == Status::Unknown) || (under && exited[x])) offender = static_cast<int>(x);
    }
    if (offender >= 0) {
      report = {false, path, offender, leaf};
      return false;
    }
    for (std::size_t x = 0; x < tree.node_count(); ++x) {
      if (tree.node(static_cast<int>(x)).is_leaf) continue;
      if (tree.leaf_under(static_cast<int>(x), leaf)) entered[x] = 1;
      else if (entered[x]) exited[x] = 1;
    }
    for (int v : {0, 1}) {
      status[static_cast<std::size_t>(leaf)] = to_status(v);
      path.push_back({leaf, v});
      bool ok = walk(v == 0 ? n->on_zero.get() : n->on_one.get(), entered, exited);
      path.pop_back();
      status[static_cast<std::size_t>(leaf)] = Status::Unknown;
      if (!ok) return false;
    }
    return true;
  }
};

}  // namespace

DepthFirstReport is_depth_first(const Tree& tree, const Strategy& s) {
  DepthFirstChecker c{tree, {}, std::vector<Status>(tree.leaf_count(), Status::Unknown), {}};
  std::vector<char> none(tree.node_count(), 0);
  c.walk(s.root().get(), none, none);
  return c.report;
}

DirectionalReport is_directional(const Tree& tree, const Strategy& s) {
  const std::size_t n = tree.leaf_count();
  std::vector<std::set<int>> succ(n);
  std::unordered_set<const Strategy::Node*> seen;
  std::vector<const Strategy::Node*> stack{s.root().get()};
  while (!stack.empty()) {
    const auto* node = stack.back();
    stack.pop_back();
    if (node->terminal || !seen.insert(node).second) continue;
    for (const auto* child : {node->on_zero.get(), node->on_one.get()}) {
      if (!child->terminal) {
        if (child->leaf != node->leaf) succ[static_cast<std::size_t>(node->leaf)].insert(child->leaf);
        stack.push_back(child);
      }
    }
  }
  std::vector<int> indeg(n, 0);
  for (const auto& out : succ) {
    for (int v : out) ++indeg[static_cast<std::size_t>(v)];
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.push(static_cast<int>(v));
  }
  DirectionalReport report;
  while (!ready.empty()) {
    int u = ready.top();
    ready.pop();
    report.order.push_back(u);
    for (int v : succ[static_cast<std::size_t>(u)]) {
      if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
    }
  }
  if (report.order.size() == n) return report;
  // Every leftover vertex keeps a leftover predecessor, so walking
  // predecessors must revisit a vertex.
  report.directional = false;
  std::vector<std::vector<int>> pred(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (int v : succ[u]) pred[static_cast<std::size_t>(v)].push_back(static_cast<int>(u));
  }
  std::vector<char> left(n, 0);
  for (std::size_t v = 0; v < n; ++v) left[v] = indeg[v] > 0;
  int start = 0;
  while (!left[static_cast<std::size_t>(start)]) ++start;
  std::vector<int> pos(n, -1);
  std::vector<int> walk;
  int cur = start;
  while (pos[static_cast<std::size_t>(cur)] < 0) {
    pos[static_cast<std::size_t>(cur)] = static_cast<int>(walk.size());
    walk.push_back(cur);
    for (int u : pred[static_cast<std::size_t>(cur)]) {
      if (left[static_cast<std::size_t>(u)]) {
        cur = u;
        break;
      }
    }
  }
  report.cycle.assign(walk.begin() + pos[static_cast<std::size_t>(cur)], walk.end());
  std::reverse(report.cycle.begin(), report.cycle.end());
  report.order.clear();
  return report;
}

template <Scalar T>
T expected_cost(const IndependentDistribution<T>& d, const Strategy& s) {
  std::unordered_map<const Strategy::Node*, T> memo;
  auto rec = [&](auto&& self, const Strategy::Node* n) -> T {
    if (n->terminal) return T(0);
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    const T& q = d.leaf_prob(n->leaf);
    T c = 1 + q * self(self, n->on_zero.get()) + (1 - q) * self(self, n->on_one.get());
    memo.emplace(n, c);
    return c;
  };
  return rec(rec, s.root().get());
}

template Rational expected_cost(const ExactDistribution&, const Strategy&);
template double expected_cost(const FloatDistribution&, const Strategy&);

TraceOutcome run(const Tree& tree, const Strategy& s, std::span<const int> assignment) {
  if (assignment.size() != tree.leaf_count()) throw std::invalid_argument("assignment size mismatch");
  TraceOutcome out;
  out.assignment.assign(assignment.begin(), assignment.end());
  const Strategy::Node* n = s.root().get();
  while (!n->terminal) {
    out.queries.push_back(n->leaf);
    n = assignment[static_cast<std::size_t>(n->leaf)] ? n->on_one.get() : n->on_zero.get();
  }
  out.root_value = n->value;
  return out;
}

MonteCarloResult monte_carlo_cost(const FloatDistribution& d, const Strategy& s, std::int64_t samples,
                                  std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  constexpr std::int64_t kShard = 1 << 16;
  const std::int64_t shards = (samples + kShard - 1) / kShard;
  struct Sums {
    std::int64_t total = 0;
    std::int64_t squares = 0;
  };
  std::vector<Sums> sums(static_cast<std::size_t>(shards));
  const auto& probs = d.leaf_probs();
  parallel_for(static_cast<std::size_t>(shards), [&](std::size_t shard) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::int64_t begin = static_cast<std::int64_t>(shard) * kShard;
    const std::int64_t count = std::min(kShard, samples - begin);
    Sums acc;
    for (std::int64_t i = 0; i < count; ++i) {
      std::int64_t queries = 0;
      const Strategy::Node* n = s.root().get();
      // Leaves are independent and never re-queried on a valid path, so each
      // query can draw its own value.
      while (!n->terminal) {
        ++queries;
        const bool zero = unit(rng) < probs[static_cast<std::size_t>(n->leaf)];
        n = zero ? n->on_zero.get() : n->on_one.get();
      }
      acc.total += queries;
      acc.squares += queries * queries;
    }
    sums[shard] = acc;
  });
  Sums all;
  for (const auto& x : sums) {
    all.total += x.total;
    all.squares += x.squares;
  }
  MonteCarloResult r;
  r.samples = samples;
  const double n = static_cast<double>(samples);
  r.mean = static_cast<double>(all.total) / n;
  if (samples > 1) {
    const double var = (static_cast<double>(all.squares) - n * r.mean * r.mean) / (n - 1);
    r.std_error = std::sqrt(std::max(0.0, var) / n);
  }
  return r;
}

namespace {

std::string status_key(std::span<const Status> st) {
  std::string k(st.size(), '?');
  for (std::size_t i = 0; i < st.size(); ++i) k[i] = st[i] == Status::Unknown ? '?' : (st[i] == Status::One ? '1' : '0');
  return k;
}

}  // namespace

Strategy build_from_policy(const Tree& tree, const QueryPolicy& policy) {
  std::unordered_map<std::string, Strategy> memo;
  std::vector<Status> status(tree.leaf_count(), Status::Unknown);
  auto rec = [&](auto&& self) -> Strategy {
    auto key = status_key(status);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    auto res = resolve(tree, status);
    Strategy out;
    if (res[0] != Status::Unknown) {
      out = Strategy::terminal(res[0] == Status::One ? 1 : 0);
    } else {
      const int leaf = policy(status, res);
      if (leaf < 0 || leaf >= static_cast<int>(tree.leaf_count()) ||
          status[static_cast<std::size_t>(leaf)] != Status::Unknown) {
        throw std::logic_error("query policy chose an invalid leaf in state " + key);
      }
      status[static_cast<std::size_t>(leaf)] = Status::Zero;
      Strategy zero = self(self);
      status[static_cast<std::size_t>(leaf)] = Status::One;
      Strategy one = self(self);
      status[static_cast<std::size_t>(leaf)] = Status::Unknown;
      out = Strategy::query(leaf, zero, one);
    }
    memo.emplace(std::move(key), out);
    return out;
  };
  return rec(rec);
}

Strategy make_priority_strategy(const Tree& tree, std::span<const int> leaf_order) {
  std::vector<int> order(leaf_order.begin(), leaf_order.end());
  if (order.size() != tree.leaf_count()) throw std::invalid_argument("leaf order must list every leaf once");
  return build_from_policy(tree, [&tree, order](std::span<const Status> st, std::span<const Status> res) {
    for (int leaf : order) {
      if (is_live_leaf(tree, st, res, leaf)) return leaf;
    }
    return -1;
  });
}

namespace {

nlohmann::json to_json_node(const Tree& tree, const Strategy::Node* n) {
  nlohmann::json j;
  if (n->terminal) {
    j["terminal"] = n->value;
  } else {
    j["query"] = tree.leaf_name(n->leaf);
    j["on_zero"] = to_json_node(tree, n->on_zero.get());
    j["on_one"] = to_json_node(tree, n->on_one.get());
  }
  return j;
}

Strategy from_json_node(const Tree& tree, const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("strategy node must be an object");
  if (j.contains("terminal")) {
    const auto& v = j["terminal"];
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
      throw ParseError("terminal value must be 0 or 1");
    }
    return Strategy::terminal(v.get<int>());
  }
  if (!j.contains("query") || !j["query"].is_string() || !j.contains("on_zero") || !j.contains("on_one")) {
    throw ParseError("strategy node needs either \"terminal\" or \"query\", \"on_zero\", \"on_one\"");
  }
  int leaf = 0;
  try {
    leaf = tree.leaf_by_name(j["query"].get<std::string>());
  } catch (const std::out_of_range& e) {
    throw ParseError(std::string("strategy query: ") + e.what());
  }
  return Strategy::query(leaf, from_json_node(tree, j["on_zero"]), from_json_node(tree, j["on_one"]));
}

}  // namespace

std::string strategy_to_json(const Tree& tree, const Strategy& s) { return to_json_node(tree, s.root().get()).dump(); }

Strategy strategy_from_json(const Tree& tree, std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("strategy JSON: ") + e.what());
  }
  return from_json_node(tree, j);
}

}  // namespace andor
