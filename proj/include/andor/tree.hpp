#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "andor/numeric.hpp"

namespace andor {

enum class Label : std::uint8_t { And, Or };

constexpr Label dual(Label l) { return l == Label::And ? Label::Or : Label::And; }
std::string_view to_string(Label l);

/// The child value that decides a gate on its own: 0 for AND, 1 for OR.
constexpr int short_circuit_value(Label l) { return l == Label::And ? 0 : 1; }

class InvalidTree : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Position of a node as the sequence of child indices from the root.
/// The root is the empty path.
struct NodeId {
  std::vector<int> path;

  bool is_root() const { return path.empty(); }
  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

/// Leaf and node values observed so far. Unknown is distinct from both values.
enum class Status : std::int8_t { Unknown = -1, Zero = 0, One = 1 };

struct ShapeClass {
  bool balanced = false;
  std::optional<int> uniform_arity;
  int height = 0;
  friend bool operator==(const ShapeClass&, const ShapeClass&) = default;
};

/// Immutable alternating AND/OR tree. Nodes are stored in preorder, so leaves
/// are numbered in lexicographic NodeId order and every subtree owns a
/// contiguous leaf range [leaf_begin, leaf_end).
class Tree {
 public:
  struct Node {
    bool is_leaf = false;
    Label label = Label::And;  // meaningful for internal nodes only
    int parent = -1;
    int depth = 0;
    int leaf = -1;  // leaf index for leaves
    int leaf_begin = 0;
    int leaf_end = 0;
    std::vector<int> children;
    NodeId id;
  };

  /// Explicit construction from a nested description; validates shape.
  struct Spec {
    bool leaf = true;
    Label label = Label::And;
    std::vector<Spec> children;

    static Spec make_leaf() { return {}; }
    static Spec gate(Label l, std::vector<Spec> kids) { return {false, l, std::move(kids)}; }
  };

  explicit Tree(const Spec& spec);

  static Tree uniform(Label root_label, int arity, int height);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const { return leaf_nodes_.size(); }
  static constexpr int root() { return 0; }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::span<const Node> nodes() const { return nodes_; }
  Label root_label() const { return nodes_[0].label; }

  /// Node index of the leaf with the given leaf index.
  int leaf_node(int leaf) const { return leaf_nodes_[static_cast<std::size_t>(leaf)]; }
  int max_arity() const { return max_arity_; }
  int height() const { return height_; }

  /// True when the node with index `node` lies in the subtree of `ancestor` (inclusive).
  bool contains(int ancestor, int node) const;
  bool leaf_under(int ancestor, int leaf) const {
    const auto& a = nodes_[static_cast<std::size_t>(ancestor)];
    return leaf >= a.leaf_begin && leaf < a.leaf_end;
  }

  std::optional<int> find(const NodeId& id) const;
  int find_or_throw(const NodeId& id) const;

  /// Digit string for arity <= 10, dot-separated decimal segments otherwise.
  std::string render_id(const NodeId& id) const;
  NodeId parse_id(std::string_view text) const;
  std::string leaf_name(int leaf) const { return render_id(node(leaf_node(leaf)).id); }
  int leaf_by_name(std::string_view text) const;

  /// Explicit-form printer, e.g. "AND(OR(l,l),OR(l,l))".
  std::string render() const;

  friend bool operator==(const Tree& a, const Tree& b);

 private:
  int build(const Spec& spec, int parent, int depth, NodeId id);

  std::vector<Node> nodes_;
  std::vector<int> leaf_nodes_;
  int max_arity_ = 0;
  int height_ = 0;
};

/// Parses the textual tree grammar ("uniform:AND:2:2" or "AND(OR(l,l),OR(l,l))").
/// Syntax errors are reported as ParseError with the byte offset.
Tree parse_tree(std::string_view text);

/// Root value under a total assignment (one entry per leaf, each 0 or 1).
int evaluate(const Tree& tree, std::span<const int> assignment);

ShapeClass classify_shape(const Tree& tree);

/// Per-node resolution of a partial assignment by AND/OR propagation.
std::vector<Status> resolve(const Tree& tree, std::span<const Status> leaf_status);

}  // namespace andor
