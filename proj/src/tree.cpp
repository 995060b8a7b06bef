#include "andor/tree.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace andor {

std::string_view to_string(Label l) { return l == Label::And ? "AND" : "OR"; }

Tree::Tree(const Spec& spec) {
  if (spec.leaf) throw InvalidTree("a tree needs at least one internal node");
  build(spec, -1, 0, NodeId{});
}

int Tree::build(const Spec& spec, int parent, int depth, NodeId id) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  {
    Node& n = nodes_.back();
    n.is_leaf = spec.leaf;
    n.label = spec.label;
    n.parent = parent;
    n.depth = depth;
    n.id = id;
    n.leaf_begin = static_cast<int>(leaf_nodes_.size());
  }
  height_ = std::max(height_, depth);
  if (spec.leaf) {
    nodes_[index].leaf = static_cast<int>(leaf_nodes_.size());
    leaf_nodes_.push_back(index);
  } else {
    if (spec.children.size() < 2) {
      throw InvalidTree("internal node '" + render_id(id) + "' has fewer than 2 children");
    }
    max_arity_ = std::max(max_arity_, static_cast<int>(spec.children.size()));
    for (std::size_t c = 0; c < spec.children.size(); ++c) {
      const Spec& child = spec.children[c];
      NodeId cid = id;
      cid.path.push_back(static_cast<int>(c));
      if (!child.leaf && child.label == spec.label) {
        throw InvalidTree("labels must alternate: " + std::string(to_string(spec.label)) +
                          " node has a " + std::string(to_string(child.label)) + " child");
      }
      int ci = build(child, index, depth + 1, std::move(cid));
      nodes_[index].children.push_back(ci);
    }
  }
  nodes_[index].leaf_end = static_cast<int>(leaf_nodes_.size());
  return index;
}

Tree Tree::uniform(Label root_label, int arity, int height) {
  if (arity < 2) throw InvalidTree("arity must be at least 2");
  if (height < 1) throw InvalidTree("height must be at least 1");
  auto make = [&](auto&& self, Label label, int h) -> Spec {
    if (h == 0) return Spec::make_leaf();
    std::vector<Spec> kids;
    kids.reserve(static_cast<std::size_t>(arity));
    for (int i = 0; i < arity; ++i) kids.push_back(self(self, dual(label), h - 1));
    return Spec::gate(label, std::move(kids));
  };
  return Tree(make(make, root_label, height));
}

bool Tree::contains(int ancestor, int node) const {
  for (int n = node; n >= 0; n = nodes_[static_cast<std::size_t>(n)].parent) {
    if (n == ancestor) return true;
  }
  return false;
}

std::optional<int> Tree::find(const NodeId& id) const {
  int cur = 0;
  for (int digit : id.path) {
    const auto& kids = nodes_[static_cast<std::size_t>(cur)].children;
    if (digit < 0 || digit >= static_cast<int>(kids.size())) return std::nullopt;
    cur = kids[static_cast<std::size_t>(digit)];
  }
  return cur;
}

int Tree::find_or_throw(const NodeId& id) const {
  auto n = find(id);
  if (!n) throw std::out_of_range("unknown node '" + render_id(id) + "'");
  return *n;
}

std::string Tree::render_id(const NodeId& id) const {
  std::string out;
  const bool dotted = max_arity_ > 10;
  for (std::size_t i = 0; i < id.path.size(); ++i) {
    if (dotted && i > 0) out += '.';
    out += std::to_string(id.path[i]);
  }
  return out;
}

NodeId Tree::parse_id(std::string_view text) const {
  NodeId id;
  const bool dotted = max_arity_ > 10 || text.find('.') != std::string_view::npos;
  if (text.empty()) return id;
  if (dotted) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto dot = text.find('.', start);
      auto seg = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
      if (seg.empty() || !std::all_of(seg.begin(), seg.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw ParseError("malformed node id '" + std::string(text) + "'");
      }
      id.path.push_back(std::stoi(std::string(seg)));
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
  } else {
    for (char c : text) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw ParseError("malformed node id '" + std::string(text) + "'");
      }
      id.path.push_back(c - '0');
    }
  }
  return id;
}

int Tree::leaf_by_name(std::string_view text) const {
  auto n = find(parse_id(text));
  if (!n || !node(*n).is_leaf) throw std::out_of_range("'" + std::string(text) + "' is not a leaf");
  return node(*n).leaf;
}

std::string Tree::render() const {
  std::string out;
  auto rec = [&](auto&& self, int i) -> void {
    const Node& n = node(i);
    if (n.is_leaf) {
      out += 'l';
      return;
    }
    out += to_string(n.label);
    out += '(';
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      if (c) out += ',';
      self(self, n.children[c]);
    }
    out += ')';
  };
  rec(rec, 0);
  return out;
}

bool operator==(const Tree& a, const Tree& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto& x = a.nodes_[i];
    const auto& y = b.nodes_[i];
    if (x.is_leaf != y.is_leaf || x.children != y.children) return false;
    if (!x.is_leaf && x.label != y.label) return false;
  }
  return true;
}

namespace {

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  Tree parse() {
    skip_ws();
    if (text_.substr(pos_).starts_with("uniform")) return parse_shorthand();
    Tree::Spec spec = parse_node();
    skip_ws();
    if (pos_ != text_.size()) fail("end of input");
    return Tree(spec);
  }

 private:
  [[noreturn]] void fail(std::string_view expected) const {
    std::ostringstream msg;
    msg << "tree spec syntax error at offset " << pos_ << ": expected " << expected;
    if (pos_ < text_.size()) msg << ", found '" << text_[pos_] << "'";
    else msg << ", found end of input";
    throw ParseError(msg.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_).starts_with(token)) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("'" + std::string(token) + "'");
  }

  Label parse_label() {
    if (accept("AND")) return Label::And;
    if (accept("OR")) return Label::Or;
    fail("AND or OR");
  }

  int parse_int() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("integer");
    return std::stoi(std::string(text_.substr(start, pos_ - start)));
  }

  Tree parse_shorthand() {
    expect("uniform");
    expect(":");
    Label label = parse_label();
    expect(":");
    int arity = parse_int();
    expect(":");
    int height = parse_int();
    skip_ws();
    if (pos_ != text_.size()) fail("end of input");
    return Tree::uniform(label, arity, height);
  }

  Tree::Spec parse_child() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == 'l') {
      ++pos_;
      return Tree::Spec::make_leaf();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'A' || text_[pos_] == 'O')) return parse_node();
    fail("'l', AND or OR");
  }

  Tree::Spec parse_node() {
    Label label = parse_label();
    expect("(");
    std::vector<Tree::Spec> kids;
    kids.push_back(parse_child());
    while (accept(",")) kids.push_back(parse_child());
    expect(")");
    return Tree::Spec::gate(label, std::move(kids));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Tree parse_tree(std::string_view text) { return TreeParser(text).parse(); }

std::vector<Status> resolve(const Tree& tree, std::span<const Status> leaf_status) {
  if (leaf_status.size() != tree.leaf_count()) throw std::invalid_argument("leaf status size mismatch");
  std::vector<Status> out(tree.node_count(), Status::Unknown);
  // Preorder storage: children always follow their parent, so a reverse sweep is bottom-up.
  for (int i = static_cast<int>(tree.node_count()) - 1; i >= 0; --i) {
    const auto& n = tree.node(i);
    if (n.is_leaf) {
      out[static_cast<std::size_t>(i)] = leaf_status[static_cast<std::size_t>(n.leaf)];
      continue;
    }
    const Status decisive = n.label == Label::And ? Status::Zero : Status::One;
    const Status neutral = n.label == Label::And ? Status::One : Status::Zero;
    bool all_neutral = true;
    Status result = Status::Unknown;
    for (int c : n.children) {
      Status s = out[static_cast<std::size_t>(c)];
      if (s == decisive) {
        result = decisive;
        break;
      }
      if (s != neutral) all_neutral = false;
    }
    if (result == Status::Unknown && all_neutral) result = neutral;
    out[static_cast<std::size_t>(i)] = result;
  }
  return out;
}

int evaluate(const Tree& tree, std::span<const int> assignment) {
  if (assignment.size() != tree.leaf_count()) {
    throw std::invalid_argument("assignment must give a value for every leaf");
  }
  std::vector<Status> st(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != 0 && assignment[i] != 1) throw std::invalid_argument("leaf values must be 0 or 1");
    st[i] = assignment[i] ? Status::One : Status::Zero;
  }
  return resolve(tree, st)[0] == Status::One ? 1 : 0;
}

ShapeClass classify_shape(const Tree& tree) {
  ShapeClass sc;
  sc.height = tree.height();
  bool balanced = true;
  std::vector<int> arity_at_depth(static_cast<std::size_t>(tree.height() + 1), -1);
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf) {
      if (n.depth != tree.height()) balanced = false;
      continue;
    }
    int& a = arity_at_depth[static_cast<std::size_t>(n.depth)];
    int k = static_cast<int>(n.children.size());
    if (a == -1) a = k;
    else if (a != k) balanced = false;
  }
  sc.balanced = balanced;
  if (balanced) {
    int k = arity_at_depth[0];
    bool uniform = true;
    for (int d = 0; d < tree.height(); ++d) uniform = uniform && arity_at_depth[static_cast<std::size_t>(d)] == k;
    if (uniform) sc.uniform_arity = k;
  }
  return sc;
}

}  // namespace andor
