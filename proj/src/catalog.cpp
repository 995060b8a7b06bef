#include "andor/catalog.hpp"

#include <algorithm>

namespace andor::catalog {

namespace {

int leaf2(int a, int b) { return 2 * a + b; }

void require_shape(const Tree& tree, Label root, int height, const char* what) {
  if (!(tree == Tree::uniform(root, 2, height))) {
    throw std::invalid_argument(std::string(what) + " requires uniform(" + std::string(to_string(root)) + ",2," +
                                std::to_string(height) + ")");
  }
}

}  // namespace

std::array<int, 4> Height2AlgorithmId::skeleton() const {
  const int first = leaf2(i, j), cross = leaf2(1 - i, k), cross_other = leaf2(1 - i, 1 - k),
            sibling = leaf2(i, 1 - j);
  if (family == Family::A) return {first, cross, cross_other, sibling};
  return {first, cross, sibling, cross_other};
}

std::string Height2AlgorithmId::name() const {
  static const char* names[] = {"x00", "x01", "x10", "x11"};
  auto s = skeleton();
  std::string out = family == Family::A ? "A(" : "A'(";
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (n) out += ",";
    out += names[s[n]];
  }
  return out + ")";
}

std::vector<Height2AlgorithmId> all_height2_ids() {
  std::vector<Height2AlgorithmId> ids;
  for (auto fam : {Height2AlgorithmId::Family::A, Height2AlgorithmId::Family::A_prime}) {
    for (int i : {0, 1}) {
      for (int j : {0, 1}) {
        for (int k : {0, 1}) ids.push_back({fam, i, j, k});
      }
    }
  }
  return ids;
}

template <Scalar T>
Strategy build_height2_algorithm(const Height2AlgorithmId& id, const IndependentDistribution<T>& d) {
  const Tree& tree = d.tree();
  require_shape(tree, Label::And, 2, "height-2 catalog");
  const auto [a, b, third, fourth] = id.skeleton();
  const int other = 1 - id.i;
  // Cheapest depth-first order inside the OR gate x_{1-i}: higher chance of a 1 first.
  int cont_first = leaf2(other, 0), cont_second = leaf2(other, 1);
  if (d.leaf_prob(cont_second) < d.leaf_prob(cont_first)) std::swap(cont_first, cont_second);
  const int sibling = leaf2(id.i, 1 - id.j);

  return build_from_policy(tree, [=](std::span<const Status> st, std::span<const Status>) {
    auto at = [&](int leaf) { return st[static_cast<std::size_t>(leaf)]; };
    if (at(a) == Status::Unknown) return a;
    if (at(a) == Status::One) return at(cont_first) == Status::Unknown ? cont_first : cont_second;
    if (at(b) == Status::Unknown) return b;
    if (at(b) == Status::One) return sibling;
    // b = 0: probe the third skeleton leaf, then the fourth.
    return at(third) == Status::Unknown ? third : fourth;
  });
}

template <Scalar T>
T f(const T& x, const T& y, const T& z, const T& w) {
  return -x * y * z + x * y - x * w + 2 * x + w + 1;
}

template <Scalar T>
std::array<T, 4> f_arguments(const Height2AlgorithmId& id, const IndependentDistribution<T>& d) {
  require_shape(d.tree(), Label::And, 2, "f_arguments");
  const auto s = id.skeleton();
  const int other = 1 - id.i;
  const T cont = 1 + std::min(d.leaf_prob(leaf2(other, 0)), d.leaf_prob(leaf2(other, 1)));
  // After x=0 and y=0 the algorithm probes the skeleton's third leaf and needs
  // one more probe exactly when it returns 1.
  return {d.leaf_prob(s[0]), d.leaf_prob(s[1]), d.leaf_prob(s[2]), cont};
}

Height2AlgorithmId claim2_choice(const Rational& q01, const Rational& q11) {
  using F = Height2AlgorithmId::Family;
  if (q01 <= q11) return {F::A, 0, 0, 0};  // A(x00, x10, x11, x01)
  return {F::A, 1, 0, 0};                  // A(x10, x00, x01, x11)
}

Strategy build_solve_prime(const Tree& tree) {
  require_shape(tree, Label::And, 2, "SOLVE'");
  const std::vector<int> order{2, 3, 0, 1};
  return make_priority_strategy(tree, order);
}

Strategy build_a0_height3(const Tree& tree) {
  require_shape(tree, Label::Or, 3, "A_0");
  const int x00 = tree.find_or_throw(NodeId{{0, 0}});
  const int x1 = tree.find_or_throw(NodeId{{1}});
  constexpr int x000 = 0, x001 = 1, x010 = 2, x011 = 3;
  return build_from_policy(tree, [&tree, x00, x1](std::span<const Status> st, std::span<const Status> res) {
    auto solve_under_x1 = [&] {
      for (int leaf = 4; leaf < 8; ++leaf) {
        if (is_live_leaf(tree, st, res, leaf)) return leaf;
      }
      return -1;
    };
    const Status v00 = res[static_cast<std::size_t>(x00)];
    if (v00 == Status::Unknown) return st[x000] == Status::Unknown ? x000 : x001;
    if (v00 == Status::Zero) return solve_under_x1();
    if (st[x010] == Status::Unknown) return x010;
    // x010 = 0: x011 waits until x1 is known.
    if (res[static_cast<std::size_t>(x1)] == Status::Unknown) return solve_under_x1();
    return x011;
  });
}

template Strategy build_height2_algorithm(const Height2AlgorithmId&, const ExactDistribution&);
template Strategy build_height2_algorithm(const Height2AlgorithmId&, const FloatDistribution&);
template Rational f(const Rational&, const Rational&, const Rational&, const Rational&);
template double f(const double&, const double&, const double&, const double&);
template std::array<Rational, 4> f_arguments(const Height2AlgorithmId&, const ExactDistribution&);
template std::array<double, 4> f_arguments(const Height2AlgorithmId&, const FloatDistribution&);

}  // namespace andor::catalog
