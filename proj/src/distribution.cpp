#include "andor/distribution.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace andor {

template <Scalar T>
void check_probability(const T& p, std::string_view what) {
  if (!(p >= 0 && p <= 1)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0,1], got " + format_value(p));
  }
}

template <Scalar T>
IndependentDistribution<T>::IndependentDistribution(std::shared_ptr<const Tree> tree, std::vector<T> leaf_zero_prob)
    : tree_(std::move(tree)), probs_(std::move(leaf_zero_prob)) {
  if (!tree_) throw std::invalid_argument("distribution needs a tree");
  if (probs_.size() != tree_->leaf_count()) {
    throw std::invalid_argument("distribution has " + std::to_string(probs_.size()) + " leaf entries, tree has " +
                                std::to_string(tree_->leaf_count()) + " leaves");
  }
  for (const T& p : probs_) check_probability(p, "leaf probability");
}

template <Scalar T>
IndependentDistribution<T> IndependentDistribution<T>::iid(std::shared_ptr<const Tree> tree, const T& p) {
  const std::size_t n = tree->leaf_count();
  return IndependentDistribution(std::move(tree), std::vector<T>(n, p));
}

template <Scalar T>
IndependentDistribution<T> IndependentDistribution<T>::with_leaf(int leaf, const T& p) const {
  auto probs = probs_;
  probs.at(static_cast<std::size_t>(leaf)) = p;
  return IndependentDistribution(tree_, std::move(probs));
}

template <Scalar T>
std::vector<T> IndependentDistribution<T>::node_zero_probabilities() const {
  const Tree& t = *tree_;
  std::vector<T> q(t.node_count());
  for (int i = static_cast<int>(t.node_count()) - 1; i >= 0; --i) {
    const auto& n = t.node(i);
    auto& out = q[static_cast<std::size_t>(i)];
    if (n.is_leaf) {
      out = probs_[static_cast<std::size_t>(n.leaf)];
    } else if (n.label == Label::Or) {
      T prod = 1;
      for (int c : n.children) prod *= q[static_cast<std::size_t>(c)];
      out = prod;
    } else {
      T prod = 1;
      for (int c : n.children) prod *= 1 - q[static_cast<std::size_t>(c)];
      out = 1 - prod;
    }
  }
  return q;
}

template <Scalar T>
T IndependentDistribution<T>::node_zero_probability(const NodeId& node) const {
  return node_zero_probabilities()[static_cast<std::size_t>(tree_->find_or_throw(node))];
}

template <Scalar T>
double IndependentDistribution<T>::iid_deviation() const {
  auto [lo, hi] = std::minmax_element(probs_.begin(), probs_.end());
  return to_double(T(*hi - *lo));
}

template <Scalar T>
IndependentDistribution<T> make_d_epsilon(const T& eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  T black = (1 + eps) / 2;
  if (black > 1) throw std::invalid_argument("eps too large: (1+eps)/2 exceeds 1");
  T white = 1 / (1 + eps);
  auto tree = std::make_shared<const Tree>(Tree::uniform(Label::Or, 2, 3));
  std::vector<T> probs(tree->leaf_count());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = (i % 2 == 0) ? black : white;
  return IndependentDistribution<T>(std::move(tree), std::move(probs));
}

ExactDistribution make_d_epsilon_limit() {
  auto tree = std::make_shared<const Tree>(Tree::uniform(Label::Or, 2, 3));
  std::vector<Rational> probs(tree->leaf_count());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = (i % 2 == 0) ? Rational(1, 2) : Rational(1);
  return ExactDistribution(std::move(tree), std::move(probs));
}

template <Scalar T>
T solve_leaf_for_root_probability(const IndependentDistribution<T>& d, int free_leaf, const T& r) {
  check_probability(r, "target root probability");
  const T at0 = d.with_leaf(free_leaf, T(0)).root_zero_probability();
  const T at1 = d.with_leaf(free_leaf, T(1)).root_zero_probability();
  const T slope = at1 - at0;
  if constexpr (std::is_same_v<T, double>) {
    constexpr double tol = 1e-12;
    if (r < at0 - tol || r > at1 + tol) {
      throw Infeasible("root probability " + format_value(r) + " unattainable; range is [" + format_value(at0) +
                       ", " + format_value(at1) + "]");
    }
    if (slope <= tol * 1e-3) return 0.5;
    return std::clamp((r - at0) / slope, 0.0, 1.0);
  } else {
    if (r < at0 || r > at1) {
      throw Infeasible("root probability " + format_value(r) + " unattainable; range is [" + format_value(at0) +
                       ", " + format_value(at1) + "]");
    }
    if (slope == 0) return Rational(1, 2);
    return (r - at0) / slope;
  }
}

namespace {

enum class EntryKind { Exact, Float, Integer };

EntryKind classify(const std::string& s) {
  if (s.find('/') != std::string::npos) return EntryKind::Exact;
  if (s.find_first_of(".eE") != std::string::npos) return EntryKind::Float;
  return EntryKind::Integer;
}

}  // namespace

AnyDistribution parse_distribution_json(std::shared_ptr<const Tree> tree, std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("distribution JSON: ") + e.what());
  }
  std::vector<std::string> entries;
  auto as_text = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    throw ParseError("distribution entries must be strings (\"1/2\" or \"0.5\")");
  };
  if (j.is_object() && j.contains("iid")) {
    entries.assign(tree->leaf_count(), as_text(j["iid"]));
  } else if (j.is_object() && j.contains("leaves") && j["leaves"].is_array()) {
    for (const auto& v : j["leaves"]) entries.push_back(as_text(v));
  } else {
    throw ParseError("distribution JSON needs a \"leaves\" array or an \"iid\" entry");
  }
  if (entries.size() != tree->leaf_count()) {
    throw ParseError("distribution lists " + std::to_string(entries.size()) + " leaves, tree has " +
                     std::to_string(tree->leaf_count()));
  }
  bool any_exact = false, any_float = false;
  for (const auto& e : entries) {
    auto k = classify(e);
    any_exact |= k == EntryKind::Exact;
    any_float |= k == EntryKind::Float;
  }
  if (any_exact && any_float) throw ParseError("distribution mixes exact (\"a/b\") and decimal entries");
  if (any_float) {
    std::vector<double> probs;
    for (const auto& e : entries) probs.push_back(parse_decimal(e));
    return FloatDistribution(std::move(tree), std::move(probs));
  }
  std::vector<Rational> probs;
  for (const auto& e : entries) probs.push_back(parse_rational(e));
  return ExactDistribution(std::move(tree), std::move(probs));
}

template <Scalar T>
std::string distribution_to_json(const IndependentDistribution<T>& d) {
  nlohmann::json j;
  j["leaves"] = nlohmann::json::array();
  for (const T& p : d.leaf_probs()) {
    std::string s = format_value(p);
    if constexpr (std::is_same_v<T, Rational>) {
      if (s.find('/') == std::string::npos) s += "/1";
    } else {
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    }
    j["leaves"].push_back(s);
  }
  return j.dump();
}

template class IndependentDistribution<Rational>;
template class IndependentDistribution<double>;
template IndependentDistribution<Rational> make_d_epsilon(const Rational&);
template IndependentDistribution<double> make_d_epsilon(const double&);
template Rational solve_leaf_for_root_probability(const ExactDistribution&, int, const Rational&);
template double solve_leaf_for_root_probability(const FloatDistribution&, int, const double&);
template std::string distribution_to_json(const ExactDistribution&);
template std::string distribution_to_json(const FloatDistribution&);
template void check_probability(const Rational&, std::string_view);
template void check_probability(const double&, std::string_view);

}  // namespace andor
