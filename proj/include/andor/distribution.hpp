#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "andor/numeric.hpp"
#include "andor/tree.hpp"

namespace andor {

class Infeasible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Independent distribution over leaf assignments: each leaf takes value 0
/// with its own probability, independently of the others.
template <Scalar T>
class IndependentDistribution {
 public:
  IndependentDistribution(std::shared_ptr<const Tree> tree, std::vector<T> leaf_zero_prob);

  static IndependentDistribution iid(std::shared_ptr<const Tree> tree, const T& p);

  const Tree& tree() const { return *tree_; }
  const std::shared_ptr<const Tree>& tree_ptr() const { return tree_; }
  const std::vector<T>& leaf_probs() const { return probs_; }
  const T& leaf_prob(int leaf) const { return probs_[static_cast<std::size_t>(leaf)]; }

  IndependentDistribution with_leaf(int leaf, const T& p) const;

  /// Zero-probability of every node, indexed by tree node index.
  std::vector<T> node_zero_probabilities() const;
  T node_zero_probability(const NodeId& node) const;
  T root_zero_probability() const { return node_zero_probabilities()[0]; }

  /// Largest |q_i - q_j| over leaf pairs.
  double iid_deviation() const;

 private:
  std::shared_ptr<const Tree> tree_;
  std::vector<T> probs_;
};

using ExactDistribution = IndependentDistribution<Rational>;
using FloatDistribution = IndependentDistribution<double>;
using AnyDistribution = std::variant<ExactDistribution, FloatDistribution>;

/// The OR-rooted binary height-3 family: x_{ij0} -> (1+eps)/2, x_{ij1} -> 1/(1+eps).
/// Requires eps > 0 and (1+eps)/2 <= 1.
template <Scalar T>
IndependentDistribution<T> make_d_epsilon(const T& eps);

/// The eps -> 0 limit of the family above (leaves alternately 1/2 and 1).
ExactDistribution make_d_epsilon_limit();

/// Probability for `free_leaf` that puts the root's zero-probability at r,
/// all other leaves fixed. The root probability is affine in any single leaf,
/// so the solution is exact; when the root does not depend on the leaf and r
/// is attained, the midpoint 1/2 is returned. Throws Infeasible otherwise.
template <Scalar T>
T solve_leaf_for_root_probability(const IndependentDistribution<T>& d, int free_leaf, const T& r);

/// {"leaves": ["1/2", "0.75", ...]} or {"iid": "p"}; "/" entries are exact,
/// decimal entries are floats, bare integers adopt the file's backend.
AnyDistribution parse_distribution_json(std::shared_ptr<const Tree> tree, std::string_view json_text);

template <Scalar T>
std::string distribution_to_json(const IndependentDistribution<T>& d);

template <Scalar T>
void check_probability(const T& p, std::string_view what);

}  // namespace andor
