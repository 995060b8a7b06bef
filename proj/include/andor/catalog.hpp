#pragma once

#include <array>
#include <string>
#include <vector>

#include "andor/distribution.hpp"
#include "andor/strategy.hpp"

namespace andor::catalog {

/// The sixteen non-depth-first algorithms on the binary height-2 AND-OR tree.
///
/// Family A probes x_{ij}, x_{(1-i)k}, x_{(1-i)(1-k)}, x_{i(1-j)};
/// family A' probes x_{ij}, x_{(1-i)k}, x_{i(1-j)}, x_{(1-i)(1-k)}.
/// Whenever the first probe returns 1 the other subtree is finished by the
/// cheapest depth-first order for the given distribution.
struct Height2AlgorithmId {
  enum class Family { A, A_prime };
  Family family = Family::A;
  int i = 0, j = 0, k = 0;

  friend bool operator==(const Height2AlgorithmId&, const Height2AlgorithmId&) = default;

  /// Leaf indices of the four-probe skeleton, in probing order.
  std::array<int, 4> skeleton() const;
  std::string name() const;
};

std::vector<Height2AlgorithmId> all_height2_ids();

/// Requires d on uniform(AND,2,2). Ties in the continuation order go to the
/// lexicographically first leaf.
template <Scalar T>
Strategy build_height2_algorithm(const Height2AlgorithmId& id, const IndependentDistribution<T>& d);

/// f(x,y,z,w) = -xyz + xy - xw + 2x + w + 1.
template <Scalar T>
T f(const T& x, const T& y, const T& z, const T& w);

/// Arguments (x,y,z,w) with cost(id, d) = f(x,y,z,w).
template <Scalar T>
std::array<T, 4> f_arguments(const Height2AlgorithmId& id, const IndependentDistribution<T>& d);

/// Best of the sixteen under the normalisation q_{i0} <= q_{i1},
/// q_{00} q_{01} >= q_{10} q_{11}: A(x00,x10,x11,x01) when q_{01} <= q_{11},
/// otherwise A(x10,x00,x01,x11).
Height2AlgorithmId claim2_choice(const Rational& q01, const Rational& q11);

/// SOLVE with the two depth-1 subtrees swapped: x10, x11, x00, x01.
Strategy build_solve_prime(const Tree& tree);

/// Non-depth-first algorithm on uniform(OR,2,3): settle x_{00}; if it is 0,
/// run SOLVE under x_1; otherwise probe x_{010}, and if that is 0 hold back
/// x_{011} until SOLVE under x_1 has settled x_1.
Strategy build_a0_height3(const Tree& tree);

}  // namespace andor::catalog
