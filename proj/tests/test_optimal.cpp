#include <doctest.h>

#include <random>

#include "andor/catalog.hpp"
#include "andor/optimal.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace andor;

namespace {
Rational Q(const char* s) { return parse_rational(s); }
std::shared_ptr<const Tree> T(const char* s) { return std::make_shared<const Tree>(parse_tree(s)); }

std::vector<double> to_doubles(const std::vector<Rational>& q) {
  std::vector<double> out;
  for (const auto& p : q) out.push_back(to_double(p));
  return out;
}
}  // namespace

TEST_SUITE("optimal") {

TEST_CASE("two leaves: query the likelier short-circuit first") {
  ExactDistribution d(T("AND(l,l)"), {Q("1/2"), Q("3/4")});
  auto r = optimal_cost_general(d);
  CHECK(r.value == Q("5/4"));
  CHECK(r.witness.leaf() == 1);
  CHECK(expected_cost(d, r.witness) == r.value);
}

TEST_CASE("no short-circuit means every leaf is read") {
  CHECK(optimal_cost_general(ExactDistribution::iid(T("AND(l,l,l)"), 0)).value == 3);
  CHECK(optimal_cost_general(ExactDistribution::iid(T("OR(l,l,l)"), 1)).value == 3);
  CHECK(optimal_cost_general(ExactDistribution::iid(T("uniform:AND:2:2"), 0)).value == 2);
}

TEST_CASE("limit distribution costs") {
  auto d = make_d_epsilon_limit();
  CHECK(optimal_cost_general(d).value == Q("15/4"));
  CHECK(optimal_cost_depth_first(d).value == Q("63/16"));
  CHECK(optimal_cost_directional(d).value == Q("63/16"));
  CHECK(expected_cost(d, catalog::build_a0_height3(d.tree())) == Q("31/8"));
}

TEST_CASE("witnesses are sound and belong to their class") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    auto t = gen::tree(rng, 9);
    ExactDistribution d(t, gen::probs(rng, t->leaf_count(), true));
    for (auto c : {AlgorithmClass::general, AlgorithmClass::depth_first, AlgorithmClass::directional}) {
      auto r = optimal_cost(d, c);
      REQUIRE(validate(*t, r.witness).ok);
      CHECK(expected_cost(d, r.witness) == r.value);
      if (c != AlgorithmClass::general) CHECK(is_depth_first(*t, r.witness).depth_first);
      if (c == AlgorithmClass::directional) CHECK(is_directional(*t, r.witness).directional);
    }
  }
}

TEST_CASE("optima match the brute-force references") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 80; ++trial) {
    auto t = gen::tree(rng, 9);
    auto q = gen::probs(rng, t->leaf_count(), true);
    ExactDistribution d(t, q);
    const auto g = optimal_cost_general(d).value;
    const auto df = optimal_cost_depth_first(d).value;
    const auto dir = optimal_cost_directional(d).value;
    CHECK(g == oracle::min_cost_general(*t, q));
    CHECK(df == oracle::min_cost_depth_first(*t, q));
    CHECK(dir == oracle::min_cost_directional(*t, q));
    CHECK(g <= df);
    CHECK(df <= dir);
    CHECK(dir <= expected_cost(d, make_solve(*t)));
  }
}

TEST_CASE("general optimum equals the best of every enumerated strategy") {
  std::mt19937_64 rng(43);
  for (const char* spec : {"AND(l,l)", "OR(l,l,l)", "AND(l,OR(l,l))", "uniform:AND:2:2", "OR(AND(l,l),l,l)"}) {
    auto t = T(spec);
    auto all = oracle::all_strategies(*t);
    for (int trial = 0; trial < 10; ++trial) {
      auto q = gen::probs(rng, t->leaf_count(), true);
      Rational best = oracle::expected_cost(q, all.front());
      for (const auto& s : all) best = std::min(best, oracle::expected_cost(q, s));
      CHECK(optimal_cost_general(ExactDistribution(t, q)).value == best);
    }
  }
}

TEST_CASE("depth-first optimum equals the directional optimum") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    auto t = gen::tree(rng, 11);
    ExactDistribution d(t, gen::probs(rng, t->leaf_count()));
    CHECK(optimal_cost_depth_first(d).value == optimal_cost_directional(d).value);
  }
}

TEST_CASE("IID on small uniform trees: some optimal algorithm is directional") {
  for (const char* spec : {"uniform:AND:2:2", "uniform:OR:2:2", "uniform:AND:3:1", "AND(OR(l,l,l),OR(l,l,l))"}) {
    auto t = T(spec);
    for (int k = 1; k < 20; ++k) {
      auto d = ExactDistribution::iid(t, Rational(k) / 20);
      CHECK(optimal_cost_general(d).value == optimal_cost_directional(d).value);
    }
  }
}

TEST_CASE("leaf budget") {
  auto t = T("uniform:AND:3:3");
  auto d = ExactDistribution::iid(t, Q("1/2"));
  CHECK_THROWS_AS(optimal_cost_general(d), BudgetExceeded);
  OptimalOptions wide;
  wide.leaf_budget = 27;
  wide.extract_witness = false;
  CHECK(optimal_cost_directional(d, wide).value > 0);
}

TEST_CASE("wide gates fall back to the ratio sort") {
  auto t = T("AND(l,l,l,l,l,l,l)");
  std::vector<Rational> q;
  for (int i = 1; i <= 7; ++i) q.push_back(Rational(i) / 9);
  ExactDistribution d(t, q);
  auto dir = optimal_cost_directional(d);
  CHECK(dir.heuristic);
  // A single gate of leaves: the ratio order is optimal anyway.
  CHECK(dir.value == optimal_cost_depth_first(d).value);
  CHECK_FALSE(optimal_cost_directional(ExactDistribution(T("AND(l,l,l)"), {q[0], q[1], q[2]})).heuristic);
}

TEST_CASE("symmetric ties resolve to SOLVE") {
  auto t = T("uniform:AND:2:2");
  auto d = ExactDistribution::iid(t, Q("1/2"));
  for (auto c : {AlgorithmClass::general, AlgorithmClass::depth_first, AlgorithmClass::directional}) {
    CHECK(strategy_to_json(*t, optimal_cost(d, c).witness) == strategy_to_json(*t, make_solve(*t)));
  }
}

TEST_CASE("float backend tracks the exact one") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = gen::tree(rng, 10);
    auto q = gen::probs(rng, t->leaf_count(), true);
    ExactDistribution e(t, q);
    FloatDistribution f(t, to_doubles(q));
    for (auto c : {AlgorithmClass::general, AlgorithmClass::depth_first, AlgorithmClass::directional}) {
      CHECK(optimal_cost(f, c).value == doctest::Approx(to_double(optimal_cost(e, c).value)).epsilon(1e-12));
    }
  }
}

TEST_CASE("class names and report JSON") {
  CHECK(parse_algorithm_class("depth_first") == AlgorithmClass::depth_first);
  CHECK(to_string(AlgorithmClass::directional) == "directional");
  CHECK_THROWS(parse_algorithm_class("greedy"));
  auto d = make_d_epsilon_limit();
  const auto js = report_to_json(d.tree(), optimal_cost_general(d));
  CHECK(js.find("\"15/4\"") != std::string::npos);
}

}  // TEST_SUITE
