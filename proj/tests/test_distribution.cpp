#include <doctest.h>

#include <random>

#include "andor/distribution.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace andor;

namespace {
Rational Q(const char* s) { return parse_rational(s); }
std::shared_ptr<const Tree> T(const char* s) { return std::make_shared<const Tree>(parse_tree(s)); }
}  // namespace

TEST_SUITE("distribution") {

TEST_CASE("limit distribution zero-probabilities") {
  auto d = make_d_epsilon_limit();
  CHECK(d.node_zero_probability(NodeId{{0, 1}}) == Q("1/2"));
  CHECK(d.node_zero_probability(NodeId{{1}}) == Q("3/4"));
  CHECK(d.root_zero_probability() == Q("9/16"));
}

TEST_CASE("IID examples") {
  CHECK(ExactDistribution::iid(T("uniform:AND:2:3"), 0).root_zero_probability() == 0);
  CHECK(ExactDistribution::iid(T("AND(l,OR(l,l),l)"), 0).root_zero_probability() == 0);
  auto half = ExactDistribution::iid(T("uniform:AND:2:2"), Q("1/2"));
  CHECK(half.root_zero_probability() == Q("7/16"));
  CHECK(oracle::root_zero_probability(half.tree(), half.leaf_probs()) == Q("7/16"));
  CHECK(half.iid_deviation() == 0.0);
}

TEST_CASE("d_eps leaves and depth-2 nodes") {
  auto d = make_d_epsilon<Rational>(Q("1/3"));
  for (int leaf = 0; leaf < 8; ++leaf) CHECK(d.leaf_prob(leaf) == (leaf % 2 == 0 ? Q("2/3") : Q("3/4")));
  for (const char* eps : {"1/100", "1/3", "1/1000", "7/9", "1"}) {
    auto de = make_d_epsilon<Rational>(Q(eps));
    for (int i : {0, 1}) {
      for (int j : {0, 1}) CHECK(de.node_zero_probability(NodeId{{i, j}}) == Q("1/2"));
    }
  }
  CHECK_THROWS(make_d_epsilon<Rational>(0));
  CHECK_THROWS(make_d_epsilon<Rational>(Q("-1/2")));
  CHECK_THROWS(make_d_epsilon<Rational>(2));
  CHECK(make_d_epsilon<double>(0.01).leaf_prob(0) == doctest::Approx(0.505));
}

TEST_CASE("root probability equals the 2^n enumeration") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 150; ++trial) {
    auto t = gen::tree(rng, 12);
    auto q = gen::probs(rng, t->leaf_count(), true);
    ExactDistribution d(t, q);
    REQUIRE(d.root_zero_probability() == oracle::root_zero_probability(*t, q));
    std::vector<double> qf;
    for (const auto& p : q) qf.push_back(to_double(p));
    CHECK(FloatDistribution(t, qf).root_zero_probability() == doctest::Approx(to_double(d.root_zero_probability())));
  }
}

TEST_CASE("root probability is nondecreasing in each leaf") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto t = gen::tree(rng, 10);
    ExactDistribution d(t, gen::probs(rng, t->leaf_count(), true));
    const auto base = d.root_zero_probability();
    for (int leaf = 0; leaf < static_cast<int>(t->leaf_count()); ++leaf) {
      const Rational up = (d.leaf_prob(leaf) + 1) / 2;
      CHECK(d.with_leaf(leaf, up).root_zero_probability() >= base);
    }
  }
}

TEST_CASE("solve_leaf_for_root_probability") {
  auto t2 = T("uniform:AND:2:1");
  CHECK(solve_leaf_for_root_probability(ExactDistribution(t2, {Q("1/2"), 0}), 1, Q("3/4")) == Q("1/2"));
  CHECK(solve_leaf_for_root_probability(ExactDistribution(t2, {0, 0}), 1, Rational(1)) == 1);
  CHECK_THROWS_AS(solve_leaf_for_root_probability(ExactDistribution(t2, {Q("1/2"), 0}), 1, Q("1/4")), Infeasible);

  auto t4 = T("uniform:AND:2:2");
  ExactDistribution d(t4, {Q("1/2"), Q("1/2"), Q("1/2"), 0});
  CHECK(solve_leaf_for_root_probability(d, 3, Q("7/16")) == Q("1/2"));

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = gen::tree(rng, 9);
    ExactDistribution e(t, gen::probs(rng, t->leaf_count()));
    const int leaf = static_cast<int>(rng() % t->leaf_count());
    const auto lo = e.with_leaf(leaf, 0).root_zero_probability();
    const auto hi = e.with_leaf(leaf, 1).root_zero_probability();
    const Rational r = lo + (hi - lo) * Q("2/7");
    const Rational x = solve_leaf_for_root_probability(e, leaf, r);
    CHECK(e.with_leaf(leaf, x).root_zero_probability() == r);
    if (hi < 1) CHECK_THROWS_AS(solve_leaf_for_root_probability(e, leaf, Rational((hi + 1) / 2)), Infeasible);
  }
}

TEST_CASE("solve on a leaf the root ignores") {
  auto t = T("uniform:AND:2:1");
  // x_0 = 0 surely: the root is 0 whatever x_1 is.
  ExactDistribution d(t, {1, Q("1/3")});
  CHECK(solve_leaf_for_root_probability(d, 1, Rational(1)) == Q("1/2"));
  CHECK_THROWS_AS(solve_leaf_for_root_probability(d, 1, Q("1/2")), Infeasible);
}

TEST_CASE("probabilities outside [0,1] are rejected") {
  auto t = T("uniform:AND:2:1");
  CHECK_THROWS(ExactDistribution(t, {Q("3/2"), 0}));
  CHECK_THROWS(FloatDistribution(t, {-0.1, 0.5}));
  CHECK_THROWS(ExactDistribution(t, {Q("1/2")}));
}

TEST_CASE("distribution JSON") {
  auto t = T("uniform:AND:2:2");
  auto exact = parse_distribution_json(t, R"({"leaves":["1/2","1/3","1","0"]})");
  REQUIRE(std::holds_alternative<ExactDistribution>(exact));
  CHECK(std::get<ExactDistribution>(exact).leaf_prob(1) == Q("1/3"));

  auto fl = parse_distribution_json(t, R"({"leaves":["0.5","0.25","1","0"]})");
  REQUIRE(std::holds_alternative<FloatDistribution>(fl));
  CHECK(std::get<FloatDistribution>(fl).leaf_prob(1) == 0.25);

  auto iid = parse_distribution_json(t, R"({"iid":"2/5"})");
  CHECK(std::get<ExactDistribution>(iid).leaf_prob(3) == Q("2/5"));

  CHECK_THROWS_AS(parse_distribution_json(t, R"({"leaves":["1/2","0.5","1","0"]})"), ParseError);
  CHECK_THROWS_AS(parse_distribution_json(t, R"({"leaves":["1/2"]})"), ParseError);
  CHECK_THROWS_AS(parse_distribution_json(t, R"({"leaves":[0.5,0.5,0.5,0.5]})"), ParseError);
  CHECK_THROWS_AS(parse_distribution_json(t, R"({"leaves":)"), ParseError);
  CHECK_THROWS(parse_distribution_json(t, R"({"leaves":["3/2","0","0","0"]})"));

  ExactDistribution d(t, {Q("1/7"), Q("2/3"), 0, 1});
  auto back = parse_distribution_json(t, distribution_to_json(d));
  CHECK(std::get<ExactDistribution>(back).leaf_probs() == d.leaf_probs());
}

}  // TEST_SUITE
