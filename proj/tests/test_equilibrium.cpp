#include <doctest.h>

#include <random>

#include "andor/equilibrium.hpp"
#include "oracles.hpp"

using namespace andor;

namespace {
std::shared_ptr<const Tree> T(const char* s) { return std::make_shared<const Tree>(parse_tree(s)); }

EquilibriumProblem problem(const char* tree, AlgorithmClass c, std::optional<double> r = std::nullopt, int starts = 4) {
  EquilibriumProblem p;
  p.tree = T(tree);
  p.algorithm_class = c;
  p.root_probability = r;
  p.config.starts = starts;
  p.config.seed = 7;
  return p;
}
}  // namespace

TEST_SUITE("equilibrium") {

TEST_CASE("objective enforces the constraint") {
  auto p = problem("uniform:AND:2:2", AlgorithmClass::general, 0.5);
  CHECK_THROWS_AS(objective(p, FloatDistribution::iid(p.tree, 0.5)), ConstraintViolation);
  CHECK(objective(p, FloatDistribution(p.tree, {0.5, 0.5, 0.5, 2.0 / 3.0})) > 0);
}

TEST_CASE("unattainable or out-of-range constraints are infeasible") {
  CHECK_THROWS_AS(search(problem("uniform:AND:2:2", AlgorithmClass::general, 0.0)), Infeasible);
  CHECK_THROWS_AS(search(problem("uniform:AND:2:2", AlgorithmClass::general, 1.0)), Infeasible);
  CHECK_THROWS_AS(search(problem("uniform:AND:2:2", AlgorithmClass::general, 1.5)), Infeasible);
}

TEST_CASE("AND of two leaves: the maximizer makes both leaves sure ones") {
  auto p = problem("AND(l,l)", AlgorithmClass::general);
  auto r = search(p);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.maximizer.leaf_prob(0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.maximizer.leaf_prob(1) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.root_degenerate);
  CHECK(r.rationalized_value == "2");

  // Grid reference: the optimal cost is 2 - max(q0, q1).
  double best = 0;
  for (int a = 0; a <= 100; ++a) {
    for (int b = 0; b <= 100; ++b) {
      best = std::max(best, oracle::min_cost_general<double>(*p.tree, {a / 100.0, b / 100.0}));
    }
  }
  CHECK(r.value >= best - 1e-12);
}

TEST_CASE("IID line search") {
  auto and22 = iid_line_search(T("uniform:AND:2:2"), AlgorithmClass::general);
  auto or22 = iid_line_search(T("uniform:OR:2:2"), AlgorithmClass::general);
  CHECK(and22.value == doctest::Approx(or22.value).epsilon(1e-10));
  CHECK(and22.p_star == doctest::Approx(1 - or22.p_star).epsilon(1e-6));
  // Scan reference with the raw oracle.
  double best = 0;
  for (int k = 0; k <= 1000; ++k) {
    best = std::max(best, oracle::min_cost_general<double>(parse_tree("uniform:AND:2:2"), std::vector<double>(4, k / 1000.0)));
  }
  CHECK(and22.value >= best - 1e-12);
  CHECK(and22.value <= best + 1e-4);
  // An AND of leaves is maximized by sure ones: every leaf is read.
  CHECK(iid_line_search(T("AND(l,l,l)"), AlgorithmClass::general).value == doctest::Approx(3.0));
}

TEST_CASE("unconstrained maximizer on the binary height-2 tree is IID") {
  auto p = problem("uniform:AND:2:2", AlgorithmClass::general);
  auto r = search(p);
  auto line = iid_line_search(p.tree, p.algorithm_class);
  CHECK(r.iid_deviation <= 1e-6);
  CHECK(r.value == doctest::Approx(line.value).epsilon(1e-9));
  CHECK(r.converged);
}

TEST_CASE("constraint r = 7/16 on the binary height-2 tree: IID 1/2") {
  auto p = problem("uniform:AND:2:2", AlgorithmClass::general, 7.0 / 16.0);
  auto r = search(p);
  CHECK(r.root_probability == doctest::Approx(7.0 / 16.0).epsilon(1e-12));
  CHECK(r.iid_deviation <= 1e-6);
  for (int i = 0; i < 4; ++i) CHECK(r.maximizer.leaf_prob(i) == doctest::Approx(0.5).epsilon(1e-6));

  // Grid over the first three leaves; the last is solved from the affine
  // dependence of the root probability on it.
  const Tree& t = *p.tree;
  double best = 0;
  for (int a = 0; a <= 50; a += 2) {
    for (int b = 0; b <= 50; b += 2) {
      for (int c = 0; c <= 50; c += 2) {
        std::vector<double> q{a / 50.0, b / 50.0, c / 50.0, 0.0};
        const double lo = oracle::root_zero_probability(t, q);
        q[3] = 1.0;
        const double hi = oracle::root_zero_probability(t, q);
        if (hi - lo < 1e-12) continue;
        const double x = (7.0 / 16.0 - lo) / (hi - lo);
        if (x < 0 || x > 1) continue;
        q[3] = x;
        best = std::max(best, oracle::min_cost_general(t, q));
      }
    }
  }
  CHECK(r.value >= best - 1e-9);
}

TEST_CASE("the maximizer is a local maximum") {
  auto p = problem("uniform:OR:2:2", AlgorithmClass::depth_first);
  auto r = search(p);
  for (int i = 0; i < 4; ++i) {
    for (double step : {-1e-3, 1e-3}) {
      const double v = std::clamp(r.maximizer.leaf_prob(i) + step, 0.0, 1.0);
      CHECK(objective(p, r.maximizer.with_leaf(i, v)) <= r.value + 1e-12);
    }
  }
}

TEST_CASE("search is reproducible for a fixed seed") {
  auto p = problem("AND(OR(l,l),l)", AlgorithmClass::general, std::nullopt, 3);
  auto a = search(p);
  auto b = search(p);
  CHECK(a.maximizer.leaf_probs() == b.maximizer.leaf_probs());
  CHECK(a.value == b.value);
  CHECK(equilibrium_report_to_json(a, p) == equilibrium_report_to_json(b, p));
}

TEST_CASE("the maximizer dominates every IID") {
  for (const char* spec : {"AND(OR(l,l),l)", "OR(AND(l,l),AND(l,l))", "AND(l,l,l)"}) {
    auto p = problem(spec, AlgorithmClass::general, std::nullopt, 3);
    auto r = search(p);
    for (int k = 0; k <= 20; ++k) {
      std::vector<double> q(p.tree->leaf_count(), k / 20.0);
      CHECK(r.value >= oracle::min_cost_general(*p.tree, q) - 1e-12);
    }
  }
}

TEST_CASE("report serialization") {
  auto p = problem("AND(l,l)", AlgorithmClass::depth_first, std::nullopt, 2);
  auto r = search(p);
  const auto js = equilibrium_report_to_json(r, p);
  for (const char* key : {"\"maximizer\"", "\"value\"", "\"iid_deviation\"", "\"root_probability\"", "\"root_degenerate\"",
                          "\"rationalized_value\"", "\"starts\"", "\"constraint_r\":null"}) {
    CHECK(js.find(key) != std::string::npos);
  }
  const auto csv = trajectories_to_csv(r);
  CHECK(csv.rfind("start,cycle,value,q0,q1", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 3);
}

}  // TEST_SUITE
