#include "andor/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "andor/parallel.hpp"

namespace andor {

namespace {

constexpr double kConstraintTol = 1e-12;
constexpr double kGolden = 0.6180339887498949;

OptimalOptions objective_options() {
  OptimalOptions opt;
  opt.extract_witness = false;
  return opt;
}

double raw_objective(AlgorithmClass cls, const FloatDistribution& d) {
  return optimal_cost(d, cls, objective_options()).value;
}

/// Golden-section maximization of g on [lo, hi].
template <class G>
std::pair<double, double> golden_max(G&& g, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = g(x2);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

/// Grid scan then golden refinement around the best grid cell. Grid ties go to
/// the smallest argument.
template <class G>
std::pair<double, double> maximize_1d(G&& g, double lo, double hi, int grid_points, double tol) {
  if (hi - lo <= tol) {
    double mid = 0.5 * (lo + hi);
    return {mid, g(mid)};
  }
  const int m = std::max(grid_points, 3);
  std::vector<double> xs(static_cast<std::size_t>(m)), fs(static_cast<std::size_t>(m));
  int best = 0;
  for (int i = 0; i < m; ++i) {
    xs[static_cast<std::size_t>(i)] = i == m - 1 ? hi : lo + (hi - lo) * i / (m - 1);
    fs[static_cast<std::size_t>(i)] = g(xs[static_cast<std::size_t>(i)]);
    if (fs[static_cast<std::size_t>(i)] > fs[static_cast<std::size_t>(best)]) best = i;
  }
  const double a = xs[static_cast<std::size_t>(std::max(best - 1, 0))];
  const double b = xs[static_cast<std::size_t>(std::min(best + 1, m - 1))];
  auto refined = golden_max(g, a, b, tol);
  if (refined.second > fs[static_cast<std::size_t>(best)]) return refined;
  return {xs[static_cast<std::size_t>(best)], fs[static_cast<std::size_t>(best)]};
}

/// Search space: either every leaf free, or all but the last leaf free with
/// the last leaf solved to hold the root probability at r.
class Space {
 public:
  explicit Space(const EquilibriumProblem& p) : p_(p), n_(static_cast<int>(p.tree->leaf_count())) {
    if (p.root_probability) {
      const double r = *p.root_probability;
      if (!(r > 0.0 && r < 1.0)) {
        throw Infeasible("root probability constraint must lie strictly inside (0,1), got " + format_value(r));
      }
    }
  }

  bool constrained() const { return p_.root_probability.has_value(); }
  int free_count() const { return constrained() ? n_ - 1 : n_; }
  int last() const { return n_ - 1; }

  /// Full leaf vector from free coordinates; nullopt if r is unattainable.
  std::optional<std::vector<double>> complete(std::vector<double> x) const {
    if (!constrained()) return x;
    x.resize(static_cast<std::size_t>(n_), 0.0);
    FloatDistribution d(p_.tree, x);
    try {
      x.back() = solve_leaf_for_root_probability(d, last(), *p_.root_probability);
    } catch (const Infeasible&) {
      return std::nullopt;
    }
    return x;
  }

  double value(const std::vector<double>& full) const {
    return raw_objective(p_.algorithm_class, FloatDistribution(p_.tree, full));
  }

  /// Completed leaf vector with every free coordinate in `group` set to t.
  std::optional<std::vector<double>> with_group(const std::vector<double>& full, std::span<const int> group,
                                                double t) const {
    std::vector<double> free(full.begin(), full.begin() + free_count());
    for (int i : group) free[static_cast<std::size_t>(i)] = t;
    return complete(std::move(free));
  }

  /// Interval of t keeping the constraint attainable when `group` is set to t.
  /// The root probability is nondecreasing in every leaf, so for either extreme
  /// of the solved leaf the feasible set is an interval found by bisection.
  std::pair<double, double> range(const std::vector<double>& full, std::span<const int> group) const {
    if (!constrained()) return {0.0, 1.0};
    const double r = *p_.root_probability;
    auto root_at = [&](double t, double last_q) {
      auto y = full;
      for (int i : group) y[static_cast<std::size_t>(i)] = t;
      y.back() = last_q;
      return FloatDistribution(p_.tree, std::move(y)).root_zero_probability();
    };
    // t_hi: largest t with root(t, 0) <= r; t_lo: smallest t with root(t, 1) >= r.
    // Both predicates hold at t = 0 and fail past the boundary.
    auto boundary = [](auto&& pred) {
      double lo = 0.0, hi = 1.0;
      if (pred(hi)) return hi;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (pred(mid)) lo = mid;
        else hi = mid;
      }
      return hi;
    };
    if (root_at(0.0, 0.0) > r || root_at(1.0, 1.0) < r) {
      const double t = full[static_cast<std::size_t>(group.front())];
      return {t, t};
    }
    const double t_hi = std::min(1.0, boundary([&](double t) { return root_at(t, 0.0) <= r; }));
    const double t_lo = root_at(0.0, 1.0) >= r ? 0.0 : boundary([&](double t) { return root_at(t, 1.0) < r; });
    return {t_lo, std::max(t_lo, t_hi)};
  }

 private:
  const EquilibriumProblem& p_;
  int n_;
};

std::vector<std::vector<double>> initial_points(const Space& space, int starts, std::uint64_t seed) {
  const int dim = space.free_count();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> out;
  // A few corners, then a Latin hypercube for the rest.
  const int corners = std::min(starts / 4, dim < 30 ? (1 << std::min(dim, 29)) : starts);
  for (int c = 0; c < corners; ++c) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    if (c == 0) std::fill(x.begin(), x.end(), 0.0);
    else if (c == 1) std::fill(x.begin(), x.end(), 1.0);
    else for (auto& v : x) v = unit(rng) < 0.5 ? 0.0 : 1.0;
    out.push_back(std::move(x));
  }
  const int lhs = starts - corners;
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(dim));
  for (auto& col : cols) {
    col.resize(static_cast<std::size_t>(lhs));
    for (int s = 0; s < lhs; ++s) col[static_cast<std::size_t>(s)] = (s + unit(rng)) / lhs;
    std::shuffle(col.begin(), col.end(), rng);
  }
  for (int s = 0; s < lhs; ++s) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] = cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)];
    out.push_back(std::move(x));
  }
  if (space.constrained()) {
    // Replace infeasible starts by shrinking them toward a feasible reference.
    std::vector<double> reference;
    for (int t = 0; t < 10000 && reference.empty(); ++t) {
      std::vector<double> x(static_cast<std::size_t>(dim));
      for (auto& v : x) v = unit(rng);
      if (space.complete(x)) reference = x;
    }
    if (reference.empty()) throw Infeasible("root probability constraint is not attainable on this tree");
    for (auto& x : out) {
      for (int step = 0; step < 60 && !space.complete(x); ++step) {
        for (int i = 0; i < dim; ++i) {
          auto& v = x[static_cast<std::size_t>(i)];
          v = 0.5 * (v + reference[static_cast<std::size_t>(i)]);
        }
      }
      if (!space.complete(x)) x = reference;
    }
  }
  return out;
}

struct LineResult {
  double t = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

/// Best value of the objective with every coordinate of `group` set to a common t.
LineResult line_max(const Space& space, const SearchConfig& cfg, const std::vector<double>& full,
                    std::span<const int> group) {
  auto [lo, hi] = space.range(full, group);
  auto g = [&](double t) {
    auto c = space.with_group(full, group, std::clamp(t, lo, hi));
    return c ? space.value(*c) : -std::numeric_limits<double>::infinity();
  };
  auto [t, v] = maximize_1d(g, lo, hi, cfg.grid_points, cfg.tol_coordinate);
  return {t, v};
}

/// Coordinates grouped by equal value (within 1e-9), ascending.
std::vector<std::vector<int>> tied_groups(const std::vector<double>& full, int dim) {
  std::vector<int> idx(static_cast<std::size_t>(dim));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return full[static_cast<std::size_t>(a)] < full[static_cast<std::size_t>(b)]; });
  std::vector<std::vector<int>> groups;
  for (int i : idx) {
    if (!groups.empty() && full[static_cast<std::size_t>(i)] - full[static_cast<std::size_t>(groups.back().back())] <= 1e-9) {
      groups.back().push_back(i);
    } else {
      groups.push_back({i});
    }
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  return groups;
}

StartSummary ascend(const Space& space, const SearchConfig& cfg, int start, std::vector<double> x0) {
  StartSummary s;
  s.start = start;
  s.initial = x0;
  std::vector<double> full = *space.complete(x0);
  double value = space.value(full);
  s.trajectory.push_back({0, value, full});
  const int dim = space.free_count();

  auto try_group = [&](std::span<const int> group) {
    auto best = line_max(space, cfg, full, group);
    if (best.value > value) {
      if (auto c = space.with_group(full, group, best.t)) {
        full = *c;
        value = best.value;
      }
    }
  };

  auto try_pair = [&](std::span<const int> outer, std::span<const int> inner) {
    auto [lo, hi] = space.range(full, outer);
    auto profile = [&](double t) {
      auto c = space.with_group(full, outer, std::clamp(t, lo, hi));
      return c ? line_max(space, cfg, *c, inner).value : -std::numeric_limits<double>::infinity();
    };
    auto [t, v] = maximize_1d(profile, lo, hi, cfg.grid_points, cfg.tol_coordinate);
    if (!(v > value)) return;
    auto c = space.with_group(full, outer, t);
    if (!c) return;
    auto in = line_max(space, cfg, *c, inner);
    auto c2 = space.with_group(*c, inner, in.t);
    if (c2 && in.value > value) {
      full = *c2;
      value = in.value;
    }
  };

  for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
    const double cycle_start = value;
    for (int i = 0; i < dim; ++i) {
      const int one[] = {i};
      try_group(one);
    }
    if (value - cycle_start < cfg.tol_value) {
      // Coordinate moves stall where several strategy switches meet. Move tied
      // coordinates as blocks, then pairs of blocks with a nested maximization
      // (outer block fixed, inner block re-optimized) to follow the ridge. The
      // first improving move sends us back to plain coordinate cycles.
      const double stalled = value;
      auto groups = tied_groups(full, dim);
      for (const auto& g : groups) {
        if (g.size() > 1 && value - stalled < cfg.tol_value) try_group(g);
      }
      for (std::size_t a = 0; a < groups.size() && value - stalled < cfg.tol_value; ++a) {
        for (std::size_t b = 0; b < groups.size() && value - stalled < cfg.tol_value; ++b) {
          if (a != b) try_pair(groups[a], groups[b]);
        }
      }
    }
    s.cycles = cycle;
    s.trajectory.push_back({cycle, value, full});
    if (value - cycle_start < cfg.tol_value) {
      s.converged = true;
      break;
    }
  }
  s.final_point = full;
  s.value = value;
  return s;
}

EquilibriumReport run_search(const EquilibriumProblem& problem) {
  if (!problem.tree) throw std::invalid_argument("equilibrium problem needs a tree");
  const Space space(problem);
  const auto& cfg = problem.config;
  if (cfg.starts < 1) throw std::invalid_argument("starts must be at least 1");
  auto points = initial_points(space, cfg.starts, cfg.seed);
  std::vector<StartSummary> results(points.size());
  parallel_for(points.size(), [&](std::size_t s) { results[s] = ascend(space, cfg, static_cast<int>(s), points[s]); });

  // Ordered merge: the earliest start wins ties.
  std::size_t best = 0;
  for (std::size_t s = 1; s < results.size(); ++s) {
    if (results[s].value > results[best].value) best = s;
  }
  const auto& top = results[best];
  EquilibriumReport r(FloatDistribution(problem.tree, top.final_point));
  r.value = top.value;
  r.iid_deviation = r.maximizer.iid_deviation();
  r.root_probability = r.maximizer.root_zero_probability();
  r.converged = top.converged;
  r.root_degenerate = r.root_probability < kConstraintTol || r.root_probability > 1 - kConstraintTol;
  for (std::size_t s = 0; s < results.size(); ++s) {
    if (s == best || top.value - results[s].value > 1e-9) continue;
    double diff = 0.0;
    for (std::size_t i = 0; i < top.final_point.size(); ++i) {
      diff = std::max(diff, std::abs(results[s].final_point[i] - top.final_point[i]));
    }
    if (diff > 1e-6) r.alternative_maximizers.push_back(results[s].final_point);
  }
  std::vector<Rational> exact;
  for (double q : top.final_point) {
    exact.push_back(rationalize(q, 1000000));
    r.rationalized_maximizer.push_back(format_value(exact.back()));
  }
  OptimalOptions opt = objective_options();
  r.rationalized_value =
      format_value(optimal_cost(ExactDistribution(problem.tree, std::move(exact)), problem.algorithm_class, opt).value);
  r.starts = std::move(results);
  return r;
}

}  // namespace

double objective(const EquilibriumProblem& problem, const FloatDistribution& d) {
  if (problem.root_probability) {
    const double q = d.root_zero_probability();
    if (std::abs(q - *problem.root_probability) > kConstraintTol) {
      throw ConstraintViolation("distribution has root probability " + format_value(q) + ", constraint is " +
                                format_value(*problem.root_probability));
    }
  }
  return raw_objective(problem.algorithm_class, d);
}

EquilibriumReport search_unconstrained(const EquilibriumProblem& problem) {
  if (problem.root_probability) throw std::invalid_argument("search_unconstrained: problem carries a constraint");
  return run_search(problem);
}

EquilibriumReport search_constrained(const EquilibriumProblem& problem) {
  if (!problem.root_probability) throw std::invalid_argument("search_constrained: problem has no constraint");
  return run_search(problem);
}

EquilibriumReport search(const EquilibriumProblem& problem) { return run_search(problem); }

IidLineResult iid_line_search(std::shared_ptr<const Tree> tree, AlgorithmClass algorithm_class) {
  auto g = [&](double p) { return raw_objective(algorithm_class, FloatDistribution::iid(tree, std::clamp(p, 0.0, 1.0))); };
  auto [p, v] = maximize_1d(g, 0.0, 1.0, 1001, 1e-12);
  return {p, v};
}

std::string equilibrium_report_to_json(const EquilibriumReport& r, const EquilibriumProblem& problem) {
  nlohmann::json j;
  j["tree"] = problem.tree->render();
  j["class"] = std::string(to_string(problem.algorithm_class));
  j["constraint_r"] = problem.root_probability ? nlohmann::json(*problem.root_probability) : nlohmann::json(nullptr);
  j["maximizer"] = r.maximizer.leaf_probs();
  j["value"] = r.value;
  j["iid_deviation"] = r.iid_deviation;
  j["root_probability"] = r.root_probability;
  j["converged"] = r.converged;
  j["root_degenerate"] = r.root_degenerate;
  j["alternative_maximizers"] = r.alternative_maximizers;
  j["rationalized_maximizer"] = r.rationalized_maximizer;
  j["rationalized_value"] = r.rationalized_value;
  auto& starts = j["starts"] = nlohmann::json::array();
  for (const auto& s : r.starts) {
    starts.push_back({{"start", s.start},
                      {"initial", s.initial},
                      {"final", s.final_point},
                      {"value", s.value},
                      {"cycles", s.cycles},
                      {"converged", s.converged}});
  }
  return j.dump();
}

std::string trajectories_to_csv(const EquilibriumReport& r) {
  std::ostringstream out;
  out << "start,cycle,value";
  const std::size_t n = r.maximizer.leaf_probs().size();
  for (std::size_t i = 0; i < n; ++i) out << ",q" << i;
  out << '\n';
  for (const auto& s : r.starts) {
    for (const auto& t : s.trajectory) {
      out << s.start << ',' << t.cycle << ',' << format_value(t.value);
      for (double q : t.point) out << ',' << format_value(q);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace andor
