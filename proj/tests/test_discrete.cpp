#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <vector>

#include "attn/discrete.hpp"
#include "attn/model.hpp"
#include "attn/solution.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace attn;

namespace {

ModelParams symmetric_unit(double c, double lambda = 1.0) {
  ModelParams mp;
  mp.u_r_R = 1.0;
  mp.u_l_L = 1.0;
  mp.u_l_R = -1.0;
  mp.u_r_L = -1.0;
  mp.lambda = lambda;
  mp.rho = 0.0;
  mp.c = c;
  return mp;
}

}  // namespace

TEST_CASE("signal posteriors: closed form, martingale, and conclusive corners") {
  const double lambda = 0.85, dt = 1.0;
  for (double p : {0.1, 0.3, 0.5, 0.8}) {
    for (double a : {0.9, 0.95, 1.0}) {
      const Experiment e{a, 1.0 + lambda * dt - a, dt};
      const auto q = experiment_posteriors(p, e, lambda);
      // Bayes closed forms on the frontier.
      const double denom_R = p * lambda * dt + (1.0 - a);
      CHECK(q.q_R == doctest::Approx(p * (lambda * dt + 1.0 - a) / denom_R).epsilon(1e-14));
      CHECK(q.q_L == doctest::Approx(p * (a - lambda * dt) / (a - p * lambda * dt)).epsilon(1e-13));
      // Martingale: posterior averages back to the prior.
      CHECK(std::fabs(q.prob_R * q.q_R + q.prob_L * q.q_L - p) <= 1e-12);
      CHECK(q.prob_R + q.prob_L == doctest::Approx(1.0).epsilon(1e-14));
    }
    // a = 1: the R-leaning signal is conclusive.
    const auto top = experiment_posteriors(p, {1.0, lambda * dt, dt}, lambda);
    CHECK(top.q_R == doctest::Approx(1.0).epsilon(1e-14));
    // a = lambda dt: the L-leaning signal is conclusive.
    const auto bot = experiment_posteriors(p, {lambda * dt, 1.0, dt}, lambda);
    CHECK(bot.q_L == doctest::Approx(0.0).epsilon(1e-14));
  }

  // Infeasible experiments and zero-probability signals are rejected.
  CHECK_THROWS_AS(experiment_posteriors(0.5, {0.5, 0.4, 1.0}, 0.85), ValidationError);
  CHECK_THROWS_AS(experiment_posteriors(0.5, {1.0, 1.0, 1.0}, 0.85), ValidationError);
  CHECK_THROWS_AS(experiment_posteriors(0.0, {1.0, 0.85, 1.0}, 0.85), DegenerateSignal);
  CHECK_THROWS_AS(experiment_posteriors(1.0, {0.85, 1.0, 1.0}, 0.85), DegenerateSignal);
}

TEST_CASE("solver construction validates the period length") {
  const ModelParams mp = symmetric_unit(0.125, 0.85);
  CHECK_THROWS_AS(DiscreteSolver(mp, 0.0), ValidationError);
  CHECK_THROWS_AS(DiscreteSolver(mp, 2.0), ValidationError);  // lambda dt = 1.7 >= 1
  CHECK_NOTHROW(DiscreteSolver(mp, 1.0));
}

TEST_CASE("one backup dominates stopping and is monotone in the input") {
  const ModelParams mp = symmetric_unit(0.125, 0.85);
  const DiscreteSolver solver(mp, 1.0, 401, 81);
  const auto& grid = solver.grid();
  std::vector<double> stop(grid.size()), out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) stop[i] = immediate_value(mp, grid[i]);

  solver.backup(stop, out, nullptr);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(out[i] >= stop[i] - 1e-12);

  // Monotonicity: raising the continuation cannot lower the backup.
  std::vector<double> higher(stop), out2(grid.size());
  for (auto& v : higher) v += 0.05;
  solver.backup(higher, out2, nullptr);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(out2[i] >= out[i] - 1e-12);
}

TEST_CASE("single-period problem: every experimenting prior uses the own-biased corner") {
  const ModelParams mp = symmetric_unit(0.125, 0.85);
  const DiscreteSolver solver(mp, 1.0, 801, 101);
  const auto ds = solver.solve_finite(1);
  const double p_hat = indifference_belief(mp);
  int experimenting = 0;
  for (std::size_t i = 0; i < ds.p.size(); ++i) {
    if (choice_is_stop(ds.choice[i])) continue;
    ++experimenting;
    if (std::fabs(ds.p[i] - p_hat) <= 1e-9) continue;  // symmetric tie at the center
    if (ds.p[i] < p_hat) {
      CHECK(ds.choice[i] == solver.n_actions() - 1);  // a = 1: conclusive R-news
    } else {
      CHECK(ds.choice[i] == 0);  // a = lambda dt: conclusive L-news
    }
  }
  CHECK(experimenting > 0);
}

TEST_CASE("two-period thresholds bracket the known switching beliefs") {
  const ModelParams mp = symmetric_unit(0.125, 0.85);
  const DiscreteSolver solver(mp, 1.0, 2001, 201);
  const auto ds = solver.solve_finite(2);

  // Experimentation band and the own/opposite split left of the center.
  const double p_hat = indifference_belief(mp);
  double exp_lo = 1.0, exp_hi = 0.0;
  double own_left_hi = 0.0, opp_left_lo = 1.0;
  for (std::size_t i = 0; i < ds.p.size(); ++i) {
    const double p = ds.p[i];
    if (choice_is_stop(ds.choice[i])) continue;
    exp_lo = std::min(exp_lo, p);
    exp_hi = std::max(exp_hi, p);
    if (p < p_hat - 1e-9) {
      if (ds.choice[i] == solver.n_actions() - 1) own_left_hi = std::max(own_left_hi, p);
      if (ds.choice[i] == 0) opp_left_lo = std::min(opp_left_lo, p);
    }
  }
  CHECK(std::fabs(exp_lo - 0.07) <= 0.01);
  CHECK(std::fabs(exp_hi - 0.93) <= 0.01);
  CHECK(std::fabs(own_left_hi - 0.27) <= 0.01);
  CHECK(opp_left_lo > own_left_hi);
  CHECK(std::fabs(opp_left_lo - 0.27) <= 0.02);
}

TEST_CASE("corner experiments dominate for convex continuations only") {
  const ModelParams mp = symmetric_unit(0.125, 0.85);

  // Convex continuation: the immediate-payoff envelope.
  const auto convex = [&](double q) { return immediate_value(mp, q); };
  for (double p : {0.2, 0.4, 0.6, 0.8}) {
    const auto cd = corner_dominance_check(mp, 1.0, convex, p);
    CHECK(cd.dominated);
    CHECK(cd.best_interior <= cd.best_corner + 1e-10);
  }

  // Strictly concave continuation: an interior experiment strictly wins.
  const auto concave = [](double q) { return 1.0 - 4.0 * (q - 0.5) * (q - 0.5); };
  bool interior_wins_somewhere = false;
  for (double p : {0.35, 0.5, 0.65}) {
    const auto cd = corner_dominance_check(mp, 1.0, concave, p);
    if (cd.best_interior > cd.best_corner + 1e-6) interior_wins_somewhere = true;
  }
  CHECK(interior_wins_somewhere);

  // The scan agrees with direct objective evaluation at the corners.
  const double p = 0.4;
  const double lamdt = 0.85;
  const double at_top = experiment_objective(mp, {1.0, lamdt, 1.0}, convex, p);
  const double at_bot = experiment_objective(mp, {lamdt, 1.0, 1.0}, convex, p);
  const auto cd = corner_dominance_check(mp, 1.0, convex, p);
  CHECK(cd.best_corner == doctest::Approx(std::max(at_top, at_bot)).epsilon(1e-12));
}

TEST_CASE("below-frontier experiments are never strictly better") {
  // Any experiment with a + b < 1 + lambda dt is a garbling of a frontier
  // experiment; with the convex value envelope as continuation it cannot
  // strictly beat the frontier action with the same a.
  const ModelParams mp = symmetric_unit(0.1);
  const Solution sol = solve_model(mp);
  const auto cont = [&](double q) { return sol.value(q); };
  const double dt = 0.05;
  for (double p : {0.3, 0.5, 0.7}) {
    for (double a : {0.97, 0.99}) {
      const double b_frontier = 1.0 + mp.lambda * dt - a;
      const double on = experiment_objective(mp, {a, b_frontier, dt}, cont, p);
      for (double shave : {0.01, 0.03}) {
        const double off = experiment_objective(mp, {a, b_frontier - shave, dt}, cont, p);
        CHECK(off <= on + 1e-10);
      }
    }
  }
}

TEST_CASE("infinite-horizon grid values converge to the closed-form envelope") {
  const ModelParams mp = symmetric_unit(0.1);
  const Solution sol = solve_model(mp);
  const DiscreteSolver solver(mp, 1e-3, 2001, 201);
  const auto ds = solver.solve_infinite();
  CHECK(ds.sweeps > 0);
  double sup = 0.0;
  for (std::size_t i = 0; i < ds.p.size(); ++i) {
    sup = std::max(sup, std::fabs(ds.value[i] - sol.value(ds.p[i])));
  }
  CHECK(sup <= 1e-2);

  // Discrete values inherit convexity (up to interpolation noise).
  for (std::size_t i = 1; i + 1 < ds.p.size(); ++i) {
    CHECK(ds.value[i + 1] - 2 * ds.value[i] + ds.value[i - 1] >= -1e-10);
  }

  // Policy corners: stop regions match the closed-form thresholds to a
  // couple of grid cells.
  const double cell = ds.p[1] - ds.p[0];
  const auto& c = sol.cutoffs();
  double first_exp = 1.0, last_exp = 0.0;
  for (std::size_t i = 0; i < ds.p.size(); ++i) {
    if (!choice_is_stop(ds.choice[i])) {
      first_exp = std::min(first_exp, ds.p[i]);
      last_exp = std::max(last_exp, ds.p[i]);
    }
  }
  CHECK(std::fabs(first_exp - c.p_low_star) <= 2 * cell + 1e-12);
  CHECK(std::fabs(last_exp - c.p_high_star) <= 2 * cell + 1e-12);
}
