#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "attn/model.hpp"
#include "attn/solution.hpp"
#include "attn/variants.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace attn;

namespace {

ModelParams example_regimes(double c) {
  ModelParams mp;
  mp.u_r_R = 1.0;
  mp.u_l_L = 0.8;
  mp.u_l_R = -1.0;
  mp.u_r_L = -0.8;
  mp.lambda = 1.0;
  mp.rho = 0.0;
  mp.c = c;
  return mp;
}

ModelParams symmetric_unit(double c) {
  ModelParams mp;
  mp.u_r_R = 1.0;
  mp.u_l_L = 1.0;
  mp.u_l_R = -1.0;
  mp.u_r_L = -1.0;
  mp.lambda = 1.0;
  mp.rho = 0.0;
  mp.c = c;
  return mp;
}

std::vector<double> boundary_list(const VariantSolution& vs) {
  std::vector<double> out;
  for (const auto& s : vs.segments()) out.push_back(s.hi);
  out.pop_back();  // drop the closing 1.0
  return out;
}

}  // namespace

TEST_CASE("attention bounds are validated") {
  const ModelParams mp = example_regimes(0.3);
  CHECK_THROWS_AS(nonexclusive_solution(mp, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(nonexclusive_solution(mp, {0.6, 0.4}), ValidationError);
  CHECK_THROWS_AS(nonexclusive_solution(mp, {0.05, 1.0}), ValidationError);
  CHECK_THROWS_AS(nonexclusive_solution(mp, {-0.2, 1.2}), ValidationError);
  CHECK_NOTHROW(nonexclusive_solution(mp, {0.2, 0.8}));
  CHECK_NOTHROW(nonexclusive_solution(mp, {0.0, 1.0}));
}

TEST_CASE("full bandwidth reproduces the baseline solution") {
  for (double c : {0.3, 0.13}) {
    const ModelParams mp = example_regimes(c);
    const Solution base = solve_model(mp);
    const VariantSolution vs = nonexclusive_solution(mp, {0.0, 1.0});
    CHECK(vs.regime() == base.regime());
    CHECK(vs.cutoffs().p_low_star ==
          doctest::Approx(base.cutoffs().p_low_star).epsilon(1e-14));
    CHECK(vs.cutoffs().p_high_star ==
          doctest::Approx(base.cutoffs().p_high_star).epsilon(1e-14));
    CHECK(vs.cutoffs().p_star == doctest::Approx(base.cutoffs().p_star).epsilon(1e-14));
    if (base.cutoffs().p_check) {
      REQUIRE(vs.cutoffs().p_check.has_value());
      CHECK(std::fabs(*vs.cutoffs().p_check - *base.cutoffs().p_check) <= 1e-10);
    }
    if (base.cutoffs().p_low) {
      REQUIRE(vs.cutoffs().p_low.has_value());
      CHECK(std::fabs(*vs.cutoffs().p_low - *base.cutoffs().p_low) <= 1e-10);
      CHECK(std::fabs(*vs.cutoffs().p_high - *base.cutoffs().p_high) <= 1e-10);
    }
    for (int i = 0; i <= 100; ++i) {
      const double p = i / 100.0;
      CHECK(std::fabs(vs.value(p) - base.value(p)) <= 1e-12);
      CHECK(vs.alpha(p).has_value() == base.alpha(p).has_value());
    }
  }
}

TEST_CASE("narrower bounds shrink learning and lower the value") {
  const ModelParams mp = example_regimes(0.3);
  const Solution base = solve_model(mp);
  double prev_cbar = regime_cutoffs(mp).c_bar;
  double prev_cund = regime_cutoffs(mp).c_underbar;
  double prev_pls = base.cutoffs().p_low_star;
  double prev_phs = base.cutoffs().p_high_star;
  std::vector<double> prev_vals(101);
  for (int i = 0; i <= 100; ++i) prev_vals[i] = base.value(i / 100.0);

  for (double am : {0.9, 0.8, 0.7}) {
    CHECK(detail::c_bar_bounded(mp, am) < prev_cbar);
    CHECK(detail::c_underbar_bounded(mp, am) > prev_cund);
    prev_cbar = detail::c_bar_bounded(mp, am);
    prev_cund = detail::c_underbar_bounded(mp, am);
    const VariantSolution vs = nonexclusive_solution(mp, {1.0 - am, am});
    if (vs.regime() != Regime::NoLearning) {
      CHECK(vs.cutoffs().p_low_star > prev_pls);
      CHECK(vs.cutoffs().p_high_star < prev_phs);
      prev_pls = vs.cutoffs().p_low_star;
      prev_phs = vs.cutoffs().p_high_star;
    }
    for (int i = 0; i <= 100; ++i) {
      const double v = vs.value(i / 100.0);
      CHECK(v <= prev_vals[i] + 1e-12);
      prev_vals[i] = v;
    }
  }
}

TEST_CASE("bounded-attention policy uses the bounds as its corners") {
  const ModelParams mp = example_regimes(0.13);
  const double am = 0.85;
  const VariantSolution vs = nonexclusive_solution(mp, {1.0 - am, am});
  REQUIRE(vs.regime() == Regime::OwnAndOpposite);
  CHECK(vs.alpha_hi() == am);
  CHECK(vs.alpha_lo() == 1.0 - am);
  const auto& c = vs.cutoffs();
  // The crossing belief does not move with the bounds (rest is unaffected).
  CHECK(c.p_star == doctest::Approx(solve_model(mp).cutoffs().p_star).epsilon(1e-14));
  CHECK(vs.alpha(0.5 * (c.p_low_star + *c.p_low)) == am);
  CHECK(vs.alpha(0.5 * (*c.p_low + c.p_star)) == 1.0 - am);
  CHECK(vs.alpha(c.p_star) == 0.5);
  CHECK(vs.alpha(0.5 * (c.p_star + *c.p_high)) == am);
  CHECK(vs.alpha(0.5 * (*c.p_high + c.p_high_star)) == 1.0 - am);
  CHECK(!vs.alpha(c.p_low_star / 2).has_value());
  // Stationary line matches the shared benchmark.
  for (double p : {0.2, 0.5, 0.8}) {
    CHECK(vs.stationary_value_at(p) == doctest::Approx(stationary_value(mp, p)).epsilon(1e-14));
  }
}

TEST_CASE("asymmetric rates are validated") {
  const ModelParams mp = symmetric_unit(0.1);
  CHECK_THROWS_AS(asymmetric_solution(mp, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(asymmetric_solution(mp, {1.0, -0.5}), ValidationError);
  CHECK_NOTHROW(asymmetric_solution(mp, {1.0, 0.6}));
}

TEST_CASE("equal rates reproduce the baseline solution") {
  for (double c : {0.3, 0.13}) {
    const ModelParams mp = example_regimes(c);
    const Solution base = solve_model(mp);
    const VariantSolution vs = asymmetric_solution(mp, {mp.lambda, mp.lambda});
    CHECK(vs.regime() == base.regime());
    CHECK(std::fabs(vs.cutoffs().p_low_star - base.cutoffs().p_low_star) <= 1e-12);
    CHECK(std::fabs(vs.cutoffs().p_high_star - base.cutoffs().p_high_star) <= 1e-12);
    CHECK(std::fabs(vs.cutoffs().p_star - base.cutoffs().p_star) <= 1e-12);
    CHECK(vs.alpha_rest() == 0.5);
    for (int i = 0; i <= 100; ++i) {
      const double p = i / 100.0;
      CHECK(std::fabs(vs.value(p) - base.value(p)) <= 1e-9);
    }
  }
}

TEST_CASE("asymmetric crossing belief has the closed rate-weighted form") {
  const ModelParams mp = symmetric_unit(0.1);
  for (double ll : {0.9, 0.7, 0.5}) {
    const VariantSolution vs = asymmetric_solution(mp, {1.0, ll});
    if (vs.regime() != Regime::OwnAndOpposite) continue;
    // rho = 0: p* = lambda_L / (lambda_R + lambda_L).
    CHECK(std::fabs(vs.cutoffs().p_star - ll / (1.0 + ll)) <= 1e-14);
    CHECK(vs.alpha_rest() == doctest::Approx(ll / (1.0 + ll)).epsilon(1e-14));
  }
}

TEST_CASE("small rate gaps converge to the symmetric solution") {
  const ModelParams mp = example_regimes(0.13);
  const Solution base = solve_model(mp);
  double prev_sup = 1e300;
  for (double gap : {1e-2, 1e-3}) {
    const VariantSolution vs = asymmetric_solution(mp, {mp.lambda, mp.lambda * (1.0 - gap)});
    double sup = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double p = i / 200.0;
      sup = std::max(sup, std::fabs(vs.value(p) - base.value(p)));
    }
    CHECK(sup < prev_sup);
    CHECK(sup <= 5.0 * gap);
    prev_sup = sup;
  }
}

TEST_CASE("slow L-evidence can erase the upper own-biased region") {
  // With lambda_L well below lambda_R there is a cost band where listening
  // for L-evidence never pays: the own-left branch spans the interior and
  // exits directly through the r-stop line at q_bar.
  const ModelParams base = symmetric_unit(0.1);
  const AsymRates rates{1.0, 0.6};
  bool found_degenerate = false;
  for (double c = 0.05; c <= 0.8; c += 0.025) {
    ModelParams mp = base;
    mp.c = c;
    const VariantSolution vs = asymmetric_solution(mp, rates);
    const auto& cc = vs.cutoffs();
    if (vs.regime() == Regime::OwnOnly && cc.q_bar.has_value()) {
      found_degenerate = true;
      CHECK(std::isnan(cc.p_high_star));
      REQUIRE(vs.segments().size() == 3);
      CHECK(vs.segments()[1].kind == BranchKind::OwnLeft);
      // Value pastes onto the r-stop line at q_bar.
      const double qb = *cc.q_bar;
      const double stop_line = mp.u_r_L + qb * (mp.u_r_R - mp.u_r_L);
      CHECK(std::fabs(vs.value(qb) - stop_line) <= 1e-9);
      CHECK(vs.alpha(0.5 * (cc.p_low_star + qb)) == 1.0);
    }
  }
  CHECK(found_degenerate);
}

TEST_CASE("asymmetric solutions stay continuous and dominate stopping") {
  const ModelParams mp = symmetric_unit(0.12);
  for (double lr : {1.0, 1.3}) {
    for (double ll : {0.4, 0.8, 1.2}) {
      const VariantSolution vs = asymmetric_solution(mp, {lr, ll});
      // Segments tile [0, 1] in order.
      const auto& segs = vs.segments();
      REQUIRE(!segs.empty());
      CHECK(segs.front().lo == 0.0);
      CHECK(segs.back().hi == 1.0);
      for (std::size_t i = 1; i < segs.size(); ++i) {
        CHECK(segs[i].lo == segs[i - 1].hi);
      }
      // Value is continuous at every internal boundary and >= stopping.
      for (double b : boundary_list(vs)) {
        const double eps = 1e-7;
        CHECK(std::fabs(vs.value(b - eps) - vs.value(b + eps)) <= 1e-5);
      }
      for (int i = 0; i <= 100; ++i) {
        const double p = i / 100.0;
        CHECK(vs.value(p) >= immediate_value(mp, p) - 1e-10);
      }
    }
  }
}

TEST_CASE("middle-action stopping boundaries: closed forms and sentinels") {
  // Safe action with zero payoffs, rho = 0: q1 = c/(lambda u_r_R) and
  // q2 = (lambda u_l_L - c)/(lambda u_l_L).
  const ModelParams mp = symmetric_unit(0.1);
  const auto mc = m_strategy_cutoffs(mp, {0.0, 0.0});
  REQUIRE(mc.q1.has_value());
  REQUIRE(mc.q2.has_value());
  CHECK(*mc.q1 == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(*mc.q2 == doctest::Approx(0.9).epsilon(1e-14));
  // The stationary benchmark dominates the middle line here, so the
  // immediate-m region is empty (sentinel boundaries).
  CHECK(mc.p_m_low == 0.0);
  CHECK(mc.p_m_high == 1.0);

  // A rich middle action opens an interior immediate-m region.
  const ModelParams mo = symmetric_unit(0.35);
  const auto rich = m_strategy_cutoffs(mo, {0.5, 0.5});
  REQUIRE(rich.q1.has_value());
  REQUIRE(rich.q2.has_value());
  CHECK(*rich.q1 == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(*rich.q2 == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rich.p_m_high == *rich.q1);
  CHECK(rich.p_m_low == *rich.q2);
  CHECK(rich.p_m_low <= rich.p_m_high);

  // u_m_R above the r-ward certainty value: no upper pasting root.
  const auto high = m_strategy_cutoffs(mp, {0.95, 0.2});
  CHECK(!high.q1.has_value());
  CHECK(high.p_m_high == 1.0);

  // Invalid orderings are rejected outright.
  CHECK_THROWS_AS(m_strategy_cutoffs(mp, {1.5, 0.0}), OrderingViolation);
  CHECK_THROWS_AS(m_strategy_cutoffs(mp, {0.0, 1.5}), OrderingViolation);
}

TEST_CASE("multi-action envelope: baseline recovery and dominated middles") {
  const ModelParams mp = symmetric_unit(0.1);
  const Solution base = solve_model(mp);
  for (int i = 0; i <= 50; ++i) {
    const double p = i / 50.0;
    const auto none = multi_action_envelope(mp, {}, p);
    CHECK(none.value == base.value(p));
    // A buried middle action changes nothing.
    const auto buried = multi_action_envelope(mp, {{-0.5, -0.5}}, p);
    CHECK(buried.value == base.value(p));
    CHECK(buried.choice == none.choice);
    CHECK(buried.choice.find("m1") == std::string::npos);
  }
  // Baseline labels pass through.
  CHECK(multi_action_envelope(mp, {}, 0.0).choice == "l");
  CHECK(multi_action_envelope(mp, {}, 1.0).choice == "r");
  CHECK(multi_action_envelope(mp, {}, base.cutoffs().p_star).choice == "rest");
}

TEST_CASE("multi-action envelope stitches the middle strategy into the policy map") {
  const ModelParams mp = symmetric_unit(0.3);
  const MiddleAction m{0.55, 0.55};
  const Solution base = solve_model(mp);
  const auto mc = m_strategy_cutoffs(mp, m);
  REQUIRE(mc.p_m_low > 0.0);
  REQUIRE(mc.p_m_high < 1.0);

  // The envelope equals the pointwise max of baseline and middle strategy.
  bool saw_m = false;
  std::string prev_choice;
  std::vector<std::string> order;
  for (int i = 0; i <= 400; ++i) {
    const double p = i / 400.0;
    const auto ep = multi_action_envelope(mp, {m}, p);
    CHECK(ep.value >= base.value(p) - 1e-12);
    if (p > mc.p_m_low && p < mc.p_m_high) {
      const double line = m.u_m_L + p * (m.u_m_R - m.u_m_L);
      CHECK(ep.value >= line - 1e-12);
      if (ep.choice == "m1") {
        saw_m = true;
        CHECK(ep.value == line);
      }
    }
    if (ep.choice != prev_choice) {
      order.push_back(ep.choice);
      prev_choice = ep.choice;
    }
  }
  CHECK(saw_m);

  // The sweep of choices follows the canonical ordering (some regions may be
  // empty): l, own-left, m-left leg, m, m-right leg, own-right, r.
  const std::vector<std::string> canon = {"l",  "own-left", "m1-left", "m1",
                                          "m1-right", "own-right", "r"};
  std::size_t pos = 0;
  for (const auto& ch : order) {
    while (pos < canon.size() && canon[pos] != ch) ++pos;
    CHECK(pos < canon.size());
  }
}

TEST_CASE("middle-action ordering violations name the offenders") {
  const ModelParams mp = symmetric_unit(0.1);
  try {
    multi_action_envelope(mp, {{2.0, 0.0}}, 0.5);
    FAIL("expected OrderingViolation");
  } catch (const OrderingViolation& e) {
    CHECK(std::string(e.what()).find("middle action 1") != std::string::npos);
  }
  try {
    multi_action_envelope(mp, {{0.5, 0.5}, {0.6, 0.6}}, 0.5);
    FAIL("expected OrderingViolation");
  } catch (const OrderingViolation& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
  // Equal payoffs in state R cannot be ordered either.
  CHECK_THROWS_AS(multi_action_envelope(mp, {{0.5, 0.3}, {0.5, 0.2}}, 0.5), OrderingViolation);
}
