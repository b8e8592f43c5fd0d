// Tests for the diminishing-returns attention frontier: frontier construction
// and validation, the A/B interior-value coefficients, the saddle-point policy
// ODE, the assembled value envelope, and the restricted dynamic program that
// independently checks it.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <string>

#include "attn/gamma.hpp"
#include "attn/model.hpp"
#include "attn/solution.hpp"
#include "doctest.h"

using namespace attn;

namespace {

ModelParams symmetric_params(double c, double rho = 0.0, double u_lo = 0.0) {
  ModelParams mp;
  mp.u_r_R = 1.0;
  mp.u_l_L = 1.0;
  mp.u_l_R = u_lo;
  mp.u_r_L = u_lo;
  mp.lambda = 1.0;
  mp.rho = rho;
  mp.c = c;
  return mp;
}

double identity_map(double x) { return x; }

// concave quadratic attention map: valid frontier with stencil derivatives
double quad_map(double x) { return 1.2 * x - 0.2 * x * x; }

// positive root of the degenerate-limit quadratic for the policy slope at the
// saddle, built purely from finite-difference partials of the ODE fraction
double fd_saddle_slope(const GammaFrontier& f, double rho_norm) {
  const double h = 1e-5;
  const double g = f.fixed_point;
  const auto P = [&](double p, double l) { return gamma_detail::ode_P(f, rho_norm, p, l); };
  const auto Q = [&](double p, double l) { return gamma_detail::ode_Q(f, p, l); };
  const double Pp = (P(0.5 + h, g) - P(0.5 - h, g)) / (2 * h);
  const double Pl = (P(0.5, g + h) - P(0.5, g - h)) / (2 * h);
  const double Qp = (Q(0.5 + h, g) - Q(0.5 - h, g)) / (2 * h);
  const double Ql = (Q(0.5, g + h) - Q(0.5, g - h)) / (2 * h);
  CHECK(std::fabs(Qp) <= 1e-8);  // the fraction is 0/0 with no p-linear denominator term
  // k (Qp + Ql k) = Pp + Pl k
  const double A = Ql, B = Qp - Pl, C = -Pp;
  const double disc = std::sqrt(B * B - 4 * A * C);
  const double r1 = (-B + disc) / (2 * A);
  const double r2 = (-B - disc) / (2 * A);
  return r1 > 0 ? r1 : r2;
}

double fd_value_derivative(const GammaSolution& gs, double p) {
  const double h = 1e-5;
  return (gs.value(p + h) - gs.value(p - h)) / (2 * h);
}

// residual of the flow optimality equation at a differentiability point
double hjb_residual(const GammaFrontier& f, const ModelParams& mp, const GammaSolution& gs,
                    double p) {
  const double V = gs.value(p);
  const double Vp = fd_value_derivative(gs, p);
  const double lam = gs.lambda_choice(p);
  REQUIRE(!std::isnan(lam));
  const double G = f.Gamma(lam);
  const double H = mp.lambda * lam * p * (mp.u_r_R - V) +
                   mp.lambda * G * (1 - p) * (mp.u_l_L - V) -
                   p * (1 - p) * mp.lambda * (lam - G) * Vp;
  return mp.c + mp.rho * V - H;
}

// first-order condition in the frontier multiplier at a differentiability point
double foc_residual(const GammaFrontier& f, const ModelParams& mp, const GammaSolution& gs,
                    double p) {
  const double V = gs.value(p);
  const double Vp = fd_value_derivative(gs, p);
  const double lam = gs.lambda_choice(p);
  REQUIRE(!std::isnan(lam));
  const double Gp = f.Gamma_prime(lam);
  return p * (mp.u_r_R - V) + Gp * (1 - p) * (mp.u_l_L - V) - p * (1 - p) * (1 - Gp) * Vp;
}

}  // namespace

TEST_CASE("builtin frontier: fixed point, endpoints, symmetry") {
  const GammaFrontier f = builtin_diminishing_frontier();
  const double gam = std::sqrt(2.75) - 1.0;

  CHECK(f.fixed_point == doctest::Approx(gam).epsilon(1e-14));
  CHECK(std::fabs(f.Gamma(f.fixed_point) - f.fixed_point) <= 1e-12);
  CHECK(std::fabs(f.Gamma(0.0) - 1.0) <= 1e-12);
  CHECK(std::fabs(f.Gamma(1.0)) <= 1e-12);
  CHECK(std::fabs(f.Gamma_prime(f.fixed_point) + 1.0) <= 1e-9);
  CHECK_FALSE(f.linear);

  // curvature at the fixed point has a closed form for this map
  CHECK(f.Gamma_second(f.fixed_point) ==
        doctest::Approx(-80.0 / (9.0 * std::sqrt(11.0))).epsilon(1e-10));

  // the frontier is an involution: reflecting twice returns the multiplier
  for (int i = 0; i <= 40; ++i) {
    const double lam = i / 40.0;
    CHECK(std::fabs(f.Gamma(f.Gamma(lam)) - lam) <= 1e-8);
  }
  // strictly decreasing
  for (int i = 0; i < 40; ++i) {
    CHECK(f.Gamma((i + 1) / 40.0) < f.Gamma(i / 40.0));
  }
  // closed-form inverse of the attention map round-trips
  for (int i = 0; i <= 20; ++i) {
    const double x = i / 20.0;
    CHECK(std::fabs(f.g_inv(f.g(x)) - x) <= 1e-12);
  }
}

TEST_CASE("generic frontier from a concave attention map") {
  const GammaFrontier f = gamma_from_g(quad_map);
  CHECK(f.fixed_point == doctest::Approx(quad_map(0.5)).epsilon(1e-14));
  CHECK(std::fabs(f.Gamma(f.fixed_point) - f.fixed_point) <= 1e-10);
  for (int i = 0; i <= 20; ++i) {
    const double lam = i / 20.0;
    CHECK(std::fabs(f.Gamma(f.Gamma(lam)) - lam) <= 1e-8);
  }
  CHECK_FALSE(f.linear);
  CHECK(gamma_detail::saddle_slope(f, 0.0) > 0.0);
}

TEST_CASE("stencil derivatives agree with analytic chain rule") {
  const GammaFrontier analytic = builtin_diminishing_frontier();
  const GammaFrontier stencil =
      gamma_from_g([](double x) { return std::sqrt(1.0 + 4.0 * x - x * x) - 1.0; });
  for (int i = 1; i < 20; ++i) {
    const double lam = i / 20.0;
    CHECK(std::fabs(stencil.Gamma(lam) - analytic.Gamma(lam)) <= 1e-10);
    CHECK(std::fabs(stencil.Gamma_prime(lam) - analytic.Gamma_prime(lam)) <= 1e-8);
  }
  CHECK(std::fabs(stencil.fixed_point - analytic.fixed_point) <= 1e-12);
  CHECK(std::fabs(gamma_detail::saddle_slope(stencil, 0.0) -
                  gamma_detail::saddle_slope(analytic, 0.0)) <= 1e-4);
}

TEST_CASE("frontier validation rejects bad attention maps") {
  CHECK_THROWS_WITH_AS(gamma_from_g([](double x) { return x + 0.1; }),
                       "attention map must satisfy g(0)=0 and g(1)=1", AssumptionViolated);

  try {
    gamma_from_g([](double x) { return x * x; });  // convex: bends the frontier upward
    FAIL("expected a curvature rejection");
  } catch (const AssumptionViolated& e) {
    CHECK(std::string(e.what()).find("curvature") != std::string::npos);
  }

  try {
    gamma_from_g([](double x) { return x + 0.3 * std::sin(2.0 * 3.14159265358979 * x); });
    FAIL("expected a monotonicity rejection");
  } catch (const AssumptionViolated& e) {
    CHECK(std::string(e.what()).find("strictly increasing") != std::string::npos);
  }
}

TEST_CASE("linear frontier degenerates to the two-source model") {
  const GammaFrontier f = gamma_from_g(identity_map);
  CHECK(f.linear);
  CHECK(f.fixed_point == 0.5);
  for (int i = 0; i <= 20; ++i) {
    const double lam = i / 20.0;
    CHECK(std::fabs(f.Gamma(lam) - (1.0 - lam)) <= 1e-12);
  }

  // the saddle construction needs curvature
  CHECK_THROWS_AS(gamma_detail::saddle_slope(f, 0.0), SaddleDegenerate);
  CHECK_THROWS_AS(integrate_lambda(f, symmetric_params(0.13), GammaBranchKind::OppositeFromSaddle),
                  SaddleDegenerate);

  // the envelope routes to the closed-form solution
  for (double c : {0.4, 0.13}) {
    const ModelParams mp = symmetric_params(c);
    const GammaSolution gs(f, mp);
    const Solution base(mp);
    CHECK(gs.linear_route());
    CHECK(gs.regime() == base.regime());
    for (int i = 0; i <= 100; ++i) {
      const double p = i / 100.0;
      CHECK(gs.value(p) == base.value(p));
      const auto a = base.alpha(p);
      const double lam = gs.lambda_choice(p);
      if (a) {
        CHECK(lam == *a);  // linear frontier: multiplier equals attention share
      } else {
        CHECK(std::isnan(lam));
      }
    }
    if (base.regime() == Regime::OwnAndOpposite) {
      CHECK(gs.region(base.cutoffs().p_star) == "rest");
    }
  }
}

TEST_CASE("interior-value coefficients: stationary identity and extrema") {
  const GammaFrontier f = builtin_diminishing_frontier();
  const double gam = f.fixed_point;

  // at the fixed point the identity equals the stationary value for any inputs
  for (double u : {0.6, 1.0, 1.7}) {
    for (double c : {0.05, 0.2, 0.45}) {
      for (double rn : {0.0, 0.1, 0.5}) {
        const auto [A, B] = ab_coefficients(f, gam, rn);
        CHECK(std::fabs(A * u - B * c - (gam * u - c) / (rn + gam)) <= 1e-10);
      }
    }
  }

  // no discounting: the win-payoff coefficient is identically one
  for (int i = 0; i <= 20; ++i) {
    const auto [A, B] = ab_coefficients(f, i / 20.0, 0.0);
    CHECK(std::fabs(A - 1.0) <= 1e-12);
    CHECK(B > 0.0);
  }

  // closed-form check at the full-attention corner without discounting:
  // the slope of the builtin frontier at 1 is -4, so B(1) = (1+4)/4
  {
    const auto [A1, B1] = ab_coefficients(f, 1.0, 0.0);
    CHECK(std::fabs(A1 - 1.0) <= 1e-12);
    CHECK(B1 == doctest::Approx(1.25).epsilon(1e-9));
  }

  // with discounting, A is minimal and B maximal at the fixed point
  const double rn = 0.3;
  const auto [Ag, Bg] = ab_coefficients(f, gam, rn);
  for (int i = 1; i < 40; ++i) {
    const double lam = i / 40.0;
    const auto [A, B] = ab_coefficients(f, lam, rn);
    CHECK(A >= Ag - 1e-12);
    CHECK(B <= Bg + 1e-12);
    if (std::fabs(lam - gam) > 0.1) {
      CHECK(A > Ag + 1e-6);
      CHECK(B < Bg - 1e-6);
    }
  }
  // interior extremum: first derivatives vanish at the fixed point
  const double h = 1e-5;
  const auto [Ap, Bp] = ab_coefficients(f, gam + h, rn);
  const auto [Am, Bm] = ab_coefficients(f, gam - h, rn);
  CHECK(std::fabs((Ap - Am) / (2 * h)) <= 1e-6);
  CHECK(std::fabs((Bp - Bm) / (2 * h)) <= 1e-6);

  // reflecting the multiplier across the frontier leaves both coefficients unchanged
  for (int i = 1; i < 40; ++i) {
    const double lam = i / 40.0;
    const auto [A, B] = ab_coefficients(f, lam, rn);
    const auto [Ar, Br] = ab_coefficients(f, f.Gamma(lam), rn);
    CHECK(std::fabs(A - Ar) <= 1e-10);
    CHECK(std::fabs(B - Br) <= 1e-10);
  }
}

TEST_CASE("saddle slope: closed form matches the degenerate-limit quadratic") {
  const GammaFrontier fb = builtin_diminishing_frontier();
  for (double rn : {0.0, 0.15, 0.4}) {
    const double k = gamma_detail::saddle_slope(fb, rn);
    CHECK(k > 0.0);
    CHECK(std::fabs(k - fd_saddle_slope(fb, rn)) <= 1e-8);
  }
  // stencil-derivative frontier: same identity at stencil accuracy
  const GammaFrontier fq = gamma_from_g(quad_map);
  for (double rn : {0.0, 0.4}) {
    CHECK(std::fabs(gamma_detail::saddle_slope(fq, rn) - fd_saddle_slope(fq, rn)) <= 1e-3);
  }
}

TEST_CASE("opposite policy curve from the saddle") {
  const GammaFrontier f = builtin_diminishing_frontier();
  const ModelParams mp = symmetric_params(0.4);
  const GammaPolicyPiece piece =
      integrate_lambda(f, mp, GammaBranchKind::OppositeFromSaddle);

  // passes exactly through the saddle with the analytic slope
  CHECK(piece.curve.eval(0.5) == f.fixed_point);
  const double h = 1e-6;
  const double slope = (piece.curve.eval(0.5 + h) - piece.curve.eval(0.5 - h)) / (2 * h);
  CHECK(slope == doctest::Approx(gamma_detail::saddle_slope(f, 0.0)).epsilon(1e-6));

  // reaches both corner multipliers strictly inside the belief interval,
  // symmetric about the center, covering a wide range
  CHECK(piece.hit_zero);
  CHECK(piece.hit_one);
  CHECK(piece.q_low > 0.0);
  CHECK(piece.q_high < 1.0);
  CHECK(std::fabs(piece.q_low + piece.q_high - 1.0) <= 1e-8);
  CHECK(piece.q_high - piece.q_low > 0.5);

  // strictly increasing multiplier, interior attention share in between
  double prev = piece.curve.eval(piece.q_low + 1e-6);
  for (int i = 1; i <= 30; ++i) {
    const double p = piece.q_low + 1e-6 + (piece.q_high - piece.q_low - 2e-6) * i / 30.0;
    const double lam = piece.curve.eval(p);
    CHECK(lam > prev);
    const double alpha = f.g_inv(lam);
    CHECK(alpha > 0.0);
    CHECK(alpha < 1.0);
    prev = lam;
  }

  // step-off size is immaterial
  const GammaPolicyPiece wide =
      integrate_lambda(f, mp, GammaBranchKind::OppositeFromSaddle, 1e-5);
  CHECK(std::fabs(wide.q_low - piece.q_low) <= 1e-8);
  CHECK(std::fabs(wide.q_high - piece.q_high) <= 1e-8);

  // asymmetric payoffs are rejected; a dominated learning problem is rejected
  ModelParams bad = mp;
  bad.u_l_R = 0.1;
  CHECK_THROWS_AS(integrate_lambda(f, bad, GammaBranchKind::OppositeFromSaddle), ValidationError);
  CHECK_THROWS_AS(integrate_lambda(f, symmetric_params(0.6), GammaBranchKind::OwnFromCorner),
                  ExpViolated);
}

TEST_CASE("own policy piece: corner hand-over and plateau joints") {
  const GammaFrontier f = builtin_diminishing_frontier();
  const ModelParams mp = symmetric_params(0.13);
  const GammaSolution gs(f, mp);
  const GammaPolicyPiece& own = gs.own_piece();

  REQUIRE(own.q_b.has_value());
  REQUIRE(own.q_s.has_value());
  CHECK_FALSE(own.corner_only);
  CHECK_FALSE(own.reached_center);
  CHECK(*own.q_b > gs.p_low_star());
  CHECK(*own.q_b < 0.5);
  CHECK(*own.q_s > *own.q_b);
  CHECK(*own.q_s < 0.5);

  // the curve maps multiplier -> belief over the interior segment
  CHECK(own.curve.x_front() == doctest::Approx(f.fixed_point).epsilon(1e-12));
  CHECK(own.curve.x_back() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(own.curve.eval(1.0) == doctest::Approx(*own.q_b).epsilon(1e-10));
  CHECK(own.curve.eval(f.fixed_point) == doctest::Approx(*own.q_s).epsilon(1e-10));

  // the candidate value is continuous through both joints and flat at the plateau
  CHECK(std::fabs(gs.own_candidate(*own.q_b - 1e-9) - gs.own_candidate(*own.q_b + 1e-9)) <= 1e-7);
  CHECK(std::fabs(gs.own_candidate(*own.q_s - 1e-9) - gs.own_candidate(*own.q_s + 1e-9)) <= 1e-7);
  CHECK(gs.own_candidate(0.5 * (*own.q_s + 0.5)) == doctest::Approx(gs.stationary_level()));

  // interior attention decreases toward the center along the own segment
  const double mid = 0.5 * (*own.q_b + *own.q_s);
  const double a_lo = f.g_inv(own.curve.inverse(*own.q_b + 1e-6));
  const double a_mid = f.g_inv(own.curve.inverse(mid));
  const double a_hi = f.g_inv(own.curve.inverse(*own.q_s - 1e-6));
  CHECK(a_lo > a_mid);
  CHECK(a_mid > a_hi);
}

TEST_CASE("envelope without learning: immediate payoff everywhere") {
  const GammaFrontier f = builtin_diminishing_frontier();
  const ModelParams mp = symmetric_params(0.6);  // cost above the learning threshold
  CHECK_FALSE(exp_condition(mp));
  const GammaSolution gs(f, mp);
  CHECK(gs.regime() == Regime::NoLearning);
  CHECK_FALSE(gs.mixed());
  CHECK(std::isnan(gs.p_low_star()));
  CHECK_THROWS_AS(gs.own_piece(), ValidationError);
  for (int i = 0; i <= 50; ++i) {
    const double p = i / 50.0;
    CHECK(gs.value(p) == doctest::Approx(immediate_value(mp, p)).epsilon(1e-14));
    CHECK(std::isnan(gs.lambda_choice(p)));
    CHECK(std::isnan(gs.alpha_choice(p)));
  }
  CHECK(gs.region(0.2) == "stop-l");
  CHECK(gs.region(0.8) == "stop-r");
}

TEST_CASE("envelope, own-biased case: corner policy reproduces the two-source solution") {
  const GammaFrontier f = builtin_diminishing_frontier();
  const ModelParams mp = symmetric_params(0.4);
  const GammaSolution gs(f, mp);
  const Solution base(mp);

  CHECK(gs.regime() == Regime::OwnOnly);
  CHECK_FALSE(gs.mixed());
  CHECK(gs.own_piece().corner_only);
  CHECK_THROWS_AS(gs.opp_candidate(0.5), ValidationError);
  CHECK(gs.p_low_star() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(gs.p_high_star() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(gs.value(gs.p_low_star()) == doctest::Approx(0.6).epsilon(1e-10));

  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    CHECK(gs.value(p) == doctest::Approx(base.value(p)).epsilon(1e-12));
  }
  CHECK(gs.lambda_choice(0.45) == 1.0);
  CHECK(gs.alpha_choice(0.45) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gs.lambda_choice(0.55) == 0.0);
  CHECK(gs.region(0.45) == "own-corner-left");
  CHECK(gs.region(0.55) == "own-corner-right");
  CHECK(gs.region(0.3) == "stop-l");

  // convex kink where the two corner branches cross at the center
  const double h = 1e-3;
  CHECK(gs.value(0.5 - h) + gs.value(0.5 + h) - 2 * gs.value(0.5) > 1e-7);

  // at the corner the attention gradient points outward: no interior gain
  for (double p : {0.42, 0.45, 0.48}) {
    CHECK(std::fabs(hjb_residual(f, mp, gs, p)) <= 1e-6);
    CHECK(foc_residual(f, mp, gs, p) > 0.0);
  }
  for (double p : {0.52, 0.55, 0.58}) {
    CHECK(foc_residual(f, mp, gs, p) < 0.0);
  }
}

TEST_CASE("envelope, mixed case: plateau, interior segments, monotone attention") {
  const GammaFrontier f = builtin_diminishing_frontier();
  const ModelParams mp = symmetric_params(0.13);
  const GammaSolution gs(f, mp);

  CHECK(gs.regime() == Regime::OwnAndOpposite);
  CHECK(gs.mixed());
  const double us = gs.stationary_level();
  const double gam = f.fixed_point;
  CHECK(us == doctest::Approx((gam - 0.13) / gam).epsilon(1e-12));

  // value and slope at the reference belief: stationary level, flat
  CHECK(gs.value(0.5) == us);
  CHECK(std::fabs(fd_value_derivative(gs, 0.5)) <= 1e-9);
  CHECK(gs.region(0.5) == "rest");
  CHECK(gs.lambda_choice(0.5) == gam);

  // region layout on the left half and its mirror
  CHECK(gs.region(0.05) == "stop-l");
  CHECK(gs.region(0.15) == "own-corner-left");
  CHECK(gs.region(0.3) == "opp-interior-left");
  CHECK(gs.region(0.7) == "opp-interior-right");
  CHECK(gs.region(0.85) == "own-corner-right");
  CHECK(gs.region(0.95) == "stop-r");

  // attention share rises strictly through the opposite region and mirrors
  double prev = gs.alpha_choice(0.25);
  for (int i = 1; i <= 20; ++i) {
    const double p = 0.25 + 0.5 * i / 20.0;
    const double a = gs.alpha_choice(p);
    CHECK(a > prev);
    prev = a;
  }
  for (double p : {0.2, 0.3, 0.45}) {
    CHECK(std::fabs(gs.alpha_choice(p) + gs.alpha_choice(1.0 - p) - 1.0) <= 1e-9);
    CHECK(std::fabs(gs.value(p) - gs.value(1.0 - p)) <= 1e-12);
  }

  // the interior-value identity holds along the optimal interior segments
  for (double p : {0.2, 0.3, 0.45, 0.6, 0.75}) {
    const double lam = gs.lambda_choice(p);
    CHECK(lam > 0.0);
    CHECK(lam < 1.0);
    const auto [A, B] = ab_coefficients(f, lam, mp.rho / mp.lambda);
    CHECK(std::fabs(A * mp.u_r_R - B * mp.c / mp.lambda - gs.value(p)) <= 1e-7);
    CHECK(std::fabs(hjb_residual(f, mp, gs, p)) <= 1e-6);
    CHECK(std::fabs(foc_residual(f, mp, gs, p)) <= 1e-6);
  }
  // corner regions still satisfy the flow equation with one-sided gradients
  for (double p : {0.14, 0.86}) {
    CHECK(std::fabs(hjb_residual(f, mp, gs, p)) <= 1e-6);
  }

  // experimentation value is sandwiched between the stopping payoff and the
  // hypothetical both-sources-at-full-rate benchmark
  for (int i = 1; i < 100; ++i) {
    const double p = i / 100.0;
    const double stop = immediate_value(mp, p);
    CHECK(gs.value(p) >= stop - 1e-12);
    CHECK(gs.value(p) <= std::max(stop, full_attention_value(mp, p)) + 1e-12);
    if (p > gs.p_low_star() && p < gs.p_high_star()) {
      CHECK(gs.value(p) >= us - 1e-12);
    }
  }

  // strict convexity of the opposite candidate inside its span
  const GammaPolicyPiece& opp = gs.opp_piece();
  for (int i = 1; i < 40; ++i) {
    const double p = opp.q_low + 0.01 + (opp.q_high - opp.q_low - 0.02) * i / 40.0;
    const double hh = 1e-3;
    const double d2 = gs.opp_candidate(p + hh) - 2 * gs.opp_candidate(p) + gs.opp_candidate(p - hh);
    CHECK(d2 > 0.0);
  }

  // global weak convexity of the envelope
  for (int i = 1; i < 400; ++i) {
    const double p = i / 400.0;
    const double d2 = gs.value(p + 1.0 / 400) - 2 * gs.value(p) + gs.value(p - 1.0 / 400);
    CHECK(d2 >= -1e-9);
  }

  // one-shot accessor agrees with the assembled solution
  for (double p : {0.1, 0.3, 0.5, 0.8}) {
    const GammaEnvelopePoint pt = gamma_envelope(f, mp, p);
    CHECK(pt.value == gs.value(p));
    if (std::isnan(pt.lambda)) {
      CHECK(std::isnan(gs.lambda_choice(p)));
    } else {
      CHECK(pt.lambda == gs.lambda_choice(p));
      CHECK(pt.alpha == doctest::Approx(gs.alpha_choice(p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("restricted dynamic program confirms the envelope") {
  const GammaFrontier f = builtin_diminishing_frontier();
  for (double c : {0.4, 0.13}) {
    const ModelParams mp = symmetric_params(c);
    const GammaSolution gs(f, mp);
    const GammaOracleResult orc = gamma_oracle(f, mp, 2e-3, 501, 21, 1e-8);
    double sup = 0.0;
    for (size_t i = 0; i < orc.p.size(); ++i) {
      sup = std::max(sup, std::fabs(orc.value[i] - gs.value(orc.p[i])));
    }
    CHECK(sup <= 2e-2);
  }
  // a stencil-built frontier passes the same check
  const GammaFrontier fq = gamma_from_g(quad_map);
  const ModelParams mp = symmetric_params(0.13);
  const GammaSolution gq(fq, mp);
  const GammaOracleResult orc = gamma_oracle(fq, mp, 2e-3, 501, 21, 1e-8);
  double sup = 0.0;
  for (size_t i = 0; i < orc.p.size(); ++i) {
    sup = std::max(sup, std::fabs(orc.value[i] - gq.value(orc.p[i])));
  }
  CHECK(sup <= 2e-2);

  CHECK_THROWS_WITH_AS(gamma_oracle(f, mp, 0.0, 101, 11),
                       "period length must satisfy 0 < lambda*dt < 1", ValidationError);
  CHECK_THROWS_WITH_AS(gamma_oracle(f, mp, 1.5, 101, 11),
                       "period length must satisfy 0 < lambda*dt < 1", ValidationError);
  CHECK_THROWS_WITH_AS(gamma_oracle(f, mp, 1e-3, 1, 11), "grids need at least two points",
                       ValidationError);
}

TEST_CASE("symmetry requirement and payoff sign guard") {
  const GammaFrontier f = builtin_diminishing_frontier();
  ModelParams mp = symmetric_params(0.13);
  mp.u_r_L = 0.05;  // breaks the mirror symmetry
  CHECK_THROWS_WITH_AS(GammaSolution(f, mp),
                       "frontier extension requires symmetric payoffs: u_r_R = u_l_L and "
                       "u_l_R = u_r_L >= 0",
                       ValidationError);
  ModelParams neg = symmetric_params(0.13, 0.0, -0.2);
  CHECK_THROWS_AS(GammaSolution(f, neg), ValidationError);
  // the linear route has no symmetry requirement
  const GammaFrontier lin = gamma_from_g(identity_map);
  ModelParams asym = mp;
  CHECK_NOTHROW(GammaSolution(lin, asym));
}
