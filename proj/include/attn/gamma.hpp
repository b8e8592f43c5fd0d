#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attn/branch.hpp"
#include "attn/model.hpp"
#include "attn/solution.hpp"

namespace attn {

// Attention technology with diminishing returns: splitting attention x between
// the two sources yields arrival-rate multipliers (g(x), g(1-x)), so the
// feasible rate pairs are (lam, Gamma(lam)) with Gamma(lam) = g(1 - g^{-1}(lam)).
// Multipliers are normalized to [0,1]; model-unit rates are lambda * multiplier.
struct GammaFrontier {
  std::function<double(double)> Gamma;         // [0,1] -> [0,1], extended linearly outside
  std::function<double(double)> Gamma_prime;   // < 0
  std::function<double(double)> Gamma_second;  // < 0 off the linear case
  std::function<double(double)> g;             // attention share -> own multiplier
  std::function<double(double)> g_inv;         // multiplier -> attention share
  double fixed_point = 0.5;                    // gamma with Gamma(gamma) = gamma
  bool linear = false;                         // Gamma(lam) = 1 - lam: two-source baseline
};

// Build the frontier from g (increasing, g(0)=0, g(1)=1). Inversion is by
// monotone bisection; derivatives are 5-point stencils unless g' and g'' are
// supplied, in which case the chain rule is used. Validates the frontier
// (endpoints, monotonicity, concave curvature, slope -1 at the fixed point)
// and throws AssumptionViolated naming the failed property and location.
// The exactly-linear frontier is accepted and flagged via `linear`.
GammaFrontier gamma_from_g(const std::function<double(double)>& g);
GammaFrontier gamma_from_g(const std::function<double(double)>& g,
                           const std::function<double(double)>& g_prime,
                           const std::function<double(double)>& g_second);

// The worked example: g(x) = sqrt(1 + 4x - x^2) - 1, with analytic derivatives
// and fixed point sqrt(2.75) - 1.
GammaFrontier builtin_diminishing_frontier();

// Coefficients of the interior-policy value identity V = A(lam)*u_win - B(lam)*c_norm,
// where rho_norm = rho/lambda and c_norm = c/lambda are the time-rescaled inputs.
// A is minimal and B maximal at the fixed point, where the identity equals the
// stationary value.
std::pair<double, double> ab_coefficients(const GammaFrontier& f, double lam, double rho_norm);

// Monotone cubic-Hermite curve: knots (x, y, dy/dx) with strictly monotone x
// and strictly monotone y. Used for the integrated policy curves.
class MonotoneCurve {
 public:
  void add(double x, double y, double dydx) { knots_.push_back({x, y, dydx}); }
  void reverse();  // flip knot order (integration may run in either direction)
  bool empty() const { return knots_.empty(); }
  size_t size() const { return knots_.size(); }
  double x_front() const { return knots_.front().x; }
  double x_back() const { return knots_.back().x; }
  double y_front() const { return knots_.front().y; }
  double y_back() const { return knots_.back().y; }
  double eval(double x) const;     // clamped to the knot range
  double inverse(double y) const;  // x with eval(x) = y, clamped
  struct Knot {
    double x, y, dydx;
  };
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
};

enum class GammaBranchKind { OppositeFromSaddle, OwnFromCorner };

// One integrated piece of the interior policy.
//  - OppositeFromSaddle: curve maps belief -> multiplier on [q_low, q_high],
//    started at (1/2, fixed point) with the analytic saddle slope after an
//    eps step-off; hit_zero/hit_one say whether each end reached the corner
//    multiplier (otherwise the march ran into the belief boundary).
//  - OwnFromCorner: curve maps multiplier -> belief on [fixed point, 1];
//    q_b is where the corner branch hands over to the interior policy, q_s
//    where the interior reaches the fixed point (start of the rest plateau).
//    corner_only: no interior hand-over exists; reached_center: the interior
//    segment was still above the fixed point at belief 1/2 (no plateau).
struct GammaPolicyPiece {
  GammaBranchKind kind = GammaBranchKind::OppositeFromSaddle;
  MonotoneCurve curve;
  double q_low = 0, q_high = 0;  // opposite-piece belief range
  bool hit_zero = false, hit_one = false;
  std::optional<double> q_b, q_s;  // own-piece cutoffs
  bool corner_only = false;
  bool reached_center = false;
};

// Integrate the interior-policy ODE for one branch. Requires symmetric
// payoffs. Throws SaddleDegenerate when the frontier has no curvature at the
// fixed point (e.g. the linear frontier). saddle_eps is the step-off used to
// leave the 0/0 saddle point; results must be insensitive to it.
GammaPolicyPiece integrate_lambda(const GammaFrontier& f, const ModelParams& mp,
                                  GammaBranchKind kind, double saddle_eps = 1e-6);

// Full value envelope under the frontier technology: pointwise max of
// stopping, resting at the fixed point, the own-biased candidate (corner
// branch + interior segment + rest plateau) and — when resting beats every
// own-biased continuation at belief 1/2 — the opposite-biased candidate
// integrated from the saddle. A linear frontier routes to the baseline
// closed-form solution. Symmetric payoffs with u_r_R = u_l_L > u_l_R =
// u_r_L >= 0 are required otherwise.
class GammaSolution {
 public:
  GammaSolution(const GammaFrontier& f, const ModelParams& mp);

  Regime regime() const { return regime_; }
  bool linear_route() const { return baseline_.has_value(); }
  const Solution& baseline() const { return *baseline_; }

  double value(double p) const;
  // Rate multiplier of the optimal policy; NaN where stopping is optimal.
  double lambda_choice(double p) const;
  // Attention share g^{-1}(multiplier); NaN where stopping is optimal.
  double alpha_choice(double p) const;
  // "stop-l", "own-corner-left", "own-interior-left", "rest",
  // "opp-interior-left", "opp-corner-left" and the -right mirrors.
  std::string region(double p) const;

  double p_low_star() const { return p_ls_; }
  double p_high_star() const { return p_hs_; }
  double stationary_level() const { return us_; }
  bool mixed() const { return opp_piece_.has_value(); }
  const GammaPolicyPiece& own_piece() const;
  const GammaPolicyPiece& opp_piece() const;

  // Candidate values for diagnostics (stop lines outside their domains).
  double own_candidate(double p) const;
  double opp_candidate(double p) const;  // throws unless mixed

 private:
  struct PointInfo {
    double value;
    double lambda;  // NaN = stopped
    std::string region;
  };
  PointInfo left_point(double p) const;  // p in [0, 1/2]
  double ab_value(double lam) const;

  GammaFrontier f_;
  ModelParams mp_;
  Regime regime_ = Regime::NoLearning;
  std::optional<Solution> baseline_;
  double u_win_ = 0, u_lose_ = 0, rho_norm_ = 0, c_norm_ = 0;
  double p_ls_ = 0, p_hs_ = 0, us_ = 0;
  std::optional<GammaPolicyPiece> own_piece_, opp_piece_;
  std::optional<PolicyBranch> own_corner_, opp_corner_lo_, opp_corner_hi_;
};

struct GammaEnvelopePoint {
  double value;
  double lambda;  // NaN where stopped
  double alpha;   // NaN where stopped
};
// One-shot evaluation (constructs a GammaSolution internally; prefer the
// class when evaluating on a grid).
GammaEnvelopePoint gamma_envelope(const GammaFrontier& f, const ModelParams& mp, double p);

// Discrete-time dynamic program restricted to frontier experiments
// (lam_j, Gamma(lam_j)) on a uniform multiplier grid; independent check of the
// envelope. Stopping is exact; experimentation costs c*dt upfront and news
// arrives with per-step probability rate*dt.
struct GammaOracleResult {
  double dt;
  std::vector<double> p;
  std::vector<double> value;
  int sweeps = 0;
};
GammaOracleResult gamma_oracle(const GammaFrontier& f, const ModelParams& mp, double dt,
                               int grid_n = 2001, int lambda_n = 51, double tol = 1e-9);

namespace gamma_detail {
// Interior-policy ODE d(lam)/dp = P/Q written as separate numerator and
// denominator (both vanish at the saddle (1/2, fixed point)).
double ode_P(const GammaFrontier& f, double rho_norm, double p, double lam);
double ode_Q(const GammaFrontier& f, double p, double lam);
// Closed-form initial slope of the opposite policy at the saddle.
double saddle_slope(const GammaFrontier& f, double rho_norm);
}  // namespace gamma_detail

}  // namespace attn
