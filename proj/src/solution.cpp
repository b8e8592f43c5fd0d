#include "attn/solution.hpp"

#include <cmath>
#include <limits>

namespace attn {

namespace {

constexpr double kRootTol = 1e-12;

// Plain bisection: robust, and the existence results guarantee a bracket.
template <typename F>
double bisect(F&& f, double lo, double hi, const char* what) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw BracketingFailure(std::string("no sign change for ") + what);
  }
  while (hi - lo > kRootTol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string to_string(BranchKind k) {
  switch (k) {
    case BranchKind::OwnLeft: return "OwnLeft";
    case BranchKind::OwnRight: return "OwnRight";
    case BranchKind::OppLeft: return "OppLeft";
    case BranchKind::OppRight: return "OppRight";
    case BranchKind::StopL: return "StopL";
    case BranchKind::StopR: return "StopR";
  }
  return "?";
}

Solution::Solution(const ModelParams& mp) : params_(mp) {
  require_valid(mp);
  const auto cc = regime_cutoffs(mp);
  regime_ = cc.regime;
  cutoffs_.c_bar = cc.c_bar;
  cutoffs_.c_underbar = cc.c_underbar;
  cutoffs_.p_hat = indifference_belief(mp);

  if (regime_ == Regime::NoLearning) {
    cutoffs_.p_low_star = cutoffs_.p_high_star = cutoffs_.p_star = kNaN;
    segments_ = {{0.0, cutoffs_.p_hat, BranchKind::StopL},
                 {cutoffs_.p_hat, 1.0, BranchKind::StopR}};
    return;
  }

  const auto bb = boundary_beliefs(mp);
  cutoffs_.p_low_star = bb.p_low_star;
  cutoffs_.p_high_star = bb.p_high_star;
  cutoffs_.p_star = bb.p_star;

  const double Ul_ls = params_.u_l_L + bb.p_low_star * (params_.u_l_R - params_.u_l_L);
  const double Ur_hs = params_.u_r_L + bb.p_high_star * (params_.u_r_R - params_.u_r_L);
  const BranchSpec own_up{params_.lambda, 0, params_.u_r_R, params_.u_l_L, params_.rho, params_.c};
  const BranchSpec own_dn{0, params_.lambda, params_.u_r_R, params_.u_l_L, params_.rho, params_.c};
  own_left_ = PolicyBranch::fit(own_up, bb.p_low_star, Ul_ls);
  own_right_ = PolicyBranch::fit(own_dn, bb.p_high_star, Ur_hs);
  const double us_star = stationary_value(params_, bb.p_star);
  opp_left_ = PolicyBranch::fit(own_dn, bb.p_star, us_star);
  opp_right_ = PolicyBranch::fit(own_up, bb.p_star, us_star);

  if (regime_ == Regime::OwnOnly) {
    const double pc = bisect(
        [&](double p) { return own_left_->value(p) - own_right_->value(p); },
        bb.p_low_star, bb.p_high_star, "own-left/own-right switch");
    cutoffs_.p_check = pc;
    segments_ = {{0.0, bb.p_low_star, BranchKind::StopL},
                 {bb.p_low_star, pc, BranchKind::OwnLeft},
                 {pc, bb.p_high_star, BranchKind::OwnRight},
                 {bb.p_high_star, 1.0, BranchKind::StopR}};
    return;
  }

  const double pl = bisect(
      [&](double p) { return own_left_->value(p) - opp_left_->value(p); },
      bb.p_low_star, bb.p_star, "own/opposite lower switch");
  const double ph = bisect(
      [&](double p) { return own_right_->value(p) - opp_right_->value(p); },
      bb.p_star, bb.p_high_star, "own/opposite upper switch");
  cutoffs_.p_low = pl;
  cutoffs_.p_high = ph;
  segments_ = {{0.0, bb.p_low_star, BranchKind::StopL},
               {bb.p_low_star, pl, BranchKind::OwnLeft},
               {pl, bb.p_star, BranchKind::OppLeft},
               {bb.p_star, ph, BranchKind::OppRight},
               {ph, bb.p_high_star, BranchKind::OwnRight},
               {bb.p_high_star, 1.0, BranchKind::StopR}};
}

bool Solution::has_branch(BranchKind k) const {
  switch (k) {
    case BranchKind::StopL:
    case BranchKind::StopR:
      return true;
    case BranchKind::OwnLeft:
      return own_left_.has_value();
    case BranchKind::OwnRight:
      return own_right_.has_value();
    case BranchKind::OppLeft:
      return opp_left_.has_value();
    case BranchKind::OppRight:
      return opp_right_.has_value();
  }
  return false;
}

const PolicyBranch& Solution::branch_ref(BranchKind k) const {
  const std::optional<PolicyBranch>* b = nullptr;
  switch (k) {
    case BranchKind::OwnLeft: b = &own_left_; break;
    case BranchKind::OwnRight: b = &own_right_; break;
    case BranchKind::OppLeft: b = &opp_left_; break;
    case BranchKind::OppRight: b = &opp_right_; break;
    default: break;
  }
  if (!b || !b->has_value()) {
    throw UndefinedBranch(to_string(k) + " is not defined for these parameters");
  }
  return **b;
}

BranchValue Solution::branch_value(BranchKind k, double p) const {
  // Stop lines use the same arithmetic as immediate_payoffs so the envelope
  // equals the immediate payoff bit-for-bit on the stopping regions.
  if (k == BranchKind::StopL) {
    return {p * params_.u_l_R + (1 - p) * params_.u_l_L, params_.u_l_R - params_.u_l_L};
  }
  if (k == BranchKind::StopR) {
    return {p * params_.u_r_R + (1 - p) * params_.u_r_L, params_.u_r_R - params_.u_r_L};
  }
  const PolicyBranch& b = branch_ref(k);
  return {b.value(p), b.deriv(p)};
}

BranchKind Solution::branch_at(double p) const {
  const auto& co = cutoffs_;
  if (regime_ == Regime::NoLearning) {
    return p < co.p_hat ? BranchKind::StopL : BranchKind::StopR;
  }
  if (p <= co.p_low_star) return BranchKind::StopL;
  if (p >= co.p_high_star) return BranchKind::StopR;
  if (regime_ == Regime::OwnOnly) {
    return p < *co.p_check ? BranchKind::OwnLeft : BranchKind::OwnRight;
  }
  if (p < *co.p_low) return BranchKind::OwnLeft;
  if (p <= co.p_star) return BranchKind::OppLeft;
  if (p <= *co.p_high) return BranchKind::OppRight;
  return BranchKind::OwnRight;
}

double Solution::value(double p) const {
  const BranchKind k = branch_at(p);
  return branch_value(k, p).value;
}

std::pair<double, double> Solution::deriv_pair(double p) const {
  const auto& co = cutoffs_;
  // interior switch beliefs carry genuine kinks
  if (regime_ == Regime::OwnOnly && co.p_check && p == *co.p_check) {
    return {own_left_->deriv(p), own_right_->deriv(p)};
  }
  if (regime_ == Regime::OwnAndOpposite) {
    if (co.p_low && p == *co.p_low) return {own_left_->deriv(p), opp_left_->deriv(p)};
    if (co.p_high && p == *co.p_high) return {opp_right_->deriv(p), own_right_->deriv(p)};
  }
  if (regime_ == Regime::NoLearning && p == co.p_hat) {
    const double dl = params_.u_l_R - params_.u_l_L;
    const double dr = params_.u_r_R - params_.u_r_L;
    return {dl, dr};
  }
  const double d = branch_value(branch_at(p), p).derivative;
  return {d, d};
}

double Solution::deriv(double p) const { return deriv_pair(p).first; }

std::optional<double> Solution::alpha(double p) const {
  const auto& co = cutoffs_;
  if (regime_ == Regime::NoLearning) return std::nullopt;
  if (p <= co.p_low_star || p >= co.p_high_star) return std::nullopt;
  if (regime_ == Regime::OwnOnly) {
    return p < *co.p_check ? 1.0 : 0.0;
  }
  if (p == co.p_star) return 0.5;
  switch (branch_at(p)) {
    case BranchKind::OwnLeft:
    case BranchKind::OppRight:
      return 1.0;
    default:
      return 0.0;
  }
}

Solution solve_model(const ModelParams& mp) { return Solution(mp); }

BranchValue branch_value(const ModelParams& mp, BranchKind k, double p) {
  return Solution(mp).branch_value(k, p);
}

double value_envelope(const ModelParams& mp, double p) { return Solution(mp).value(p); }

std::optional<double> optimal_alpha(const ModelParams& mp, double p) {
  return Solution(mp).alpha(p);
}

SwitchPoints solve_switch_points(const ModelParams& mp) {
  const Solution sol(mp);
  // All fields stay empty in the NoLearning regime, matching cutoffs().
  return {sol.cutoffs().p_check, sol.cutoffs().p_low, sol.cutoffs().p_high};
}

HjbDiagnostics hjb_diagnostics(const Solution& sol, double p) {
  const auto& co = sol.cutoffs();
  const auto is = [&](const std::optional<double>& q) { return q && p == *q; };
  if (is(co.p_check) || is(co.p_low) || is(co.p_high)) {
    throw KinkPoint("value envelope is kinked here; use kink_check");
  }
  const ModelParams& mp = sol.params();
  const double V = sol.value(p);
  const double dV = sol.deriv(p);
  const double U = immediate_value(mp, p);
  const double US = stationary_value(mp, p);

  // F_a at the envelope point for the two corner policies.
  const double F1 = mp.lambda * p * (mp.u_r_R - V) - mp.lambda * p * (1 - p) * dV;
  const double F0 = mp.lambda * (1 - p) * (mp.u_l_L - V) + mp.lambda * p * (1 - p) * dV;
  const double Fmax = std::max(F0, F1);

  HjbDiagnostics out;
  out.residual = std::fabs(std::max(-mp.c - mp.rho * V + Fmax, U - V));

  // Derivative-gap identity: the two branch ODEs, solved for V' at the same
  // (p, V), differ by (lambda + 2 rho)/(lambda p (1-p)) * (V - U_S).
  const double denom = mp.lambda * p * (1 - p);
  const double d0 = (mp.c + mp.rho * V - mp.lambda * (1 - p) * (mp.u_l_L - V)) / denom;
  const double d1 = (mp.lambda * p * (mp.u_r_R - V) - mp.c - mp.rho * V) / denom;
  out.crossing_gap = (d0 - d1) - (mp.lambda + 2 * mp.rho) / denom * (V - US);

  out.dF_dalpha = F1 - F0;
  const BranchKind k = sol.branch_at(p);
  const double scale = 2 * mp.rho + mp.lambda;
  switch (k) {
    case BranchKind::OwnRight:
    case BranchKind::OppLeft:
      out.dF_dalpha_gap = out.dF_dalpha - scale * (US - V);
      break;
    case BranchKind::OwnLeft:
    case BranchKind::OppRight:
      out.dF_dalpha_gap = out.dF_dalpha - scale * (V - US);
      break;
    default:
      out.dF_dalpha_gap = 0;
  }

  out.smooth_paste_gap = 0;
  if (sol.regime() != Regime::NoLearning) {
    if (p == co.p_low_star) {
      out.smooth_paste_gap = std::fabs(sol.branch_value(BranchKind::OwnLeft, p).derivative -
                                       (mp.u_l_R - mp.u_l_L));
    } else if (p == co.p_high_star) {
      out.smooth_paste_gap = std::fabs(sol.branch_value(BranchKind::OwnRight, p).derivative -
                                       (mp.u_r_R - mp.u_r_L));
    } else if (sol.regime() == Regime::OwnAndOpposite && p == co.p_star) {
      const double us_slope = mp.lambda * (mp.u_r_R - mp.u_l_L) / (2 * mp.rho + mp.lambda);
      const double gl = std::fabs(sol.branch_value(BranchKind::OppLeft, p).derivative - us_slope);
      const double gr = std::fabs(sol.branch_value(BranchKind::OppRight, p).derivative - us_slope);
      out.smooth_paste_gap = std::max(gl, gr);
    }
  }
  return out;
}

KinkCheck kink_check(const Solution& sol, double p) {
  const auto [l, r] = sol.deriv_pair(p);
  return {l, r, l <= r};
}

PastingGaps pasting_gaps(const Solution& sol) {
  PastingGaps out{kNaN, kNaN, kNaN, kNaN};
  if (sol.regime() == Regime::NoLearning) return out;
  const ModelParams& mp = sol.params();
  const auto& co = sol.cutoffs();
  out.low_star = std::fabs(sol.branch_value(BranchKind::OwnLeft, co.p_low_star).derivative -
                           (mp.u_l_R - mp.u_l_L));
  out.high_star = std::fabs(sol.branch_value(BranchKind::OwnRight, co.p_high_star).derivative -
                            (mp.u_r_R - mp.u_r_L));
  if (sol.regime() == Regime::OwnAndOpposite) {
    const double us_slope = mp.lambda * (mp.u_r_R - mp.u_l_L) / (2 * mp.rho + mp.lambda);
    out.star_left = std::fabs(sol.branch_value(BranchKind::OppLeft, co.p_star).derivative - us_slope);
    out.star_right =
        std::fabs(sol.branch_value(BranchKind::OppRight, co.p_star).derivative - us_slope);
  }
  return out;
}

}  // namespace attn
