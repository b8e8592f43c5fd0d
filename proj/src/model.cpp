#include "attn/model.hpp"

#include <algorithm>
#include <cmath>

namespace attn {

std::string to_string(Action a) { return a == Action::TakeR ? "r" : "l"; }

std::string to_string(Regime r) {
  switch (r) {
    case Regime::NoLearning: return "NoLearning";
    case Regime::OwnOnly: return "OwnOnly";
    case Regime::OwnAndOpposite: return "OwnAndOpposite";
  }
  return "?";
}

std::vector<std::string> validate_params(const ModelParams& mp) {
  std::vector<std::string> v;
  if (!(mp.u_r_R > std::max(0.0, mp.u_l_R))) v.push_back("u_r_R > max(0, u_l_R)");
  if (!(mp.u_l_L > std::max(0.0, mp.u_r_L))) v.push_back("u_l_L > max(0, u_r_L)");
  // With the two payoff conditions above neither action can dominate; keep the
  // check independent so a violation is reported even if those fail first.
  const bool r_dominates = mp.u_r_R >= mp.u_l_R && mp.u_r_L >= mp.u_l_L;
  const bool l_dominates = mp.u_l_R >= mp.u_r_R && mp.u_l_L >= mp.u_r_L;
  if (r_dominates || l_dominates) v.push_back("no dominant action");
  if (!(mp.lambda > 0)) v.push_back("lambda > 0");
  if (!(mp.rho >= 0)) v.push_back("rho >= 0");
  if (!(mp.c >= 0)) v.push_back("c >= 0");
  if (!(mp.rho + mp.c > 0)) v.push_back("rho + c > 0");
  return v;
}

void require_valid(const ModelParams& mp) {
  auto v = validate_params(mp);
  if (v.empty()) return;
  std::string msg = "invalid parameters:";
  for (const auto& s : v) msg += " [" + s + "]";
  throw ValidationError(msg);
}

double indifference_belief(const ModelParams& mp) {
  // U_l(p_hat) = U_r(p_hat)
  return (mp.u_l_L - mp.u_r_L) / ((mp.u_r_R - mp.u_l_R) + (mp.u_l_L - mp.u_r_L));
}

ImmediatePayoffs immediate_payoffs(const ModelParams& mp, double p) {
  ImmediatePayoffs out;
  out.U_l = p * mp.u_l_R + (1 - p) * mp.u_l_L;
  out.U_r = p * mp.u_r_R + (1 - p) * mp.u_r_L;
  out.U = std::max(out.U_l, out.U_r);
  out.x_star = (out.U_r >= out.U_l) ? Action::TakeR : Action::TakeL;
  out.p_hat = indifference_belief(mp);
  return out;
}

double immediate_value(const ModelParams& mp, double p) {
  return std::max(p * mp.u_l_R + (1 - p) * mp.u_l_L, p * mp.u_r_R + (1 - p) * mp.u_r_L);
}

double stationary_value(const ModelParams& mp, double p) {
  const double flow = mp.lambda * (p * mp.u_r_R + (1 - p) * mp.u_l_L);
  return (flow - 2 * mp.c) / (2 * mp.rho + mp.lambda);
}

double full_attention_value(const ModelParams& mp, double p) {
  const double flow = mp.lambda * (p * mp.u_r_R + (1 - p) * mp.u_l_L);
  return (flow - mp.c) / (mp.rho + mp.lambda);
}

bool exp_condition(const ModelParams& mp) {
  const double ph = indifference_belief(mp);
  return full_attention_value(mp, ph) > immediate_value(mp, ph);
}

Benchmarks benchmark_values(const ModelParams& mp, double p) {
  return {stationary_value(mp, p), full_attention_value(mp, p), exp_condition(mp)};
}

namespace detail {

double c_bar_bounded(const ModelParams& mp, double am) {
  const double dR = mp.u_r_R - mp.u_l_R;
  const double dL = mp.u_l_L - mp.u_r_L;
  const double num = mp.lambda * am * dR * dL - mp.rho * (mp.u_r_R * mp.u_l_L - mp.u_l_R * mp.u_r_L);
  return std::max(0.0, num / (dR + dL));
}

double c_underbar_bounded(const ModelParams& mp, double am) {
  const double cb = c_bar_bounded(mp, am);
  if (cb <= 0) return 0.0;
  const double dR = mp.u_r_R - mp.u_l_R;
  const double dL = mp.u_l_L - mp.u_r_L;
  double denom;  // 1 + (growth of the own-branch odds over the opposite dwell)
  if (mp.rho == 0 && am == 1.0) {
    denom = 1 + std::exp(2.0);
  } else {
    const double base = (2 * mp.rho + mp.lambda) / ((2 * am - 1) * mp.lambda);
    const double expo = (2 * am - 1) / ((1 - am) + mp.rho / mp.lambda);
    denom = 1 + std::pow(base, expo);
  }
  const double t1 = (mp.rho + mp.lambda * am) * dR / denom - mp.rho * mp.u_r_R;
  const double t2 = (mp.rho + mp.lambda * am) * dL / denom - mp.rho * mp.u_l_L;
  return std::max(0.0, std::min(cb, std::min(t1, t2)));
}

double p_low_star_bounded(const ModelParams& mp, double am) {
  return (mp.u_l_L * mp.rho + mp.c) /
         (mp.rho * (mp.u_l_L - mp.u_l_R) + (mp.u_r_R - mp.u_l_R) * mp.lambda * am);
}

double p_high_star_bounded(const ModelParams& mp, double am) {
  const double dL = mp.u_l_L - mp.u_r_L;
  return (dL * mp.lambda * am - mp.u_r_L * mp.rho - mp.c) /
         (mp.rho * (mp.u_r_R - mp.u_r_L) + dL * mp.lambda * am);
}

}  // namespace detail

CutoffCosts regime_cutoffs(const ModelParams& mp) {
  CutoffCosts out;
  out.c_bar = detail::c_bar_bounded(mp, 1.0);
  out.c_underbar = detail::c_underbar_bounded(mp, 1.0);
  if (mp.c >= out.c_bar) {
    out.regime = Regime::NoLearning;
  } else if (mp.c >= out.c_underbar) {
    out.regime = Regime::OwnOnly;
  } else {
    out.regime = Regime::OwnAndOpposite;
  }
  return out;
}

BoundaryBeliefs boundary_beliefs(const ModelParams& mp) {
  if (!exp_condition(mp)) {
    throw ExpViolated("immediate action dominates all learning; no experimentation boundaries");
  }
  BoundaryBeliefs out;
  out.p_low_star = detail::p_low_star_bounded(mp, 1.0);
  out.p_high_star = detail::p_high_star_bounded(mp, 1.0);
  out.p_star = (mp.u_l_L * mp.rho + mp.c) /
               ((mp.u_r_R * mp.rho + mp.c) + (mp.u_l_L * mp.rho + mp.c));
  return out;
}

}  // namespace attn
