#include "attn/variants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace attn {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEdge = 1e-9;  // open-interval guard for transversal crossings

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

double line_U_l(const ModelParams& mp, double p) {
  return mp.u_l_L + p * (mp.u_l_R - mp.u_l_L);
}
double line_U_r(const ModelParams& mp, double p) {
  return mp.u_r_L + p * (mp.u_r_R - mp.u_r_L);
}

void check_bounds(const AttentionBounds& b) {
  // alpha_max = 1 is accepted as the degenerate case that collapses to the
  // baseline technology.
  const bool sym = std::fabs(b.alpha_min - (1.0 - b.alpha_max)) <= 1e-12;
  if (!(b.alpha_max > 0.5) || !(b.alpha_max <= 1.0) || !sym || !(b.alpha_min >= 0.0)) {
    throw ValidationError(
        "attention bounds must satisfy alpha_min = 1 - alpha_max and 1/2 < alpha_max <= 1");
  }
}

void check_rates(const AsymRates& r) {
  if (!(r.lambda_R > 0) || !(r.lambda_L > 0) || !std::isfinite(r.lambda_R) ||
      !std::isfinite(r.lambda_L)) {
    throw ValidationError("arrival rates must be positive and finite");
  }
}

void check_middle(const ModelParams& mp, const MiddleAction& m, int index) {
  const bool ok_r = m.u_m_R > mp.u_l_R && m.u_m_R < mp.u_r_R;
  const bool ok_l = m.u_m_L < mp.u_l_L;
  if (ok_r && ok_l) return;
  throw OrderingViolation("middle action " + std::to_string(index + 1) +
                          " violates the payoff ordering: requires u_l_R < u_m_R < u_r_R "
                          "and u_m_L < u_l_L");
}

}  // namespace

BranchKind VariantSolution::kind_at(double p) const {
  const auto& co = cutoffs_;
  if (regime_ == Regime::NoLearning) {
    return p < co.p_hat ? BranchKind::StopL : BranchKind::StopR;
  }
  const double lo_edge = std::isnan(co.p_low_star) ? *co.q_low : co.p_low_star;
  const double hi_edge = std::isnan(co.p_high_star) ? *co.q_bar : co.p_high_star;
  if (p <= lo_edge) return BranchKind::StopL;
  if (p >= hi_edge) return BranchKind::StopR;
  if (regime_ == Regime::OwnOnly) {
    if (co.p_check) return p < *co.p_check ? BranchKind::OwnLeft : BranchKind::OwnRight;
    // one-sided structure: a single own-biased branch spans the interior
    return co.q_bar ? BranchKind::OwnLeft : BranchKind::OwnRight;
  }
  if (p <= co.p_star) {
    if (co.p_low && p < *co.p_low) return BranchKind::OwnLeft;
    return BranchKind::OppLeft;
  }
  if (co.p_high) return p <= *co.p_high ? BranchKind::OppRight : BranchKind::OwnRight;
  return BranchKind::OppRight;
}

double VariantSolution::value(double p) const {
  switch (const BranchKind k = kind_at(p); k) {
    case BranchKind::StopL:
      return line_U_l(mp_, p);
    case BranchKind::StopR:
      return line_U_r(mp_, p);
    default:
      return branches_.at(k).value(p);
  }
}

std::optional<double> VariantSolution::alpha(double p) const {
  if (regime_ == Regime::NoLearning) return std::nullopt;
  if (regime_ == Regime::OwnAndOpposite && p == cutoffs_.p_star) return alpha_rest_;
  switch (kind_at(p)) {
    case BranchKind::StopL:
    case BranchKind::StopR:
      return std::nullopt;
    case BranchKind::OwnLeft:
    case BranchKind::OppRight:
      return alpha_hi_;
    default:
      return alpha_lo_;
  }
}

VariantSolution nonexclusive_solution(const ModelParams& mp, const AttentionBounds& bounds) {
  require_valid(mp);
  check_bounds(bounds);
  const double am = bounds.alpha_max;

  VariantSolution vs;
  vs.mp_ = mp;
  vs.alpha_hi_ = am;
  vs.alpha_lo_ = 1.0 - am;
  vs.alpha_rest_ = 0.5;
  vs.cutoffs_.p_hat = indifference_belief(mp);
  vs.cutoffs_.c_bar = detail::c_bar_bounded(mp, am);
  vs.cutoffs_.c_underbar = detail::c_underbar_bounded(mp, am);
  // the half/half rest policy is unaffected by the bounds
  vs.us0_ = (mp.lambda * mp.u_l_L - 2 * mp.c) / (2 * mp.rho + mp.lambda);
  vs.us1_ = mp.lambda * (mp.u_r_R - mp.u_l_L) / (2 * mp.rho + mp.lambda);

  if (mp.c >= vs.cutoffs_.c_bar) {
    vs.regime_ = Regime::NoLearning;
    vs.cutoffs_.p_low_star = vs.cutoffs_.p_high_star = vs.cutoffs_.p_star = kNaN;
    vs.segments_ = {{0.0, vs.cutoffs_.p_hat, BranchKind::StopL},
                    {vs.cutoffs_.p_hat, 1.0, BranchKind::StopR}};
    return vs;
  }

  const double p_ls = detail::p_low_star_bounded(mp, am);
  const double p_hs = detail::p_high_star_bounded(mp, am);
  const double p_star = (mp.u_l_L * mp.rho + mp.c) /
                        ((mp.u_r_R * mp.rho + mp.c) + (mp.u_l_L * mp.rho + mp.c));
  vs.cutoffs_.p_low_star = p_ls;
  vs.cutoffs_.p_high_star = p_hs;
  vs.cutoffs_.p_star = p_star;

  const BranchSpec hi{mp.lambda * am, mp.lambda * (1.0 - am), mp.u_r_R, mp.u_l_L, mp.rho, mp.c};
  const BranchSpec lo{mp.lambda * (1.0 - am), mp.lambda * am, mp.u_r_R, mp.u_l_L, mp.rho, mp.c};
  const PolicyBranch own_lo = PolicyBranch::fit(hi, p_ls, line_U_l(mp, p_ls));
  const PolicyBranch own_hi = PolicyBranch::fit(lo, p_hs, line_U_r(mp, p_hs));
  vs.branches_.emplace(BranchKind::OwnLeft, own_lo);
  vs.branches_.emplace(BranchKind::OwnRight, own_hi);

  if (mp.c >= vs.cutoffs_.c_underbar) {
    vs.regime_ = Regime::OwnOnly;
    const double pc = bisect([&](double p) { return own_lo.value(p) - own_hi.value(p); }, p_ls,
                             p_hs, "own-left/own-right switch");
    vs.cutoffs_.p_check = pc;
    vs.segments_ = {{0.0, p_ls, BranchKind::StopL},
                    {p_ls, pc, BranchKind::OwnLeft},
                    {pc, p_hs, BranchKind::OwnRight},
                    {p_hs, 1.0, BranchKind::StopR}};
    return vs;
  }

  vs.regime_ = Regime::OwnAndOpposite;
  const double us_star = stationary_value(mp, p_star);
  const PolicyBranch opp_lo = PolicyBranch::fit(lo, p_star, us_star);
  const PolicyBranch opp_hi = PolicyBranch::fit(hi, p_star, us_star);
  vs.branches_.emplace(BranchKind::OppLeft, opp_lo);
  vs.branches_.emplace(BranchKind::OppRight, opp_hi);
  const double pl = bisect([&](double p) { return own_lo.value(p) - opp_lo.value(p); }, p_ls,
                           p_star, "own/opposite lower switch");
  const double ph = bisect([&](double p) { return own_hi.value(p) - opp_hi.value(p); }, p_star,
                           p_hs, "own/opposite upper switch");
  vs.cutoffs_.p_low = pl;
  vs.cutoffs_.p_high = ph;
  vs.segments_ = {{0.0, p_ls, BranchKind::StopL},
                  {p_ls, pl, BranchKind::OwnLeft},
                  {pl, p_star, BranchKind::OppLeft},
                  {p_star, ph, BranchKind::OppRight},
                  {ph, p_hs, BranchKind::OwnRight},
                  {p_hs, 1.0, BranchKind::StopR}};
  return vs;
}

VariantSolution asymmetric_solution(const ModelParams& mp, const AsymRates& rates) {
  require_valid(mp);
  check_rates(rates);
  const double lr = rates.lambda_R;
  const double ll = rates.lambda_L;
  const double dR = mp.u_r_R - mp.u_l_R;
  const double dL = mp.u_l_L - mp.u_r_L;

  VariantSolution vs;
  vs.mp_ = mp;
  vs.alpha_hi_ = 1.0;
  vs.alpha_lo_ = 0.0;
  vs.alpha_rest_ = ll / (lr + ll);
  vs.cutoffs_.p_hat = indifference_belief(mp);
  vs.cutoffs_.c_bar = vs.cutoffs_.c_underbar = kNaN;  // no closed form here

  // effective arrival rate of the rest policy (both news types equally likely)
  const double h = lr * ll / (lr + ll);
  vs.us0_ = (h * mp.u_l_L - mp.c) / (mp.rho + h);
  vs.us1_ = h * (mp.u_r_R - mp.u_l_L) / (mp.rho + h);

  const double p_ls =
      (mp.u_l_L * mp.rho + mp.c) / (mp.rho * (mp.u_l_L - mp.u_l_R) + dR * lr);
  const double p_hs =
      (dL * ll - mp.u_r_L * mp.rho - mp.c) / (mp.rho * (mp.u_r_R - mp.u_r_L) + dL * ll);
  const bool exp_r = p_ls < vs.cutoffs_.p_hat;  // R-evidence learning pays near p_hat
  const bool exp_l = p_hs > vs.cutoffs_.p_hat;  // L-evidence learning pays near p_hat

  if (!exp_r && !exp_l) {
    vs.regime_ = Regime::NoLearning;
    vs.cutoffs_.p_low_star = vs.cutoffs_.p_high_star = vs.cutoffs_.p_star = kNaN;
    vs.segments_ = {{0.0, vs.cutoffs_.p_hat, BranchKind::StopL},
                    {vs.cutoffs_.p_hat, 1.0, BranchKind::StopR}};
    return vs;
  }

  const BranchSpec hi{lr, 0.0, mp.u_r_R, mp.u_l_L, mp.rho, mp.c};
  const BranchSpec lo{0.0, ll, mp.u_r_R, mp.u_l_L, mp.rho, mp.c};
  std::optional<PolicyBranch> own_lo, own_hi;
  if (exp_r) own_lo = PolicyBranch::fit(hi, p_ls, line_U_l(mp, p_ls));
  if (exp_l) own_hi = PolicyBranch::fit(lo, p_hs, line_U_r(mp, p_hs));

  const double a = mp.u_l_L * mp.rho + mp.c;
  const double b = mp.u_r_R * mp.rho + mp.c;
  const double p_star = a * ll / (b * lr + a * ll);
  const double us_star =
      (h * (p_star * mp.u_r_R + (1 - p_star) * mp.u_l_L) - mp.c) / (mp.rho + h);

  double best_alt = immediate_value(mp, p_star);
  if (own_lo) best_alt = std::max(best_alt, own_lo->value(p_star));
  if (own_hi) best_alt = std::max(best_alt, own_hi->value(p_star));
  const bool mixed = us_star > best_alt;

  if (!mixed) {
    vs.regime_ = Regime::OwnOnly;
    vs.cutoffs_.p_low_star = vs.cutoffs_.p_high_star = vs.cutoffs_.p_star = kNaN;
    bool upper_one_sided = !exp_l;
    bool lower_one_sided = !exp_r;
    if (exp_r && exp_l) {
      // a branch that still beats the opposite stop line at the far boundary
      // has no interior crossing with the other branch
      upper_one_sided = own_lo->value(p_hs) > line_U_r(mp, p_hs);
      lower_one_sided = own_hi->value(p_ls) > line_U_l(mp, p_ls);
      if (upper_one_sided && lower_one_sided) {
        throw NumericalError("inconsistent one-sided dominance in the asymmetric structure");
      }
    }
    if (upper_one_sided) {
      vs.cutoffs_.p_low_star = p_ls;
      vs.branches_.emplace(BranchKind::OwnLeft, *own_lo);
      const double qb = bisect([&](double p) { return own_lo->value(p) - line_U_r(mp, p); },
                               p_ls, 1.0 - kEdge, "upper own/stop crossing");
      vs.cutoffs_.q_bar = qb;
      vs.segments_ = {{0.0, p_ls, BranchKind::StopL},
                      {p_ls, qb, BranchKind::OwnLeft},
                      {qb, 1.0, BranchKind::StopR}};
    } else if (lower_one_sided) {
      vs.cutoffs_.p_high_star = p_hs;
      vs.branches_.emplace(BranchKind::OwnRight, *own_hi);
      const double ql = bisect([&](double p) { return own_hi->value(p) - line_U_l(mp, p); },
                               kEdge, p_hs, "lower own/stop crossing");
      vs.cutoffs_.q_low = ql;
      vs.segments_ = {{0.0, ql, BranchKind::StopL},
                      {ql, p_hs, BranchKind::OwnRight},
                      {p_hs, 1.0, BranchKind::StopR}};
    } else {
      vs.cutoffs_.p_low_star = p_ls;
      vs.cutoffs_.p_high_star = p_hs;
      vs.branches_.emplace(BranchKind::OwnLeft, *own_lo);
      vs.branches_.emplace(BranchKind::OwnRight, *own_hi);
      const double pc = bisect([&](double p) { return own_lo->value(p) - own_hi->value(p); },
                               p_ls, p_hs, "own-left/own-right switch");
      vs.cutoffs_.p_check = pc;
      vs.segments_ = {{0.0, p_ls, BranchKind::StopL},
                      {p_ls, pc, BranchKind::OwnLeft},
                      {pc, p_hs, BranchKind::OwnRight},
                      {p_hs, 1.0, BranchKind::StopR}};
    }
    return vs;
  }

  vs.regime_ = Regime::OwnAndOpposite;
  vs.cutoffs_.p_star = p_star;
  vs.cutoffs_.p_low_star = vs.cutoffs_.p_high_star = kNaN;
  const PolicyBranch opp_lo = PolicyBranch::fit(lo, p_star, us_star);
  const PolicyBranch opp_hi = PolicyBranch::fit(hi, p_star, us_star);
  vs.branches_.emplace(BranchKind::OppLeft, opp_lo);
  vs.branches_.emplace(BranchKind::OppRight, opp_hi);

  std::vector<Segment> lower, upper;
  if (exp_r && opp_lo.value(p_ls) < line_U_l(mp, p_ls)) {
    vs.cutoffs_.p_low_star = p_ls;
    vs.branches_.emplace(BranchKind::OwnLeft, *own_lo);
    const double pl = bisect([&](double p) { return own_lo->value(p) - opp_lo.value(p); }, p_ls,
                             p_star, "own/opposite lower switch");
    vs.cutoffs_.p_low = pl;
    lower = {{0.0, p_ls, BranchKind::StopL},
             {p_ls, pl, BranchKind::OwnLeft},
             {pl, p_star, BranchKind::OppLeft}};
  } else {
    const double ql = bisect([&](double p) { return opp_lo.value(p) - line_U_l(mp, p); }, kEdge,
                             p_star, "lower opposite/stop crossing");
    vs.cutoffs_.q_low = ql;
    lower = {{0.0, ql, BranchKind::StopL}, {ql, p_star, BranchKind::OppLeft}};
  }
  if (exp_l && opp_hi.value(p_hs) < line_U_r(mp, p_hs)) {
    vs.cutoffs_.p_high_star = p_hs;
    vs.branches_.emplace(BranchKind::OwnRight, *own_hi);
    const double ph = bisect([&](double p) { return own_hi->value(p) - opp_hi.value(p); },
                             p_star, p_hs, "own/opposite upper switch");
    vs.cutoffs_.p_high = ph;
    upper = {{p_star, ph, BranchKind::OppRight},
             {ph, p_hs, BranchKind::OwnRight},
             {p_hs, 1.0, BranchKind::StopR}};
  } else {
    const double qb = bisect([&](double p) { return opp_hi.value(p) - line_U_r(mp, p); }, p_star,
                             1.0 - kEdge, "upper opposite/stop crossing");
    vs.cutoffs_.q_bar = qb;
    upper = {{p_star, qb, BranchKind::OppRight}, {qb, 1.0, BranchKind::StopR}};
  }
  vs.segments_ = lower;
  vs.segments_.insert(vs.segments_.end(), upper.begin(), upper.end());
  return vs;
}

MCutoffs m_strategy_cutoffs(const ModelParams& mp, const MiddleAction& m) {
  require_valid(mp);
  check_middle(mp, m, 0);
  MCutoffs out;
  const double ufa1 = (mp.lambda * mp.u_r_R - mp.c) / (mp.rho + mp.lambda);
  const double ufa0 = (mp.lambda * mp.u_l_L - mp.c) / (mp.rho + mp.lambda);
  const auto u_m = [&](double p) { return m.u_m_L + p * (m.u_m_R - m.u_m_L); };

  if (m.u_m_R < ufa1 && mp.c + mp.rho * m.u_m_L > 0) {
    const double q1 = (m.u_m_L * mp.rho + mp.c) /
                      (mp.rho * (m.u_m_L - m.u_m_R) + (mp.u_r_R - m.u_m_R) * mp.lambda);
    if (q1 > 0 && q1 < 1) out.q1 = q1;
  }
  out.p_m_high = (out.q1 && u_m(*out.q1) >= stationary_value(mp, *out.q1)) ? *out.q1 : 1.0;

  if (m.u_m_L < ufa0 && mp.c + mp.rho * m.u_m_R > 0) {
    const double q2 = ((mp.u_l_L - m.u_m_L) * mp.lambda - m.u_m_L * mp.rho - mp.c) /
                      (mp.rho * (m.u_m_R - m.u_m_L) + (mp.u_l_L - m.u_m_L) * mp.lambda);
    if (q2 > 0 && q2 < 1) out.q2 = q2;
  }
  out.p_m_low = (out.q2 && u_m(*out.q2) >= stationary_value(mp, *out.q2)) ? *out.q2 : 0.0;
  return out;
}

EnvelopePoint multi_action_envelope(const ModelParams& mp,
                                    const std::vector<MiddleAction>& middles, double p) {
  require_valid(mp);
  for (size_t i = 0; i < middles.size(); ++i) check_middle(mp, middles[i], int(i));
  // pairwise consistency: sorted by payoff in state R, the payoff in state L
  // must strictly fall, else one middle action dominates another
  std::vector<size_t> order(middles.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t i, size_t j) { return middles[i].u_m_R < middles[j].u_m_R; });
  for (size_t k = 1; k < order.size(); ++k) {
    const MiddleAction& a = middles[order[k - 1]];
    const MiddleAction& b = middles[order[k]];
    if (!(b.u_m_R > a.u_m_R) || !(b.u_m_L < a.u_m_L)) {
      throw OrderingViolation("middle actions " + std::to_string(order[k - 1] + 1) + " and " +
                              std::to_string(order[k] + 1) +
                              " are not ordered: u_m_R must rise while u_m_L falls");
    }
  }

  const Solution base(mp);
  EnvelopePoint out;
  out.value = base.value(p);
  if (base.regime() == Regime::OwnAndOpposite && p == base.cutoffs().p_star) {
    out.choice = "rest";
  } else {
    switch (base.branch_at(p)) {
      case BranchKind::StopL: out.choice = "l"; break;
      case BranchKind::StopR: out.choice = "r"; break;
      case BranchKind::OwnLeft: out.choice = "own-left"; break;
      case BranchKind::OwnRight: out.choice = "own-right"; break;
      case BranchKind::OppLeft: out.choice = "opp-left"; break;
      case BranchKind::OppRight: out.choice = "opp-right"; break;
    }
  }

  for (size_t i = 0; i < middles.size(); ++i) {
    const MiddleAction& m = middles[i];
    const MCutoffs mc = m_strategy_cutoffs(mp, m);
    const auto u_m = [&](double q) { return m.u_m_L + q * (m.u_m_R - m.u_m_L); };
    double vm;
    std::string tag = "m" + std::to_string(i + 1);
    if (p < mc.p_m_low) {
      // seek L-evidence and drift up into the immediate-m region
      const BranchSpec leg{0.0, mp.lambda, mp.u_r_R, mp.u_l_L, mp.rho, mp.c};
      vm = PolicyBranch::fit(leg, mc.p_m_low, u_m(mc.p_m_low)).value(p);
      tag += "-left";
    } else if (p > mc.p_m_high) {
      // seek R-evidence and drift down into the immediate-m region
      const BranchSpec leg{mp.lambda, 0.0, mp.u_r_R, mp.u_l_L, mp.rho, mp.c};
      vm = PolicyBranch::fit(leg, mc.p_m_high, u_m(mc.p_m_high)).value(p);
      tag += "-right";
    } else {
      vm = u_m(p);
    }
    if (vm > out.value) {
      out.value = vm;
      out.choice = tag;
    }
  }
  return out;
}

}  // namespace attn
