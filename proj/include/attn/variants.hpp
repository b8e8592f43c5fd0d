#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attn/branch.hpp"
#include "attn/model.hpp"
#include "attn/solution.hpp"

namespace attn {

// Interior attention bounds: feasible attention is [alpha_min, alpha_max].
// Only the symmetric case alpha_min = 1 - alpha_max is supported.
struct AttentionBounds {
  double alpha_min = 0.0;
  double alpha_max = 1.0;
};

struct AsymRates {
  double lambda_R;  // peak arrival rate of R-revealing evidence
  double lambda_L;  // peak arrival rate of L-revealing evidence
};

// Third action with intermediate payoffs: u_m_R in (u_l_R, u_r_R) and
// u_m_L < u_l_L so it dominates nothing outright.
struct MiddleAction {
  double u_m_R;
  double u_m_L;
};

struct VariantCutoffs {
  double p_hat = 0;
  double c_bar = 0, c_underbar = 0;   // NaN when no closed form applies
  double p_low_star = 0, p_high_star = 0, p_star = 0;
  std::optional<double> p_check;      // own-left/own-right crossing
  std::optional<double> p_low, p_high;  // own/opposite switches
  std::optional<double> q_bar;        // degenerate-structure exit (upper)
  std::optional<double> q_low;        // degenerate-structure exit (lower)
};

// Solution for the bounded-attention and asymmetric-rate extensions: the
// same two-branch-per-side structure as the baseline, with region attention
// levels (alpha_hi, alpha_lo) and a stationary rest point at alpha_rest.
class VariantSolution {
 public:
  Regime regime() const { return regime_; }
  const VariantCutoffs& cutoffs() const { return cutoffs_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const ModelParams& params() const { return mp_; }

  double value(double p) const;
  std::optional<double> alpha(double p) const;  // nullopt where stopped
  double stationary_value_at(double p) const { return us0_ + us1_ * p; }
  double alpha_hi() const { return alpha_hi_; }
  double alpha_lo() const { return alpha_lo_; }
  double alpha_rest() const { return alpha_rest_; }
  bool has_branch(BranchKind k) const { return branches_.count(k) > 0; }
  const PolicyBranch& branch(BranchKind k) const { return branches_.at(k); }

 private:
  friend VariantSolution nonexclusive_solution(const ModelParams&, const AttentionBounds&);
  friend VariantSolution asymmetric_solution(const ModelParams&, const AsymRates&);
  VariantSolution() = default;
  BranchKind kind_at(double p) const;

  ModelParams mp_;
  Regime regime_ = Regime::NoLearning;
  VariantCutoffs cutoffs_;
  std::vector<Segment> segments_;
  std::map<BranchKind, PolicyBranch> branches_;
  double alpha_hi_ = 1, alpha_lo_ = 0, alpha_rest_ = 0.5;
  double us0_ = 0, us1_ = 0;  // stationary value line
};

// Optimal policy when attention is restricted to [1-amax, amax]. Cutoffs use
// the bounded-attention closed forms; the experimentation region shrinks and
// the multi-homing region grows as amax falls.
VariantSolution nonexclusive_solution(const ModelParams& mp, const AttentionBounds& bounds);

// Optimal policy with different peak rates for the two evidence types.
// Detects the degenerate structure in which one own-biased branch is
// globally dominated and the corresponding region disappears.
VariantSolution asymmetric_solution(const ModelParams& mp, const AsymRates& rates);

struct MCutoffs {
  std::optional<double> q1;  // upper smooth-pasting root, when it exists
  std::optional<double> q2;  // lower smooth-pasting root
  double p_m_low = 0;        // boundaries of the immediate-m region
  double p_m_high = 1;       // (0/1 sentinels when a side is absent)
};

// Stopping boundaries of the strategy that takes the middle action on
// [p_m_low, p_m_high] and drifts into that region from both sides.
MCutoffs m_strategy_cutoffs(const ModelParams& mp, const MiddleAction& m);

struct EnvelopePoint {
  double value;
  std::string choice;  // "l", "r", "own-left", ..., "rest", or "m<i>..."
};

// Pointwise max of the baseline envelope and every middle-action strategy
// value. Throws OrderingViolation if a middle action breaks the payoff
// ordering (individually or pairwise after sorting by u_m_R).
EnvelopePoint multi_action_envelope(const ModelParams& mp,
                                    const std::vector<MiddleAction>& middles, double p);

}  // namespace attn
