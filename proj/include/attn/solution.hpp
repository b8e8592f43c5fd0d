#pragma once

#include <optional>
#include <vector>

#include "attn/branch.hpp"
#include "attn/model.hpp"

namespace attn {

// Requested branch is not defined for these parameters (e.g. experimentation
// never pays, so no free-boundary branch exists).
struct UndefinedBranch : ValidationError {
  explicit UndefinedBranch(const std::string& what) : ValidationError(what) {}
};

enum class BranchKind { OwnLeft, OwnRight, OppLeft, OppRight, StopL, StopR };
std::string to_string(BranchKind k);

struct CutoffSet {
  double p_hat = 0;
  double c_bar = 0;
  double c_underbar = 0;
  // defined when experimentation pays (NaN in NoLearning):
  double p_low_star = 0, p_high_star = 0, p_star = 0;
  // populated iff the regime defines them:
  std::optional<double> p_check;          // own-left/own-right switch (OwnOnly)
  std::optional<double> p_low, p_high;    // own/opposite switches (OwnAndOpposite)
};

struct Segment {
  double lo, hi;  // [lo, hi) except the last segment which closes at 1
  BranchKind kind;
};

struct BranchValue {
  double value;
  double derivative;
};

// Closed-form solution: regime, cutoffs, branch functions, value envelope and
// policy. Immutable after construction.
class Solution {
 public:
  explicit Solution(const ModelParams& mp);

  const ModelParams& params() const { return params_; }
  Regime regime() const { return regime_; }
  const CutoffSet& cutoffs() const { return cutoffs_; }
  const std::vector<Segment>& segments() const { return segments_; }

  double value(double p) const;
  // Left derivative by convention at kinks.
  double deriv(double p) const;
  // (left, right); they differ only at the interior switch beliefs.
  std::pair<double, double> deriv_pair(double p) const;
  // nullopt = stop. 1/2 exactly at p_star in the OwnAndOpposite regime.
  std::optional<double> alpha(double p) const;
  BranchKind branch_at(double p) const;

  // Extended branch evaluation anywhere in (0,1); throws UndefinedBranch when
  // the branch does not exist for these parameters.
  BranchValue branch_value(BranchKind k, double p) const;
  bool has_branch(BranchKind k) const;

  double stationary(double p) const { return stationary_value(params_, p); }
  double immediate(double p) const { return immediate_value(params_, p); }

 private:
  const PolicyBranch& branch_ref(BranchKind k) const;

  ModelParams params_;
  Regime regime_;
  CutoffSet cutoffs_;
  std::vector<Segment> segments_;
  std::optional<PolicyBranch> own_left_, own_right_, opp_left_, opp_right_;
};

Solution solve_model(const ModelParams& mp);

// Free-function forms of the per-module operations.
BranchValue branch_value(const ModelParams& mp, BranchKind k, double p);
double value_envelope(const ModelParams& mp, double p);
std::optional<double> optimal_alpha(const ModelParams& mp, double p);

struct SwitchPoints {
  std::optional<double> p_check;
  std::optional<double> p_low, p_high;
};
SwitchPoints solve_switch_points(const ModelParams& mp);

struct HjbDiagnostics {
  double residual;        // |max{-c - rho V + max_a F_a, U - V}|
  double crossing_gap;    // derivative-gap identity residual
  double dF_dalpha;       // signed dF/dalpha at the envelope (V, V')
  double dF_dalpha_gap;   // residual of the dF/dalpha identity (experimentation only)
  double smooth_paste_gap;  // |V' - anchor slope| when p is a pasting belief, else 0
};
// Throws KinkPoint at the interior switch beliefs; use kink_check there.
HjbDiagnostics hjb_diagnostics(const Solution& sol, double p);

struct KinkCheck {
  double left, right;
  bool convex;  // left <= right
};
KinkCheck kink_check(const Solution& sol, double p);

// Named smooth-pasting gaps at the free boundaries (and p_star when defined).
struct PastingGaps {
  double low_star, high_star;
  double star_left, star_right;  // NaN outside OwnAndOpposite
};
PastingGaps pasting_gaps(const Solution& sol);

}  // namespace attn
