#pragma once

#include <utility>

#include "attn/errors.hpp"

namespace attn {

// Constant-policy experimentation value. While the policy runs, conclusive
// R-evidence arrives at rate_r (state R only, payoff u_r on arrival) and
// conclusive L-evidence at rate_l (state L only, payoff u_l); flow cost c,
// discount rho. The no-news belief drifts at -(rate_r - rate_l) p(1-p).
// Value solves
//   c + rho*V = rate_r*p*(u_r - V) + rate_l*(1-p)*(u_l - V)
//               - (rate_r - rate_l)*p*(1-p)*V'.
struct BranchSpec {
  double rate_r = 0;
  double rate_l = 0;
  double u_r = 0;
  double u_l = 0;
  double rho = 0;
  double c = 0;
};

// One-parameter family of solutions; `fit` pins the free constant by a value
// condition at a boundary belief. Evaluation is clamped to [1e-12, 1-1e-12];
// the homogeneous power terms are computed in log space and normalized to 1
// at the fit belief, so the boundary condition holds exactly and the free
// constant stays on the scale of the boundary value.
class PolicyBranch {
 public:
  static PolicyBranch fit(const BranchSpec& s, double p_boundary, double v_boundary);

  double value(double p) const;
  double deriv(double p) const;
  double second(double p) const;
  // c + rho*V - (generator applied to V); zero up to roundoff.
  double ode_residual(double p) const;

  const BranchSpec& spec() const { return spec_; }

 private:
  enum class Form {
    Regular,    // rho + min rate > 0 on the drifting side
    ResonantR,  // rho = 0, rate_l = 0: log-form particular solution
    ResonantL,  // rho = 0, rate_r = 0
  };

  PolicyBranch() = default;
  double particular(double p) const;
  double particular_deriv(double p) const;
  double homogeneous(double p) const;
  double homogeneous_deriv(double p) const;
  double homogeneous_second(double p) const;

  BranchSpec spec_;
  Form form_ = Form::Regular;
  double k0_ = 0, k1_ = 0;             // affine particular solution (Regular)
  double m_ = 0, n_ = 0;               // homogeneous exponents (Regular)
  double coef_ = 0;                    // fitted constant on the homogeneous solution
  double pb_ = 0.5, lpb_ = 0, l1pb_ = 0;  // fit belief and its log / log1p terms
};

}  // namespace attn
