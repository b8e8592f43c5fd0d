#include "attn/branch.hpp"

#include <cmath>

namespace attn {

namespace {
constexpr double kClampLo = 1e-12;
constexpr double kClampHi = 1.0 - 1e-12;

double clamp_p(double p) {
  if (p < kClampLo) return kClampLo;
  if (p > kClampHi) return kClampHi;
  return p;
}

double logit(double p) { return std::log(p / (1 - p)); }
}  // namespace

PolicyBranch PolicyBranch::fit(const BranchSpec& s, double p_boundary, double v_boundary) {
  PolicyBranch b;
  b.spec_ = s;
  const double delta = s.rate_r - s.rate_l;
  if (delta == 0) {
    throw ValidationError("branch requires rate_r != rate_l (zero-drift policy has no free constant)");
  }
  if (s.rho == 0 && s.rate_l == 0) {
    b.form_ = Form::ResonantR;
  } else if (s.rho == 0 && s.rate_r == 0) {
    b.form_ = Form::ResonantL;
  } else {
    b.form_ = Form::Regular;
    b.m_ = (s.rho + s.rate_l) / delta;
    b.n_ = (s.rho + s.rate_r) / delta;
    b.k0_ = (s.rate_l * s.u_l - s.c) / (s.rho + s.rate_l);
    b.k1_ = (s.rate_r * s.u_r - s.rate_l * s.u_l - delta * b.k0_) / (s.rho + s.rate_r);
  }
  const double pb = clamp_p(p_boundary);
  b.pb_ = pb;
  b.lpb_ = std::log(pb);
  b.l1pb_ = std::log1p(-pb);
  // The homogeneous solution is normalized so homogeneous(pb) == 1 exactly,
  // hence the free constant is just the value gap at the boundary.
  b.coef_ = v_boundary - b.particular(pb);
  return b;
}

double PolicyBranch::particular(double p) const {
  switch (form_) {
    case Form::Regular:
      return k0_ + k1_ * p;
    case Form::ResonantR:
      return spec_.u_r * p - (spec_.c / spec_.rate_r) * ((1 - p) * logit(p) + 1);
    case Form::ResonantL:
      return spec_.u_l * (1 - p) + (spec_.c / spec_.rate_l) * (p * logit(p) - 1);
  }
  return 0;
}

double PolicyBranch::particular_deriv(double p) const {
  switch (form_) {
    case Form::Regular:
      return k1_;
    case Form::ResonantR:
      return spec_.u_r + (spec_.c / spec_.rate_r) * (logit(p) - 1 / p);
    case Form::ResonantL:
      return -spec_.u_l + (spec_.c / spec_.rate_l) * (logit(p) + 1 / (1 - p));
  }
  return 0;
}

double PolicyBranch::homogeneous(double p) const {
  switch (form_) {
    case Form::Regular:
      return std::exp(-m_ * (std::log(p) - lpb_) + n_ * (std::log1p(-p) - l1pb_));
    case Form::ResonantR:
      return (1 - p) / (1 - pb_);
    case Form::ResonantL:
      return p / pb_;
  }
  return 0;
}

double PolicyBranch::homogeneous_deriv(double p) const {
  switch (form_) {
    case Form::Regular:
      return homogeneous(p) * (-m_ / p - n_ / (1 - p));
    case Form::ResonantR:
      return -1 / (1 - pb_);
    case Form::ResonantL:
      return 1 / pb_;
  }
  return 0;
}

double PolicyBranch::homogeneous_second(double p) const {
  switch (form_) {
    case Form::Regular: {
      const double g = -m_ / p - n_ / (1 - p);
      return homogeneous(p) * (g * g + m_ / (p * p) - n_ / ((1 - p) * (1 - p)));
    }
    case Form::ResonantR:
    case Form::ResonantL:
      return 0;
  }
  return 0;
}

double PolicyBranch::value(double p) const {
  p = clamp_p(p);
  if (coef_ == 0) return particular(p);  // avoid 0 * overflow at extreme exponents
  return particular(p) + coef_ * homogeneous(p);
}

double PolicyBranch::deriv(double p) const {
  p = clamp_p(p);
  if (coef_ == 0) return particular_deriv(p);
  return particular_deriv(p) + coef_ * homogeneous_deriv(p);
}

double PolicyBranch::second(double p) const {
  p = clamp_p(p);
  double part = 0;
  switch (form_) {
    case Form::Regular:
      part = 0;
      break;
    case Form::ResonantR:
      part = (spec_.c / spec_.rate_r) * (1 / (p * (1 - p)) + 1 / (p * p));
      break;
    case Form::ResonantL:
      part = (spec_.c / spec_.rate_l) * (1 / (p * (1 - p)) + 1 / ((1 - p) * (1 - p)));
      break;
  }
  if (coef_ == 0) return part;
  return part + coef_ * homogeneous_second(p);
}

double PolicyBranch::ode_residual(double p) const {
  p = clamp_p(p);
  const double v = value(p);
  const double dv = deriv(p);
  const double gen = spec_.rate_r * p * (spec_.u_r - v) + spec_.rate_l * (1 - p) * (spec_.u_l - v) -
                     (spec_.rate_r - spec_.rate_l) * p * (1 - p) * dv;
  return spec_.c + spec_.rho * v - gen;
}

}  // namespace attn
