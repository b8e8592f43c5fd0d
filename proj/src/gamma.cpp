#include "attn/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace attn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGridN = 201;   // frontier validation grid
constexpr double kEdge = 1e-9;   // belief-boundary guard

double clamp01(double x) { return x < 0 ? 0.0 : (x > 1 ? 1.0 : x); }

template <typename F>
double bisect(F&& f, double lo, double hi, const char* what) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw BracketingFailure(std::string("no sign change for ") + what);
  }
  while (hi - lo > 1e-12) {
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

// first derivative on [0,1]: 5-point central inside, 4-point one-sided at the ends
double stencil_first(const std::function<double(double)>& F, double x) {
  const double h = 1e-4;
  if (x >= 2 * h && x <= 1 - 2 * h) {
    return (-F(x + 2 * h) + 8 * F(x + h) - 8 * F(x - h) + F(x - 2 * h)) / (12 * h);
  }
  const double s = x < 0.5 ? 1.0 : -1.0;
  return s * (-11 * F(x) + 18 * F(x + s * h) - 9 * F(x + 2 * s * h) + 2 * F(x + 3 * s * h)) /
         (6 * h);
}

double stencil_second(const std::function<double(double)>& F, double x) {
  const double h = 1e-4;
  if (x >= 2 * h && x <= 1 - 2 * h) {
    return (-F(x + 2 * h) + 16 * F(x + h) - 30 * F(x) + 16 * F(x - h) - F(x - 2 * h)) /
           (12 * h * h);
  }
  const double s = x < 0.5 ? 1.0 : -1.0;
  return (2 * F(x) - 5 * F(x + s * h) + 4 * F(x + 2 * s * h) - F(x + 3 * s * h)) / (h * h);
}

GammaFrontier build_frontier(const std::function<double(double)>& g,
                             const std::function<double(double)>* g1,
                             const std::function<double(double)>* g2) {
  if (!(std::fabs(g(0.0)) <= 1e-9) || !(std::fabs(g(1.0) - 1.0) <= 1e-9)) {
    throw AssumptionViolated("attention map must satisfy g(0)=0 and g(1)=1");
  }
  for (int i = 0; i + 1 < kGridN; ++i) {
    const double x0 = i / (kGridN - 1.0);
    const double x1 = (i + 1) / (kGridN - 1.0);
    if (!(g(x1) > g(x0))) {
      throw AssumptionViolated("attention map must be strictly increasing: violated near x=" +
                               std::to_string(x0));
    }
  }

  GammaFrontier f;
  f.g = g;
  f.g_inv = [g](double y) {
    y = clamp01(y);
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto raw = [g, g_inv = f.g_inv](double lam) { return g(1.0 - g_inv(lam)); };

  std::function<double(double)> d1, d2;
  if (g1 && g2) {
    auto gp = *g1;
    auto gpp = *g2;
    auto g_inv = f.g_inv;
    d1 = [g_inv, gp](double lam) {
      const double x = g_inv(clamp01(lam));
      return -gp(1.0 - x) / gp(x);
    };
    d2 = [g_inv, gp, gpp](double lam) {
      const double x = g_inv(clamp01(lam));
      const double d = gp(x);
      return (gpp(1.0 - x) * d + gp(1.0 - x) * gpp(x)) / (d * d * d);
    };
  } else {
    d1 = [raw](double lam) { return stencil_first(raw, clamp01(lam)); };
    d2 = [raw](double lam) { return stencil_second(raw, clamp01(lam)); };
  }

  // linear extension outside [0,1] so event bisection near the corners is safe
  const double G0 = raw(0.0), G1 = raw(1.0), s0 = d1(0.0), s1 = d1(1.0);
  f.Gamma = [raw, G0, G1, s0, s1](double lam) {
    if (lam < 0) return G0 + s0 * lam;
    if (lam > 1) return G1 + s1 * (lam - 1.0);
    return raw(lam);
  };
  f.Gamma_prime = d1;
  f.Gamma_second = d2;

  if (!(std::fabs(G0 - 1.0) <= 1e-9) || !(std::fabs(G1) <= 1e-9)) {
    throw AssumptionViolated("frontier must satisfy Gamma(0)=1 and Gamma(1)=0");
  }
  bool is_linear = true;
  for (int i = 0; i < kGridN; ++i) {
    const double x = i / (kGridN - 1.0);
    if (std::fabs(raw(x) - (1.0 - x)) > 1e-9) {
      is_linear = false;
      break;
    }
  }
  f.linear = is_linear;
  for (int i = 0; i + 1 < kGridN; ++i) {
    const double x0 = i / (kGridN - 1.0);
    const double x1 = (i + 1) / (kGridN - 1.0);
    if (!(raw(x1) < raw(x0))) {
      throw AssumptionViolated("frontier must be strictly decreasing: violated near lambda=" +
                               std::to_string(x0));
    }
  }
  for (int i = 1; i + 1 < kGridN; ++i) {
    const double x = i / (kGridN - 1.0);
    const double h = 1.0 / (kGridN - 1.0);
    const double second = raw(x + h) - 2 * raw(x) + raw(x - h);
    if (second > 1e-9) {
      throw AssumptionViolated(
          "frontier curvature must not bend upward (diminishing returns): violated near lambda=" +
          std::to_string(x));
    }
  }

  f.fixed_point = g(0.5);  // symmetry of the construction
  if (std::fabs(f.Gamma(f.fixed_point) - f.fixed_point) > 1e-8) {
    throw AssumptionViolated("fixed point inconsistent with the frontier construction");
  }
  if (std::fabs(f.Gamma_prime(f.fixed_point) + 1.0) > 1e-6) {
    throw AssumptionViolated("frontier slope at the fixed point must be -1");
  }
  return f;
}

void require_symmetric(const ModelParams& mp) {
  if (!(mp.u_r_R == mp.u_l_L) || !(mp.u_l_R == mp.u_r_L) || !(mp.u_l_R >= 0)) {
    throw ValidationError(
        "frontier extension requires symmetric payoffs: u_r_R = u_l_L and u_l_R = u_r_L >= 0");
  }
}

// one classic RK4 step for y' = fn(x, y)
template <typename F>
double rk4_step(F&& fn, double x, double y, double h) {
  const double k1 = fn(x, y);
  const double k2 = fn(x + 0.5 * h, y + 0.5 * h * k1);
  const double k3 = fn(x + 0.5 * h, y + 0.5 * h * k2);
  const double k4 = fn(x + h, y + h * k3);
  return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace

GammaFrontier gamma_from_g(const std::function<double(double)>& g) {
  return build_frontier(g, nullptr, nullptr);
}

GammaFrontier gamma_from_g(const std::function<double(double)>& g,
                           const std::function<double(double)>& g_prime,
                           const std::function<double(double)>& g_second) {
  return build_frontier(g, &g_prime, &g_second);
}

GammaFrontier builtin_diminishing_frontier() {
  auto g = [](double x) { return std::sqrt(1.0 + 4.0 * x - x * x) - 1.0; };
  auto g1 = [](double x) { return (2.0 - x) / std::sqrt(1.0 + 4.0 * x - x * x); };
  auto g2 = [](double x) {
    const double w2 = 1.0 + 4.0 * x - x * x;
    return -(w2 + (2.0 - x) * (2.0 - x)) / (w2 * std::sqrt(w2));
  };
  GammaFrontier f = gamma_from_g(g, g1, g2);
  // closed-form inverse is available here; replace the generic bisection
  f.g_inv = [](double y) {
    y = clamp01(y);
    return 2.0 - std::sqrt(5.0 - (1.0 + y) * (1.0 + y));
  };
  f.fixed_point = std::sqrt(2.75) - 1.0;
  return f;
}

std::pair<double, double> ab_coefficients(const GammaFrontier& f, double lam, double rho_norm) {
  const double G = f.Gamma(lam);
  const double Gp = f.Gamma_prime(lam);
  const double D = G - Gp * lam + rho_norm * (1.0 - Gp);
  return {(G - Gp * lam) / D, (1.0 - Gp) / D};
}

void MonotoneCurve::reverse() { std::reverse(knots_.begin(), knots_.end()); }

double MonotoneCurve::eval(double x) const {
  if (knots_.empty()) throw ValidationError("empty policy curve");
  if (knots_.size() == 1) return knots_.front().y;
  if (x <= knots_.front().x) return knots_.front().y;
  if (x >= knots_.back().x) return knots_.back().y;
  size_t lo = 0, hi = knots_.size() - 1;
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    (knots_[mid].x <= x ? lo : hi) = mid;
  }
  const Knot& a = knots_[lo];
  const Knot& b = knots_[lo + 1];
  const double h = b.x - a.x;
  const double t = (x - a.x) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * a.y + (t3 - 2 * t2 + t) * h * a.dydx +
         (-2 * t3 + 3 * t2) * b.y + (t3 - t2) * h * b.dydx;
}

double MonotoneCurve::inverse(double y) const {
  if (knots_.empty()) throw ValidationError("empty policy curve");
  const bool inc = knots_.back().y >= knots_.front().y;
  const double y_lo = inc ? knots_.front().y : knots_.back().y;
  const double y_hi = inc ? knots_.back().y : knots_.front().y;
  if (y <= y_lo) return inc ? knots_.front().x : knots_.back().x;
  if (y >= y_hi) return inc ? knots_.back().x : knots_.front().x;
  size_t lo = 0, hi = knots_.size() - 1;
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    const bool before = inc ? (knots_[mid].y <= y) : (knots_[mid].y >= y);
    (before ? lo : hi) = mid;
  }
  double xa = knots_[lo].x, xb = knots_[lo + 1].x;
  for (int i = 0; i < 60 && xb - xa > 1e-14; ++i) {
    const double xm = 0.5 * (xa + xb);
    const bool before = inc ? (eval(xm) <= y) : (eval(xm) >= y);
    (before ? xa : xb) = xm;
  }
  return 0.5 * (xa + xb);
}

namespace gamma_detail {

double ode_P(const GammaFrontier& f, double rho_norm, double p, double lam) {
  const double G = f.Gamma(lam);
  const double Gp = f.Gamma_prime(lam);
  const double D = G - Gp * lam + rho_norm * (1.0 - Gp);
  return D * (p + (1.0 - p) * Gp);
}

double ode_Q(const GammaFrontier& f, double p, double lam) {
  return p * (1.0 - p) * f.Gamma_second(lam) * (f.Gamma(lam) - lam);
}

double saddle_slope(const GammaFrontier& f, double rho_norm) {
  const double gpp = f.Gamma_second(f.fixed_point);
  if (gpp >= 0) {
    throw SaddleDegenerate(
        "frontier curvature at the fixed point is not negative; the saddle construction "
        "has no transverse direction");
  }
  const double s = rho_norm + f.fixed_point;
  return -s + std::sqrt(s * s - 8.0 * s / gpp);
}

}  // namespace gamma_detail

GammaPolicyPiece integrate_lambda(const GammaFrontier& f, const ModelParams& mp,
                                  GammaBranchKind kind, double saddle_eps) {
  require_valid(mp);
  require_symmetric(mp);
  const double rn = mp.rho / mp.lambda;
  const double gam = f.fixed_point;
  const auto dlam_dp = [&](double p, double lam) {
    return gamma_detail::ode_P(f, rn, p, lam) / gamma_detail::ode_Q(f, p, lam);
  };

  GammaPolicyPiece piece;
  piece.kind = kind;

  if (kind == GammaBranchKind::OppositeFromSaddle) {
    const double k0 = gamma_detail::saddle_slope(f, rn);  // throws SaddleDegenerate
    std::vector<MonotoneCurve::Knot> left, right;
    for (const double dir : {+1.0, -1.0}) {
      auto& side = dir > 0 ? right : left;
      double p = 0.5 + dir * saddle_eps;
      double lam = gam + dir * k0 * saddle_eps;
      const double bound = dir > 0 ? 1.0 : 0.0;
      const double h = dir * 2.5e-4;
      side.push_back({p, lam, dlam_dp(p, lam)});
      bool hit = false;
      for (int i = 0; i < 40000; ++i) {
        const double lam_next = rk4_step(dlam_dp, p, lam, h);
        if ((dir > 0 && lam_next >= 1.0) || (dir < 0 && lam_next <= 0.0)) {
          double t_in = 0.0, t_out = 1.0;
          for (int j = 0; j < 60; ++j) {
            const double t = 0.5 * (t_in + t_out);
            const double lv = rk4_step(dlam_dp, p, lam, t * h);
            const bool inside = dir > 0 ? lv < 1.0 : lv > 0.0;
            (inside ? t_in : t_out) = t;
          }
          p += t_out * h;
          side.push_back({p, bound, dlam_dp(p, bound)});
          hit = true;
          break;
        }
        p += h;
        lam = lam_next;
        side.push_back({p, lam, dlam_dp(p, lam)});
        if (p <= kEdge || p >= 1.0 - kEdge) break;
      }
      if (dir > 0) {
        piece.q_high = p;
        piece.hit_one = hit;
      } else {
        piece.q_low = p;
        piece.hit_zero = hit;
      }
    }
    std::reverse(left.begin(), left.end());
    for (const auto& k : left) piece.curve.add(k.x, k.y, k.dydx);
    piece.curve.add(0.5, gam, k0);
    for (const auto& k : right) piece.curve.add(k.x, k.y, k.dydx);
    return piece;
  }

  // OwnFromCorner
  if (!exp_condition(mp)) {
    throw ExpViolated("immediate action dominates all learning; no own-biased policy curve");
  }
  if (f.Gamma_second(gam) >= 0) {
    throw SaddleDegenerate("frontier curvature at the fixed point is not negative");
  }
  const double p_ls = detail::p_low_star_bounded(mp, 1.0);
  const double u_win = mp.u_r_R;
  const PolicyBranch corner = PolicyBranch::fit(
      {mp.lambda, 0.0, mp.u_r_R, mp.u_l_L, mp.rho, mp.c}, p_ls,
      mp.u_l_L + p_ls * (mp.u_l_R - mp.u_l_L));
  const auto [A1, B1] = ab_coefficients(f, 1.0, rn);
  const double level = A1 * u_win - B1 * mp.c / mp.lambda;
  const auto fq = [&](double p) { return corner.value(p) - level; };
  if ((fq(p_ls) > 0) == (fq(0.5) > 0)) {
    piece.corner_only = true;
    return piece;
  }
  const double q_b = bisect(fq, p_ls, 0.5, "corner/interior hand-over");
  piece.q_b = q_b;

  const auto dp_dlam = [&](double lam, double p) {
    return gamma_detail::ode_Q(f, p, lam) / gamma_detail::ode_P(f, rn, p, lam);
  };
  const int n = 4000;
  const double h = (gam - 1.0) / n;
  double lam = 1.0, p = q_b;
  piece.curve.add(lam, p, dp_dlam(lam, p));
  for (int i = 1; i <= n; ++i) {
    const double p_next = rk4_step(dp_dlam, lam, p, h);
    const double lam_next = (i == n) ? gam : 1.0 + i * h;
    if (p_next >= 0.5) {
      double t_in = 0.0, t_out = 1.0;
      for (int j = 0; j < 60; ++j) {
        const double t = 0.5 * (t_in + t_out);
        ((rk4_step(dp_dlam, lam, p, t * h) < 0.5) ? t_in : t_out) = t;
      }
      lam += t_out * h;
      piece.curve.add(lam, 0.5, dp_dlam(lam, 0.5));
      piece.reached_center = true;
      break;
    }
    lam = lam_next;
    p = p_next;
    piece.curve.add(lam, p, dp_dlam(lam, p));
  }
  if (!piece.reached_center) piece.q_s = p;
  piece.curve.reverse();  // ascending multiplier domain [gamma, 1]
  return piece;
}

GammaSolution::GammaSolution(const GammaFrontier& f, const ModelParams& mp) : f_(f), mp_(mp) {
  require_valid(mp);
  if (f_.linear) {
    baseline_.emplace(mp);
    regime_ = baseline_->regime();
    return;
  }
  require_symmetric(mp);
  u_win_ = mp.u_r_R;
  u_lose_ = mp.u_l_R;
  rho_norm_ = mp.rho / mp.lambda;
  c_norm_ = mp.c / mp.lambda;
  const double gam = f_.fixed_point;
  us_ = (gam * mp.lambda * u_win_ - mp.c) / (mp.rho + gam * mp.lambda);

  if (!exp_condition(mp)) {
    regime_ = Regime::NoLearning;
    p_ls_ = p_hs_ = kNaN;
    return;
  }
  p_ls_ = detail::p_low_star_bounded(mp, 1.0);
  p_hs_ = detail::p_high_star_bounded(mp, 1.0);
  own_corner_ = PolicyBranch::fit({mp.lambda, 0.0, mp.u_r_R, mp.u_l_L, mp.rho, mp.c}, p_ls_,
                                  mp.u_l_L + p_ls_ * (mp.u_l_R - mp.u_l_L));
  own_piece_ = integrate_lambda(f_, mp_, GammaBranchKind::OwnFromCorner);

  double own_center;
  if (own_piece_->q_s) {
    own_center = us_;  // rest plateau reached
  } else if (own_piece_->corner_only) {
    own_center = own_corner_->value(0.5);
  } else {
    own_center = ab_value(own_piece_->curve.inverse(0.5));
  }

  if (own_center <= us_) {
    regime_ = Regime::OwnAndOpposite;
    opp_piece_ = integrate_lambda(f_, mp_, GammaBranchKind::OppositeFromSaddle);
    if (opp_piece_->hit_zero) {
      opp_corner_lo_ = PolicyBranch::fit({0.0, mp.lambda, mp.u_r_R, mp.u_l_L, mp.rho, mp.c},
                                         opp_piece_->q_low, ab_value(0.0));
    }
    if (opp_piece_->hit_one) {
      opp_corner_hi_ = PolicyBranch::fit({mp.lambda, 0.0, mp.u_r_R, mp.u_l_L, mp.rho, mp.c},
                                         opp_piece_->q_high, ab_value(1.0));
    }
  } else {
    regime_ = Regime::OwnOnly;
  }
}

double GammaSolution::ab_value(double lam) const {
  const auto [A, B] = ab_coefficients(f_, lam, rho_norm_);
  return A * u_win_ - B * c_norm_;
}

const GammaPolicyPiece& GammaSolution::own_piece() const {
  if (!own_piece_) throw ValidationError("no own-biased policy piece for these parameters");
  return *own_piece_;
}

const GammaPolicyPiece& GammaSolution::opp_piece() const {
  if (!opp_piece_) throw ValidationError("no opposite-biased policy piece for these parameters");
  return *opp_piece_;
}

GammaSolution::PointInfo GammaSolution::left_point(double p) const {
  const double stop = mp_.u_l_L + p * (mp_.u_l_R - mp_.u_l_L);
  PointInfo out{stop, kNaN, "stop-l"};
  if (regime_ == Regime::NoLearning) return out;
  const double gam = f_.fixed_point;
  if (us_ > out.value) out = {us_, gam, "rest"};
  if (p > p_ls_) {
    const auto& pc = *own_piece_;
    PointInfo own;
    if (pc.corner_only || (pc.q_b && p < *pc.q_b)) {
      own = {own_corner_->value(p), 1.0, "own-corner-left"};
    } else if (pc.q_s && p >= *pc.q_s) {
      own = {us_, gam, "rest"};
    } else {
      const double lam = pc.curve.inverse(p);
      own = {ab_value(lam), lam, "own-interior-left"};
    }
    if (own.value > out.value) out = own;
  }
  if (opp_piece_) {
    const auto& pc = *opp_piece_;
    PointInfo opp{-std::numeric_limits<double>::infinity(), kNaN, ""};
    if (p <= pc.q_low) {
      if (opp_corner_lo_) opp = {opp_corner_lo_->value(p), 0.0, "opp-corner-left"};
    } else {
      const double lam = pc.curve.eval(p);
      // the saddle knot stores the fixed point exactly; evaluate its value by the
      // stationary formula so the rest label wins the tie at the reference belief
      opp = {lam == gam ? us_ : ab_value(lam), lam, "opp-interior-left"};
    }
    if (opp.value > out.value) out = opp;
  }
  return out;
}

namespace {
std::string mirror_region(const std::string& r) {
  if (r == "rest") return r;
  const auto pos = r.rfind("-left");
  if (pos != std::string::npos) return r.substr(0, pos) + "-right";
  if (r == "stop-l") return "stop-r";
  return r;
}
}  // namespace

double GammaSolution::value(double p) const {
  if (baseline_) return baseline_->value(p);
  return p <= 0.5 ? left_point(p).value : left_point(1.0 - p).value;
}

double GammaSolution::lambda_choice(double p) const {
  if (baseline_) {
    const auto a = baseline_->alpha(p);
    return a ? *a : kNaN;  // linear frontier: multiplier equals attention share
  }
  if (p <= 0.5) return left_point(p).lambda;
  const double lam = left_point(1.0 - p).lambda;
  return std::isnan(lam) ? kNaN : f_.Gamma(lam);
}

double GammaSolution::alpha_choice(double p) const {
  const double lam = lambda_choice(p);
  return std::isnan(lam) ? kNaN : f_.g_inv(lam);
}

std::string GammaSolution::region(double p) const {
  if (baseline_) {
    if (baseline_->regime() == Regime::OwnAndOpposite && p == baseline_->cutoffs().p_star) {
      return "rest";
    }
    switch (baseline_->branch_at(p)) {
      case BranchKind::StopL: return "stop-l";
      case BranchKind::StopR: return "stop-r";
      case BranchKind::OwnLeft: return "own-corner-left";
      case BranchKind::OwnRight: return "own-corner-right";
      case BranchKind::OppLeft: return "opp-corner-left";
      case BranchKind::OppRight: return "opp-corner-right";
    }
    throw Unreachable("unhandled branch kind");
  }
  if (p <= 0.5) return left_point(p).region;
  return mirror_region(left_point(1.0 - p).region);
}

double GammaSolution::own_candidate(double p) const {
  if (baseline_ || regime_ == Regime::NoLearning) return value(p);
  const auto eval_left = [&](double q) {
    if (q <= p_ls_) return mp_.u_l_L + q * (mp_.u_l_R - mp_.u_l_L);
    const auto& pc = *own_piece_;
    if (pc.corner_only || (pc.q_b && q < *pc.q_b)) return own_corner_->value(q);
    if (pc.q_s && q >= *pc.q_s) return us_;
    return ab_value(pc.curve.inverse(q));
  };
  return p <= 0.5 ? eval_left(p) : eval_left(1.0 - p);
}

double GammaSolution::opp_candidate(double p) const {
  if (!opp_piece_) throw ValidationError("opposite candidate undefined: policy is own-biased");
  const auto eval_left = [&](double q) {
    const auto& pc = *opp_piece_;
    if (q <= pc.q_low) {
      if (!opp_corner_lo_) return -std::numeric_limits<double>::infinity();
      return opp_corner_lo_->value(q);
    }
    return ab_value(pc.curve.eval(q));
  };
  return p <= 0.5 ? eval_left(p) : eval_left(1.0 - p);
}

GammaEnvelopePoint gamma_envelope(const GammaFrontier& f, const ModelParams& mp, double p) {
  const GammaSolution sol(f, mp);
  const double lam = sol.lambda_choice(p);
  return {sol.value(p), lam, std::isnan(lam) ? kNaN : f.g_inv(lam)};
}

GammaOracleResult gamma_oracle(const GammaFrontier& f, const ModelParams& mp, double dt,
                               int grid_n, int lambda_n, double tol) {
  require_valid(mp);
  if (!(dt > 0) || !(mp.lambda * dt < 1.0)) {
    throw ValidationError("period length must satisfy 0 < lambda*dt < 1");
  }
  if (grid_n < 2 || lambda_n < 2) throw ValidationError("grids need at least two points");

  const int n = grid_n, m = lambda_n;
  GammaOracleResult out;
  out.dt = dt;
  out.p.resize(n);
  std::vector<double> stop(n);
  for (int i = 0; i < n; ++i) {
    out.p[i] = double(i) / (n - 1);
    stop[i] = immediate_value(mp, out.p[i]);
  }
  const double beta = std::exp(-mp.rho * dt);

  struct Cell {
    float w;        // interpolation weight toward k+1
    int k;          // posterior cell
    float p_stay;   // no-news probability
    float fixed;    // -c dt + beta * (news-absorption payoff)
  };
  std::vector<double> rate_r(m), rate_l(m);
  for (int j = 0; j < m; ++j) {
    const double lam_j = double(j) / (m - 1);
    rate_r[j] = mp.lambda * lam_j;
    rate_l[j] = mp.lambda * std::max(0.0, f.Gamma(lam_j));
  }
  std::vector<Cell> cells(size_t(n) * m);
  for (int i = 0; i < n; ++i) {
    const double p = out.p[i];
    for (int j = 0; j < m; ++j) {
      const double pr = p * rate_r[j] * dt;
      const double pl = (1 - p) * rate_l[j] * dt;
      const double p0 = 1.0 - pr - pl;
      double q = p * (1.0 - rate_r[j] * dt) / p0;
      q = clamp01(q);
      double x = q * (n - 1);
      int k = std::min(int(x), n - 2);
      Cell& c = cells[size_t(i) * m + j];
      c.w = float(x - k);
      c.k = k;
      c.p_stay = float(p0);
      c.fixed = float(-mp.c * dt + beta * (pr * mp.u_r_R + pl * mp.u_l_L));
    }
  }

  std::vector<double> v = stop, v2(n);
  std::vector<int> pol(n, -1);
  const auto q_value = [&](int i, int j, const std::vector<double>& vv) {
    const Cell& c = cells[size_t(i) * m + j];
    const double ev = (1.0 - c.w) * vv[c.k] + double(c.w) * vv[c.k + 1];
    return double(c.fixed) + beta * double(c.p_stay) * ev;
  };

  const int max_outer = 400;
  bool converged = false;
  for (int outer = 0; outer < max_outer; ++outer) {
    // full argmax sweep
    double delta = 0;
    for (int i = 0; i < n; ++i) {
      double best = stop[i];
      int arg = -1;
      for (int j = 0; j < m; ++j) {
        const double qv = q_value(i, j, v);
        if (qv > best) {
          best = qv;
          arg = j;
        }
      }
      v2[i] = best;
      pol[i] = arg;
      delta = std::max(delta, std::fabs(best - v[i]));
    }
    v.swap(v2);
    ++out.sweeps;
    if (delta <= tol) {
      converged = true;
      break;
    }
    // policy evaluation sweeps
    const double eval_target = std::max(delta * 1e-4, tol * 0.1);
    for (int s = 0; s < 4000; ++s) {
      double d2 = 0;
      for (int i = 0; i < n; ++i) {
        const double nv = pol[i] < 0 ? stop[i] : std::max(stop[i], q_value(i, pol[i], v));
        d2 = std::max(d2, std::fabs(nv - v[i]));
        v2[i] = nv;
      }
      v.swap(v2);
      if (d2 <= eval_target) break;
    }
  }
  if (!converged) {
    throw NumericalError("restricted dynamic program failed to reach tolerance");
  }
  out.value = v;
  return out;
}

}  // namespace attn
