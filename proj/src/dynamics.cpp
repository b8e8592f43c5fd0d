#include "attn/dynamics.hpp"

#include <cmath>
#include <limits>

namespace attn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double logit(double p) { return std::log(p / (1 - p)); }
double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

double drift_position(const ModelParams& mp, double alpha, double p0, double t) {
  if (p0 <= 0 || p0 >= 1) return p0;
  if (t == 0) return p0;  // exact: the logit round-trip would perturb low bits
  const double rate = mp.lambda * (2 * alpha - 1);  // downward logit speed
  return expit(logit(p0) - rate * t);
}

double first_passage_time(const ModelParams& mp, double p0, double target, double alpha) {
  if (target == p0) return 0.0;
  if (target <= 0 || target >= 1 || p0 <= 0 || p0 >= 1) {
    throw Unreachable("drift reaches belief endpoints only asymptotically");
  }
  const double rate = mp.lambda * (2 * alpha - 1);
  if (rate == 0) throw Unreachable("belief is stationary at alpha = 1/2");
  const double T = (logit(p0) - logit(target)) / rate;
  if (T < 0) throw Unreachable("drift moves away from the target belief");
  return T;
}

NoNewsPath no_news_path(const Solution& sol, double p0) {
  NoNewsPath out;
  const ModelParams& mp = sol.params();
  const auto& co = sol.cutoffs();

  const auto a0 = sol.alpha(p0);
  if (!a0) {
    out.absorbed = true;
    out.decision_time = 0;
    out.action = immediate_payoffs(mp, p0).x_star;
    return out;
  }

  double t = 0, p = p0;
  for (int guard = 0; guard < 4; ++guard) {
    const auto a = sol.alpha(p);
    if (!a) {  // stopped at a boundary
      out.absorbed = true;
      out.decision_time = t;
      out.action = immediate_payoffs(mp, p).x_star;
      return out;
    }
    if (*a == 0.5) {  // parked at p_star
      out.phases.push_back({t, p, 0.5, kInf, p});
      out.absorbed = false;
      out.decision_time = kInf;
      out.action = immediate_payoffs(mp, p).x_star;  // unused
      return out;
    }
    // drift target: boundary of the constant-alpha stretch in drift direction
    double target;
    if (*a == 1.0) {
      target = (sol.regime() == Regime::OwnAndOpposite && co.p_high && p > co.p_star)
                   ? co.p_star
                   : co.p_low_star;
    } else {
      target = (sol.regime() == Regime::OwnAndOpposite && co.p_low && p < co.p_star)
                   ? co.p_star
                   : co.p_high_star;
    }
    const double T = first_passage_time(mp, p, target, *a);
    out.phases.push_back({t, p, *a, T, target});
    t += T;
    p = target;
    if (p == co.p_low_star || p == co.p_high_star) {
      out.absorbed = true;
      out.decision_time = t;
      out.action = immediate_payoffs(mp, p).x_star;
      return out;
    }
    // otherwise we arrived at p_star; loop once more to park
  }
  throw NumericalError("no-news path failed to terminate");
}

double drift_and_path(const Solution& sol, double p0, double t) {
  const NoNewsPath path = no_news_path(sol, p0);
  if (path.phases.empty()) return p0;
  for (const auto& ph : path.phases) {
    if (t < ph.t_start + ph.duration) {
      return drift_position(sol.params(), ph.alpha, ph.p_start, t - ph.t_start);
    }
  }
  const auto& last = path.phases.back();
  return last.p_end;
}

AnalyticOutcomes analytic_outcomes(const Solution& sol, double p0) {
  const ModelParams& mp = sol.params();
  const auto& co = sol.cutoffs();
  const auto a = sol.alpha(p0);
  if (!a) return {0.0, 0.0};
  const double lam = mp.lambda;

  if (*a == 0.5) return {2.0 / lam, 0.0};

  const bool own_left = *a == 1.0 && !(sol.regime() == Regime::OwnAndOpposite && p0 > co.p_star);
  const bool own_right = *a == 0.0 && !(sol.regime() == Regime::OwnAndOpposite && p0 < co.p_star);

  if (own_left) {
    const double T = first_passage_time(mp, p0, co.p_low_star, 1.0);
    const double surv = std::exp(-lam * T);  // state-R breakthrough not yet arrived
    return {p0 * (1 - surv) / lam + (1 - p0) * T, co.p_low_star * (1 - p0) / (1 - co.p_low_star)};
  }
  if (own_right) {
    const double T = first_passage_time(mp, p0, co.p_high_star, 0.0);
    const double surv = std::exp(-lam * T);
    return {(1 - p0) * (1 - surv) / lam + p0 * T, p0 * (1 - co.p_high_star) / co.p_high_star};
  }
  // opposite region: drift into p_star, then wait for conclusive news
  if (*a == 0.0) {
    const double T = first_passage_time(mp, p0, co.p_star, 0.0);
    const double surv = std::exp(-lam * T);
    return {p0 * (T + 2 / lam) + (1 - p0) * (1 + surv) / lam, 0.0};
  }
  const double T = first_passage_time(mp, p0, co.p_star, 1.0);
  const double surv = std::exp(-lam * T);
  return {(1 - p0) * (T + 2 / lam) + p0 * (1 + surv) / lam, 0.0};
}

double expected_delay_ode(const Solution& sol, double p0, double step) {
  const ModelParams& mp = sol.params();
  const auto& co = sol.cutoffs();
  const auto a0 = sol.alpha(p0);
  if (!a0) return 0.0;
  if (*a0 == 0.5) return 2.0 / mp.lambda;

  // Integrate from the anchor of p0's region to p0.
  double anchor, tau0;
  const bool own_left = *a0 == 1.0 && !(sol.regime() == Regime::OwnAndOpposite && p0 > co.p_star);
  const bool own_right = *a0 == 0.0 && !(sol.regime() == Regime::OwnAndOpposite && p0 < co.p_star);
  if (own_left) {
    anchor = co.p_low_star;
    tau0 = 0.0;
  } else if (own_right) {
    anchor = co.p_high_star;
    tau0 = 0.0;
  } else {
    anchor = co.p_star;
    tau0 = 2.0 / mp.lambda;
  }

  const double lam = mp.lambda;
  const auto rhs = [&](double p, double tau) {
    if (*a0 == 1.0) return (1 - lam * p * tau) / (lam * p * (1 - p));
    return (lam * (1 - p) * tau - 1) / (lam * p * (1 - p));
  };
  const double span = p0 - anchor;
  const int n = std::max(1, static_cast<int>(std::ceil(std::fabs(span) / step)));
  const double h = span / n;
  double p = anchor, tau = tau0;
  for (int i = 0; i < n; ++i) {
    const double k1 = rhs(p, tau);
    const double k2 = rhs(p + h / 2, tau + h / 2 * k1);
    const double k3 = rhs(p + h / 2, tau + h / 2 * k2);
    const double k4 = rhs(p + h, tau + h * k3);
    tau += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    p += h;
  }
  return tau;
}

namespace detail {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double exp_draw(std::mt19937_64& eng) { return -std::log1p(-uniform01(eng)); }

}  // namespace detail

McSummary monte_carlo(const Solution& sol, double p0, std::uint64_t n_paths, std::uint64_t seed,
                      std::vector<PathRecord>* records) {
  const ModelParams& mp = sol.params();
  const NoNewsPath path = no_news_path(sol, p0);

  double sum_d = 0, sum_d2 = 0;
  double sum_m = 0;
  double sum_v = 0, sum_v2 = 0;
  if (records) {
    records->clear();
    records->reserve(n_paths);
  }

  for (std::uint64_t i = 0; i < n_paths; ++i) {
    std::mt19937_64 eng(detail::mix_seed(seed, i));
    const bool state_R = detail::uniform01(eng) < p0;
    const double E = detail::exp_draw(eng);

    double bt = kInf;       // breakthrough time
    double decision = 0;
    Action act;
    if (path.phases.empty()) {
      act = immediate_payoffs(mp, p0).x_star;  // immediate stop
    } else {
      double H = 0;  // accumulated hazard
      bool decided = false;
      for (const auto& ph : path.phases) {
        const double rate = state_R ? mp.lambda * ph.alpha : mp.lambda * (1 - ph.alpha);
        if (std::isinf(ph.duration)) {  // parked at p_star: rate lambda/2 both states
          bt = ph.t_start + (E - H) / rate;
          decided = true;
          break;
        }
        const double seg = rate * ph.duration;
        if (E < H + seg) {
          bt = ph.t_start + (E - H) / rate;
          decided = true;
          break;
        }
        H += seg;
      }
      if (decided) {
        decision = bt;
        act = state_R ? Action::TakeR : Action::TakeL;
      } else {
        decision = path.decision_time;
        act = path.action;
      }
    }

    const bool correct = (act == Action::TakeR) == state_R;
    const double payoff = (act == Action::TakeR) ? (state_R ? mp.u_r_R : mp.u_r_L)
                                                 : (state_R ? mp.u_l_R : mp.u_l_L);
    double value;
    if (mp.rho > 0) {
      const double disc = std::exp(-mp.rho * decision);
      value = disc * payoff - mp.c * (1 - disc) / mp.rho;
    } else {
      value = payoff - mp.c * decision;
    }

    sum_d += decision;
    sum_d2 += decision * decision;
    sum_m += correct ? 0.0 : 1.0;
    sum_v += value;
    sum_v2 += value * value;
    if (records) records->push_back({state_R, bt, decision, act, correct, value});
  }

  const double n = static_cast<double>(n_paths);
  McSummary s;
  s.n_paths = n_paths;
  s.seed = seed;
  s.mean_delay = sum_d / n;
  s.mistake_rate = sum_m / n;
  s.value_mean = sum_v / n;
  if (n_paths > 1) {
    const double var_d = std::max(0.0, (sum_d2 - n * s.mean_delay * s.mean_delay) / (n - 1));
    const double var_v = std::max(0.0, (sum_v2 - n * s.value_mean * s.value_mean) / (n - 1));
    const double var_m = std::max(0.0, s.mistake_rate * (1 - s.mistake_rate) * n / (n - 1));
    s.se_delay = std::sqrt(var_d / n);
    s.se_value = std::sqrt(var_v / n);
    s.se_mistake = std::sqrt(var_m / n);
  }
  return s;
}

double posterior_at(const Solution& sol, double p0, const PathRecord& rec, double t) {
  if (t >= rec.breakthrough_time) return rec.state_R ? 1.0 : 0.0;
  if (t >= rec.decision_time) {
    // absorbed at a boundary (or immediate stop): belief frozen
    return drift_and_path(sol, p0, rec.decision_time);
  }
  return drift_and_path(sol, p0, t);
}

}  // namespace attn
