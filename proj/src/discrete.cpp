#include "attn/discrete.hpp"

#include <algorithm>
#include <cmath>

#include "attn/errors.hpp"

namespace attn {

Posteriors experiment_posteriors(double p, const Experiment& e, double lambda) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("belief outside [0,1]");
  if (!(e.dt > 0.0 && lambda * e.dt < 1.0))
    throw ValidationError("period length must satisfy 0 < lambda*dt < 1");
  const double cap = 1.0 + lambda * e.dt;
  if (!(e.a >= 0.0 && e.a <= 1.0 && e.b >= 0.0 && e.b <= 1.0))
    throw ValidationError("signal precisions must lie in [0,1]");
  if (!(e.a + e.b >= 1.0 - 1e-12 && e.a + e.b <= cap + 1e-12))
    throw ValidationError("experiment outside feasible informativeness band");

  Posteriors out{};
  out.prob_R = p * e.b + (1.0 - p) * (1.0 - e.a);
  out.prob_L = p * (1.0 - e.b) + (1.0 - p) * e.a;
  if (out.prob_R <= 0.0 || out.prob_L <= 0.0)
    throw DegenerateSignal("signal has probability zero at this belief");
  out.q_R = p * e.b / out.prob_R;
  out.q_L = p * (1.0 - e.b) / out.prob_L;
  return out;
}

double experiment_objective(const ModelParams& mp, const Experiment& e,
                            const std::function<double(double)>& continuation, double p) {
  const double beta = std::exp(-mp.rho * e.dt);
  const double prob_R = p * e.b + (1.0 - p) * (1.0 - e.a);
  const double prob_L = p * (1.0 - e.b) + (1.0 - p) * e.a;
  double ev = 0.0;
  if (prob_R > 1e-15) ev += prob_R * continuation(p * e.b / prob_R);
  if (prob_L > 1e-15) ev += prob_L * continuation(p * (1.0 - e.b) / prob_L);
  return -mp.c * e.dt + beta * ev;
}

DiscreteSolver::DiscreteSolver(const ModelParams& mp, double dt, int grid_n, int n_actions)
    : mp_(mp), dt_(dt), n_(grid_n), n_act_(n_actions) {
  require_valid(mp);
  if (!(dt > 0.0 && mp.lambda * dt < 1.0))
    throw ValidationError("period length must satisfy 0 < lambda*dt < 1");
  if (grid_n < 3 || n_actions < 2) throw ValidationError("grid too small");
  beta_ = std::exp(-mp.rho * dt);

  p_.resize(n_);
  stop_l_.resize(n_);
  stop_r_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    p_[i] = static_cast<double>(i) / (n_ - 1);
    stop_l_[i] = p_[i] * mp.u_l_R + (1.0 - p_[i]) * mp.u_l_L;
    stop_r_[i] = p_[i] * mp.u_r_R + (1.0 - p_[i]) * mp.u_r_L;
  }

  const double ld = mp.lambda * dt;
  tab_.resize(static_cast<size_t>(n_) * n_act_);
  for (int i = 0; i < n_; ++i) {
    const double p = p_[i];
    for (int j = 0; j < n_act_; ++j) {
      const double a = ld + j * (1.0 - ld) / (n_act_ - 1);
      const double b = 1.0 + ld - a;
      Cell cell{};
      const double prob_R = p * b + (1.0 - p) * (1.0 - a);
      const double prob_L = p * (1.0 - b) + (1.0 - p) * a;
      cell.prob_R = static_cast<float>(prob_R);
      cell.prob_L = static_cast<float>(prob_L);
      auto locate = [&](double q, int& k, float& w) {
        double x = std::clamp(q, 0.0, 1.0) * (n_ - 1);
        k = std::min(static_cast<int>(x), n_ - 2);
        w = static_cast<float>(x - k);
      };
      locate(prob_R > 1e-15 ? p * b / prob_R : 0.0, cell.k_R, cell.w_R);
      locate(prob_L > 1e-15 ? p * (1.0 - b) / prob_L : 0.0, cell.k_L, cell.w_L);
      tab_[static_cast<size_t>(i) * n_act_ + j] = cell;
    }
  }
}

double DiscreteSolver::action_a(int j) const {
  const double ld = mp_.lambda * dt_;
  return ld + j * (1.0 - ld) / (n_act_ - 1);
}

void DiscreteSolver::backup(const std::vector<double>& v_in, std::vector<double>& v_out,
                            std::vector<int>* choice) const {
  v_out.resize(n_);
  if (choice) choice->resize(n_);
  const double cost = mp_.c * dt_;
  for (int i = 0; i < n_; ++i) {
    const double stop = std::max(stop_l_[i], stop_r_[i]);
    double best_q = -std::numeric_limits<double>::infinity();
    int best_j = -1;
    const Cell* row = &tab_[static_cast<size_t>(i) * n_act_];
    for (int j = 0; j < n_act_; ++j) {
      const Cell& c = row[j];
      double ev = 0.0;
      if (c.prob_R > 1e-15f)
        ev += c.prob_R * ((1.0 - c.w_R) * v_in[c.k_R] + c.w_R * v_in[c.k_R + 1]);
      if (c.prob_L > 1e-15f)
        ev += c.prob_L * ((1.0 - c.w_L) * v_in[c.k_L] + c.w_L * v_in[c.k_L + 1]);
      const double q = -cost + beta_ * ev;
      if (q > best_q) {
        best_q = q;
        best_j = j;
      }
    }
    if (best_q > stop) {
      v_out[i] = best_q;
      if (choice) (*choice)[i] = best_j;
    } else {
      v_out[i] = stop;
      if (choice) (*choice)[i] = (stop_r_[i] >= stop_l_[i]) ? -1 : -2;
    }
  }
}

void DiscreteSolver::eval_sweep(const std::vector<int>& choice, const std::vector<double>& v_in,
                                std::vector<double>& v_out) const {
  v_out.resize(n_);
  const double cost = mp_.c * dt_;
  for (int i = 0; i < n_; ++i) {
    const int ch = choice[i];
    if (ch < 0) {
      v_out[i] = (ch == -1) ? stop_r_[i] : stop_l_[i];
      continue;
    }
    const Cell& c = tab_[static_cast<size_t>(i) * n_act_ + ch];
    double ev = 0.0;
    if (c.prob_R > 1e-15f)
      ev += c.prob_R * ((1.0 - c.w_R) * v_in[c.k_R] + c.w_R * v_in[c.k_R + 1]);
    if (c.prob_L > 1e-15f)
      ev += c.prob_L * ((1.0 - c.w_L) * v_in[c.k_L] + c.w_L * v_in[c.k_L + 1]);
    v_out[i] = -cost + beta_ * ev;
  }
}

DiscreteSolution DiscreteSolver::solve_finite(int n_periods) const {
  if (n_periods < 1) throw ValidationError("need at least one period");
  DiscreteSolution out;
  out.dt = dt_;
  out.p = p_;
  std::vector<double> v(n_), v_next;
  for (int i = 0; i < n_; ++i) v[i] = std::max(stop_l_[i], stop_r_[i]);
  for (int k = 0; k < n_periods; ++k) {
    backup(v, v_next, &out.choice);
    v.swap(v_next);
    ++out.sweeps;
  }
  out.value = std::move(v);
  return out;
}

DiscreteSolution DiscreteSolver::solve_infinite(double tol, int max_outer) const {
  DiscreteSolution out;
  out.dt = dt_;
  out.p = p_;
  std::vector<double> v(n_), v_next(n_), v_eval(n_);
  for (int i = 0; i < n_; ++i) v[i] = std::max(stop_l_[i], stop_r_[i]);

  for (int outer = 0; outer < max_outer; ++outer) {
    backup(v, v_next, &out.choice);
    ++out.sweeps;
    double delta = 0.0;
    for (int i = 0; i < n_; ++i) delta = std::max(delta, std::abs(v_next[i] - v[i]));
    v.swap(v_next);
    if (delta <= tol) {
      out.value = std::move(v);
      return out;
    }
    // Cheap partial policy evaluation: iterate the frozen-choice operator
    // until its own sup-change is far below the current full-backup change.
    const double eval_target = std::max(delta * 1e-4, tol * 0.1);
    for (int s = 0; s < 4000; ++s) {
      eval_sweep(out.choice, v, v_eval);
      double ed = 0.0;
      for (int i = 0; i < n_; ++i) ed = std::max(ed, std::abs(v_eval[i] - v[i]));
      v.swap(v_eval);
      if (ed <= eval_target) break;
    }
  }
  throw NumericalError("value iteration failed to reach tolerance");
}

CornerDominance corner_dominance_check(const ModelParams& mp, double dt,
                                       const std::function<double(double)>& continuation,
                                       double p, int n_actions) {
  if (!(dt > 0.0 && mp.lambda * dt < 1.0))
    throw ValidationError("period length must satisfy 0 < lambda*dt < 1");
  const double ld = mp.lambda * dt;
  CornerDominance out{};
  out.best_corner = -std::numeric_limits<double>::infinity();
  out.best_interior = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n_actions; ++j) {
    const double a = ld + j * (1.0 - ld) / (n_actions - 1);
    Experiment e{a, 1.0 + ld - a, dt};
    const double q = experiment_objective(mp, e, continuation, p);
    if (j == 0 || j == n_actions - 1)
      out.best_corner = std::max(out.best_corner, q);
    else
      out.best_interior = std::max(out.best_interior, q);
  }
  out.dominated = out.best_interior <= out.best_corner + 1e-10;
  return out;
}

}  // namespace attn
