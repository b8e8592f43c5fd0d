#pragma once

#include <functional>
#include <vector>

#include "attn/model.hpp"

namespace attn {

// One-period binary-signal experiment: P(sL|L) = a, P(sR|R) = b. Feasible
// experiments satisfy a, b in [0,1] and 1 <= a+b <= 1+lambda*dt; the most
// informative ones sit on the frontier b = 1 + lambda*dt - a, whose corners
// are the two news sources (a = 1 biased toward L, a = lambda*dt toward R).
struct Experiment {
  double a;
  double b;
  double dt;
};

struct Posteriors {
  double q_R, prob_R;  // posterior and probability of the R-leaning signal
  double q_L, prob_L;
};

// Throws ValidationError if the experiment violates the feasibility
// constraints, DegenerateSignal if either signal has probability zero.
Posteriors experiment_posteriors(double p, const Experiment& e, double lambda);

// Per-cell choice: stop-r (-1), stop-l (-2), or frontier action index >= 0.
struct DiscreteSolution {
  double dt = 0;
  std::vector<double> p;
  std::vector<double> value;
  std::vector<int> choice;
  int sweeps = 0;  // full backup sweeps performed
};

inline bool choice_is_stop(int c) { return c < 0; }

// Grid DP over the frontier experiments plus stopping, with linear
// interpolation of the continuation (preserves convexity). Cost c*dt is paid
// up front each experimenting period; continuation is discounted by
// exp(-rho*dt).
class DiscreteSolver {
 public:
  DiscreteSolver(const ModelParams& mp, double dt, int grid_n = 2001, int n_actions = 201);

  const std::vector<double>& grid() const { return p_; }
  double action_a(int j) const;  // frontier a-value of action j
  int n_actions() const { return n_act_; }

  // One Bellman backup of v_in at every grid point.
  void backup(const std::vector<double>& v_in, std::vector<double>& v_out,
              std::vector<int>* choice) const;

  // Backward induction from the stopping payoff; choices of the final backup
  // (the first period of the n-period problem) are recorded.
  DiscreteSolution solve_finite(int n_periods) const;

  // Fixpoint of the backup operator: modified policy iteration whose
  // convergence test is a full backup sup-change <= tol.
  DiscreteSolution solve_infinite(double tol = 1e-9, int max_outer = 400) const;

 private:
  void eval_sweep(const std::vector<int>& choice, const std::vector<double>& v_in,
                  std::vector<double>& v_out) const;

  ModelParams mp_;
  double dt_, beta_;
  int n_, n_act_;
  std::vector<double> p_, stop_l_, stop_r_;
  // per (cell, action): interpolation of both posterior continuations
  struct Cell {
    float w_R, w_L;
    int k_R, k_L;
    float prob_R, prob_L;
  };
  std::vector<Cell> tab_;
};

struct CornerDominance {
  double best_corner;
  double best_interior;
  bool dominated;  // best_interior <= best_corner + 1e-10
};

// Scans the experiment frontier for a given continuation function.
CornerDominance corner_dominance_check(const ModelParams& mp, double dt,
                                       const std::function<double(double)>& continuation,
                                       double p, int n_actions = 201);

// One-step objective of a single experiment (shared by the checks above).
double experiment_objective(const ModelParams& mp, const Experiment& e,
                            const std::function<double(double)>& continuation, double p);

}  // namespace attn
