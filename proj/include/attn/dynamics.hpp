#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "attn/solution.hpp"

namespace attn {

// Belief position after t units of no-news drift under constant attention.
double drift_position(const ModelParams& mp, double alpha, double p0, double t);

// Time for the no-news drift under constant attention alpha to carry p0 to
// target. Throws Unreachable when the drift runs the wrong way, stalls
// (alpha = 1/2), or the target is an endpoint reached only asymptotically.
double first_passage_time(const ModelParams& mp, double p0, double target, double alpha);

// One constant-alpha stretch of the no-news belief path under the optimal
// policy. `duration` is +inf for the final stretch when the belief parks.
struct PathPhase {
  double t_start;
  double p_start;
  double alpha;     // attention during the phase
  double duration;  // time to the phase end
  double p_end;     // belief at the phase end (drift target)
};

struct NoNewsPath {
  std::vector<PathPhase> phases;  // empty when p0 is an immediate stop
  bool absorbed;                  // reaches a stopping boundary in finite time
  double decision_time;           // absorption time; +inf when parked at p_star
  Action action;                  // action taken on absorption (or immediately)
};

NoNewsPath no_news_path(const Solution& sol, double p0);

// Belief after t units of no news under the optimal policy (analytic phase
// chaining, no time stepping). Frozen once a stopping boundary is reached.
double drift_and_path(const Solution& sol, double p0, double t);

struct AnalyticOutcomes {
  double expected_delay;
  double mistake_prob;
};
// Closed-form expected decision delay and mistake probability from p0 under
// the optimal policy. Both are 0 at stopping beliefs by convention.
AnalyticOutcomes analytic_outcomes(const Solution& sol, double p0);

// Delay by RK4 integration of the region ODEs (cross-check for the closed
// forms): tau' = (1 - lambda p tau)/(lambda p(1-p)) where alpha = 1, and
// tau' = (lambda (1-p) tau - 1)/(lambda p(1-p)) where alpha = 0.
double expected_delay_ode(const Solution& sol, double p0, double step = 1e-4);

struct McSummary {
  double mean_delay = 0, se_delay = 0;
  double mistake_rate = 0, se_mistake = 0;
  double value_mean = 0, se_value = 0;
  std::uint64_t n_paths = 0;
  std::uint64_t seed = 0;
};

struct PathRecord {
  bool state_R;
  double breakthrough_time;  // +inf when the path was decided by drift
  double decision_time;
  Action action;
  bool correct;
  double value;
};

// Simulates n independent decision problems started at p0 under the optimal
// policy. Deterministic given (seed, path index) regardless of ordering.
McSummary monte_carlo(const Solution& sol, double p0, std::uint64_t n_paths, std::uint64_t seed,
                      std::vector<PathRecord>* records = nullptr);

// Belief at time t for a simulated path (0/1 after its breakthrough, frozen
// at the boundary after absorption) — used by the martingale check.
double posterior_at(const Solution& sol, double p0, const PathRecord& rec, double t);

namespace detail {
// Deterministic per-path stream: engine seeded by a SplitMix64 mix of
// (seed, index). uniform01 maps the top 53 bits to [0,1).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);
double uniform01(std::mt19937_64& eng);
double exp_draw(std::mt19937_64& eng);  // -log1p(-u): Exp(1), finite
}  // namespace detail

}  // namespace attn
