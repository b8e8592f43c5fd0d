#pragma once

#include <string>
#include <vector>

#include "attn/errors.hpp"

namespace attn {

// Payoffs u_<action>_<state>, Poisson rate lambda, discount rho, flow cost c.
// Action r is correct in state R, action l in state L.
struct ModelParams {
  double u_r_R = 1.0;
  double u_l_L = 1.0;
  double u_l_R = -1.0;
  double u_r_L = -1.0;
  double lambda = 1.0;
  double rho = 0.0;
  double c = 0.1;
};

enum class Action { TakeL, TakeR };
enum class Regime { NoLearning, OwnOnly, OwnAndOpposite };

std::string to_string(Action a);
std::string to_string(Regime r);

// All violated invariants; empty iff params are usable.
std::vector<std::string> validate_params(const ModelParams& mp);
// Throws ValidationError listing every violation.
void require_valid(const ModelParams& mp);

struct ImmediatePayoffs {
  double U_l, U_r, U;
  Action x_star;  // tie at p_hat broken toward r
  double p_hat;
};
ImmediatePayoffs immediate_payoffs(const ModelParams& mp, double p);

// Expected payoff of the better immediate action and its components.
double immediate_value(const ModelParams& mp, double p);
double indifference_belief(const ModelParams& mp);  // p_hat

struct Benchmarks {
  double U_S;      // stationary half/half attention, act only on conclusive news
  double U_FA;     // hypothetical full attention to both sources
  bool exp_holds;  // experimentation beats immediate action at p_hat
};
Benchmarks benchmark_values(const ModelParams& mp, double p);
double stationary_value(const ModelParams& mp, double p);
double full_attention_value(const ModelParams& mp, double p);
bool exp_condition(const ModelParams& mp);

struct CutoffCosts {
  double c_bar;       // learning worthless at or above
  double c_underbar;  // opposite-biased learning appears strictly below
  Regime regime;
};
CutoffCosts regime_cutoffs(const ModelParams& mp);

struct BoundaryBeliefs {
  double p_low_star;   // lower stopping boundary
  double p_high_star;  // upper stopping boundary
  double p_star;       // absorbing belief of the opposite-biased policy
};
// Throws ExpViolated when immediate action dominates all learning.
BoundaryBeliefs boundary_beliefs(const ModelParams& mp);

namespace detail {
// Shared closed forms for the bounded-attention family; alpha_max = 1 is the
// baseline model. Own-branch arrival rate is lambda * alpha_max.
double c_bar_bounded(const ModelParams& mp, double alpha_max);
double c_underbar_bounded(const ModelParams& mp, double alpha_max);
double p_low_star_bounded(const ModelParams& mp, double alpha_max);
double p_high_star_bounded(const ModelParams& mp, double alpha_max);
}  // namespace detail

}  // namespace attn
