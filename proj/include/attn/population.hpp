#pragma once

#include <string>
#include <vector>

#include "attn/solution.hpp"

namespace attn {

struct Atom {
  double location;
  double mass;
};

// Piecewise-linear density: consecutive nodes are joined linearly; the
// function is zero outside [nodes.front().location, nodes.back().location].
struct DensityNode {
  double location;
  double value;
};

struct BeliefMeasure {
  std::vector<Atom> atoms;
  std::vector<DensityNode> density;
  double atom_mass() const;
  double density_mass() const;  // trapezoid integral of the node list
  double total_mass() const { return atom_mass() + density_mass(); }
};

struct DistributionSpec {
  enum class Kind { Uniform, TruncatedNormal, Explicit };
  Kind kind = Kind::Uniform;
  double lo = 0.0, hi = 1.0;     // support (uniform / truncated normal)
  double mean = 0.5, sd = 0.2;   // truncated normal
  std::vector<DensityNode> nodes;  // explicit
  std::vector<Atom> atoms;         // explicit

  static DistributionSpec uniform(double lo = 0.0, double hi = 1.0);
  static DistributionSpec truncated_normal(double mean, double sd, double lo = 0.0,
                                           double hi = 1.0);
  static DistributionSpec explicit_measure(std::vector<DensityNode> nodes,
                                           std::vector<Atom> atoms = {});
};

// Normalized initial cross-section of beliefs. Throws InvalidSpec for
// negative densities/masses, empty or degenerate supports.
BeliefMeasure init_population(const DistributionSpec& spec);

enum class TrueState { L, R };

struct MediaShare {
  double l_outlet = 0;   // full attention on the L-biased outlet (alpha = 1)
  double r_outlet = 0;   // full attention on the R-biased outlet (alpha = 0)
  double multi_home = 0; // parked at the interior rest point, splitting attention
  double none = 0;       // already decided (or never experimenting)
};

struct PopulationSnapshot {
  double time = 0;
  BeliefMeasure measure;
  MediaShare media_share;
  double polarization = 0;  // NaN when one half-population is empty
  // Media choice per element, aligned with measure.atoms / measure.density.
  // Values: "L", "R", "multi", "none".
  std::vector<std::string> atom_media;
  std::vector<std::string> node_media;
};

// Difference between the median belief of the p >= 1/2 half-population and
// the median of the p <= 1/2 half (atoms included; mass at exactly 1/2
// belongs to both halves). Throws EmptyHalf when a half has zero mass.
double polarization_metric(const BeliefMeasure& measure);

// Deterministic evolution of the cross-section under the optimal policy with
// the true state fixed: drift moves density along the no-news flow,
// breakthroughs (hazard = the rate that actually fires in the given state)
// transfer exact survival complements to the revealed endpoint, boundary
// hitters accumulate as stopped atoms, and the interior rest point drains at
// rate lambda/2. Every snapshot is computed in closed form from the initial
// measure, so mass is conserved to quadrature accuracy with no step-to-step
// drift. Snapshots are emitted at 0, dt, 2dt, ..., and at t_end.
std::vector<PopulationSnapshot> evolve(const Solution& sol, const BeliefMeasure& initial,
                                       TrueState state, double dt, double t_end);

// CSV export: columns time, kind(atom|node), location, mass_or_density,
// media_choice.
std::string snapshots_to_csv(const std::vector<PopulationSnapshot>& snaps);

}  // namespace attn
