#include "attn/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attn/errors.hpp"
#include "attn/io.hpp"

namespace attn {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double expit(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <typename F>
double simpson_rec(const F& f, double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-13) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

constexpr const char* kMediaL = "L";
constexpr const char* kMediaR = "R";
constexpr const char* kMediaMulti = "multi";
constexpr const char* kMediaNone = "none";

// A maximal run of initial density lying inside one policy region.
struct FlowPiece {
  double lo, hi;      // initial-belief domain
  double f_lo, f_hi;  // density at the endpoints (linear in between)
  double alpha;       // 1 (L-outlet, drift down) or 0 (R-outlet, drift up)
  double terminal;    // boundary the drift runs into
  bool to_rest;       // terminal is the interior rest point (multi-homing atom)
};

struct FrozenPiece {
  double lo, hi, f_lo, f_hi;
};

struct FlowAtom {
  double x0, mass, alpha, terminal;
  bool to_rest;
};

struct Decomposition {
  std::vector<FlowPiece> flow;
  std::vector<FrozenPiece> frozen;
  std::vector<FlowAtom> flow_atoms;
  std::vector<Atom> frozen_atoms;
  double rest_mass0 = 0;  // initial mass already at the rest point
};

double piece_mass(double lo, double hi, double f_lo, double f_hi) {
  return 0.5 * (f_lo + f_hi) * (hi - lo);
}

struct Assembler {
  std::vector<Atom> atoms;
  std::vector<std::string> atom_media;
  std::vector<DensityNode> nodes;
  std::vector<std::string> node_media;
  MediaShare share;

  void add_atom(double loc, double mass, const char* media) {
    if (!(mass > 0)) return;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].location == loc && atom_media[i] == media) {
        atoms[i].mass += mass;
        return;
      }
    }
    atoms.push_back({loc, mass});
    atom_media.emplace_back(media);
  }
};

}  // namespace

double BeliefMeasure::atom_mass() const {
  double m = 0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

double BeliefMeasure::density_mass() const {
  double m = 0;
  for (size_t i = 0; i + 1 < density.size(); ++i)
    m += piece_mass(density[i].location, density[i + 1].location, density[i].value,
                    density[i + 1].value);
  return m;
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  DistributionSpec s;
  s.kind = Kind::Uniform;
  s.lo = lo;
  s.hi = hi;
  return s;
}

DistributionSpec DistributionSpec::truncated_normal(double mean, double sd, double lo, double hi) {
  DistributionSpec s;
  s.kind = Kind::TruncatedNormal;
  s.mean = mean;
  s.sd = sd;
  s.lo = lo;
  s.hi = hi;
  return s;
}

DistributionSpec DistributionSpec::explicit_measure(std::vector<DensityNode> nodes,
                                                    std::vector<Atom> atoms) {
  DistributionSpec s;
  s.kind = Kind::Explicit;
  s.nodes = std::move(nodes);
  s.atoms = std::move(atoms);
  return s;
}

BeliefMeasure init_population(const DistributionSpec& spec) {
  BeliefMeasure m;
  switch (spec.kind) {
    case DistributionSpec::Kind::Uniform: {
      if (!(spec.hi > spec.lo) || spec.lo < 0 || spec.hi > 1)
        throw InvalidSpec("uniform support must be a nondegenerate subinterval of [0,1]");
      const double v = 1.0 / (spec.hi - spec.lo);
      m.density = {{spec.lo, v}, {spec.hi, v}};
      return m;
    }
    case DistributionSpec::Kind::TruncatedNormal: {
      if (!(spec.sd > 0)) throw InvalidSpec("truncated normal needs sd > 0");
      if (!(spec.hi > spec.lo) || spec.lo < 0 || spec.hi > 1)
        throw InvalidSpec("truncated normal support must be a nondegenerate subinterval of [0,1]");
      const int n = 201;
      m.density.resize(n);
      for (int i = 0; i < n; ++i) {
        const double x = spec.lo + (spec.hi - spec.lo) * i / (n - 1);
        const double z = (x - spec.mean) / spec.sd;
        m.density[i] = {x, std::exp(-0.5 * z * z)};
      }
      break;
    }
    case DistributionSpec::Kind::Explicit: {
      for (const auto& nd : spec.nodes)
        if (nd.value < 0) throw InvalidSpec("negative density value");
      for (const auto& a : spec.atoms)
        if (a.mass < 0) throw InvalidSpec("negative atom mass");
      m.density = spec.nodes;
      m.atoms = spec.atoms;
      std::sort(m.density.begin(), m.density.end(),
                [](const DensityNode& a, const DensityNode& b) { return a.location < b.location; });
      std::sort(m.atoms.begin(), m.atoms.end(),
                [](const Atom& a, const Atom& b) { return a.location < b.location; });
      for (const auto& nd : m.density)
        if (nd.location < 0 || nd.location > 1) throw InvalidSpec("density node outside [0,1]");
      for (const auto& a : m.atoms)
        if (a.location < 0 || a.location > 1) throw InvalidSpec("atom outside [0,1]");
      break;
    }
  }
  const double total = m.total_mass();
  if (!(total > 0)) throw InvalidSpec("measure has zero total mass");
  for (auto& nd : m.density) nd.value /= total;
  for (auto& a : m.atoms) a.mass /= total;
  return m;
}

double polarization_metric(const BeliefMeasure& measure) {
  // Elements of one half, sorted by location: atoms are steps, density pieces
  // ramp the CDF quadratically.
  struct Elem {
    double lo, hi, f_lo, f_hi, mass;
    bool is_atom;
  };
  auto build_half = [&](bool upper) {
    std::vector<Elem> es;
    for (const auto& a : measure.atoms) {
      if ((upper && a.location >= 0.5) || (!upper && a.location <= 0.5))
        es.push_back({a.location, a.location, 0, 0, a.mass, true});
    }
    for (size_t i = 0; i + 1 < measure.density.size(); ++i) {
      double lo = measure.density[i].location, hi = measure.density[i + 1].location;
      double flo = measure.density[i].value, fhi = measure.density[i + 1].value;
      if (!(hi > lo)) continue;
      auto at = [&](double x) { return flo + (fhi - flo) * (x - lo) / (hi - lo); };
      double a = lo, b = hi;
      if (upper)
        a = std::max(lo, 0.5);
      else
        b = std::min(hi, 0.5);
      if (!(b > a)) continue;
      es.push_back({a, b, at(a), at(b), piece_mass(a, b, at(a), at(b)), false});
    }
    std::sort(es.begin(), es.end(), [](const Elem& x, const Elem& y) {
      return x.lo < y.lo || (x.lo == y.lo && x.is_atom && !y.is_atom);
    });
    return es;
  };
  auto median_of = [&](const std::vector<Elem>& es) {
    double total = 0;
    for (const auto& e : es) total += e.mass;
    if (!(total > 0)) throw EmptyHalf("half-population has zero mass");
    const double target = 0.5 * total;
    double cum = 0;
    for (const auto& e : es) {
      if (cum + e.mass >= target) {
        if (e.is_atom) return e.lo;
        // invert the quadratic CDF of a linear density piece by bisection
        const double need = target - cum;
        double a = e.lo, b = e.hi;
        auto mass_to = [&](double x) {
          const double fx = e.f_lo + (e.f_hi - e.f_lo) * (x - e.lo) / (e.hi - e.lo);
          return piece_mass(e.lo, x, e.f_lo, fx);
        };
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (a + b);
          if (mass_to(mid) < need)
            a = mid;
          else
            b = mid;
          if (b - a <= 1e-15) break;
        }
        return 0.5 * (a + b);
      }
      cum += e.mass;
    }
    return es.back().hi;
  };
  const double m_low = median_of(build_half(false));
  const double m_high = median_of(build_half(true));
  return m_high - m_low;
}

namespace {

Decomposition decompose(const Solution& sol, const BeliefMeasure& initial) {
  Decomposition d;
  const auto& segs = sol.segments();
  auto is_flow = [](BranchKind k) {
    return k == BranchKind::OwnLeft || k == BranchKind::OwnRight || k == BranchKind::OppLeft ||
           k == BranchKind::OppRight;
  };
  auto kind_alpha = [](BranchKind k) {
    return (k == BranchKind::OwnLeft || k == BranchKind::OppRight) ? 1.0 : 0.0;
  };
  auto kind_terminal = [](BranchKind k, const Segment& s) {
    switch (k) {
      case BranchKind::OwnLeft:
      case BranchKind::OppRight:
        return s.lo;  // drift down
      default:
        return s.hi;  // drift up
    }
  };
  auto kind_to_rest = [](BranchKind k) {
    return k == BranchKind::OppLeft || k == BranchKind::OppRight;
  };

  for (size_t i = 0; i + 1 < initial.density.size(); ++i) {
    const double lo = initial.density[i].location, hi = initial.density[i + 1].location;
    const double flo = initial.density[i].value, fhi = initial.density[i + 1].value;
    if (!(hi > lo)) continue;
    auto at = [&](double x) { return flo + (fhi - flo) * (x - lo) / (hi - lo); };
    for (const auto& seg : segs) {
      const double a = std::max(lo, seg.lo), b = std::min(hi, seg.hi);
      if (!(b > a)) continue;
      if (is_flow(seg.kind)) {
        d.flow.push_back({a, b, at(a), at(b), kind_alpha(seg.kind),
                          kind_terminal(seg.kind, seg), kind_to_rest(seg.kind)});
      } else {
        d.frozen.push_back({a, b, at(a), at(b)});
      }
    }
  }
  for (const auto& atom : initial.atoms) {
    if (!(atom.mass > 0)) continue;
    const auto a = sol.alpha(atom.location);
    if (!a) {
      d.frozen_atoms.push_back(atom);
      continue;
    }
    if (*a == 0.5) {
      d.rest_mass0 += atom.mass;
      continue;
    }
    for (const auto& seg : segs) {
      if (atom.location >= seg.lo && atom.location <= seg.hi && is_flow(seg.kind) &&
          kind_alpha(seg.kind) == *a) {
        d.flow_atoms.push_back({atom.location, atom.mass, *a, kind_terminal(seg.kind, seg),
                                kind_to_rest(seg.kind)});
        break;
      }
    }
  }
  return d;
}

}  // namespace

std::vector<PopulationSnapshot> evolve(const Solution& sol, const BeliefMeasure& initial,
                                       TrueState state, double dt, double t_end) {
  if (!(dt > 0) || !(t_end >= 0)) throw ValidationError("need dt > 0 and t_end >= 0");
  const double lambda = sol.params().lambda;
  const Decomposition dec = decompose(sol, initial);
  const double z_target = (state == TrueState::L) ? 0.0 : 1.0;
  // Hazard of an actual breakthrough given the true state and attention.
  auto hazard = [&](double alpha) {
    return (state == TrueState::L) ? lambda * (1.0 - alpha) : lambda * alpha;
  };
  const double rest_drain = 0.5 * lambda;
  const bool has_rest = sol.cutoffs().p_star > 0 && sol.regime() == Regime::OwnAndOpposite;
  const double p_rest = has_rest ? sol.cutoffs().p_star : std::numeric_limits<double>::quiet_NaN();

  auto snapshot_at = [&](double t) {
    Assembler as;
    double rest_mass = 0;

    // Initial rest-point mass drains exponentially toward the revealed state.
    if (dec.rest_mass0 > 0) {
      const double keep = std::exp(-rest_drain * t);
      rest_mass += dec.rest_mass0 * keep;
      as.add_atom(z_target, dec.rest_mass0 * (1.0 - keep), kMediaNone);
    }

    for (const auto& fa : dec.flow_atoms) {
      const double h = hazard(fa.alpha);
      const double lt = logit(fa.x0), lb = logit(fa.terminal);
      const double T = std::abs(lt - lb) / lambda;
      const char* outlet = (fa.alpha == 1.0) ? kMediaL : kMediaR;
      if (t < T) {
        const double y = expit(lt + (fa.alpha == 1.0 ? -lambda * t : lambda * t));
        as.add_atom(y, fa.mass * std::exp(-h * t), outlet);
        as.add_atom(z_target, fa.mass * (1.0 - std::exp(-h * t)), kMediaNone);
        if (fa.alpha == 1.0)
          as.share.l_outlet += fa.mass * std::exp(-h * t);
        else
          as.share.r_outlet += fa.mass * std::exp(-h * t);
      } else {
        const double arrive = fa.mass * std::exp(-h * T);
        as.add_atom(z_target, fa.mass - arrive, kMediaNone);
        if (fa.to_rest) {
          const double keep = std::exp(-rest_drain * (t - T));
          rest_mass += arrive * keep;
          as.add_atom(z_target, arrive * (1.0 - keep), kMediaNone);
        } else {
          as.add_atom(fa.terminal, arrive, kMediaNone);
        }
      }
    }

    for (const auto& fp : dec.flow) {
      const double h = hazard(fp.alpha);
      const bool down = fp.alpha == 1.0;
      const double lb = logit(fp.terminal);
      const char* outlet = down ? kMediaL : kMediaR;
      auto f0 = [&](double x) {
        return fp.f_lo + (fp.f_hi - fp.f_lo) * (x - fp.lo) / (fp.hi - fp.lo);
      };
      auto exit_time = [&](double x) { return std::abs(logit(x) - lb) / lambda; };
      // Initial beliefs absorbed by time t lie within drift-distance t of the
      // terminal; the frontier belief is exactly t away.
      const double x_f = expit(down ? lb + lambda * t : lb - lambda * t);
      double abs_lo, abs_hi, srv_lo, srv_hi;
      if (down) {
        abs_lo = fp.lo;
        abs_hi = std::min(fp.hi, std::max(fp.lo, x_f));
        srv_lo = abs_hi;
        srv_hi = fp.hi;
      } else {
        abs_hi = fp.hi;
        abs_lo = std::max(fp.lo, std::min(fp.hi, x_f));
        srv_lo = fp.lo;
        srv_hi = abs_lo;
      }

      if (abs_hi > abs_lo) {
        const double mass_abs = piece_mass(abs_lo, abs_hi, f0(abs_lo), f0(abs_hi));
        const double arrived =
            integrate([&](double x) { return f0(x) * std::exp(-h * exit_time(x)); }, abs_lo,
                      abs_hi);
        as.add_atom(z_target, mass_abs - arrived, kMediaNone);
        if (fp.to_rest) {
          const double still = integrate(
              [&](double x) {
                const double T = exit_time(x);
                return f0(x) * std::exp(-h * T - rest_drain * (t - T));
              },
              abs_lo, abs_hi);
          rest_mass += still;
          as.add_atom(z_target, arrived - still, kMediaNone);
        } else {
          as.add_atom(fp.terminal, arrived, kMediaNone);
        }
      }

      if (srv_hi > srv_lo) {
        const double keep = std::exp(-h * t);
        const double mass_srv = piece_mass(srv_lo, srv_hi, f0(srv_lo), f0(srv_hi));
        as.add_atom(z_target, mass_srv * (1.0 - keep), kMediaNone);
        const double m_exact = mass_srv * keep;
        if (m_exact > 0) {
          // Transport nodes along the flow: the image density is exact
          // pointwise, then scaled so the exported trapezoid mass is exact.
          // The image stays ascending in location for both drift directions
          // because the shift acts in logit space.
          const int n = 49;
          const double la = logit(srv_lo), lb2 = logit(srv_hi);
          std::vector<DensityNode> run(n);
          for (int i = 0; i < n; ++i) {
            const double lx = la + (lb2 - la) * i / (n - 1);
            const double x0 = expit(lx);
            const double y = expit(lx + (down ? -lambda * t : lambda * t));
            run[i] = {y, f0(x0) * (x0 * (1.0 - x0)) / (y * (1.0 - y)) * keep};
          }
          double trap = 0;
          for (int i = 0; i + 1 < n; ++i)
            trap += piece_mass(run[i].location, run[i + 1].location, run[i].value,
                               run[i + 1].value);
          const double scale = (trap > 0) ? m_exact / trap : 0.0;
          if (!as.nodes.empty()) {  // zero the gap between disjoint runs
            as.nodes.push_back({as.nodes.back().location, 0.0});
            as.node_media.emplace_back(kMediaNone);
            as.nodes.push_back({run.front().location, 0.0});
            as.node_media.emplace_back(kMediaNone);
          }
          for (auto& nd : run) {
            as.nodes.push_back({nd.location, nd.value * scale});
            as.node_media.emplace_back(outlet);
          }
          if (down)
            as.share.l_outlet += m_exact;
          else
            as.share.r_outlet += m_exact;
        }
      }
    }

    if (rest_mass > 0 && has_rest) {
      as.add_atom(p_rest, rest_mass, kMediaMulti);
      as.share.multi_home += rest_mass;
    }
    for (const auto& a : dec.frozen_atoms) as.add_atom(a.location, a.mass, kMediaNone);

    PopulationSnapshot snap;
    snap.time = t;
    // Frozen density stays in place; splice it with the transported runs in
    // location order (runs never overlap frozen regions).
    struct Run {
      std::vector<DensityNode> nodes;
      std::vector<std::string> media;
    };
    std::vector<Run> runs;
    if (!as.nodes.empty()) runs.push_back({as.nodes, as.node_media});
    for (const auto& fz : dec.frozen) {
      Run r;
      r.nodes = {{fz.lo, fz.f_lo}, {fz.hi, fz.f_hi}};
      r.media = {kMediaNone, kMediaNone};
      runs.push_back(std::move(r));
    }
    std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
      return a.nodes.front().location < b.nodes.front().location;
    });
    for (const auto& r : runs) {
      if (!snap.measure.density.empty()) {
        snap.measure.density.push_back({snap.measure.density.back().location, 0.0});
        snap.node_media.emplace_back(kMediaNone);
        snap.measure.density.push_back({r.nodes.front().location, 0.0});
        snap.node_media.emplace_back(kMediaNone);
      }
      snap.measure.density.insert(snap.measure.density.end(), r.nodes.begin(), r.nodes.end());
      snap.node_media.insert(snap.node_media.end(), r.media.begin(), r.media.end());
    }
    std::vector<size_t> order(as.atoms.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
      return as.atoms[i].location < as.atoms[j].location;
    });
    for (size_t i : order) {
      snap.measure.atoms.push_back(as.atoms[i]);
      snap.atom_media.push_back(as.atom_media[i]);
    }
    as.share.none = 0;
    double moving = as.share.l_outlet + as.share.r_outlet + as.share.multi_home;
    as.share.none = std::max(0.0, snap.measure.total_mass() - moving);
    snap.media_share = as.share;
    try {
      snap.polarization = polarization_metric(snap.measure);
    } catch (const EmptyHalf&) {
      snap.polarization = std::numeric_limits<double>::quiet_NaN();
    }
    return snap;
  };

  std::vector<PopulationSnapshot> out;
  for (double t = 0;; t += dt) {
    if (t >= t_end - 1e-15) {
      out.push_back(snapshot_at(t_end));
      break;
    }
    out.push_back(snapshot_at(t));
  }
  return out;
}

std::string snapshots_to_csv(const std::vector<PopulationSnapshot>& snaps) {
  CsvTable tab;
  tab.header = {"time", "kind", "location", "mass_or_density", "media_choice"};
  for (const auto& s : snaps) {
    for (size_t i = 0; i < s.measure.atoms.size(); ++i)
      tab.rows.push_back({fmt17(s.time), "atom", fmt17(s.measure.atoms[i].location),
                          fmt17(s.measure.atoms[i].mass), s.atom_media[i]});
    for (size_t i = 0; i < s.measure.density.size(); ++i)
      tab.rows.push_back({fmt17(s.time), "node", fmt17(s.measure.density[i].location),
                          fmt17(s.measure.density[i].value), s.node_media[i]});
  }
  return tab.str();
}

}  // namespace attn
