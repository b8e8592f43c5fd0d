#include "attn/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "attn/discrete.hpp"
#include "attn/dynamics.hpp"
#include "attn/gamma.hpp"
#include "attn/io.hpp"
#include "attn/population.hpp"
#include "attn/solution.hpp"
#include "attn/variants.hpp"

namespace attn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "lambda", "rho",   "uRR",    "uLL",     "uLR",   "uRL",    "c",
      "variant", "alpha-max", "lambdaR", "lambdaL", "frontier", "middle",
      "grid",   "actions", "seed", "n-paths", "p0",   "dt",     "t-end",
      "periods", "key",   "from",  "to",      "steps", "state",  "init",
      "mean",   "sd",     "out",   "records", "format"};
  return keys;
}

struct FileEntry {
  std::string key, value;
  int line;  // 0 for JSON configs
};

std::vector<FileEntry> load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<FileEntry> out;
  const size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
      throw ParseError(std::string("cannot parse JSON config: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("JSON config must be a single object");
    for (const auto& [k, v] : j.items()) {
      if (k == "middle" && v.is_array()) {
        for (const auto& mv : v) {
          if (mv.is_array() && mv.size() == 2) {
            out.push_back({k, fmt17(mv[0].get<double>()) + "," + fmt17(mv[1].get<double>()), 0});
          } else if (mv.is_string()) {
            out.push_back({k, mv.get<std::string>(), 0});
          } else {
            throw ParseError("JSON config: 'middle' entries must be [uR, uL] pairs");
          }
        }
      } else if (v.is_string()) {
        out.push_back({k, v.get<std::string>(), 0});
      } else if (v.is_boolean()) {
        out.push_back({k, v.get<bool>() ? "true" : "false", 0});
      } else if (v.is_number_integer()) {
        out.push_back({k, std::to_string(v.get<long long>()), 0});
      } else if (v.is_number()) {
        out.push_back({k, fmt17(v.get<double>()), 0});
      } else {
        throw ParseError("JSON config: unsupported value type for key '" + k + "'");
      }
    }
    return out;
  }
  // flat key=value lines; '#' starts a comment
  std::istringstream ss(text);
  std::string ln;
  int line = 0;
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(ss, ln)) {
    ++line;
    const std::string stripped = trim(ln);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line) + ": expected key=value, got '" +
                       stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ParseError("config line " + std::to_string(line) + ": empty key");
    out.push_back({key, value, line});
  }
  return out;
}

double parse_number(const std::string& v, const std::string& ctx) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ParseError("cannot parse number for " + ctx + ": '" + v + "'");
  }
}

long long parse_integer(const std::string& v, const std::string& ctx) {
  try {
    size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ParseError("cannot parse integer for " + ctx + ": '" + v + "'");
  }
}

std::uint64_t parse_unsigned(const std::string& v, const std::string& ctx) {
  try {
    size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ParseError("cannot parse unsigned integer for " + ctx + ": '" + v + "'");
  }
}

MiddleAction parse_middle(const std::string& v, const std::string& ctx) {
  const auto comma = v.find(',');
  if (comma == std::string::npos) {
    throw ParseError("cannot parse middle action for " + ctx + ": '" + v +
                     "' (expected uR,uL)");
  }
  MiddleAction m;
  m.u_m_R = parse_number(v.substr(0, comma), ctx);
  m.u_m_L = parse_number(v.substr(comma + 1), ctx);
  return m;
}

void apply_kv(RunConfig& cfg, std::set<std::string>& provided, const std::string& key,
              const std::string& value, int line) {
  const std::string ctx =
      line > 0 ? "key '" + key + "' (config line " + std::to_string(line) + ")"
               : "key '" + key + "'";
  if (!known_keys().count(key)) {
    throw ParseError("unknown " + ctx);
  }
  if (key == "lambda") cfg.model.lambda = parse_number(value, ctx);
  else if (key == "rho") cfg.model.rho = parse_number(value, ctx);
  else if (key == "uRR") cfg.model.u_r_R = parse_number(value, ctx);
  else if (key == "uLL") cfg.model.u_l_L = parse_number(value, ctx);
  else if (key == "uLR") cfg.model.u_l_R = parse_number(value, ctx);
  else if (key == "uRL") cfg.model.u_r_L = parse_number(value, ctx);
  else if (key == "c") cfg.model.c = parse_number(value, ctx);
  else if (key == "variant") cfg.variant = value;
  else if (key == "alpha-max") cfg.alpha_max = parse_number(value, ctx);
  else if (key == "lambdaR") cfg.lambda_R = parse_number(value, ctx);
  else if (key == "lambdaL") cfg.lambda_L = parse_number(value, ctx);
  else if (key == "frontier") cfg.frontier = value;
  else if (key == "middle") cfg.middles.push_back(parse_middle(value, ctx));
  else if (key == "grid") cfg.grid_n = static_cast<int>(parse_integer(value, ctx));
  else if (key == "actions") cfg.n_actions = static_cast<int>(parse_integer(value, ctx));
  else if (key == "seed") cfg.seed = parse_unsigned(value, ctx);
  else if (key == "n-paths") cfg.n_paths = parse_unsigned(value, ctx);
  else if (key == "p0") cfg.p0 = parse_number(value, ctx);
  else if (key == "dt") cfg.dt = parse_number(value, ctx);
  else if (key == "t-end") cfg.t_end = parse_number(value, ctx);
  else if (key == "periods") cfg.n_periods = static_cast<int>(parse_integer(value, ctx));
  else if (key == "key") cfg.sweep_key = value;
  else if (key == "from") cfg.sweep_from = parse_number(value, ctx);
  else if (key == "to") cfg.sweep_to = parse_number(value, ctx);
  else if (key == "steps") cfg.sweep_steps = static_cast<int>(parse_integer(value, ctx));
  else if (key == "state") cfg.state = value;
  else if (key == "init") cfg.init = value;
  else if (key == "mean") cfg.init_mean = parse_number(value, ctx);
  else if (key == "sd") cfg.init_sd = parse_number(value, ctx);
  else if (key == "out") cfg.out = value;
  else if (key == "records") cfg.records = value;
  else if (key == "format") cfg.format = value;
  provided.insert(key);
}

void check_choice(const std::string& key, const std::string& value,
                  const std::set<std::string>& allowed) {
  if (!allowed.count(value)) {
    std::string opts;
    for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
    throw ValidationError("invalid value '" + value + "' for key '" + key + "' (expected one of " +
                          opts + ")");
  }
}

std::string resolve_output(const std::string& name) {
  if (name.empty() || name.front() == '/') return name;
  const char* dir = std::getenv("ATTN_OUTPUT_DIR");
  if (!dir || !*dir) return name;
  return std::string(dir) + "/" + name;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open output file: " + path);
  f << text;
}

// Generic JSON rendering of a CSV table: everything stays a fmt17 string, so
// the two formats are byte-for-byte consistent with each other.
std::string json_from_table(const CsvTable& t, const std::string& command) {
  JsonWriter w;
  w.begin_object();
  w.field("command", command);
  w.key("meta").begin_object();
  for (const auto& [k, v] : t.comments) w.field(k, v);
  w.end_object();
  w.key("columns").begin_array();
  for (const auto& h : t.header) w.value(h);
  w.end_array();
  w.key("rows").begin_array();
  for (const auto& row : t.rows) {
    w.begin_array();
    for (const auto& cell : row) w.value(cell);
    w.end_array();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

std::vector<double> belief_grid(int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = double(i) / (n - 1);
  return g;
}

double resolve_dt(const RunConfig& cfg, const std::string& command) {
  if (cfg.dt > 0) return cfg.dt;
  if (command == "twoperiod" || command == "population") return 1.0;
  return 1e-3;
}

void push_cutoff_comments(CsvTable& t, const VariantCutoffs& co) {
  t.comments.push_back({"p_hat", fmt17(co.p_hat)});
  t.comments.push_back({"c_bar", fmt17(co.c_bar)});
  t.comments.push_back({"c_underbar", fmt17(co.c_underbar)});
  t.comments.push_back({"p_low_star", fmt17(co.p_low_star)});
  t.comments.push_back({"p_high_star", fmt17(co.p_high_star)});
  t.comments.push_back({"p_star", fmt17(co.p_star)});
  if (co.p_check) t.comments.push_back({"p_check", fmt17(*co.p_check)});
  if (co.p_low) t.comments.push_back({"p_low", fmt17(*co.p_low)});
  if (co.p_high) t.comments.push_back({"p_high", fmt17(*co.p_high)});
  if (co.q_bar) t.comments.push_back({"q_bar", fmt17(*co.q_bar)});
  if (co.q_low) t.comments.push_back({"q_low", fmt17(*co.q_low)});
}

BranchKind segment_kind(const std::vector<Segment>& segs, double p) {
  for (size_t i = 0; i < segs.size(); ++i) {
    if (p < segs[i].hi || i + 1 == segs.size()) return segs[i].kind;
  }
  return segs.back().kind;
}

GammaFrontier make_frontier(const RunConfig& cfg) {
  if (cfg.frontier == "linear") return gamma_from_g([](double x) { return x; });
  return builtin_diminishing_frontier();
}

// ---------------------------------------------------------------- commands

CsvTable run_solve(const RunConfig& cfg) {
  CsvTable t;
  t.comments.push_back({"variant", cfg.variant});
  const auto grid = belief_grid(cfg.grid_n);
  if (cfg.variant == "baseline") {
    const Solution sol(cfg.model);
    t.comments.push_back({"regime", to_string(sol.regime())});
    const CutoffSet& co = sol.cutoffs();
    VariantCutoffs vc;
    vc.p_hat = co.p_hat;
    vc.c_bar = co.c_bar;
    vc.c_underbar = co.c_underbar;
    vc.p_low_star = co.p_low_star;
    vc.p_high_star = co.p_high_star;
    vc.p_star = co.p_star;
    vc.p_check = co.p_check;
    vc.p_low = co.p_low;
    vc.p_high = co.p_high;
    push_cutoff_comments(t, vc);
    t.header = {"p", "V", "alpha", "branch"};
    for (double p : grid) {
      const auto a = sol.alpha(p);
      t.rows.push_back({fmt17(p), fmt17(sol.value(p)), fmt17(a ? *a : kNaN),
                        to_string(sol.branch_at(p))});
    }
  } else if (cfg.variant == "nonexclusive" || cfg.variant == "asymmetric") {
    VariantSolution vs = cfg.variant == "nonexclusive"
                             ? nonexclusive_solution(cfg.model,
                                                     {1.0 - cfg.alpha_max, cfg.alpha_max})
                             : asymmetric_solution(cfg.model, {cfg.lambda_R, cfg.lambda_L});
    if (cfg.variant == "nonexclusive") {
      t.comments.push_back({"alpha_max", fmt17(cfg.alpha_max)});
      t.comments.push_back({"alpha_min", fmt17(1.0 - cfg.alpha_max)});
    } else {
      t.comments.push_back({"lambda_R", fmt17(cfg.lambda_R)});
      t.comments.push_back({"lambda_L", fmt17(cfg.lambda_L)});
    }
    t.comments.push_back({"regime", to_string(vs.regime())});
    push_cutoff_comments(t, vs.cutoffs());
    t.header = {"p", "V", "alpha", "branch"};
    const bool learning = vs.regime() != Regime::NoLearning;
    for (double p : grid) {
      const auto a = vs.alpha(p);
      t.rows.push_back({fmt17(p), fmt17(vs.value(p)), fmt17(a ? *a : kNaN),
                        learning ? to_string(segment_kind(vs.segments(), p))
                                 : to_string(p < vs.cutoffs().p_hat ? BranchKind::StopL
                                                                    : BranchKind::StopR)});
    }
  } else if (cfg.variant == "gamma") {
    const GammaFrontier f = make_frontier(cfg);
    const GammaSolution gs(f, cfg.model);
    t.comments.push_back({"frontier", cfg.frontier});
    t.comments.push_back({"fixed_point", fmt17(f.fixed_point)});
    t.comments.push_back({"regime", to_string(gs.regime())});
    t.comments.push_back({"linear_route", gs.linear_route() ? "1" : "0"});
    if (!gs.linear_route()) {
      t.comments.push_back({"mixed", gs.mixed() ? "1" : "0"});
      t.comments.push_back({"stationary_level", fmt17(gs.stationary_level())});
      t.comments.push_back({"p_low_star", fmt17(gs.p_low_star())});
      t.comments.push_back({"p_high_star", fmt17(gs.p_high_star())});
    }
    t.header = {"p", "V", "lambda", "alpha", "region"};
    for (double p : grid) {
      t.rows.push_back({fmt17(p), fmt17(gs.value(p)), fmt17(gs.lambda_choice(p)),
                        fmt17(gs.alpha_choice(p)), gs.region(p)});
    }
  } else {  // multiaction
    const Solution base(cfg.model);
    t.comments.push_back({"regime", to_string(base.regime())});
    t.comments.push_back({"n_middle", fmt17(double(cfg.middles.size()))});
    for (size_t i = 0; i < cfg.middles.size(); ++i) {
      const MCutoffs mc = m_strategy_cutoffs(cfg.model, cfg.middles[i]);
      const std::string tag = "m" + std::to_string(i + 1);
      t.comments.push_back({tag + "_u_m_R", fmt17(cfg.middles[i].u_m_R)});
      t.comments.push_back({tag + "_u_m_L", fmt17(cfg.middles[i].u_m_L)});
      t.comments.push_back({tag + "_q1", fmt17(mc.q1 ? *mc.q1 : kNaN)});
      t.comments.push_back({tag + "_q2", fmt17(mc.q2 ? *mc.q2 : kNaN)});
      t.comments.push_back({tag + "_p_m_low", fmt17(mc.p_m_low)});
      t.comments.push_back({tag + "_p_m_high", fmt17(mc.p_m_high)});
    }
    t.header = {"p", "V", "choice"};
    for (double p : grid) {
      const EnvelopePoint e = multi_action_envelope(cfg.model, cfg.middles, p);
      t.rows.push_back({fmt17(p), fmt17(e.value), e.choice});
    }
  }
  return t;
}

CsvTable run_oracle(const RunConfig& cfg, const std::string& command) {
  CsvTable t;
  const double dt = resolve_dt(cfg, command);
  t.comments.push_back({"variant", cfg.variant});
  t.comments.push_back({"dt", fmt17(dt)});
  t.header = {"p", "V_dp", "V_env", "gap"};
  double sup = 0;
  if (cfg.variant == "baseline") {
    const DiscreteSolver solver(cfg.model, dt, cfg.grid_n, cfg.n_actions);
    const DiscreteSolution ds = solver.solve_infinite();
    const Solution sol(cfg.model);
    for (size_t i = 0; i < ds.p.size(); ++i) {
      const double env = sol.value(ds.p[i]);
      const double gap = std::fabs(ds.value[i] - env);
      sup = std::max(sup, gap);
      t.rows.push_back({fmt17(ds.p[i]), fmt17(ds.value[i]), fmt17(env), fmt17(gap)});
    }
    t.comments.push_back({"sweeps", fmt17(double(ds.sweeps))});
    t.comments.push_back({"actions", fmt17(double(cfg.n_actions))});
  } else if (cfg.variant == "gamma") {
    const GammaFrontier f = make_frontier(cfg);
    const GammaSolution gs(f, cfg.model);
    const GammaOracleResult ds = gamma_oracle(f, cfg.model, dt, cfg.grid_n, cfg.n_actions);
    for (size_t i = 0; i < ds.p.size(); ++i) {
      const double env = gs.value(ds.p[i]);
      const double gap = std::fabs(ds.value[i] - env);
      sup = std::max(sup, gap);
      t.rows.push_back({fmt17(ds.p[i]), fmt17(ds.value[i]), fmt17(env), fmt17(gap)});
    }
    t.comments.push_back({"sweeps", fmt17(double(ds.sweeps))});
    t.comments.push_back({"frontier", cfg.frontier});
    t.comments.push_back({"lambda_grid", fmt17(double(cfg.n_actions))});
  } else {
    throw ValidationError("oracle supports the baseline and gamma variants only");
  }
  t.comments.push_back({"sup_gap", fmt17(sup)});
  return t;
}

std::string run_simulate(const RunConfig& cfg) {
  if (cfg.variant != "baseline") {
    throw ValidationError("simulate supports the baseline variant only");
  }
  const Solution sol(cfg.model);
  std::vector<PathRecord> recs;
  std::vector<PathRecord>* rp = cfg.records.empty() ? nullptr : &recs;
  const McSummary s = monte_carlo(sol, cfg.p0, cfg.n_paths, cfg.seed, rp);
  const AnalyticOutcomes ao = analytic_outcomes(sol, cfg.p0);

  if (rp) {
    CsvTable rt;
    rt.comments.push_back({"p0", fmt17(cfg.p0)});
    rt.comments.push_back({"seed", fmt17(double(cfg.seed))});
    rt.header = {"path", "state", "breakthrough_time", "decision_time", "action", "correct",
                 "value"};
    for (size_t i = 0; i < recs.size(); ++i) {
      const PathRecord& r = recs[i];
      rt.rows.push_back({fmt17(double(i)), r.state_R ? "R" : "L", fmt17(r.breakthrough_time),
                         fmt17(r.decision_time), to_string(r.action), r.correct ? "1" : "0",
                         fmt17(r.value)});
    }
    write_text_file(resolve_output(cfg.records), rt.str());
  }

  JsonWriter w;
  w.begin_object();
  w.field("command", "simulate");
  w.field("variant", cfg.variant);
  w.field("regime", to_string(sol.regime()));
  w.field("p0", cfg.p0);
  w.field("seed", static_cast<std::int64_t>(cfg.seed));
  w.field("n_paths", static_cast<std::int64_t>(s.n_paths));
  w.field("mean_delay", s.mean_delay);
  w.field("se_delay", s.se_delay);
  w.field("mistake_rate", s.mistake_rate);
  w.field("se_mistake", s.se_mistake);
  w.field("value_mean", s.value_mean);
  w.field("se_value", s.se_value);
  w.key("analytic").begin_object();
  w.field("expected_delay", ao.expected_delay);
  w.field("mistake_prob", ao.mistake_prob);
  w.field("value_envelope", sol.value(cfg.p0));
  w.end_object();
  w.end_object();
  return w.str() + "\n";
}

CsvTable run_population(const RunConfig& cfg, const std::string& command) {
  if (cfg.variant != "baseline") {
    throw ValidationError("population supports the baseline variant only");
  }
  const Solution sol(cfg.model);
  const DistributionSpec spec = cfg.init == "uniform"
                                    ? DistributionSpec::uniform()
                                    : DistributionSpec::truncated_normal(cfg.init_mean,
                                                                         cfg.init_sd);
  const BeliefMeasure initial = init_population(spec);
  const TrueState st = cfg.state == "R" ? TrueState::R : TrueState::L;
  const double dt = resolve_dt(cfg, command);
  const auto snaps = evolve(sol, initial, st, dt, cfg.t_end);

  CsvTable t;
  t.comments.push_back({"variant", cfg.variant});
  t.comments.push_back({"regime", to_string(sol.regime())});
  t.comments.push_back({"state", cfg.state});
  t.comments.push_back({"init", cfg.init});
  t.comments.push_back({"dt", fmt17(dt)});
  t.comments.push_back({"t_end", fmt17(cfg.t_end)});
  t.comments.push_back({"snapshots", fmt17(double(snaps.size()))});
  for (size_t i = 0; i < snaps.size(); ++i) {
    const PopulationSnapshot& s = snaps[i];
    t.comments.push_back(
        {"snapshot_" + std::to_string(i),
         "t=" + fmt17(s.time) + " mass=" + fmt17(s.measure.total_mass()) +
             " pol=" + fmt17(s.polarization) + " L=" + fmt17(s.media_share.l_outlet) +
             " R=" + fmt17(s.media_share.r_outlet) + " multi=" + fmt17(s.media_share.multi_home) +
             " none=" + fmt17(s.media_share.none)});
  }
  t.header = {"time", "kind", "location", "mass_or_density", "media_choice"};
  for (const auto& s : snaps) {
    for (size_t i = 0; i < s.measure.atoms.size(); ++i) {
      t.rows.push_back({fmt17(s.time), "atom", fmt17(s.measure.atoms[i].location),
                        fmt17(s.measure.atoms[i].mass), s.atom_media[i]});
    }
    for (size_t i = 0; i < s.measure.density.size(); ++i) {
      t.rows.push_back({fmt17(s.time), "node", fmt17(s.measure.density[i].location),
                        fmt17(s.measure.density[i].value), s.node_media[i]});
    }
  }
  return t;
}

CsvTable run_sweep(const RunConfig& cfg) {
  const std::string& key = cfg.sweep_key;
  static const std::set<std::string> model_keys = {"c",   "lambda", "rho", "uRR",
                                                   "uLL", "uLR",    "uRL"};
  const bool variant_key = key == "alpha-max" || key == "lambdaR" || key == "lambdaL";
  if (!model_keys.count(key) && !variant_key) {
    throw ValidationError("cannot sweep key '" + key + "'");
  }
  if (key == "alpha-max" && cfg.variant != "nonexclusive") {
    throw ValidationError("sweep key 'alpha-max' requires variant=nonexclusive");
  }
  if ((key == "lambdaR" || key == "lambdaL") && cfg.variant != "asymmetric") {
    throw ValidationError("sweep key '" + key + "' requires variant=asymmetric");
  }
  if (cfg.variant == "multiaction") {
    throw ValidationError("sweep does not support the multiaction variant");
  }

  CsvTable t;
  t.comments.push_back({"variant", cfg.variant});
  t.comments.push_back({"key", key});
  t.comments.push_back({"from", fmt17(cfg.sweep_from)});
  t.comments.push_back({"to", fmt17(cfg.sweep_to)});
  t.comments.push_back({"steps", fmt17(double(cfg.sweep_steps))});
  t.header = {key,          "regime",      "p_hat",  "c_bar",
              "c_underbar", "p_low_star",  "p_high_star", "p_star"};
  for (int i = 0; i < cfg.sweep_steps; ++i) {
    const double v = cfg.sweep_steps == 1
                         ? cfg.sweep_from
                         : cfg.sweep_from +
                               i * (cfg.sweep_to - cfg.sweep_from) / (cfg.sweep_steps - 1);
    RunConfig c2 = cfg;
    if (key == "c") c2.model.c = v;
    else if (key == "lambda") c2.model.lambda = v;
    else if (key == "rho") c2.model.rho = v;
    else if (key == "uRR") c2.model.u_r_R = v;
    else if (key == "uLL") c2.model.u_l_L = v;
    else if (key == "uLR") c2.model.u_l_R = v;
    else if (key == "uRL") c2.model.u_r_L = v;
    else if (key == "alpha-max") c2.alpha_max = v;
    else if (key == "lambdaR") c2.lambda_R = v;
    else if (key == "lambdaL") c2.lambda_L = v;

    std::string regime;
    double p_hat = kNaN, c_bar = kNaN, c_under = kNaN;
    double p_ls = kNaN, p_hs = kNaN, p_star = kNaN;
    if (cfg.variant == "baseline") {
      const Solution sol(c2.model);
      regime = to_string(sol.regime());
      const CutoffSet& co = sol.cutoffs();
      p_hat = co.p_hat;
      c_bar = co.c_bar;
      c_under = co.c_underbar;
      p_ls = co.p_low_star;
      p_hs = co.p_high_star;
      p_star = co.p_star;
    } else if (cfg.variant == "nonexclusive" || cfg.variant == "asymmetric") {
      const VariantSolution vs =
          cfg.variant == "nonexclusive"
              ? nonexclusive_solution(c2.model, {1.0 - c2.alpha_max, c2.alpha_max})
              : asymmetric_solution(c2.model, {c2.lambda_R, c2.lambda_L});
      regime = to_string(vs.regime());
      const VariantCutoffs& co = vs.cutoffs();
      p_hat = co.p_hat;
      c_bar = co.c_bar;
      c_under = co.c_underbar;
      p_ls = co.p_low_star;
      p_hs = co.p_high_star;
      p_star = co.p_star;
    } else {  // gamma
      const GammaFrontier f = make_frontier(c2);
      const GammaSolution gs(f, c2.model);
      regime = to_string(gs.regime());
      p_hat = indifference_belief(c2.model);
      c_bar = regime_cutoffs(c2.model).c_bar;
      if (gs.linear_route()) {
        const CutoffSet& co = gs.baseline().cutoffs();
        c_under = co.c_underbar;
        p_ls = co.p_low_star;
        p_hs = co.p_high_star;
        p_star = co.p_star;
      } else {
        p_ls = gs.p_low_star();
        p_hs = gs.p_high_star();
        p_star = gs.mixed() ? 0.5 : kNaN;
      }
    }
    t.rows.push_back({fmt17(v), regime, fmt17(p_hat), fmt17(c_bar), fmt17(c_under), fmt17(p_ls),
                      fmt17(p_hs), fmt17(p_star)});
  }
  return t;
}

CsvTable run_diagnose(const RunConfig& cfg) {
  if (cfg.variant != "baseline") {
    throw ValidationError("diagnose supports the baseline variant only");
  }
  const Solution sol(cfg.model);
  CsvTable t;
  t.comments.push_back({"variant", cfg.variant});
  t.comments.push_back({"regime", to_string(sol.regime())});
  if (sol.regime() != Regime::NoLearning) {
    const PastingGaps pg = pasting_gaps(sol);
    t.comments.push_back({"paste_low_star", fmt17(pg.low_star)});
    t.comments.push_back({"paste_high_star", fmt17(pg.high_star)});
    t.comments.push_back({"paste_star_left", fmt17(pg.star_left)});
    t.comments.push_back({"paste_star_right", fmt17(pg.star_right)});
  }
  t.header = {"p", "residual", "crossing_gap", "dF_dalpha_gap", "smooth_paste_gap", "note"};

  std::vector<double> points = belief_grid(cfg.grid_n);
  const CutoffSet& co = sol.cutoffs();
  for (const auto& sw : {co.p_check, co.p_low, co.p_high}) {
    if (sw) points.push_back(*sw);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  double max_res = 0, max_cross = 0, max_dfa = 0, max_paste = 0;
  for (double p : points) {
    try {
      const HjbDiagnostics d = hjb_diagnostics(sol, p);
      max_res = std::max(max_res, std::fabs(d.residual));
      max_cross = std::max(max_cross, std::fabs(d.crossing_gap));
      max_dfa = std::max(max_dfa, std::fabs(d.dF_dalpha_gap));
      max_paste = std::max(max_paste, std::fabs(d.smooth_paste_gap));
      t.rows.push_back({fmt17(p), fmt17(d.residual), fmt17(d.crossing_gap),
                        fmt17(d.dF_dalpha_gap), fmt17(d.smooth_paste_gap), ""});
    } catch (const KinkPoint&) {
      const KinkCheck k = kink_check(sol, p);
      t.rows.push_back({fmt17(p), "nan", "nan", "nan", "nan",
                        std::string("kink left=") + fmt17(k.left) + " right=" + fmt17(k.right) +
                            (k.convex ? " convex" : " concave")});
    }
  }
  t.comments.push_back({"max_residual", fmt17(max_res)});
  t.comments.push_back({"max_crossing_gap", fmt17(max_cross)});
  t.comments.push_back({"max_dF_dalpha_gap", fmt17(max_dfa)});
  t.comments.push_back({"max_smooth_paste_gap", fmt17(max_paste)});
  return t;
}

CsvTable run_twoperiod(const RunConfig& cfg, const std::string& command) {
  if (cfg.variant != "baseline") {
    throw ValidationError("twoperiod supports the baseline variant only");
  }
  const double dt = resolve_dt(cfg, command);
  const DiscreteSolver solver(cfg.model, dt, cfg.grid_n, cfg.n_actions);
  const DiscreteSolution ds = solver.solve_finite(cfg.n_periods);
  const double p_hat = indifference_belief(cfg.model);
  const double ld = cfg.model.lambda * dt;

  CsvTable t;
  t.comments.push_back({"variant", cfg.variant});
  t.comments.push_back({"dt", fmt17(dt)});
  t.comments.push_back({"periods", fmt17(double(cfg.n_periods))});
  t.comments.push_back({"actions", fmt17(double(cfg.n_actions))});
  t.comments.push_back({"p_hat", fmt17(p_hat)});
  t.header = {"p", "V", "a", "outlet", "behavior"};

  std::vector<std::string> behavior(ds.p.size());
  for (size_t i = 0; i < ds.p.size(); ++i) {
    const double p = ds.p[i];
    const int ch = ds.choice[i];
    std::string outlet, behav;
    double a = kNaN;
    if (choice_is_stop(ch)) {
      outlet = ch == -2 ? "stop-l" : "stop-r";
      behav = "stop";
    } else {
      a = solver.action_a(ch);
      if (a >= 1.0 - 1e-12) outlet = "L";
      else if (a <= ld + 1e-12) outlet = "R";
      else outlet = "interior";
      if (outlet == "interior") behav = "interior";
      else if (p <= p_hat) behav = outlet == "L" ? "own" : "opp";
      else behav = outlet == "R" ? "own" : "opp";
    }
    behavior[i] = behav;
    t.rows.push_back({fmt17(p), fmt17(ds.value[i]), fmt17(a), outlet, behav});
  }

  // behavior thresholds scanned from the grid
  double exp_lo = kNaN, exp_hi = kNaN, own_to_opp = kNaN, opp_to_own = kNaN;
  for (size_t i = 0; i < behavior.size(); ++i) {
    if (behavior[i] != "stop") {
      if (std::isnan(exp_lo)) exp_lo = ds.p[i];
      exp_hi = ds.p[i];
    }
    if (i > 0 && behavior[i] == "opp" && behavior[i - 1] == "own" && std::isnan(own_to_opp)) {
      own_to_opp = ds.p[i];
    }
    if (i > 0 && behavior[i] == "own" && behavior[i - 1] == "opp" && std::isnan(opp_to_own)) {
      opp_to_own = ds.p[i];
    }
  }
  t.comments.push_back({"threshold_exp_lo", fmt17(exp_lo)});
  t.comments.push_back({"threshold_own_to_opp", fmt17(own_to_opp)});
  t.comments.push_back({"threshold_opp_to_own", fmt17(opp_to_own)});
  t.comments.push_back({"threshold_exp_hi", fmt17(exp_hi)});
  return t;
}

}  // namespace

CliInvocation parse_cli(const std::vector<std::string>& args) {
  CliInvocation inv;
  CLI::App app{"Attention-allocation decision model: solvers, oracles and simulators"};
  app.name("attn");
  app.fallthrough(true);
  app.require_subcommand(0, 1);

  std::string f_config;
  double f_lambda = 0, f_rho = 0, f_uRR = 0, f_uLL = 0, f_uLR = 0, f_uRL = 0, f_c = 0;
  std::string f_variant, f_frontier, f_key, f_state, f_init, f_out, f_records, f_format;
  double f_alpha_max = 0, f_lambdaR = 0, f_lambdaL = 0;
  std::vector<std::string> f_middles;
  int f_grid = 0, f_actions = 0, f_periods = 0, f_steps = 0;
  std::uint64_t f_seed = 0, f_npaths = 0;
  double f_p0 = 0, f_dt = 0, f_tend = 0, f_from = 0, f_to = 0, f_mean = 0, f_sd = 0;

  app.add_option("--config", f_config, "Config file (flat key=value or JSON object)");
  std::map<std::string, CLI::Option*> opts;
  opts["lambda"] = app.add_option("--lambda", f_lambda, "News arrival rate (> 0)");
  opts["rho"] = app.add_option("--rho", f_rho, "Discount rate (>= 0)");
  opts["uRR"] = app.add_option("--uRR", f_uRR, "Payoff of action r in state R");
  opts["uLL"] = app.add_option("--uLL", f_uLL, "Payoff of action l in state L");
  opts["uLR"] = app.add_option("--uLR", f_uLR, "Payoff of action l in state R");
  opts["uRL"] = app.add_option("--uRL", f_uRL, "Payoff of action r in state L");
  opts["c"] = app.add_option("--c", f_c, "Flow cost of attention (>= 0)");
  opts["variant"] = app.add_option(
      "--variant", f_variant, "baseline|nonexclusive|asymmetric|gamma|multiaction");
  opts["alpha-max"] = app.add_option("--alpha-max", f_alpha_max,
                                     "Attention cap in (1/2, 1] (nonexclusive)");
  opts["lambdaR"] = app.add_option("--lambdaR", f_lambdaR, "Peak rate, R-evidence (asymmetric)");
  opts["lambdaL"] = app.add_option("--lambdaL", f_lambdaL, "Peak rate, L-evidence (asymmetric)");
  opts["frontier"] = app.add_option("--frontier", f_frontier, "builtin|linear (gamma)");
  opts["middle"] =
      app.add_option("--middle", f_middles, "Middle action payoffs uR,uL (repeatable)");
  opts["grid"] = app.add_option("--grid", f_grid, "Belief grid size (default 2001)");
  opts["actions"] = app.add_option("--actions", f_actions, "Experiment grid size (default 201)");
  opts["seed"] = app.add_option("--seed", f_seed, "Simulation seed");
  opts["n-paths"] = app.add_option("--n-paths", f_npaths, "Monte-Carlo path count");
  opts["p0"] = app.add_option("--p0", f_p0, "Initial belief in [0,1]");
  opts["dt"] = app.add_option("--dt", f_dt, "Period length / snapshot spacing");
  opts["t-end"] = app.add_option("--t-end", f_tend, "Population horizon");
  opts["periods"] = app.add_option("--periods", f_periods, "Finite-horizon period count");
  opts["key"] = app.add_option("--key", f_key, "Swept parameter name");
  opts["from"] = app.add_option("--from", f_from, "Sweep start value");
  opts["to"] = app.add_option("--to", f_to, "Sweep end value");
  opts["steps"] = app.add_option("--steps", f_steps, "Sweep step count (default 21)");
  opts["state"] = app.add_option("--state", f_state, "Population true state: L|R");
  opts["init"] = app.add_option("--init", f_init, "Initial cross-section: uniform|normal");
  opts["mean"] = app.add_option("--mean", f_mean, "Normal initial mean");
  opts["sd"] = app.add_option("--sd", f_sd, "Normal initial s.d.");
  opts["out"] = app.add_option("--out", f_out, "Also write the artifact to this file");
  opts["records"] = app.add_option("--records", f_records, "simulate: per-path CSV file");
  opts["format"] = app.add_option("--format", f_format, "csv|json");

  app.add_subcommand("solve", "Closed-form value and policy on the belief grid");
  app.add_subcommand("oracle", "Discrete-time dynamic program vs. the closed form");
  app.add_subcommand("simulate", "Monte-Carlo paths under the optimal policy");
  app.add_subcommand("population", "Deterministic evolution of a belief cross-section");
  app.add_subcommand("sweep", "Cutoffs and regime across one swept parameter");
  app.add_subcommand("diagnose", "Optimality-equation residuals on the belief grid");
  app.add_subcommand("twoperiod", "Finite-horizon discrete policy table");

  std::vector<const char*> argv;
  argv.push_back("attn");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      inv.help = true;
      inv.help_text = app.help();
      return inv;
    }
    throw ParseError(std::string("cannot parse command line: ") + e.what());
  }

  const auto subs = app.get_subcommands();
  if (subs.empty()) {
    throw ParseError(
        "missing command: expected one of solve, oracle, simulate, population, sweep, "
        "diagnose, twoperiod");
  }
  inv.command = subs.front()->get_name();

  RunConfig& cfg = inv.config;
  std::set<std::string> provided;
  if (!f_config.empty()) {
    for (const FileEntry& e : load_config_file(f_config)) {
      apply_kv(cfg, provided, e.key, e.value, e.line);
    }
  }
  // flags override file values
  const auto flag = [&](const char* k) { return opts.at(k)->count() > 0; };
  if (flag("lambda")) cfg.model.lambda = f_lambda;
  if (flag("rho")) cfg.model.rho = f_rho;
  if (flag("uRR")) cfg.model.u_r_R = f_uRR;
  if (flag("uLL")) cfg.model.u_l_L = f_uLL;
  if (flag("uLR")) cfg.model.u_l_R = f_uLR;
  if (flag("uRL")) cfg.model.u_r_L = f_uRL;
  if (flag("c")) cfg.model.c = f_c;
  if (flag("variant")) cfg.variant = f_variant;
  if (flag("alpha-max")) cfg.alpha_max = f_alpha_max;
  if (flag("lambdaR")) cfg.lambda_R = f_lambdaR;
  if (flag("lambdaL")) cfg.lambda_L = f_lambdaL;
  if (flag("frontier")) cfg.frontier = f_frontier;
  if (flag("middle")) {
    cfg.middles.clear();
    for (const auto& m : f_middles) cfg.middles.push_back(parse_middle(m, "key 'middle'"));
  }
  if (flag("grid")) cfg.grid_n = f_grid;
  if (flag("actions")) cfg.n_actions = f_actions;
  if (flag("seed")) cfg.seed = f_seed;
  if (flag("n-paths")) cfg.n_paths = f_npaths;
  if (flag("p0")) cfg.p0 = f_p0;
  if (flag("dt")) cfg.dt = f_dt;
  if (flag("t-end")) cfg.t_end = f_tend;
  if (flag("periods")) cfg.n_periods = f_periods;
  if (flag("key")) cfg.sweep_key = f_key;
  if (flag("from")) cfg.sweep_from = f_from;
  if (flag("to")) cfg.sweep_to = f_to;
  if (flag("steps")) cfg.sweep_steps = f_steps;
  if (flag("state")) cfg.state = f_state;
  if (flag("init")) cfg.init = f_init;
  if (flag("mean")) cfg.init_mean = f_mean;
  if (flag("sd")) cfg.init_sd = f_sd;
  if (flag("out")) cfg.out = f_out;
  if (flag("records")) cfg.records = f_records;
  if (flag("format")) cfg.format = f_format;
  for (const auto& [k, o] : opts) {
    if (o->count() > 0) provided.insert(k);
  }

  for (const char* k : {"lambda", "rho", "uRR", "uLL", "uLR", "uRL", "c"}) {
    if (!provided.count(k)) throw ParseError(std::string("missing required key: ") + k);
  }

  check_choice("variant", cfg.variant,
               {"baseline", "nonexclusive", "asymmetric", "gamma", "multiaction"});
  check_choice("frontier", cfg.frontier, {"builtin", "linear"});
  check_choice("state", cfg.state, {"L", "R"});
  check_choice("init", cfg.init, {"uniform", "normal"});
  check_choice("format", cfg.format, {"csv", "json"});

  // variant keys are accepted exactly where the selector requires them
  struct VariantKey {
    const char* key;
    const char* variant;
    bool required;
  };
  for (const VariantKey vk : {VariantKey{"alpha-max", "nonexclusive", true},
                              VariantKey{"lambdaR", "asymmetric", true},
                              VariantKey{"lambdaL", "asymmetric", true},
                              VariantKey{"frontier", "gamma", false},
                              VariantKey{"middle", "multiaction", true}}) {
    const bool have = provided.count(vk.key) > 0;
    if (have && cfg.variant != vk.variant) {
      throw ParseError(std::string("key '") + vk.key + "' applies only to variant=" + vk.variant);
    }
    if (!have && vk.required && cfg.variant == vk.variant) {
      throw ParseError(std::string("missing required key: ") + vk.key +
                       " (variant=" + vk.variant + ")");
    }
  }
  if (inv.command == "sweep") {
    for (const char* k : {"key", "from", "to"}) {
      if (!provided.count(k)) {
        throw ParseError(std::string("missing required key: ") + k + " (sweep)");
      }
    }
  }

  require_valid(cfg.model);
  std::vector<std::string> bad;
  if (cfg.grid_n < 2) bad.push_back("grid must be >= 2");
  if (cfg.n_actions < 2) bad.push_back("actions must be >= 2");
  if (cfg.sweep_steps < 1) bad.push_back("steps must be >= 1");
  if (cfg.n_periods < 1) bad.push_back("periods must be >= 1");
  if (!(cfg.p0 >= 0 && cfg.p0 <= 1)) bad.push_back("p0 must lie in [0,1]");
  if (provided.count("dt") && !(cfg.dt > 0)) bad.push_back("dt must be > 0");
  if (!(cfg.t_end >= 0)) bad.push_back("t-end must be >= 0");
  if (cfg.init == "normal" && !(cfg.init_sd > 0)) bad.push_back("sd must be > 0");
  if (cfg.n_paths < 1) bad.push_back("n-paths must be >= 1");
  if (!bad.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& b : bad) msg += " " + b + ";";
    msg.pop_back();
    throw ValidationError(msg);
  }
  return inv;
}

void execute_command(const CliInvocation& inv, std::ostream& out) {
  const RunConfig& cfg = inv.config;
  std::string text;
  if (inv.command == "simulate") {
    text = run_simulate(cfg);
  } else {
    CsvTable t;
    if (inv.command == "solve") t = run_solve(cfg);
    else if (inv.command == "oracle") t = run_oracle(cfg, inv.command);
    else if (inv.command == "population") t = run_population(cfg, inv.command);
    else if (inv.command == "sweep") t = run_sweep(cfg);
    else if (inv.command == "diagnose") t = run_diagnose(cfg);
    else if (inv.command == "twoperiod") t = run_twoperiod(cfg, inv.command);
    else throw ValidationError("unknown command: " + inv.command);
    t.comments.insert(t.comments.begin(), {"command", inv.command});
    text = cfg.format == "json" ? json_from_table(t, inv.command) : t.str();
  }
  out << text;
  if (!cfg.out.empty()) write_text_file(resolve_output(cfg.out), text);
}

int cli_main(int argc, const char* const* argv) {
  try {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    const CliInvocation inv = parse_cli(args);
    if (inv.help) {
      std::cout << inv.help_text;
      return 0;
    }
    execute_command(inv, std::cout);
    return 0;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace attn
