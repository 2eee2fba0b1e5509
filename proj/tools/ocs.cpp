#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ocshuffle/appendix.hpp"
#include "ocshuffle/coupling.hpp"
#include "ocshuffle/exact.hpp"
#include "ocshuffle/io.hpp"
#include "ocshuffle/metric.hpp"
#include "ocshuffle/montecarlo.hpp"

using namespace ocs;

namespace {

enum Exit { kOk = 0, kViolation = 1, kInvalid = 2, kInfeasible = 3 };

struct Flags {
  int n = 0, m = 0, workers = 0;
  std::string alpha, profile = "desk", out, config;
  double ell = 0.0, delta = 0.25;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  bool allow_large = false;
  CLI::Option *o_n, *o_m, *o_alpha, *o_ell, *o_profile, *o_trials, *o_seed, *o_out, *o_workers, *o_delta,
      *o_large;
};

void add_common(CLI::App* sub, Flags& f) {
  f.o_n = sub->add_option("--n", f.n, "deck size");
  f.o_m = sub->add_option("--m", f.m, "short cycle length");
  f.o_alpha = sub->add_option("--alpha", f.alpha, "m = floor(alpha n); a number or 'golden'");
  f.o_ell = sub->add_option("--ell", f.ell, "scale in the lattice norm");
  f.o_profile = sub->add_option("--profile", f.profile, "constant profile")->check(CLI::IsMember({"desk", "paper"}));
  f.o_trials = sub->add_option("--trials", f.trials, "Monte-Carlo trials per point");
  f.o_seed = sub->add_option("--seed", f.seed, "master seed");
  f.o_out = sub->add_option("--out", f.out, "output directory");
  f.o_workers = sub->add_option("--workers", f.workers, "OpenMP threads");
  f.o_delta = sub->add_option("--delta", f.delta, "TV threshold");
  f.o_large = sub->add_flag("--allow-large", f.allow_large, "lift the exact-computation caps");
  sub->add_option("--config", f.config, "JSON config; flags override it");
}

ExperimentConfig resolve(const std::string& name, const Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw InvalidArgument("cannot read config " + f.config);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("config: ") + e.what());
    }
    c = ExperimentConfig::from_json(j);
  }
  c.experiment = name;
  if (f.o_n->count()) c.n = f.n;
  if (f.o_m->count()) {
    c.m = f.m;
    c.alpha.reset();
  }
  if (f.o_alpha->count()) {
    c.alpha = parse_alpha(f.alpha);
    if (!f.o_m->count()) c.m.reset();
  }
  if (f.o_ell->count()) c.ell = f.ell;
  if (f.o_profile->count()) c.profile = f.profile;
  if (f.o_trials->count()) c.trials = f.trials;
  if (f.o_seed->count()) c.seed = f.seed;
  if (f.o_out->count()) c.out = f.out;
  if (f.o_workers->count()) c.workers = f.workers;
  if (f.o_delta->count()) c.delta = f.delta;
  if (f.o_large->count()) c.allow_large = f.allow_large;
  if (c.trials < 1) throw InvalidArgument("trials must be positive");
  if (c.workers < 0) throw InvalidArgument("workers must be nonnegative");
#ifdef _OPENMP
  if (c.workers > 0) omp_set_num_threads(c.workers);
#endif
  return c;
}

json triple_json(const std::array<int, 3>& t) { return json::array({t[0], t[1], t[2]}); }

std::array<int, 3> parse_triple(const std::vector<int>& v, const char* what) {
  if (v.size() != 3) throw InvalidArgument(std::string(what) + " needs exactly three values");
  return {v[0], v[1], v[2]};
}

// ---- metric ----

struct MetricOpts {
  Flags f;
};

int cmd_metric(MetricOpts& o) {
  ExperimentConfig c = resolve("metric", o.f);
  const ShuffleParams p = c.params();
  json cfg = c.to_json();
  Output out(c.out, "metric", c.seed, cfg);
  const std::vector<double> table = norm_table(p);
  const double lmax = l_max(p, table);
  json rec{{"experiment", "metric"},
           {"n", p.n()},
           {"m", p.m()},
           {"modulus", p.modulus()},
           {"parity", to_string(p.parity())},
           {"l_max", lmax}};
  if (c.ell > 0.0) {
    rec["ell"] = c.ell;
    rec["gamma"] = gamma(p, c.ell);
    rec["N_ell"] = enumerate_N_ell(p, c.ell).size();
    const auto s = static_cast<std::int64_t>(std::ceil(c.ell * c.ell));
    rec["T1"] = select_time_T1(p, s);
    rec["T2"] = select_time_T2(p, s);
    if (c.ell < lmax) {
      const auto tri = spread_triple(p, c.ell);
      rec["spread_triple"] = tri ? triple_json(tri->positions) : json(nullptr);
    }
  }
  out.record(rec);

  std::string weights = "x,weight,norm\n";
  for (int x = 1; x <= p.n(); ++x) {
    const auto w = position_weight(p, x);
    weights += fmt::format("{},{},{:.12g}\n", x, w, table[reduce_mod(w, p.modulus())]);
  }
  out.csv("metric_positions.csv", weights);

  std::string curve = "ell,gamma,N_ell\n";
  const double rt = std::sqrt(static_cast<double>(p.n()));
  for (int q = 1; q <= 64; ++q) {
    const double ell = q * rt / 4.0;
    if (ell > lmax) break;
    curve += fmt::format("{:.12g},{},{}\n", ell, gamma(p, ell), enumerate_N_ell(p, ell).size());
  }
  out.csv("metric_gamma.csv", curve);
  return kOk;
}

// ---- single-card ----

struct SingleOpts {
  Flags f;
  int start = 1;
  std::int64_t profile_steps = 0;
};

int cmd_single_card(SingleOpts& o) {
  ExperimentConfig c = resolve("single-card", o.f);
  const ShuffleParams p = c.params();
  if (p.n() > 65536 && !c.allow_large) throw InvalidArgument("single-card analysis is capped at n = 65536 without --allow-large");
  json cfg = c.to_json();
  cfg["start"] = o.start;
  Output out(c.out, "single-card", c.seed, cfg);
  const SingleMix mix = t_single_mix(p, c.delta, o.start);
  const RelaxationReport rel = relaxation_estimate(p);
  json rec{{"experiment", "single-card"},
           {"n", p.n()},
           {"m", p.m()},
           {"delta", c.delta},
           {"t_mix", mix.t_mix ? json(*mix.t_mix) : json(nullptr)},
           {"last_tv", mix.last_tv},
           {"relaxation",
            {{"method", rel.method},
             {"lambda2", rel.lambda2},
             {"gap", rel.gap},
             {"relaxation_time", rel.relaxation_time},
             {"converged", rel.converged},
             {"residual", rel.residual}}}};
  out.record(rec);
  const std::int64_t horizon = o.profile_steps > 0 ? o.profile_steps : (mix.t_mix ? *mix.t_mix : mix.steps);
  if (horizon >= 1) {
    const auto tv = tv_profile(SingleCardKernel(p), DistVector::point_position(p.n(), o.start), horizon);
    std::string body = "t,tv\n";
    for (std::size_t t = 0; t < tv.size(); ++t) body += fmt::format("{},{:.17g}\n", t, tv[t]);
    out.csv("single_card_profile.csv", body);
  }
  std::cerr << fmt::format("t_mix({}) = {}\n", c.delta, mix.t_mix ? std::to_string(*mix.t_mix) : "not reached");
  return kOk;
}

// ---- mix-exact ----

struct MixOpts {
  Flags f;
  std::int64_t horizon = 200;
};

int cmd_mix_exact(MixOpts& o) {
  ExperimentConfig c = resolve("mix-exact", o.f);
  const ShuffleParams p = c.params();
  if (p.n() > kFullDeckCap) throw InvalidArgument("full-deck computation is capped at n = 8");
  json cfg = c.to_json();
  cfg["horizon"] = o.horizon;
  Output out(c.out, "mix-exact", c.seed, cfg);
  const ExactMix mix = mixing_time_exact_small(p, c.delta, o.horizon, c.allow_large);
  bool pinsker = true;
  double min_tv_full = 1.0;
  for (const auto& r : mix.profile) {
    pinsker = pinsker && r.report.pinsker_ok;
    if (r.t > 0) min_tv_full = std::min(min_tv_full, r.report.tv_full);
  }
  out.record({{"experiment", "mix-exact"},
              {"n", p.n()},
              {"m", p.m()},
              {"parity", to_string(p.parity())},
              {"delta", c.delta},
              {"t_mix", mix.t_mix ? json(*mix.t_mix) : json(nullptr)},
              {"last_tv", mix.last_tv},
              {"pinsker_ok", pinsker},
              {"min_tv_full", min_tv_full}});
  out.csv("mix_exact_profile.csv", exact_profile_csv(mix.profile));
  std::cerr << fmt::format("t_mix({}) = {}\n", c.delta, mix.t_mix ? std::to_string(*mix.t_mix) : "not reached");
  return pinsker ? kOk : kViolation;
}

// ---- collide ----

struct CollideOpts {
  Flags f;
  std::string estimator = "l1";
  std::string variant = "adjacent";
  std::string direction = "forward";
  bool control = false;
  bool adversarial = false;
  std::vector<int> sweep_n;
  std::vector<double> sweep_ell;
  std::vector<int> cards, targets, pair;
  double divisor = 20.0;
  std::int64_t horizon = 0;
  std::int64_t batch = 0;
  double half_width = 0.0;
  double wall_clock = 0.0;
};

json run_collide_point(const CollideOpts& o, const ExperimentConfig& c, const ShuffleParams& p, double ell,
                       std::vector<Estimate>& est) {
  TrialBudget b;
  b.max_trials = c.trials;
  b.batch = o.batch;
  b.target_half_width = o.half_width;
  b.wall_clock_seconds = o.wall_clock;
  b.workers = c.workers;
  const ConstantProfile prof = ConstantProfile::by_name(c.profile);
  json rec{{"experiment", "collide"}, {"estimator", o.estimator}, {"n", p.n()}, {"m", p.m()}, {"control", o.control}};
  const std::string& e = o.estimator;
  if (e == "l1") {
    L1Config cfg;
    if (o.variant == "gap") cfg.variant = L1Variant::Gap;
    else if (o.variant != "adjacent") throw InvalidArgument("variant is adjacent or gap");
    cfg.control = o.control;
    est = {estimate_l1_collision(p, cfg, b, c.seed)};
    rec["variant"] = o.variant;
    rec["cards"] = triple_json(l1_cards(p, cfg.variant));
  } else if (e == "match") {
    int i = p.n() - 2, j = p.n() - 1;
    if (!o.pair.empty()) {
      if (o.pair.size() != 2) throw InvalidArgument("--pair needs two values");
      i = o.pair[0];
      j = o.pair[1];
    }
    est = {estimate_match_prob(p, i, j, b, c.seed, o.control)};
    rec["pair"] = {i, j};
  } else if (e == "sqrtn") {
    SqrtnConfig cfg;
    if (!o.cards.empty()) cfg.positions = parse_triple(o.cards, "--cards");
    cfg.adversarial = o.adversarial;
    cfg.control = o.control;
    rec["cards"] = triple_json(sqrtn_start(p, cfg));
    est = {estimate_sqrtn_collide(p, cfg, b, c.seed)};
  } else if (e == "full") {
    FullCollideConfig cfg;
    cfg.ell = ell;
    if (!o.cards.empty()) cfg.cards = parse_triple(o.cards, "--cards");
    cfg.control = o.control;
    const FullCollidePlan plan = plan_full_collide(p, cfg, prof);
    rec["ell"] = ell;
    rec["gamma"] = plan.gamma;
    rec["cards"] = triple_json(plan.cards);
    rec["T"] = plan.T;
    rec["t"] = plan.t;
    est = {estimate_full_collide(p, cfg, prof, b, c.seed)};
  } else if (e == "targeting") {
    TargetingConfig cfg;
    cfg.ell = ell;
    if (!o.cards.empty()) cfg.cards = parse_triple(o.cards, "--cards");
    if (!o.targets.empty()) {
      if (o.targets.size() % 3) throw InvalidArgument("--targets needs a multiple of three values");
      for (std::size_t q = 0; q < o.targets.size(); q += 3)
        cfg.targets.push_back({o.targets[q], o.targets[q + 1], o.targets[q + 2]});
    }
    cfg.control = o.control;
    const TargetingPlan plan = plan_targeting(p, cfg, prof);
    rec["ell"] = ell;
    rec["cards"] = triple_json(plan.cards);
    json tj = json::array();
    for (const auto& t : plan.targets) tj.push_back(triple_json(t));
    rec["targets"] = tj;
    rec["T"] = plan.T;
    est = estimate_targeting(p, cfg, prof, b, c.seed);
  } else if (e == "spread") {
    SpreadConfig cfg;
    cfg.ell = ell;
    cfg.divisor = o.divisor;
    if (o.direction == "inverse") cfg.direction = Direction::Inverse;
    else if (o.direction != "forward") throw InvalidArgument("direction is forward or inverse");
    if (!o.cards.empty()) {
      cfg.cards = parse_triple(o.cards, "--cards");
    } else {
      const auto tri = spread_triple(p, ell);
      if (!tri) throw Infeasible("no spread triple exists at this ell");
      cfg.cards = tri->positions;
    }
    cfg.targets = o.targets.empty() ? cfg.cards : parse_triple(o.targets, "--targets");
    rec["ell"] = ell;
    rec["divisor"] = o.divisor;
    rec["direction"] = o.direction;
    rec["cards"] = triple_json(cfg.cards);
    rec["targets"] = triple_json(cfg.targets);
    est = {spread_experiment(p, cfg, b, c.seed)};
  } else if (e == "occupancy") {
    const std::array<int, 3> cards = o.cards.empty() ? std::array<int, 3>{p.n(), 1, 2} : parse_triple(o.cards, "--cards");
    const std::int64_t horizon = o.horizon > 0 ? o.horizon : 10LL * p.n();
    const OccupancyReport r = occupancy_alone_bottom(p, cards, horizon, b, c.seed);
    est = {r.estimate};
    rec["cards"] = triple_json(cards);
    rec["horizon"] = horizon;
    rec["bound"] = r.bound;
    rec["bound_ok"] = r.bound_ok;
    rec["mean_fraction"] = r.mean_fraction;
    rec["var_fraction"] = r.var_fraction;
  } else {
    throw InvalidArgument("unknown estimator " + e);
  }
  if (est.size() == 1) {
    rec["estimate"] = estimate_json(est[0]);
  } else {
    json all = json::array();
    for (const auto& x : est) all.push_back(estimate_json(x));
    rec["estimates"] = all;
  }
  return rec;
}

int cmd_collide(CollideOpts& o) {
  ExperimentConfig c = resolve("collide", o.f);
  if (!o.sweep_n.empty() && !o.sweep_ell.empty()) throw InvalidArgument("sweep either n or ell, not both");
  json cfg = c.to_json();
  cfg["estimator"] = o.estimator;
  cfg["variant"] = o.variant;
  cfg["direction"] = o.direction;
  cfg["control"] = o.control;
  cfg["adversarial"] = o.adversarial;
  cfg["sweep_n"] = o.sweep_n;
  cfg["sweep_ell"] = o.sweep_ell;
  cfg["cards"] = o.cards;
  cfg["targets"] = o.targets;
  cfg["pair"] = o.pair;
  cfg["divisor"] = o.divisor;
  cfg["horizon"] = o.horizon;
  cfg["batch"] = o.batch;
  cfg["half_width"] = o.half_width;
  Output out(c.out, "collide", c.seed, cfg);

  std::vector<std::pair<double, Estimate>> pts;
  std::string csv = "n,m,ell,trials,successes,p_hat,ci_lo,ci_hi\n";
  auto one = [&](const ShuffleParams& p, double ell, double x) {
    std::vector<Estimate> est;
    out.record(run_collide_point(o, c, p, ell, est));
    for (const auto& e : est)
      csv += fmt::format("{},{},{:.12g},{},{},{:.17g},{:.17g},{:.17g}\n", p.n(), p.m(), ell, e.trials, e.successes,
                         e.p_hat, e.ci_lo, e.ci_hi);
    if (est.size() == 1) pts.emplace_back(x, est[0]);
  };
  if (!o.sweep_n.empty()) {
    for (int n : o.sweep_n) {
      ExperimentConfig cn = c;
      cn.n = n;
      if (cn.m && !cn.alpha) throw InvalidArgument("an n-sweep needs --alpha");
      one(cn.params(), c.ell, n);
    }
  } else if (!o.sweep_ell.empty()) {
    const ShuffleParams p = c.params();
    for (double ell : o.sweep_ell) one(p, ell, ell);
  } else {
    one(c.params(), c.ell, c.n);
  }
  out.csv("collide_sweep.csv", csv);
  if (pts.size() >= 3 && !o.control) {
    try {
      out.record({{"experiment", "collide-fit"},
                  {"estimator", o.estimator},
                  {"against", o.sweep_n.empty() ? "ell" : "n"},
                  {"fit", fit_json(fit_scaling_weighted(pts))}});
    } catch (const InvalidArgument& e) {
      out.record({{"experiment", "collide-fit"}, {"error", e.what()}});
    }
  }
  return kOk;
}

// ---- couple ----

struct CoupleOpts {
  Flags f;
  bool replay = false;
  std::vector<int> cards, counterparts;
  std::int64_t horizon = 0;
  int runs = 1;
  double radius = 8.0;
};

int cmd_couple(CoupleOpts& o) {
  ExperimentConfig c = resolve("couple", o.f);
  const ShuffleParams p = c.params();
  json cfg = c.to_json();
  cfg["replay"] = o.replay;
  cfg["cards"] = o.cards;
  cfg["counterparts"] = o.counterparts;
  cfg["horizon"] = o.horizon;
  cfg["runs"] = o.runs;
  cfg["radius"] = o.radius;
  Output out(c.out, "couple", c.seed, cfg);
  if (o.replay) {
    const WorkedExampleReplay r = replay_worked_example(p);
    json rows = json::array();
    for (const auto& s : r.rows)
      rows.push_back({s.step, s.pos_u[0], s.pos_u[1], s.pos_p[0], s.pos_p[1]});
    json exp = json::array();
    for (const auto& e : r.expected) exp.push_back({e[0], e[1], e[2], e[3]});
    out.record({{"experiment", "couple-replay"}, {"n", p.n()}, {"m", p.m()}, {"rows", rows}, {"expected", exp},
                {"matches", r.matches}});
    out.csv("couple_replay.csv", couple_trace_csv(r.rows));
    std::cerr << fmt::format("step  i  j  i'  j'\n");
    for (const auto& s : r.rows)
      std::cerr << fmt::format("{:>4} {} {} {} {}\n", s.step, s.pos_u[0], s.pos_u[1], s.pos_p[0], s.pos_p[1]);
    std::cerr << (r.matches ? "worked example reproduced\n" : "worked example MISMATCH\n");
    return r.matches ? kOk : kViolation;
  }
  if (!(c.ell > 0.0)) throw InvalidArgument("couple needs --ell");
  const ConstantProfile prof = ConstantProfile::by_name(c.profile);
  CoupleConfig cc;
  if (!o.cards.empty()) {
    cc.cards = parse_triple(o.cards, "--cards");
  } else {
    const auto tri = spread_triple(p, c.ell);
    if (!tri) throw Infeasible("no spread triple exists at this ell");
    cc.cards = tri->positions;
    cc.check_separation = false;
  }
  if (!o.counterparts.empty()) cc.counterparts = parse_triple(o.counterparts, "--counterparts");
  cc.ell = c.ell;
  cc.spread_factor = prof.spread_factor;
  cc.counterpart_radius = o.radius;
  cc.horizon = o.horizon > 0 ? o.horizon : static_cast<std::int64_t>(std::ceil(c.ell * c.ell)) * 4;
  if (o.runs < 1) throw InvalidArgument("runs must be positive");
  int successes = 0;
  bool offsets_ok = true;
  for (int r = 0; r < o.runs; ++r) {
    cc.seed = mix64(c.seed + static_cast<std::uint64_t>(r));
    cc.keep_trace = r == 0 && !c.out.empty();
    const CoupleReport rep = coupled_run(p, cc);
    successes += rep.success;
    offsets_ok = offsets_ok && rep.straddle_offset_within_one;
    json dec = json::array();
    for (const auto& d : rep.decouplings) dec.push_back({{"time", d.time}, {"card", d.card}, {"cause", d.cause}});
    out.record({{"experiment", "couple"},
                {"run", r},
                {"n", p.n()},
                {"m", p.m()},
                {"cards", triple_json(rep.cards)},
                {"counterparts", triple_json(rep.counterparts)},
                {"tau", {rep.tau[0], rep.tau[1], rep.tau[2]}},
                {"success", rep.success},
                {"decouplings", dec},
                {"max_straddle_offset", rep.max_straddle_offset},
                {"steps", rep.steps}});
    if (cc.keep_trace) out.csv("couple_trace.csv", couple_trace_csv(rep.trace));
  }
  out.record({{"experiment", "couple-summary"},
              {"estimate", estimate_json(Estimate::from_counts(successes, o.runs))},
              {"straddle_offset_within_one", offsets_ok}});
  return kOk;
}

// ---- golden ----

struct GoldenOpts {
  Flags f;
  int nmax = 4096;
};

int cmd_golden(GoldenOpts& o) {
  ExperimentConfig c = resolve("golden", o.f);
  if (o.nmax < 16) throw InvalidArgument("nmax must be at least 16");
  json cfg = c.to_json();
  cfg["nmax"] = o.nmax;
  Output out(c.out, "golden", c.seed, cfg);
  bool ok = true;
  std::string csv = "n,m,l_max,lower_bound,bound,pass,lower_pass\n";
  for (int n = 16; n <= o.nmax; n *= 2) {
    const GoldenLmaxCheck g = golden_lmax_check(n);
    ok = ok && g.pass;
    csv += fmt::format("{},{},{:.12g},{:.12g},{:.12g},{},{}\n", g.n, g.m, g.l_max, g.lower_bound, g.bound, g.pass,
                       g.lower_pass);
    out.record({{"experiment", "golden-lmax"},
                {"n", g.n},
                {"m", g.m},
                {"l_max", g.l_max},
                {"bound", g.bound},
                {"lower_bound", g.lower_bound},
                {"pass", g.pass},
                {"lower_pass", g.lower_pass}});
  }
  out.csv("golden_lmax.csv", csv);
  const GoldenSweep s = golden_gap_sweep(o.nmax);
  ok = ok && s.pass;
  out.record({{"experiment", "golden-gaps"}, {"n_max", s.n_max}, {"checked", s.checked}, {"first_failure", s.first_failure},
              {"pass", s.pass}});
  return ok ? kOk : kViolation;
}

// ---- appendix ----

struct AppendixOpts {
  Flags f;
  std::int64_t cases = 100000;
  int nmax = 10000;
};

int cmd_appendix(AppendixOpts& o) {
  ExperimentConfig c = resolve("appendix", o.f);
  if (o.cases < 1 || o.nmax < 1) throw InvalidArgument("cases and nmax must be positive");
  json cfg = c.to_json();
  cfg["cases"] = o.cases;
  cfg["nmax"] = o.nmax;
  Output out(c.out, "appendix", c.seed, cfg);
  const QuasiUniformReport q = appendix_quasi_uniform_check(o.cases, c.seed);
  out.record({{"experiment", "appendix-quasi-uniform"},
              {"special_cases", q.special_cases},
              {"general_cases", q.general_cases},
              {"grid_cases", q.grid_cases},
              {"special_pass", q.special_pass},
              {"general_pass", q.general_pass},
              {"general_failures", q.general_failures},
              {"general_corrected_pass", q.general_corrected_pass},
              {"pass", q.pass()},
              {"counterexample", q.counterexample}});
  const RwBoundsReport r = appendix_rw_bounds_check(o.nmax);
  out.record({{"experiment", "appendix-random-walk"},
              {"n_max", r.n_max},
              {"inverse", {{"points", r.inverse_points}, {"pass", r.inverse_ok}}},
              {"upper", {{"points", r.hoeffding_points}, {"pass", r.hoeffding_ok}}},
              {"absolute", {{"points", r.abs_points}, {"pass", r.abs_ok}}},
              {"maximum", {{"points", r.max_points}, {"pass", r.max_ok}}},
              {"first_violation", r.first_violation},
              {"pass", r.pass()}});
  std::cerr << fmt::format("quasi-uniform: special {}, general {} ({} of {} fail), corrected general {} ({} grid)\n",
                           q.special_pass ? "pass" : "FAIL", q.general_pass ? "pass" : "FAIL", q.general_failures,
                           q.general_cases, q.general_corrected_pass ? "pass" : "FAIL", q.grid_cases);
  if (!q.counterexample.empty()) std::cerr << "counterexample: " << q.counterexample << "\n";
  std::cerr << fmt::format("random walk: {} ({} points)\n", r.pass() ? "pass" : "FAIL",
                           r.inverse_points + r.hoeffding_points + r.abs_points + r.max_points);
  return q.pass() && r.pass() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlapping cycles shuffle lab"};
  app.require_subcommand(1);

  MetricOpts metric;
  auto* s_metric = app.add_subcommand("metric", "position weights, lattice norm, l_max, gamma, time selectors");
  add_common(s_metric, metric.f);

  SingleOpts single;
  auto* s_single = app.add_subcommand("single-card", "exact single-card TV profile and relaxation time");
  add_common(s_single, single.f);
  s_single->add_option("--start", single.start, "starting position");
  s_single->add_option("--profile-steps", single.profile_steps, "TV profile length (default t_mix)");

  MixOpts mix;
  auto* s_mix = app.add_subcommand("mix-exact", "exact full-deck distribution for n <= 8");
  add_common(s_mix, mix.f);
  s_mix->add_option("--horizon", mix.horizon, "steps to evolve");

  CollideOpts col;
  auto* s_col = app.add_subcommand("collide", "Monte-Carlo collision estimators");
  add_common(s_col, col.f);
  s_col->add_option("--estimator", col.estimator)
      ->check(CLI::IsMember({"l1", "match", "sqrtn", "full", "targeting", "spread", "occupancy"}));
  s_col->add_option("--variant", col.variant, "l1 cards: adjacent or gap");
  s_col->add_option("--direction", col.direction, "spread: forward or inverse");
  s_col->add_flag("--control", col.control, "run the null variant");
  s_col->add_flag("--adversarial", col.adversarial, "sqrtn: spread the starting cards");
  s_col->add_option("--sweep-n", col.sweep_n)->delimiter(',');
  s_col->add_option("--sweep-ell", col.sweep_ell)->delimiter(',');
  s_col->add_option("--cards", col.cards)->delimiter(',');
  s_col->add_option("--targets", col.targets)->delimiter(',');
  s_col->add_option("--pair", col.pair, "match: cards i,j")->delimiter(',');
  s_col->add_option("--divisor", col.divisor, "spread: landing tolerance ell / divisor");
  s_col->add_option("--horizon", col.horizon, "occupancy horizon (default 10n)");
  s_col->add_option("--batch", col.batch, "trials per batch");
  s_col->add_option("--half-width", col.half_width, "stop once the Wilson half-width reaches this");
  s_col->add_option("--wall-clock", col.wall_clock, "seconds; results then depend on timing");

  CoupleOpts cpl;
  auto* s_cpl = app.add_subcommand("couple", "three-stage coupling");
  add_common(s_cpl, cpl.f);
  s_cpl->add_flag("--replay-worked-example", cpl.replay);
  s_cpl->add_option("--cards", cpl.cards)->delimiter(',');
  s_cpl->add_option("--counterparts", cpl.counterparts)->delimiter(',');
  s_cpl->add_option("--horizon", cpl.horizon);
  s_cpl->add_option("--runs", cpl.runs);
  s_cpl->add_option("--radius", cpl.radius, "counterparts within radius * ell");

  GoldenOpts gold;
  auto* s_gold = app.add_subcommand("golden", "golden-ratio l_max bounds and gap structure");
  add_common(s_gold, gold.f);
  s_gold->add_option("--nmax", gold.nmax);

  AppendixOpts apx;
  auto* s_apx = app.add_subcommand("appendix", "quasi-uniform and random-walk validators");
  add_common(s_apx, apx.f);
  s_apx->add_option("--cases", apx.cases, "random quasi-uniform cases");
  s_apx->add_option("--nmax", apx.nmax, "random-walk grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (s_metric->parsed()) return cmd_metric(metric);
    if (s_single->parsed()) return cmd_single_card(single);
    if (s_mix->parsed()) return cmd_mix_exact(mix);
    if (s_col->parsed()) return cmd_collide(col);
    if (s_cpl->parsed()) return cmd_couple(cpl);
    if (s_gold->parsed()) return cmd_golden(gold);
    if (s_apx->parsed()) return cmd_appendix(apx);
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kInvalid;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  }
  return kInvalid;
}
