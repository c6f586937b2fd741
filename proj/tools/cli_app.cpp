#include "cli_app.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rhlab/certifier.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/horseshoe.hpp"
#include "rhlab/io.hpp"
#include "rhlab/orbit.hpp"
#include "rhlab/parallel.hpp"
#include "rhlab/pliss.hpp"

namespace rhlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Context {
  fs::path out;
  int threads = 1;
  bool emit_plots = false;
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
};

json load_map_spec(const std::string& arg) {
  if (arg.empty()) return json{{"family", "sine"}, {"L", 5.0}};
  if (arg.front() == '{') {
    try {
      return json::parse(arg);
    } catch (const json::exception& e) {
      throw PreconditionError(std::string("--map: invalid inline JSON: ") + e.what());
    }
  }
  return io::read_json(arg);
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  const auto colon = s.find(':');
  try {
    if (colon != std::string::npos) {
      const std::uint64_t a = std::stoull(s.substr(0, colon));
      const std::uint64_t b = std::stoull(s.substr(colon + 1));
      require(b > a, "--seeds a:b requires b > a");
      for (std::uint64_t v = a; v < b; ++v) out.push_back(v);
    } else {
      std::stringstream ss(s);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
    }
  } catch (const std::logic_error&) {
    throw PreconditionError("cannot parse seed list '" + s + "'");
  }
  require(!out.empty(), "empty seed list");
  return out;
}

Arc parse_arc(const std::string& s, const char* flag) {
  const auto comma = s.find(',');
  require(comma != std::string::npos, std::string(flag) + " expects a,b");
  try {
    const double a = std::stod(s.substr(0, comma));
    const double b = std::stod(s.substr(comma + 1));
    require(b > a && b - a <= 1.0, std::string(flag) + " needs a < b <= a + 1");
    return Arc(a, b);
  } catch (const std::logic_error&) {
    throw PreconditionError(std::string("cannot parse ") + flag + " '" + s + "'");
  }
}

// ---------------------------------------------------------------- commands

void cmd_simulate(const json& cfg, const CircleMap& map, Context& ctx) {
  const json& p = cfg.at("params");
  const double sigma = p.at("sigma");
  const std::uint64_t seed = p.at("seed");
  const std::size_t n = p.at("n");
  const double x0 = p.at("x0");
  const std::vector<double> deltas = p.at("deltas");
  Orbit o = iterate_orbit(map, NoiseStream(sigma, seed), x0, n, deltas);
  std::vector<std::string> header{"i", "x_i", "S_i"};
  for (std::size_t d = 0; d < deltas.size(); ++d) header.push_back(d == 0 ? "Z_i" : "Z_i_delta" + std::to_string(d));
  io::CsvWriter csv(ctx.file("orbit.csv"), header);
  for (std::size_t i = 0; i <= n; ++i) {
    csv.cell(i).cell(o.points[i]).cell(o.S[i]);
    for (std::size_t d = 0; d < deltas.size(); ++d) csv.cell(o.Z[d][i]);
    csv.end_row();
  }
  json summary{{"n", n},
               {"S_n", o.S[n]},
               {"S_n_over_n", n ? o.S[n] / static_cast<double>(n) : 0.0},
               {"clamp_count", o.clamp_count},
               {"nondiff_count", o.nondiff_count},
               {"singular_step", o.singular_step ? json(*o.singular_step) : json(nullptr)}};
  for (std::size_t d = 0; d < deltas.size(); ++d) summary["Z_n"].push_back(o.Z[d][n]);
  io::write_json(ctx.file("simulate.json"), summary);
  if (ctx.emit_plots) {
    std::ofstream dat(ctx.file("orbit.dat"), std::ios::binary);
    dat << "# i x_i S_i\n";
    for (std::size_t i = 0; i <= n; ++i) {
      dat << i << ' ' << io::format_double(o.points[i]) << ' ' << io::format_double(o.S[i]) << '\n';
    }
  }
}

void cmd_lyapunov(const json& cfg, const CircleMap& map, Context& ctx) {
  const json& p = cfg.at("params");
  LyapunovEstimate e = lyapunov_estimate(map, NoiseStream(p.at("sigma"), p.at("seed").get<std::uint64_t>()),
                                         p.at("trials"), p.at("n"), p.at("x0"), ctx.threads);
  io::CsvWriter csv(ctx.file("lyapunov.csv"), {"trial", "lambda_hat"});
  for (std::size_t t = 0; t < e.per_trial.size(); ++t) csv.cell(t).cell(e.per_trial[t]).end_row();
  io::write_json(ctx.file("lyapunov.json"), io::to_json(e));
}

void cmd_certify(const json& cfg, const CircleMap& map, Context& ctx) {
  const json& p = cfg.at("params");
  CertifyOptions opt;
  opt.gamma_margin = p.at("gamma");
  opt.access_trials = p.at("access_trials");
  opt.access_grid = p.at("access_grid");
  PredominanceReport r = certify(map, p.at("sigma"), p.at("R"), opt);
  json j = io::to_json(r);
  j["map"] = cfg.at("map");
  io::write_json(ctx.file(p.at("report").get<std::string>()), j);
}

std::vector<std::vector<int>> shadow_sequences(std::uint64_t seed, int count, int length) {
  std::vector<std::vector<int>> out;
  const NoiseStream bits(0.5, seed);
  for (int q = 0; q < count; ++q) {
    std::vector<int> s(static_cast<std::size_t>(length));
    for (int k = 0; k < length; ++k) {
      if (q == 0) s[k] = 0;
      else if (q == 1) s[k] = 1;
      else if (q == 2) s[k] = k % 2;
      else s[k] = bits.split(static_cast<std::uint64_t>(q)).unit(static_cast<std::uint64_t>(k)) < 0.5 ? 0 : 1;
    }
    out.push_back(std::move(s));
  }
  return out;
}

FullBranchOptions full_branch_options(const json& p) {
  FullBranchOptions o;
  o.n_max = p.at("n_max");
  o.policy = source_policy_from_string(p.at("policy"));
  return o;
}

void cmd_horseshoe(const json& cfg, const CircleMap& map, Context& ctx) {
  const json& p = cfg.at("params");
  const double sigma = p.at("sigma");
  const std::vector<std::uint64_t> seeds = p.at("seeds");
  const Arc I0(p.at("I0")[0].get<double>(), p.at("I0")[1].get<double>());
  const Arc I1(p.at("I1")[0].get<double>(), p.at("I1")[1].get<double>());
  require(!I0.intersects(I1), "horseshoe: I0 and I1 must be disjoint");
  const int K = p.at("returns");
  const double kappa = p.at("kappa");
  const int n_seq = p.at("shadow_sequences");
  HorseshoeOptions ho;
  ho.full_branch = full_branch_options(p);

  std::vector<HorseshoeRecord> recs(seeds.size());
  std::vector<std::vector<ShadowResult>> shadows(seeds.size());
  parallel_for(seeds.size(), ctx.threads, [&](std::size_t s) {
    recs[s] = horseshoe_returns(map, NoiseStream(sigma, seeds[s]), I0, I1, K, kappa, ho);
    for (const auto& sym : shadow_sequences(seeds[s], n_seq, K + 1)) {
      shadows[s].push_back(shadow(map, recs[s], sym, false));
    }
  });

  io::CsvWriter rcsv(ctx.file("returns.csv"), {"seed", "k", "n_k"});
  io::CsvWriter ccsv(ctx.file("cylinders.csv"), {"seed", "k", "i", "j", "lo", "hi", "min_log_deriv"});
  json sj = json::array();
  std::size_t failures = 0, cyl_failures = 0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (int k = 0; k <= K; ++k) rcsv.cell(seeds[s]).cell(k).cell(recs[s].returns[k]).end_row();
    for (const Cylinder& c : recs[s].cylinders) {
      ccsv.cell(seeds[s]).cell(c.k).cell(c.i).cell(c.j).cell(c.J.lo).cell(c.J.hi).cell(c.min_log_deriv).end_row();
      cyl_failures += (c.e1 && c.e2) ? 0 : 1;
    }
    json entry{{"seed", seeds[s]}, {"sequences", json::array()}};
    const auto seqs = shadow_sequences(seeds[s], n_seq, K + 1);
    for (std::size_t q = 0; q < shadows[s].size(); ++q) {
      json sh = io::to_json(shadows[s][q]);
      sh["symbols"] = seqs[q];
      entry["sequences"].push_back(sh);
      failures += shadows[s][q].verified ? 0 : 1;
    }
    sj.push_back(entry);
  }
  io::write_json(ctx.file("shadow.json"),
                 {{"kappa", kappa}, {"failures", failures}, {"cylinder_failures", cyl_failures}, {"seeds", sj}});
  if (seeds.size() >= 2 && K >= 2) {
    std::vector<std::vector<int>> returns;
    for (const auto& r : recs) returns.push_back(r.returns);
    io::write_json(ctx.file("density.json"), io::to_json(density_from_returns(returns)));
  }
  if (ctx.emit_plots) {
    std::ofstream dat(ctx.file("returns.dat"), std::ios::binary);
    dat << "# seed k n_k/k\n";
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      for (int k = 1; k <= K; ++k) {
        dat << seeds[s] << ' ' << k << ' ' << io::format_double(recs[s].returns[k] / static_cast<double>(k)) << '\n';
      }
      dat << '\n';
    }
  }
  if (failures || cyl_failures) {
    throw VerificationFailed("horseshoe: " + std::to_string(failures) + " shadow and " +
                             std::to_string(cyl_failures) + " cylinder verifications failed");
  }
}

void cmd_shadow(const json& cfg, const CircleMap& map, Context& ctx) {
  const json& p = cfg.at("params");
  const std::vector<int> symbols = p.at("symbols");
  require(!symbols.empty(), "shadow: --symbols must be non-empty");
  const Arc I0(p.at("I0")[0].get<double>(), p.at("I0")[1].get<double>());
  const Arc I1(p.at("I1")[0].get<double>(), p.at("I1")[1].get<double>());
  HorseshoeOptions ho;
  ho.full_branch = full_branch_options(p);
  const int K = std::max<int>(1, static_cast<int>(symbols.size()) - 1);
  HorseshoeRecord rec = horseshoe_returns(map, NoiseStream(p.at("sigma"), p.at("seed").get<std::uint64_t>()), I0,
                                          I1, K, p.at("kappa"), ho);
  ShadowResult r = shadow(map, rec, symbols, false);
  json j = io::to_json(r);
  j["symbols"] = symbols;
  j["returns"] = rec.returns;
  io::write_json(ctx.file("shadow.json"), j);
  if (!r.verified) {
    throw VerificationFailed("shadow: verification failed at return " + std::to_string(r.first_failure));
  }
}

void cmd_tails(const json& cfg, const CircleMap& map, Context& ctx) {
  const json& p = cfg.at("params");
  std::vector<TailEvent> events{TailEvent::s_below(p.at("lambda")), TailEvent::z_above(p.at("delta"))};
  std::vector<SurvivalCurve> curves =
      tail_probabilities(map, NoiseStream(p.at("sigma"), p.at("seed").get<std::uint64_t>()), p.at("x0"), events,
                         p.at("n_list").get<std::vector<std::size_t>>(), p.at("trials"), ctx.threads);
  io::CsvWriter csv(ctx.file("tails.csv"), {"event", "n", "p_hat", "ci_lo", "ci_hi"});
  json j = json::array();
  for (const auto& c : curves) {
    const std::string name = c.event.kind == TailEvent::Kind::SBelow ? "S_below" : "Z_above";
    for (const auto& r : c.rows) csv.cell(name).cell(r.n).cell(r.p_hat).cell(r.ci_lo).cell(r.ci_hi).end_row();
    j.push_back(io::to_json(c));
  }
  io::write_json(ctx.file("tails.json"), j);
  if (ctx.emit_plots) {
    std::ofstream dat(ctx.file("tails.dat"), std::ios::binary);
    for (const auto& c : curves) {
      dat << "# " << (c.event.kind == TailEvent::Kind::SBelow ? "S_below" : "Z_above") << ": n p_hat ci_lo ci_hi\n";
      for (const auto& r : c.rows) {
        dat << r.n << ' ' << io::format_double(r.p_hat) << ' ' << io::format_double(r.ci_lo) << ' '
            << io::format_double(r.ci_hi) << '\n';
      }
      dat << "\n\n";
    }
  }
}

void cmd_hyperbolic(const json& cfg, const CircleMap& map, Context& ctx) {
  const json& p = cfg.at("params");
  const std::vector<std::uint64_t> seeds = p.at("seeds");
  const std::size_t N = p.at("N");
  const double b = p.at("b").is_null() ? default_b(map.regularity().beta) : p.at("b").get<double>();
  std::optional<double> delta;
  if (!p.at("delta").is_null()) delta = p.at("delta").get<double>();
  const FrequencyBound fb = make_frequency_bound(p.at("lambda"), map.sup_log_deriv(), b, delta);
  std::vector<Orbit> orbits(seeds.size());
  std::vector<HyperbolicTimeRecord> times(seeds.size());
  std::vector<FrequencyReport> reports(seeds.size());
  parallel_for(seeds.size(), ctx.threads, [&](std::size_t s) {
    orbits[s] = iterate_orbit(map, NoiseStream(p.at("sigma"), seeds[s]), p.at("x0").get<double>(), N, {fb.delta});
    times[s] = hyperbolic_times(orbits[s], fb.kappa1, fb.delta, fb.b);
    reports[s] = frequency_check(orbits[s], fb, N);
  });
  io::CsvWriter csv(ctx.file("hyperbolic.csv"), {"seed", "n", "is_hyperbolic", "S_n", "Z_n"});
  json per_seed = json::array();
  std::size_t violations = 0, met = 0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    std::vector<char> hyp(N + 1, 0);
    for (std::size_t t : times[s].times) hyp[t] = 1;
    for (std::size_t n = 1; n <= N; ++n) {
      csv.cell(seeds[s]).cell(n).cell(static_cast<int>(hyp[n])).cell(orbits[s].S[n]).cell(orbits[s].Z[0][n]).end_row();
    }
    json r = io::to_json(reports[s]);
    r["seed"] = seeds[s];
    per_seed.push_back(r);
    violations += reports[s].violation ? 1 : 0;
    met += reports[s].hypotheses_met ? 1 : 0;
  }
  io::write_json(ctx.file("frequency.json"), {{"bound", io::to_json(fb)},
                                              {"seeds", seeds.size()},
                                              {"hypotheses_met", met},
                                              {"violations", violations},
                                              {"reports", per_seed}});
  if (violations) {
    throw InvariantViolation("hyperbolic: " + std::to_string(violations) + " frequency-bound violations");
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const TimeoutError*>(&e) || dynamic_cast<const BranchExplosion*>(&e)) return kTimeout;
  if (dynamic_cast<const InvariantViolation*>(&e) || dynamic_cast<const CylinderNotFound*>(&e) ||
      dynamic_cast<const VerificationFailed*>(&e)) {
    return kInvariant;
  }
  if (dynamic_cast<const Error*>(&e) || dynamic_cast<const json::exception*>(&e) ||
      dynamic_cast<const fs::filesystem_error*>(&e)) {
    return kConfigError;
  }
  return kInvariant;
}

const char* kind_of(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->kind();
  if (dynamic_cast<const json::exception*>(&e)) return "ConfigError";
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return "OutputError";
  return "InternalError";
}

int report_error(const std::exception& e, int code) {
  json diag{{"error", kind_of(e)}, {"message", e.what()}, {"exit_code", code}};
  if (const auto* t = dynamic_cast<const TimeoutError*>(&e)) {
    diag["n_max"] = t->n_max();
    diag["max_image_length"] = t->max_image_length();
  }
  std::cerr << diag.dump() << std::endl;
  return code;
}

int execute(const json& cfg, Context& ctx) {
  const std::string sub = cfg.at("subcommand");
  const CircleMap map = CircleMap::from_json(cfg.at("map"));
  fs::create_directories(ctx.out);
  if (sub == "simulate") cmd_simulate(cfg, map, ctx);
  else if (sub == "lyapunov") cmd_lyapunov(cfg, map, ctx);
  else if (sub == "certify") cmd_certify(cfg, map, ctx);
  else if (sub == "horseshoe") cmd_horseshoe(cfg, map, ctx);
  else if (sub == "shadow") cmd_shadow(cfg, map, ctx);
  else if (sub == "tails") cmd_tails(cfg, map, ctx);
  else if (sub == "hyperbolic") cmd_hyperbolic(cfg, map, ctx);
  else throw PreconditionError("unknown subcommand '" + sub + "'");
  std::vector<std::string> outputs = ctx.outputs;
  io::write_json(ctx.out / (sub + ".meta.json"),
                 {{"rhlab_version", kVersion}, {"config", cfg}, {"outputs", outputs}});
  return kOk;
}

std::string default_out_dir() {
  const char* env = std::getenv("RHLAB_OUT_DIR");
  return env && *env ? env : ".";
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"rhlab: random horseshoe laboratory for noisy circle maps", "rhlab"};
  app.require_subcommand(1);
  std::string out = default_out_dir();
  int threads = 1;
  bool emit_plots = false;
  app.add_option("--out", out, "output directory (default $RHLAB_OUT_DIR or .)");
  app.add_option("--threads", threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  app.add_flag("--emit-plots", emit_plots, "also write gnuplot-compatible .dat files");
  app.set_version_flag("--version", kVersion);

  std::string map_arg;
  double L = 0.0;
  std::optional<double> sigma_flag;
  auto add_map = [&](CLI::App* sub) {
    sub->add_option("--map", map_arg, "map spec: JSON file or inline JSON (default sine L=5)");
    sub->add_option("--L", L, "shortcut for a sine map with amplitude L");
    sub->add_option("--sigma", sigma_flag, "noise amplitude in [0, 1/2]");
  };

  std::uint64_t seed = 7;
  std::string seeds_arg;
  std::size_t n = 1000, trials = 100, N = 1000, access_trials = 10000, access_grid = 256;
  double x0 = 0.3, R = 3.0, gamma = 0.01, kappa = 1.5, lambda = 1.35, s_lambda = 1.0, delta = 1e-3;
  std::optional<double> b_flag, delta_flag;
  std::vector<double> deltas{0.01};
  std::vector<std::size_t> n_list{50, 100, 200, 400};
  std::string I0 = "0.1,0.2", I1 = "0.6,0.7", policy = "witness", report = "report.json", symbols;
  int returns = 20, shadow_seq = 10, n_max = 200;
  std::string sidecar;

  CLI::App* sim = app.add_subcommand("simulate", "iterate one noisy orbit");
  add_map(sim);
  sim->add_option("--seed", seed);
  sim->add_option("--n", n, "number of steps");
  sim->add_option("--x0", x0);
  sim->add_option("--delta", deltas, "truncation radii for Z")->delimiter(',');

  CLI::App* lyap = app.add_subcommand("lyapunov", "Monte Carlo Lyapunov exponent");
  add_map(lyap);
  lyap->add_option("--seed", seed);
  lyap->add_option("--trials", trials);
  lyap->add_option("--n", n);
  lyap->add_option("--x0", x0);

  CLI::App* cert = app.add_subcommand("certify", "predominant-expansion certificate");
  add_map(cert);
  cert->add_option("--R", R);
  cert->add_option("--gamma", gamma, "accessibility margin");
  cert->add_option("--access-trials", access_trials);
  cert->add_option("--access-grid", access_grid);
  cert->add_option("--report", report, "report file name inside --out");

  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("--I0", I0, "first arc a,b");
    sub->add_option("--I1", I1, "second arc a,b");
    sub->add_option("--kappa", kappa);
    sub->add_option("--n-max", n_max, "full-branch search horizon");
    sub->add_option("--policy", policy, "first-step expansion policy: witness, enforce, off");
  };
  CLI::App* hs = app.add_subcommand("horseshoe", "return times, cylinders and shadowing");
  add_map(hs);
  add_pair(hs);
  hs->add_option("--seed", seed);
  hs->add_option("--seeds", seeds_arg, "seed list a,b,c or range a:b (overrides --seed)");
  hs->add_option("--returns", returns);
  hs->add_option("--shadow-sequences", shadow_seq);

  CLI::App* sh = app.add_subcommand("shadow", "shadow one symbol sequence");
  add_map(sh);
  add_pair(sh);
  sh->add_option("--seed", seed);
  sh->add_option("--symbols", symbols, "string of 0/1 symbols")->required();

  CLI::App* tails = app.add_subcommand("tails", "tail probabilities of S_n and Z_n");
  add_map(tails);
  tails->add_option("--seed", seed);
  tails->add_option("--trials", trials);
  tails->add_option("--n-list", n_list)->delimiter(',');
  tails->add_option("--x0", x0);
  tails->add_option("--lambda", s_lambda, "threshold rate for P(S_n < lambda n)");
  tails->add_option("--delta", delta, "truncation radius for P(Z_n > H(delta) n)");

  CLI::App* hyp = app.add_subcommand("hyperbolic", "hyperbolic times and the frequency bound");
  add_map(hyp);
  hyp->add_option("--seed", seed);
  hyp->add_option("--seeds", seeds_arg);
  hyp->add_option("--N", N);
  hyp->add_option("--x0", x0);
  hyp->add_option("--lambda", lambda);
  hyp->add_option("--b", b_flag);
  hyp->add_option("--delta", delta_flag);

  CLI::App* rep = app.add_subcommand("replay", "re-run a metadata sidecar");
  rep->add_option("sidecar", sidecar)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "UsageError"}, {"message", e.what()}, {"exit_code", kConfigError}}.dump()
              << std::endl;
    return kConfigError;
  }

  Context ctx;
  ctx.out = out;
  ctx.threads = threads;
  ctx.emit_plots = emit_plots;
  try {
    if (rep->parsed()) {
      json meta = io::read_json(sidecar);
      require(meta.contains("config"), "replay: sidecar lacks 'config'");
      return execute(meta.at("config"), ctx);
    }
    CLI::App* sub = app.get_subcommands().front();
    json map_spec = L > 0.0 ? json{{"family", "sine"}, {"L", L}} : load_map_spec(map_arg);
    const double sigma = sigma_flag ? *sigma_flag : map_spec.value("sigma", sub == cert ? 0.4 : 0.45);
    map_spec.erase("sigma");
    json params{{"sigma", sigma}};
    const std::string name = sub->get_name();
    if (sub == sim) {
      params.update({{"seed", seed}, {"n", n}, {"x0", x0}, {"deltas", deltas}});
    } else if (sub == lyap) {
      params.update({{"seed", seed}, {"trials", trials}, {"n", n}, {"x0", x0}});
    } else if (sub == cert) {
      params.update({{"R", R}, {"gamma", gamma}, {"access_trials", access_trials}, {"access_grid", access_grid},
                     {"report", report}});
    } else if (sub == hs || sub == sh) {
      const Arc a0 = parse_arc(I0, "--I0");
      const Arc a1 = parse_arc(I1, "--I1");
      require(!a0.intersects(a1), std::string(name) + ": I0 and I1 must be disjoint");
      params.update({{"I0", {a0.lo(), a0.hi()}},
                     {"I1", {a1.lo(), a1.hi()}},
                     {"kappa", kappa},
                     {"n_max", n_max},
                     {"policy", to_string(source_policy_from_string(policy))}});
      if (sub == hs) {
        params["seeds"] = seeds_arg.empty() ? std::vector<std::uint64_t>{seed} : parse_seeds(seeds_arg);
        params["returns"] = returns;
        params["shadow_sequences"] = shadow_seq;
      } else {
        std::vector<int> sym;
        for (char c : symbols) {
          require(c == '0' || c == '1', "--symbols must contain only 0 and 1");
          sym.push_back(c - '0');
        }
        params["seed"] = seed;
        params["symbols"] = sym;
      }
    } else if (sub == tails) {
      params.update({{"seed", seed}, {"trials", trials}, {"n_list", n_list}, {"x0", x0}, {"lambda", s_lambda},
                     {"delta", delta}});
    } else if (sub == hyp) {
      params.update({{"seeds", seeds_arg.empty() ? parse_seeds("0:100") : parse_seeds(seeds_arg)},
                     {"N", N},
                     {"x0", x0},
                     {"lambda", lambda},
                     {"b", b_flag ? json(*b_flag) : json(nullptr)},
                     {"delta", delta_flag ? json(*delta_flag) : json(nullptr)}});
    }
    json cfg{{"subcommand", name}, {"map", map_spec}, {"params", params}};
    return execute(cfg, ctx);
  } catch (const std::exception& e) {
    return report_error(e, exit_code_for(e));
  }
}

}  // namespace rhlab::cli
