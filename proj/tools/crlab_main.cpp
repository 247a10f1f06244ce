// Command-line front end: runs the verification suites, integral checks and
// the energy flow from a JSON experiment configuration.
//
// Exit codes: 0 all checks pass, 1 numerical failure, 2 usage/config error.
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "crlab/config.hpp"
#include "crlab/report.hpp"

using namespace crlab;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  double tol = -1;
  long long seed = -1;
  int resolution = -1;
  std::string out_dir;
  std::string format;
  std::string rule_cache;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "experiment config file (JSON)")->required();
  cmd->add_option("--tol", o.tol, "tolerance override");
  cmd->add_option("--seed", o.seed, "seed override");
  cmd->add_option("--resolution", o.resolution, "rule resolution override");
  cmd->add_option("--out", o.out_dir, "report output directory override");
  cmd->add_option("--format", o.format, "output format: table | json | csv");
  cmd->add_option("--rule-cache", o.rule_cache, "directory for cached quadrature rules");
}

std::string g_rule_cache;

QuadratureRule build_rule(const ExperimentConfig& cfg, const PseudoHermitianModel& M,
                          RuleKind kind) {
  if (g_rule_cache.empty()) return make_rule(M, cfg.resolution, kind, cfg.seed);
  std::filesystem::create_directories(g_rule_cache);
  const std::string key = g_rule_cache + "/rule_" + M.name() + "_m" + std::to_string(M.m) + "_" +
                          (kind == RuleKind::ProductDeterministic ? "det" : "mc") + "_r" +
                          std::to_string(cfg.resolution) + "_s" + std::to_string(cfg.seed) +
                          ".csv";
  if (std::filesystem::exists(key)) return load_rule_csv(key);
  QuadratureRule rule = make_rule(M, cfg.resolution, kind, cfg.seed);
  save_rule_csv(rule, key);
  return rule;
}

ExperimentConfig resolve(const CommonOpts& o) {
  ExperimentConfig cfg = load_config_file(o.config_path);
  if (o.tol > 0) cfg.tol = o.tol;
  if (o.seed >= 0) cfg.seed = uint64_t(o.seed);
  if (o.resolution > 0) cfg.resolution = o.resolution;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.format.empty()) cfg.format = o.format;
  g_rule_cache = o.rule_cache;
  return cfg;
}

void emit(const ExperimentConfig& cfg, const std::string& name, json body,
          const std::vector<VerificationReport>& table = {}) {
  body["config"] = cfg.resolved();
  write_json_report(cfg.out_dir, name, body);
  if (cfg.format == "json") {
    std::cout << body.dump(2) << "\n";
  } else if (cfg.format == "csv" && !table.empty()) {
    std::cout << "identity,points,max,mean,p90,tol,result\n";
    for (const auto& r : table)
      std::cout << r.identity << "," << r.point_count << "," << r.max_residual << ","
                << r.mean_residual << "," << r.p90 << "," << r.tol << ","
                << (r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL")) << "\n";
  } else if (!table.empty()) {
    print_report_table(std::cout, table);
  }
}

int finish(const std::vector<VerificationReport>& reports) {
  std::vector<std::string> failing;
  for (const auto& r : reports)
    if (!r.pass && !r.skipped) failing.push_back(r.identity);
  if (failing.empty()) return 0;
  std::cerr << "failing identities:";
  for (const auto& f : failing) std::cerr << " " << f;
  std::cerr << "\n";
  return 1;
}

RuleKind rule_kind_of(const ExperimentConfig& cfg) {
  return cfg.rule_kind == "monte-carlo" ? RuleKind::MonteCarlo : RuleKind::ProductDeterministic;
}

int run_verify_commutators(const ExperimentConfig& cfg) {
  Experiment e = build_experiment(cfg);
  auto pts = sample_points(*e.model, cfg.points, cfg.seed);
  auto reports = check_commutators(*e.model, *e.target, e.map, pts, cfg.tol);
  json body;
  body["reports"] = json::array();
  for (const auto& r : reports) body["reports"].push_back(to_json(r));
  emit(cfg, "verify-commutators", body, reports);
  return finish(reports);
}

int run_verify_divergences(const ExperimentConfig& cfg) {
  Experiment e = build_experiment(cfg);
  auto pts = sample_points(*e.model, cfg.points, cfg.seed);
  auto reports = check_divergences(*e.model, *e.target, e.map, pts, cfg.tol);
  json body;
  body["reports"] = json::array();
  for (const auto& r : reports) body["reports"].push_back(to_json(r));
  emit(cfg, "verify-divergences", body, reports);
  return finish(reports);
}

int run_verify_siu(const ExperimentConfig& cfg) {
  Experiment e = build_experiment(cfg);
  QuadratureRule rule = build_rule(cfg, *e.model, rule_kind_of(cfg));
  SiuResiduals s = siu_identity_residuals(*e.model, *e.target, e.map, rule);
  json body = json::object();
  body["siu"] = to_json(s);
  const double gate1 = std::max(cfg.tol, 3.0 * s.stderr1);
  const double gate2 = std::max(cfg.tol, 3.0 * s.stderr2);
  VerificationReport r1, r2;
  r1.identity = "integrated-identity-1";
  r1.point_count = int(rule.pts.size());
  r1.max_residual = s.res1;
  r1.tol = gate1;
  r1.pass = s.res1 < gate1;
  r2.identity = "integrated-identity-2";
  r2.point_count = int(rule.pts.size());
  r2.max_residual = s.res2;
  r2.tol = gate2;
  r2.pass = s.res2 < gate2;
  std::vector<VerificationReport> reports{r1, r2};
  emit(cfg, "verify-siu", body, reports);
  return finish(reports);
}

int run_check_negativity(const ExperimentConfig& cfg) {
  Experiment e = build_experiment(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> g(0.0, 1.0);
  json body;
  body["points"] = json::array();
  bool ok = true;
  const int npts = std::min(cfg.points, 20);
  for (int q = 0; q < npts; ++q) {
    VectorXcd z = VectorXcd::Zero(cfg.n);
    if (q > 0) {
      for (int a = 0; a < cfg.n; ++a) z[a] = cxd(g(rng), g(rng));
      z *= 0.5 / std::max(1.0, z.norm());
    }
    NegativityVerdict strong = sample_strong_negativity(*e.target, z, cfg.trials, cfg.seed + q);
    NegativityVerdict order =
        sample_negativity_order_k(*e.target, z, cfg.order_k, std::max(100, cfg.trials / 10),
                                  cfg.seed + 1000 + q);
    json rec;
    rec["z_norm"] = z.norm();
    rec["strong"] = to_json(strong);
    rec["order_k"] = to_json(order);
    body["points"].push_back(rec);
    const bool point_ok =
        (e.cfg.target_name == "flat")
            ? strong.kind == NegativityVerdict::Kind::SemiNegativeSamplePass
            : (strong.kind == NegativityVerdict::Kind::StronglyNegativeSamplePass &&
               order.kind == NegativityVerdict::Kind::StronglyNegativeSamplePass);
    ok = ok && point_ok;
  }
  body["pass"] = ok;
  emit(cfg, "check-negativity", body);
  if (cfg.format != "json")
    std::cout << "negativity sampling: " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

int run_conformal_invariance(const ExperimentConfig& cfg) {
  Experiment e = build_experiment(cfg);
  // the check drives the conformal change itself, so it starts from the base
  ModelPtr base = cfg.model_name == "heisenberg" ? make_heisenberg(cfg.m) : make_sphere(cfg.m);
  ConformalFactor sig = make_sigma(cfg.sigma_name, cfg.sigma_amp, base->layout);
  auto pts = sample_points(*base, cfg.points, cfg.seed);
  auto reports = check_conformal_invariance(base, sig, *e.target, e.map, pts, cfg.tol);
  json body;
  body["reports"] = json::array();
  for (const auto& r : reports) body["reports"].push_back(to_json(r));
  emit(cfg, "conformal-invariance", body, reports);
  return finish(reports);
}

int run_energy(const ExperimentConfig& cfg) {
  Experiment e = build_experiment(cfg);
  QuadratureRule rule = build_rule(cfg, *e.model, rule_kind_of(cfg));
  const double E = energy(*e.model, *e.target, e.map, rule);
  json body;
  body["energy"] = E;
  body["rule_total_volume"] = rule.total();
  emit(cfg, "energy", body);
  if (cfg.format != "json") std::cout << "E[f] = " << E << "\n";
  return 0;
}

int run_positivity(const ExperimentConfig& cfg) {
  Experiment e = build_experiment(cfg);
  QuadratureRule rule = build_rule(cfg, *e.model, rule_kind_of(cfg));
  PositivityResult p = positivity_check(*e.model, *e.target, e.map, rule, cfg.tol);
  json body;
  body["positivity"] = to_json(p);
  emit(cfg, "positivity", body);
  if (cfg.format != "json")
    std::cout << "integral of <Pf, dbar fbar> = " << p.value << " (gate " << p.gate << ") "
              << (p.nonpositive ? "PASS" : "FAIL") << "\n";
  return p.nonpositive ? 0 : 1;
}

int run_flow(const ExperimentConfig& cfg) {
  Experiment e = build_experiment(cfg);
  QuadratureRule rule = build_rule(cfg, *e.model, rule_kind_of(cfg));
  MapAnsatz a = make_ansatz(e.model->layout, cfg.n, cfg.flow_degree);
  // seed the ansatz with the configured map when it is polynomial
  const SmoothMap& f = e.map;
  for (size_t k = 0; k < a.basis.size(); ++k)
    for (int al = 0; al < cfg.n; ++al) {
      // match the monomial against the map components
      for (const auto& term : f.components()[size_t(al)].terms) {
        if (term.at == 0 && term.az == a.basis[k].az && term.ab == a.basis[k].ab)
          a.C(long(k), al) += term.c;
      }
    }
  const double fd_err0 = gradient_fd_relative_error(a, *e.model, *e.target, rule, 10, cfg.seed);
  FlowResult res = minimize(a, *e.model, *e.target, rule, cfg.flow);
  const double fd_err1 =
      gradient_fd_relative_error(res.ansatz, *e.model, *e.target, rule, 10, cfg.seed + 1);
  json body;
  body["flow"] = to_json(res);
  body["gradient_fd_error_start"] = fd_err0;
  body["gradient_fd_error_end"] = fd_err1;
  emit(cfg, "flow", body);
  std::filesystem::create_directories(cfg.out_dir);
  save_trace_csv(res.trace, cfg.out_dir + "/flow_trace.csv");
  if (cfg.format != "json" && !res.trace.empty())
    std::cout << "flow: E " << res.trace.front().E << " -> " << res.trace.back().E << " in "
              << res.trace.back().iteration << " iterations"
              << (res.stalled ? " (stalled)" : "") << "\n";
  bool monotone = true;
  for (size_t i = 1; i < res.trace.size(); ++i)
    if (res.trace[i].E > res.trace[i - 1].E + 1e-12) monotone = false;
  return monotone ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crlab: numerical laboratory for pseudo-Hermitian geometry"};
  app.require_subcommand(1);

  std::map<std::string, std::function<int(const ExperimentConfig&)>> handlers = {
      {"verify-commutators", run_verify_commutators},
      {"verify-divergences", run_verify_divergences},
      {"verify-siu", run_verify_siu},
      {"check-negativity", run_check_negativity},
      {"conformal-invariance", run_conformal_invariance},
      {"energy", run_energy},
      {"positivity", run_positivity},
      {"flow", run_flow},
  };
  std::map<std::string, CommonOpts> opts;
  for (auto& [name, fn] : handlers) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common(cmd, opts[name]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    for (auto& [name, fn] : handlers)
      if (app.get_subcommand(name)->parsed()) return fn(resolve(opts[name]));
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
