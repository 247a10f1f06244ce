// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
//
// The criteria pin every tolerance in code; nothing is deferred to runtime
// calibration. Runtimes are reported so the per-criterion budgets are
// auditable.
#include <chrono>
#include <cstdio>
#include <vector>

#include "crlab/flow.hpp"
#include "crlab/quadrature.hpp"
#include "crlab/report.hpp"
#include "crlab/verify.hpp"

using namespace crlab;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int idx, const char* name, bool pass, const std::string& detail, double secs) {
  std::printf("[%d] %-34s %s (%s; %.1fs)\n", idx, name, pass ? "PASS" : "FAIL", detail.c_str(),
              secs);
  if (!pass) ++g_failures;
  std::fflush(stdout);
}

const FdSettings kFd{};

// --------------------------------------------------------------------------
// 1. six commutation relations at 100 random points on three model/target
//    pairs, residual < 1e-5; corrupted-geometry fixtures must fail
void criterion_commutators() {
  Timer t;
  const double tol = 1e-5;
  double worst = 0;
  bool pass = true;
  std::string worst_combo;

  auto run_combo = [&](const std::string& label, ModelPtr M, TargetPtr N, const SmoothMap& f) {
    auto pts = sample_points(*M, 100, 20240501);
    auto reports = check_commutators(*M, *N, f, pts, tol, kFd);
    for (const auto& r : reports) {
      if (r.max_residual > worst) {
        worst = r.max_residual;
        worst_combo = label + "/" + r.identity;
      }
      pass = pass && r.pass;
    }
  };

  {
    auto M = make_heisenberg(2);
    MapSpec spec;
    spec.name = "polynomial";
    spec.seed = 2;
    spec.scale = 0.5;
    spec.degree = 2;
    run_combo("heisenberg+flat", M, make_flat(2), make_map(spec, M->layout, 2));
  }
  {
    auto M = make_sphere(2);
    MapSpec spec;
    spec.name = "perturbed-cr";
    spec.r = 0.4;
    spec.eps = 0.5;
    run_combo("sphere+bergman", M, make_bergman_ball(2), make_map(spec, M->layout, 2));
  }
  {
    auto S = make_sphere(2);
    Poly q = Poly::coordinate(3, 0) * Poly::coordinate_bar(3, 1);
    auto M = conformal_change(S, ConformalFactor::make(S->layout, q, "re-z1-zb2"));
    MapSpec spec;
    spec.name = "perturbed-cr";
    spec.r = 0.4;
    spec.eps = 0.3;
    run_combo("rescaled-sphere+bergman", M, make_bergman_ball(2), make_map(spec, M->layout, 2));
  }

  // fault injection: both corrupted fixtures must fail at the same tolerance
  bool faults_fail = true;
  {
    auto base = make_sphere(1);
    MapSpec spec;
    spec.name = "perturbed-cr";
    spec.r = 0.5;
    spec.eps = 0.4;
    SmoothMap f = make_map(spec, base->layout, 2);
    auto pts = sample_points(*base, 10, 20240502);
    auto all_pass = [](const std::vector<VerificationReport>& rs) {
      for (const auto& r : rs)
        if (!r.pass) return false;
      return true;
    };
    faults_fail =
        !all_pass(check_commutators(*with_corrupted_connection(base, 0.01),
                                    *make_bergman_ball(2), f, pts, tol, kFd)) &&
        !all_pass(check_commutators(*with_corrupted_levi(base, 0.01), *make_bergman_ball(2), f,
                                    pts, tol, kFd));
  }
  pass = pass && faults_fail;

  char buf[160];
  std::snprintf(buf, sizeof buf, "max residual %.2e < 1e-05 at %s; fault fixtures %s", worst,
                worst_combo.c_str(), faults_fail ? "fail as required" : "DID NOT FAIL");
  report(1, "commutation-suite", pass, buf, t.seconds());
}

// --------------------------------------------------------------------------
// 2. both integrated identities balance on S^3 at ~1e5 deterministic nodes
//    for three non-harmonic maps, residual < 1e-3; halving the mesh spacing
//    must cut the genuinely resolved residual by >= 4x
void criterion_integrated_identities() {
  Timer t;
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  auto flat = make_flat(2);

  struct Case {
    std::string label;
    TargetPtr target;
    SmoothMap map;
  };
  MapSpec pc;
  pc.name = "perturbed-cr";
  pc.r = 0.5;
  pc.eps = 0.4;
  MapSpec ac;
  ac.name = "anti-cr";
  ac.r = 0.5;
  MapSpec poly;
  poly.name = "polynomial";
  poly.seed = 11;
  poly.scale = 0.5;
  poly.degree = 3;
  std::vector<Case> cases{{"perturbed-cr->ball", ball, make_map(pc, S->layout, 2)},
                          {"anti-cr->ball", ball, make_map(ac, S->layout, 2)},
                          {"polynomial->flat", flat, make_map(poly, S->layout, 2)}};

  QuadratureRule rule = make_rule(*S, 48, RuleKind::ProductDeterministic);  // 110592 nodes
  bool pass = true;
  double worst1 = 0, worst2 = 0;
  for (const auto& c : cases) {
    // the criterion is about non-harmonic maps: check tau != 0 first
    double tau_max = 0;
    for (const Point& p : sample_points(*S, 10, 20240503)) {
      GeomContext G = make_context(*S, p, kFd);
      SecondCov Sc = second_cov(G, *c.target, c.map, false);
      tau_max = std::max(tau_max, tension(Sc, G).cwiseAbs().maxCoeff());
    }
    pass = pass && tau_max > 1e-3;
    SiuResiduals s = siu_identity_residuals(*S, *c.target, c.map, rule);
    worst1 = std::max(worst1, s.res1);
    worst2 = std::max(worst2, s.res2);
    pass = pass && s.res1 < 1e-3 && s.res2 < 1e-3;
  }

  // convergence-order sanity on the second identity, in the resolution range
  // where the product rule has not yet integrated the fields exactly (the
  // integrands of polynomial maps are band-limited, so large grids sit at the
  // differentiation floor)
  QuadratureRule coarse = make_rule(*S, 4, RuleKind::ProductDeterministic);
  QuadratureRule fine = make_rule(*S, 8, RuleKind::ProductDeterministic);
  bool conv_ok = true;
  for (const auto& c : cases) {
    const double rc = siu_identity_residuals(*S, *c.target, c.map, coarse).res2;
    const double rf = siu_identity_residuals(*S, *c.target, c.map, fine).res2;
    conv_ok = conv_ok && (rf <= rc / 4.0 || rf < 1e-10);
  }
  pass = pass && conv_ok;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "worst residuals %.2e / %.2e < 1e-03 at 48^3 nodes; doubling check %s", worst1,
                worst2, conv_ok ? "ok" : "FAILED");
  report(2, "integrated-identities", pass, buf, t.seconds());
}

// --------------------------------------------------------------------------
// 3. sign of the P-pairing integral on S^5 into the Bergman ball
void criterion_positivity() {
  Timer t;
  auto S = make_sphere(2);
  auto ball = make_bergman_ball(2);
  QuadratureRule rule = make_rule(*S, 20000, RuleKind::MonteCarlo, 31);
  bool pass = true;
  double worst_gap = -1e300;
  int strict = 0;
  for (int k = 0; k < 10; ++k) {
    MapSpec spec;
    spec.name = "polynomial";
    spec.seed = 100 + uint64_t(k);
    spec.scale = 0.3;
    SmoothMap f = make_map(spec, S->layout, 2);
    PositivityResult pr = positivity_check(*S, *ball, f, rule, 1e-9);
    pass = pass && pr.nonpositive;
    worst_gap = std::max(worst_gap, pr.value - pr.gate);
    if (pr.value < -pr.gate) ++strict;
  }
  pass = pass && strict == 10;

  // equality branch: the CR inclusion sits at zero and classifies as
  // CR-pluriharmonic
  MapSpec cr;
  cr.name = "cr-inclusion";
  cr.r = 0.4;
  PositivityResult pe =
      positivity_check(*S, *make_bergman_ball(3), make_map(cr, S->layout, 3), rule, 1e-9);
  pass = pass && pe.nonpositive && pe.equality && pe.cr_pluriharmonic;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "10/10 below gate, %d strictly negative; equality branch %s", strict,
                (pe.equality && pe.cr_pluriharmonic) ? "recovers CR-pluriharmonicity" : "FAILED");
  report(3, "p-pairing-sign", pass, buf, t.seconds());
}

// --------------------------------------------------------------------------
// 4. conformal invariance of CR-pluriharmonicity under three generic factors
void criterion_conformal() {
  Timer t;
  auto S = make_sphere(2);
  auto pts = sample_points(*S, 25, 20240504);
  const double tol = 1e-5;

  std::vector<ConformalFactor> sigmas;
  {
    Poly a = Poly::coordinate(3, 0) * Poly::coordinate_bar(3, 1) * cxd(0.4);
    Poly b = Poly::coordinate(3, 1) * Poly::coordinate_bar(3, 2) * cxd(0.0, -0.3);
    Poly c = Poly::coordinate(3, 0) * Poly::coordinate(3, 0) * cxd(0.25);
    sigmas.push_back(ConformalFactor::make(S->layout, a, "re-z1-zb2"));
    sigmas.push_back(ConformalFactor::make(S->layout, b, "im-z2-zb3"));
    sigmas.push_back(ConformalFactor::make(S->layout, c, "re-z1-squared"));
  }

  struct Case {
    std::string label;
    TargetPtr target;
    SmoothMap map;
  };
  MapSpec cr;
  cr.name = "cr-inclusion";
  cr.r = 0.4;
  MapSpec recr;
  recr.name = "re-cr";
  recr.r = 0.4;
  std::vector<Case> cases{
      {"cr-inclusion->ball", make_bergman_ball(3), make_map(cr, S->layout, 3)},
      {"re-cr->flat", make_flat(2), make_map(recr, S->layout, 2)}};

  bool pass = true;
  double worst = 0;
  for (const auto& c : cases)
    for (const auto& sig : sigmas) {
      auto reports = check_conformal_invariance(S, sig, *c.target, c.map, pts, tol, kFd);
      for (const auto& r : reports) {
        pass = pass && r.pass && !r.skipped;
        worst = std::max(worst, r.max_residual);
      }
    }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "2 maps x 3 factors, law + persistence, worst residual %.2e < 1e-05", worst);
  report(4, "conformal-invariance", pass, buf, t.seconds());
}

// --------------------------------------------------------------------------
// 5. curvature-sign samplers
void criterion_negativity() {
  Timer t;
  auto ball = make_bergman_ball(2);
  std::mt19937_64 rng(20240505);
  std::normal_distribution<double> g(0.0, 1.0);
  bool pass = true;
  double worst = -1e300;
  for (int q = 0; q < 20; ++q) {
    VectorXcd z = VectorXcd::Zero(2);
    if (q > 0) {
      for (int a = 0; a < 2; ++a) z[a] = cxd(g(rng), g(rng));
      z *= (0.05 + 0.55 * (q / 19.0)) / z.norm();
    }
    NegativityVerdict v = sample_strong_negativity(*ball, z, 100000, 777 + uint64_t(q));
    pass = pass && v.kind == NegativityVerdict::Kind::StronglyNegativeSamplePass;
    worst = std::max(worst, v.worst_value);
  }
  NegativityVerdict order2 = sample_negativity_order_k(*ball, VectorXcd::Zero(2), 2, 10000);
  pass = pass && order2.kind == NegativityVerdict::Kind::StronglyNegativeSamplePass;
  NegativityVerdict flat2 = sample_negativity_order_k(*make_flat(2), VectorXcd::Zero(2), 2, 1000);
  pass = pass && flat2.kind != NegativityVerdict::Kind::StronglyNegativeSamplePass;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "strong sampler 20x1e5 trials all < 0 (worst %.2e); order-2 %s; flat fails",
                worst, to_string(order2.kind).c_str());
  report(5, "curvature-negativity", pass, buf, t.seconds());
}

// --------------------------------------------------------------------------
// 6. energy descent from a perturbed CR map
void criterion_flow() {
  Timer t;
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  QuadratureRule rule = make_rule(*S, 16, RuleKind::ProductDeterministic);
  MapAnsatz a = make_ansatz(S->layout, 2, 2);
  // f = 0.45 (z_1, z_2) + 0.1-relative conjugate contamination
  long iz1 = -1, iz2 = -1, izb2 = -1;
  for (size_t k = 0; k < a.basis.size(); ++k) {
    const auto& b = a.basis[k];
    const int ta = b.az[0] + b.az[1], tb = b.ab[0] + b.ab[1];
    if (ta == 1 && tb == 0 && b.az[0] == 1) iz1 = long(k);
    if (ta == 1 && tb == 0 && b.az[1] == 1) iz2 = long(k);
    if (ta == 0 && tb == 1 && b.ab[1] == 1) izb2 = long(k);
  }
  a.C(iz1, 0) = 0.45;
  a.C(iz2, 1) = 0.45;
  a.C(izb2, 0) = 0.045;

  const double fd0 = gradient_fd_relative_error(a, *S, *ball, rule, 10);
  FlowSettings fs;
  fs.gtol = 1e-9;
  fs.max_iterations = 600;
  FlowResult res = minimize(a, *S, *ball, rule, fs);
  const double fd1 = gradient_fd_relative_error(res.ansatz, *S, *ball, rule, 10);

  bool monotone = true;
  for (size_t i = 1; i < res.trace.size(); ++i)
    if (res.trace[i].E > res.trace[i - 1].E + 1e-12) monotone = false;
  const double E0 = res.trace.front().E, E1 = res.trace.back().E;
  const double e0 = res.trace.front().e_max, e1 = res.trace.back().e_max;
  const bool pass = monotone && E1 < 0.01 * E0 && e1 < 0.01 * e0 && fd0 < 1e-5 && fd1 < 1e-5 &&
                    !res.stalled;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "monotone; E %.3e -> %.3e (%.2f%%); max e(f) %.2e -> %.2e; grad FD err %.1e/%.1e",
                E0, E1, 100.0 * E1 / E0, e0, e1, fd0, fd1);
  report(6, "energy-descent", pass, buf, t.seconds());
}

// --------------------------------------------------------------------------
// 7. P-operator degeneration for flat targets
void criterion_graham_lee() {
  Timer t;
  auto S = make_sphere(2);
  auto flat = make_flat(2);
  MapSpec recr;
  recr.name = "re-cr";
  recr.r = 0.4;
  SmoothMap f = make_map(recr, S->layout, 2);
  auto pts = sample_points(*S, 100, 20240507);
  double worst = 0;
  for (const Point& p : pts) {
    MatrixXcd P = p_operator(*S, *flat, f, p, kFd);
    worst = std::max(worst, P.cwiseAbs().maxCoeff());
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "max |P_i f| = %.2e < 1e-06 over 100 points", worst);
  report(7, "flat-target-P-degeneration", worst < 1e-6, buf, t.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_commutators();
  criterion_integrated_identities();
  criterion_positivity();
  criterion_conformal();
  criterion_negativity();
  criterion_flow();
  criterion_graham_lee();
  if (g_failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
