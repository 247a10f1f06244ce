#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "crlab/flow.hpp"

using namespace crlab;

namespace {
// index of a monomial in the ansatz basis
long find_basis(const MapAnsatz& a, std::initializer_list<int> az, std::initializer_list<int> ab) {
  std::vector<uint8_t> vaz(size_t(a.layout.mc), 0), vab(size_t(a.layout.mc), 0);
  int k = 0;
  for (int e : az) vaz[size_t(k++)] = uint8_t(e);
  k = 0;
  for (int e : ab) vab[size_t(k++)] = uint8_t(e);
  for (size_t i = 0; i < a.basis.size(); ++i)
    if (a.basis[i].az == vaz && a.basis[i].ab == vab) return long(i);
  return -1;
}
}  // namespace

TEST_CASE("ansatz basis enumeration and map conversion") {
  auto S = make_sphere(1);
  MapAnsatz a = make_ansatz(S->layout, 2, 2);
  CHECK(a.basis.size() == 15);  // monomials in 4 variables of total degree <= 2
  const long iz0 = find_basis(a, {1, 0}, {0, 0});
  REQUIRE(iz0 >= 0);
  a.C(iz0, 0) = cxd(0.5, 0.0);
  SmoothMap f = a.to_map();
  Point p;
  p.x = VectorXd::Zero(4);
  p.x[0] = 1.0;
  p.chart = 0;
  CHECK(std::abs(f.value(p)[0] - cxd(0.5, 0)) < 1e-15);
}

TEST_CASE("energy and gradient vanish at CR maps and at the center map") {
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  QuadratureRule rule = make_rule(*S, 10, RuleKind::ProductDeterministic);

  MapAnsatz zero = make_ansatz(S->layout, 2, 2);
  EnergyGrad eg0 = discrete_energy_and_gradient(zero, *S, *ball, rule);
  CHECK(eg0.E == 0.0);
  CHECK(eg0.grad.norm() == 0.0);

  MapAnsatz crm = make_ansatz(S->layout, 2, 2);
  crm.C(find_basis(crm, {1, 0}, {0, 0}), 0) = 0.5;
  crm.C(find_basis(crm, {0, 1}, {0, 0}), 1) = 0.5;
  EnergyGrad eg1 = discrete_energy_and_gradient(crm, *S, *ball, rule);
  CHECK(eg1.E < 1e-14);
  CHECK(eg1.grad.norm() < 1e-13);
}

TEST_CASE("analytic gradient matches finite differences") {
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  QuadratureRule rule = make_rule(*S, 8, RuleKind::ProductDeterministic);
  MapAnsatz a = make_ansatz(S->layout, 2, 2);
  a.C(find_basis(a, {1, 0}, {0, 0}), 0) = 0.45;
  a.C(find_basis(a, {0, 1}, {0, 0}), 1) = 0.45;
  a.C(find_basis(a, {0, 0}, {0, 1}), 0) = cxd(0.05, 0.02);
  a.C(find_basis(a, {0, 0}, {1, 1}), 1) = cxd(0.0, 0.04);
  EnergyGrad eg = discrete_energy_and_gradient(a, *S, *ball, rule);
  CHECK(eg.E > 1e-4);
  CHECK(eg.grad.norm() > 1e-4);
  CHECK(gradient_fd_relative_error(a, *S, *ball, rule, 10) < 1e-5);
}

TEST_CASE("descent from a perturbed CR map kills the energy") {
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  QuadratureRule rule = make_rule(*S, 10, RuleKind::ProductDeterministic);
  MapAnsatz a = make_ansatz(S->layout, 2, 2);
  a.C(find_basis(a, {1, 0}, {0, 0}), 0) = 0.45;
  a.C(find_basis(a, {0, 1}, {0, 0}), 1) = 0.45;
  a.C(find_basis(a, {0, 0}, {0, 1}), 0) = 0.045;  // anti-CR contamination

  FlowSettings fs;
  fs.gtol = 1e-9;
  fs.max_iterations = 400;
  fs.track_tau = true;
  FlowResult res = minimize(a, *S, *ball, rule, fs);
  REQUIRE(res.trace.size() > 2);
  const double E0 = res.trace.front().E;
  const double E1 = res.trace.back().E;
  CHECK(E1 < 0.01 * E0);
  CHECK(!res.stalled);
  for (size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i].E <= res.trace[i - 1].E + 1e-12);
  // near-critical: the tension residual shrank along with the energy
  CHECK(res.trace.back().tau_max < res.trace.front().tau_max);
  CHECK(res.trace.back().e_max < 0.05 * res.trace.front().e_max);

  // cross-validate against a naive fixed-step descent; the step stays below
  // the stability bound of the quadratic form (set by the sphere volume)
  MapAnsatz b = a;
  EnergyGrad eg = discrete_energy_and_gradient(b, *S, *ball, rule);
  for (int it = 0; it < 2000; ++it) {
    b.C -= 0.01 * eg.grad;
    eg = discrete_energy_and_gradient(b, *S, *ball, rule);
  }
  CHECK(eg.E < 0.05 * E0);
  CHECK(std::abs(eg.E - E1) < 0.02 * E0);
}

TEST_CASE("descent from the conjugate inclusion decreases monotonically") {
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  QuadratureRule rule = make_rule(*S, 8, RuleKind::ProductDeterministic);
  MapAnsatz a = make_ansatz(S->layout, 2, 2);
  a.C(find_basis(a, {0, 0}, {1, 0}), 0) = 0.4;  // f = 0.4 (zbar_1, zbar_2)
  a.C(find_basis(a, {0, 0}, {0, 1}), 1) = 0.4;
  FlowSettings fs;
  fs.max_iterations = 60;
  fs.track_tau = false;
  FlowResult res = minimize(a, *S, *ball, rule, fs);
  REQUIRE(res.trace.size() > 2);
  for (size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i].E <= res.trace[i - 1].E + 1e-12);
  CHECK(res.trace.back().E < res.trace.front().E);
}

TEST_CASE("near-critical tension bound shrinks with resolution; pointwise energy bound") {
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  MapAnsatz a0 = make_ansatz(S->layout, 2, 2);
  a0.C(find_basis(a0, {1, 0}, {0, 0}), 0) = 0.45;
  a0.C(find_basis(a0, {0, 1}, {0, 0}), 1) = 0.45;
  a0.C(find_basis(a0, {0, 0}, {0, 1}), 0) = 0.045;
  FlowSettings fs;
  fs.gtol = 1e-9;
  fs.max_iterations = 800;
  fs.track_tau = false;

  FdSettings fd;
  for (int R : {8, 16}) {
    QuadratureRule rule = make_rule(*S, R, RuleKind::ProductDeterministic);
    FlowResult res = minimize(a0, *S, *ball, rule, fs);
    REQUIRE((res.converged || res.trace.back().grad_norm < 1e-8));
    // quadrature-weighted L2 norm of the tension at the terminal point
    const SmoothMap f = res.ansatz.to_map();
    double tau_l2 = 0;
    for (size_t i = 0; i < rule.pts.size(); i += 8) {
      GeomContext G = make_context(*S, rule.pts[i], fd);
      SecondCov Sc = second_cov(G, *ball, f, false);
      tau_l2 += rule.w[long(i)] * tension(Sc, G).squaredNorm();
    }
    tau_l2 = std::sqrt(tau_l2);
    CHECK(tau_l2 < 1e-4 / double(R * R));  // pinned resolution-dependent bound

    // zero-energy characterization: max node energy <= E / min weight
    EnergyGrad eg = discrete_energy_and_gradient(res.ansatz, *S, *ball, rule);
    double e_max = 0;
    for (size_t i = 0; i < rule.pts.size(); i += 8) {
      GeomContext G = make_context(*S, rule.pts[i], fd);
      FirstJet j = first_jet(G, f);
      e_max = std::max(e_max, energy_density(j, G, target_point(*ball, j.f)));
    }
    CHECK(e_max <= eg.E / rule.w.minCoeff() + 1e-12);
  }
}

TEST_CASE("flow trace CSV is written") {
  std::vector<FlowTraceRow> trace{{0, 1.0, 0.5, 0.1, 0.2, 1.0}, {1, 0.5, 0.2, 0.05, 0.1, 1.0}};
  const std::string path = "/tmp/crlab_trace_test.csv";
  save_trace_csv(trace, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,E,grad_norm,tau_max,e_max,step");
  std::remove(path.c_str());
}
