#include "doctest.h"

#include "crlab/verify.hpp"

using namespace crlab;

namespace {
const FdSettings kFd{};

bool all_pass(const std::vector<VerificationReport>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return true;
}

double worst_max(const std::vector<VerificationReport>& rs) {
  double w = 0;
  for (const auto& r : rs) w = std::max(w, r.max_residual);
  return w;
}
}  // namespace

TEST_CASE("commutators: Heisenberg + flat + quadratic map (all curvature terms vanish)") {
  auto M = make_heisenberg(2);
  auto N = make_flat(2);
  MapSpec spec;
  spec.name = "polynomial";
  spec.seed = 2;
  spec.scale = 0.5;
  spec.degree = 2;
  SmoothMap f = make_map(spec, M->layout, 2);
  auto pts = sample_points(*M, 10, 111);
  auto reports = check_commutators(*M, *N, f, pts, 1e-7, kFd);
  CHECK(reports.size() == 6);
  CHECK(all_pass(reports));
}

TEST_CASE("commutators: sphere + Bergman ball + perturbed CR map") {
  auto M = make_sphere(2);
  auto N = make_bergman_ball(2);
  MapSpec spec;
  spec.name = "perturbed-cr";
  spec.r = 0.4;
  spec.eps = 0.5;
  SmoothMap f = make_map(spec, M->layout, 2);
  auto pts = sample_points(*M, 8, 222);
  auto reports = check_commutators(*M, *N, f, pts, 1e-5, kFd);
  CHECK(all_pass(reports));
  CHECK(worst_max(reports) < 1e-5);
}

TEST_CASE("commutators: rescaled sphere exercises the torsion terms") {
  auto S = make_sphere(2);
  Poly q = Poly::coordinate(3, 0) * Poly::coordinate_bar(3, 1);
  auto M = conformal_change(S, ConformalFactor::make(S->layout, q, "re-z1-zb2"));
  auto N = make_bergman_ball(2);
  MapSpec spec;
  spec.name = "perturbed-cr";
  spec.r = 0.4;
  spec.eps = 0.3;
  SmoothMap f = make_map(spec, M->layout, 2);
  auto pts = sample_points(*M, 4, 333);
  // the torsion of the rescaled structure is genuinely nonzero here
  CHECK(M->connection(pts[0], kFd).torsion_norm() > 1e-3);
  auto reports = check_commutators(*M, *N, f, pts, 1e-5, kFd);
  CHECK(all_pass(reports));
}

TEST_CASE("commutators: raw residual drops when the step is halved") {
  auto M = make_sphere(1);
  auto N = make_bergman_ball(2);
  MapSpec spec;
  spec.name = "perturbed-cr";
  spec.r = 0.5;
  spec.eps = 0.4;
  SmoothMap f = make_map(spec, M->layout, 2);
  auto pts = sample_points(*M, 4, 444);
  auto reports = check_commutators(*M, *N, f, pts, 1e-5, kFd, true, true);
  for (const auto& r : reports) {
    CHECK(r.pass);
    if (r.raw_step > 1e-9)  // above the round-off floor the order must show
      CHECK(r.raw_half_step < 0.6 * r.raw_step);
  }
}

TEST_CASE("fault injection: corrupted geometry fails the commutator suite") {
  auto base = make_sphere(1);
  auto N = make_bergman_ball(2);
  MapSpec spec;
  spec.name = "perturbed-cr";
  spec.r = 0.5;
  spec.eps = 0.4;
  SmoothMap f = make_map(spec, base->layout, 2);
  auto pts = sample_points(*base, 4, 555);

  auto bad_gamma = with_corrupted_connection(base, 0.01);
  CHECK(!all_pass(check_commutators(*bad_gamma, *N, f, pts, 1e-5, kFd)));

  auto bad_levi = with_corrupted_levi(base, 0.01);
  CHECK(!all_pass(check_commutators(*bad_levi, *N, f, pts, 1e-5, kFd)));
}

TEST_CASE("divergence identities hold pointwise") {
  auto M = make_sphere(1);
  auto N = make_bergman_ball(2);

  MapSpec c;
  c.name = "constant";
  auto pts = sample_points(*M, 4, 666);
  auto r0 = check_divergences(*M, *N, make_map(c, M->layout, 2), pts, 1e-9, kFd);
  CHECK(all_pass(r0));

  MapSpec cr;
  cr.name = "cr-inclusion";
  cr.r = 0.5;
  auto r1 = check_divergences(*M, *N, make_map(cr, M->layout, 2), pts, 1e-5, kFd);
  CHECK(all_pass(r1));

  MapSpec spec;
  spec.name = "polynomial";
  spec.seed = 4;
  spec.scale = 0.4;
  auto r2 = check_divergences(*M, *N, make_map(spec, M->layout, 2), pts, 1e-4, kFd);
  CHECK(all_pass(r2));

  // S^5 exercises the trace-free tensor genuinely
  auto M2 = make_sphere(2);
  SmoothMap f2 = make_map(spec, M2->layout, 2);
  auto pts2 = sample_points(*M2, 3, 777);
  auto r3 = check_divergences(*M2, *N, f2, pts2, 1e-4, kFd);
  CHECK(all_pass(r3));
}

TEST_CASE("curvature rearrangement: algebraic identity and sign") {
  auto flat = make_flat(2);
  VerificationReport rf = check_curvature_rearrangement(*flat, VectorXcd::Zero(2), 2, 5, 1e-12);
  CHECK(rf.pass);
  CHECK(rf.max_residual < 1e-15);

  auto ball = make_bergman_ball(2);
  VerificationReport rb = check_curvature_rearrangement(*ball, VectorXcd::Zero(2), 2, 25, 1e-9);
  CHECK(rb.pass);
  CHECK(rb.note.empty());  // the common value stayed nonnegative

  VectorXcd z(2);
  z << cxd(0.3, 0.2), cxd(-0.1, 0.4);
  VerificationReport ri = check_curvature_rearrangement(*ball, z, 3, 25, 1e-9);
  CHECK(ri.pass);
}

TEST_CASE("conformal invariance of CR-pluriharmonicity") {
  auto M = make_sphere(2);
  auto flat = make_flat(2);
  MapSpec recr;
  recr.name = "re-cr";
  recr.r = 0.4;
  SmoothMap f = make_map(recr, M->layout, 2);
  auto pts = sample_points(*M, 5, 888);

  Poly q = Poly::coordinate(3, 0) * Poly::coordinate_bar(3, 1) * cxd(0.4);
  ConformalFactor sig = ConformalFactor::make(M->layout, q, "generic");
  auto reports = check_conformal_invariance(M, sig, *flat, f, pts, 1e-5, kFd);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].pass);
  CHECK(reports[1].pass);

  // sigma = 0 is trivially invariant
  auto trivial =
      check_conformal_invariance(M, ConformalFactor::zero(M->layout), *flat, f, pts, 1e-7, kFd);
  CHECK(all_pass(trivial));

  // a generic map fails the precondition and the check records a skip
  MapSpec poly;
  poly.name = "polynomial";
  poly.seed = 8;
  poly.scale = 0.4;
  auto skipped =
      check_conformal_invariance(M, sig, *flat, make_map(poly, M->layout, 2), pts, 1e-5, kFd);
  REQUIRE(skipped.size() == 1);
  CHECK(skipped[0].skipped);
}

TEST_CASE("point sweeps are identical for the serial and parallel paths") {
  auto M = make_sphere(1);
  auto N = make_bergman_ball(2);
  MapSpec spec;
  spec.name = "perturbed-cr";
  spec.r = 0.5;
  spec.eps = 0.3;
  SmoothMap f = make_map(spec, M->layout, 2);
  auto pts = sample_points(*M, 6, 999);
  auto par = check_commutators(*M, *N, f, pts, 1e-5, kFd, true);
  auto ser = check_commutators(*M, *N, f, pts, 1e-5, kFd, false);
  REQUIRE(par.size() == ser.size());
  for (size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].max_residual == ser[i].max_residual);
    CHECK(par[i].mean_residual == ser[i].mean_residual);
  }
}
