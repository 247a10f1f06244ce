#include "doctest.h"

#include <random>

#include "crlab/jets.hpp"

using namespace crlab;

namespace {
const FdSettings kFd{};

// Independent Kohn-Laplacian stencil on S^3, hand-expanded in ambient
// Wirtinger derivatives of u; shares no code with the jet machinery.
//   box_b u = -h^{1 1bar} (Z_1 Z_1bar u - conj(Gamma^1_{1bar 1}) Z_1bar u)
cxd box_b_s3(const SmoothMap& u, int alpha, const Point& p) {
  const int c = p.chart, a = 1 - p.chart;
  const VectorXcd z = ambient_z(u.layout(), p);
  auto du = [&](std::initializer_list<int> dz_list, std::initializer_list<int> db_list) {
    std::vector<int> az(2, 0), ab(2, 0);
    for (int v : dz_list) az[size_t(v)]++;
    for (int v : db_list) ab[size_t(v)]++;
    return u.partial(alpha, az, ab, 0, p);
  };
  const cxd za = z[a], zc = z[c], zab = std::conj(z[a]), zcb = std::conj(z[c]);
  const double h11 = 1.0 + std::norm(za) / std::norm(zc);
  // Z_1 Z_1bar u expanded by hand
  cxd zz = du({a}, {a}) - du({}, {c}) / zc - (za / zc) * du({a}, {c}) -
           (zab / zcb) * du({c}, {a}) + (zab * za / (zcb * zc)) * du({c}, {c}) -
           (zab * za / (zcb * zc * zc)) * du({}, {c});
  // Gamma^{1bar}_{1 1bar} = conj(h_{1 1bar} z_a) = h11 zbar_a
  cxd z1b = du({}, {a}) - (za / zc) * du({}, {c});
  cxd cov = zz - h11 * zab * z1b;
  return -cov / h11;
}
}  // namespace

TEST_CASE("map partial-derivative evaluators agree with finite differences") {
  auto S = make_sphere(2);
  MapSpec spec;
  spec.name = "polynomial";
  spec.seed = 5;
  spec.scale = 0.4;
  spec.degree = 3;
  SmoothMap f = make_map(spec, S->layout, 2);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    Point p = random_point(*S, rng);
    for (int a = 0; a < 3; ++a) {
      // d/dz_a via FD of the value field
      CVec dir = CVec::zero(S->layout);
      dir.dz[a] = 1.0;
      auto field = [&](const Point& q) { return f.value(q)[0]; };
      std::vector<int> az(3, 0), ab(3, 0);
      az[size_t(a)] = 1;
      const cxd fd = fd_dir(S->layout, field, p, dir, 1e-5, true);
      const cxd ex = f.partial(0, az, ab, 0, p);
      CHECK(std::abs(fd - ex) <= 1e-6 * (1.0 + std::abs(ex)));
      // second and third order in the same direction
      auto dfield = [&](const Point& q) { return f.partial(0, az, ab, 0, q); };
      std::vector<int> az2 = az;
      az2[size_t(a)] = 2;
      const cxd fd2 = fd_dir(S->layout, dfield, p, dir, 1e-5, true);
      CHECK(std::abs(fd2 - f.partial(0, az2, ab, 0, p)) <= 1e-6 * (1.0 + std::abs(fd2)));
    }
  }
}

TEST_CASE("first jet: constant, CR and anti-CR maps") {
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  std::mt19937_64 rng(17);
  MapSpec c;
  c.name = "constant";
  SmoothMap fc = make_map(c, S->layout, 2);
  MapSpec cr;
  cr.name = "cr-inclusion";
  cr.r = 0.7;
  SmoothMap fcr = make_map(cr, S->layout, 2);
  MapSpec ac;
  ac.name = "anti-cr";
  ac.r = 0.5;
  SmoothMap fac = make_map(ac, S->layout, 2);
  (void)ball;
  for (int trial = 0; trial < 10; ++trial) {
    Point p = random_point(*S, rng);
    GeomContext G = make_context(*S, p, kFd);
    FirstJet jc = first_jet(G, fc);
    CHECK(jc.fi.norm() == 0.0);
    CHECK(jc.fib.norm() == 0.0);
    CHECK(jc.f0.norm() == 0.0);

    FirstJet jcr = first_jet(G, fcr);
    CHECK(jcr.fib.norm() == 0.0);  // CR map: no antiholomorphic derivative
    CHECK(jcr.fi.norm() > 0.1);

    FirstJet jac = first_jet(G, fac);
    CHECK(jac.fi.norm() == 0.0);  // anti-CR
    const VectorXcd z = ambient_z(S->layout, p);
    // f_0 = -i r zbar (the Reeb rotation acts by conjugate phase)
    for (int al = 0; al < 2; ++al)
      CHECK(std::abs(jac.f0[al] - (-I * 0.5 * std::conj(z[al]))) < 1e-13);
  }
}

TEST_CASE("second covariant derivatives vanish for the CR inclusion into the ball") {
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  MapSpec cr;
  cr.name = "cr-inclusion";
  cr.r = 0.6;
  SmoothMap f = make_map(cr, S->layout, 2);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    Point p = random_point(*S, rng);
    GeomContext G = make_context(*S, p, kFd);
    SecondCov Scov = second_cov(G, *ball, f, false);
    for (int al = 0; al < 2; ++al) CHECK(Scov.ib_j[al].cwiseAbs().maxCoeff() < 1e-12);
    CHECK(tension(Scov, G).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("tension matches the independent Kohn-Laplacian stencil on S^3 (flat target)") {
  auto S = make_sphere(1);
  auto flat = make_flat(2);
  MapSpec spec;
  spec.name = "polynomial";
  spec.seed = 11;
  spec.scale = 0.5;
  spec.degree = 2;
  SmoothMap f = make_map(spec, S->layout, 2);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Point p = random_point(*S, rng);
    GeomContext G = make_context(*S, p, kFd);
    SecondCov Scov = second_cov(G, *flat, f, false);
    const VectorXcd tau = tension(Scov, G);
    for (int al = 0; al < 2; ++al) {
      const cxd oracle = -box_b_s3(f, al, p);  // tau = -box_b f on flat targets
      CHECK(std::abs(tau[al] - oracle) <= 1e-9 * (1.0 + std::abs(oracle)));
    }
  }
}

TEST_CASE("quadratic function on the Heisenberg group is CR-pluriharmonic with nonzero tension") {
  // f = |z|^2 has f_{ibar|j} = delta_{ij} = h_{j ibar} / 2
  auto H = make_heisenberg(2);
  auto flat = make_flat(1);
  Poly q(2);
  for (int a = 0; a < 2; ++a) q = q + Poly::coordinate(2, a) * Poly::coordinate_bar(2, a);
  MapSpec spec;
  spec.name = "custom";
  spec.custom = {q};
  SmoothMap f = make_map(spec, H->layout, 1);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    Point p = random_point(*H, rng);
    GeomContext G = make_context(*H, p, kFd);
    SecondCov Scov = second_cov(G, *flat, f, false);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(std::abs(Scov.ib_j[0](i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
    const VectorXcd tau = tension(Scov, G);
    CHECK(std::abs(tau[0] - 1.0) < 1e-10);  // h^{j ibar} = delta/2, trace = m/2 * 2 / ... = 1
  }
  // and P f = 0 (flat target, CR-pluriharmonic, m = 2)
  Point p = random_point(*H, rng);
  MatrixXcd P = p_operator(*H, *flat, f, p, kFd);
  CHECK(P.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("B tensor: trace free, zero for m = 1, zero for CR-pluriharmonic maps") {
  auto S2 = make_sphere(2);
  auto flat = make_flat(2);
  MapSpec spec;
  spec.name = "polynomial";
  spec.seed = 3;
  spec.scale = 0.5;
  SmoothMap f = make_map(spec, S2->layout, 2);
  std::mt19937_64 rng(51);
  Point p = random_point(*S2, rng);
  GeomContext G = make_context(*S2, p, kFd);
  SecondCov Scov = second_cov(G, *flat, f, false);
  auto B = b_tensor(Scov, G);
  for (int al = 0; al < 2; ++al) {
    cxd tr(0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) tr += G.hinv(j, i) * B[al](i, j);
    CHECK(std::abs(tr) < 1e-9);
  }

  auto S1 = make_sphere(1);
  SmoothMap f1 = make_map(spec, S1->layout, 2);
  Point p1 = random_point(*S1, rng);
  GeomContext G1 = make_context(*S1, p1, kFd);
  SecondCov S1cov = second_cov(G1, *flat, f1, false);
  auto B1 = b_tensor(S1cov, G1);
  for (int al = 0; al < 2; ++al) CHECK(B1[al].cwiseAbs().maxCoeff() < 1e-12);

  // real parts of CR functions on S^5: CR-pluriharmonic, so B of the
  // (ibar, j) pattern vanishes although tau does not
  MapSpec recr;
  recr.name = "re-cr";
  recr.r = 0.4;
  SmoothMap fre = make_map(recr, S2->layout, 2);
  SecondCov Sre = second_cov(G, *flat, fre, false);
  const VectorXcd tau = tension(Sre, G);
  CHECK(tau.cwiseAbs().maxCoeff() > 0.1);
  double worst = 0;
  for (int al = 0; al < 2; ++al)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        worst = std::max(worst,
                         std::abs(Sre.ib_j[al](i, j) - tau[al] / 2.0 * G.h(j, i)));
  CHECK(worst < 1e-10);
}

TEST_CASE("P vanishes for CR-pluriharmonic maps into flat targets on S^5") {
  auto S2 = make_sphere(2);
  auto flat = make_flat(2);
  MapSpec recr;
  recr.name = "re-cr";
  recr.r = 0.4;
  SmoothMap f = make_map(recr, S2->layout, 2);
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    Point p = random_point(*S2, rng);
    MatrixXcd P = p_operator(*S2, *flat, f, p, kFd);
    CHECK(P.cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("trace identity: h^{k jbar} D_k(B_{i jbar} f) = ((m-1)/m) P_i f + curvature trace") {
  // exercised on the torsion-free sphere and on the rescaled sphere, where
  // the torsion contributions must cancel exactly
  auto S = make_sphere(2);
  Poly q = Poly::coordinate(3, 0) * Poly::coordinate_bar(3, 1) * cxd(0.6);
  auto Sh = conformal_change(S, ConformalFactor::make(S->layout, q, "sig"));
  auto ball = make_bergman_ball(2);
  MapSpec spec;
  spec.name = "perturbed-cr";
  spec.r = 0.4;
  spec.eps = 0.4;
  SmoothMap f = make_map(spec, S->layout, 2);
  std::mt19937_64 rng(121);
  const int m = 2, n = 2;
  for (const ModelPtr& M : {ModelPtr(S), Sh}) {
    for (int trial = 0; trial < 3; ++trial) {
      Point p = random_point(*M, rng);
      GeomContext G = make_context(*M, p, kFd);
      SecondCov Sc = second_cov(G, *ball, f, false);
      const TargetPoint t = target_point(*ball, Sc.j1.f);
      const Tensor3c X = third_cov(*M, *ball, f, p, Slot::Hol, Slot::Anti, Slot::Hol, kFd);
      const MatrixXcd P = p_operator(*M, *ball, f, p, kFd);
      const Tensor4c R = ball->curvature(Sc.j1.f);
      double worst = 0;
      for (int al = 0; al < n; ++al)
        for (int i = 0; i < m; ++i) {
          cxd lhs(0);
          for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
              cxd dB = X(al, i * m + j, k);
              cxd tr(0);
              for (int l = 0; l < m; ++l)
                for (int pp = 0; pp < m; ++pp) tr += G.hinv(pp, l) * X(al, l * m + pp, k);
              dB -= tr / double(m) * G.h(i, j);
              lhs += G.hinv(j, k) * dB;
            }
          cxd rhs = (double(m - 1) / double(m)) * P(al, i);
          for (int rho = 0; rho < n; ++rho)
            for (int de = 0; de < n; ++de)
              for (int ga = 0; ga < n; ++ga)
                for (int nu = 0; nu < n; ++nu)
                  for (int j = 0; j < m; ++j)
                    for (int k = 0; k < m; ++k)
                      rhs += R(rho, de, ga, nu) * t.ginv(nu, al) * Sc.j1.fib(rho, j) *
                             (Sc.j1.fi(ga, i) * std::conj(Sc.j1.fib(de, k)) -
                              Sc.j1.fi(ga, k) * std::conj(Sc.j1.fib(de, i))) *
                             G.hinv(j, k);
          worst = std::max(worst,
                           std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs))));
        }
      CHECK(worst < 1e-5);
    }
  }
}

TEST_CASE("Reeb derivative reconstruction from the mixed second derivatives") {
  // f_0 = (i/m) (f_{ibar|j} - f_{j|ibar}) h^{j ibar}
  auto S = make_sphere(2);
  auto ball = make_bergman_ball(2);
  MapSpec spec;
  spec.name = "perturbed-cr";
  spec.r = 0.5;
  spec.eps = 0.3;
  SmoothMap f = make_map(spec, S->layout, 2);
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    Point p = random_point(*S, rng);
    GeomContext G = make_context(*S, p, kFd);
    SecondCov Scov = second_cov(G, *ball, f, false);
    for (int al = 0; al < 2; ++al) {
      cxd rec(0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          rec += (Scov.ib_j[al](i, j) - Scov.i_jb[al](j, i)) * G.hinv(i, j);
      rec *= I / 2.0;
      CHECK(std::abs(rec - Scov.j1.f0[al]) <= 1e-6 * (1.0 + std::abs(Scov.j1.f0[al])));
    }
  }
}

TEST_CASE("conjugation symmetry of the covariant derivatives (flat target)") {
  auto S = make_sphere(2);
  auto flat = make_flat(2);
  MapSpec spec;
  spec.name = "polynomial";
  spec.seed = 9;
  spec.scale = 0.4;
  SmoothMap f = make_map(spec, S->layout, 2);
  SmoothMap fb = f.conjugated();
  std::mt19937_64 rng(81);
  Point p = random_point(*S, rng);
  GeomContext G = make_context(*S, p, kFd);
  SecondCov Sf = second_cov(G, *flat, f, false);
  SecondCov Sb = second_cov(G, *flat, fb, false);
  for (int al = 0; al < 2; ++al) {
    CHECK((Sb.j1.fi - Sf.j1.fib.conjugate()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((Sb.j1.f0 - Sf.j1.f0.conjugate()).cwiseAbs().maxCoeff() < 1e-13);
    // (fbar)_{ibar|j} = conj(f_{i|jbar})
    CHECK((Sb.ib_j[al] - Sf.i_jb[al].conjugate()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("pointwise scalars: constant, CR and anti-CR maps") {
  auto S = make_sphere(1);
  auto ball = make_bergman_ball(2);
  std::mt19937_64 rng(91);
  Point p = random_point(*S, rng);

  MapSpec c;
  c.name = "constant";
  PointwiseScalars sc = pairing(*S, *ball, make_map(c, S->layout, 2), p, kFd);
  CHECK(sc.e == 0.0);
  CHECK(sc.b2 == 0.0);
  CHECK(std::abs(sc.pair_p) < 1e-14);

  MapSpec cr;
  cr.name = "cr-inclusion";
  cr.r = 0.6;
  PointwiseScalars scr = pairing(*S, *ball, make_map(cr, S->layout, 2), p, kFd);
  CHECK(scr.e < 1e-14);

  MapSpec ac;
  ac.name = "anti-cr";
  ac.r = 0.5;
  PointwiseScalars sac = pairing(*S, *ball, make_map(ac, S->layout, 2), p, kFd);
  // e = m r^2 / (1 - r^2), constant over the sphere
  CHECK(sac.e == doctest::Approx(0.25 / 0.75).epsilon(1e-10));
}

TEST_CASE("classification flags") {
  auto S = make_sphere(2);
  auto ball = make_bergman_ball(3);
  auto pts = [&] {
    std::mt19937_64 rng(101);
    std::vector<Point> v;
    for (int i = 0; i < 10; ++i) v.push_back(random_point(*S, rng));
    return v;
  }();

  MapSpec cr;
  cr.name = "cr-inclusion";
  cr.r = 0.5;
  ClassifyResult rc = classify(*S, *ball, make_map(cr, S->layout, 3), 1e-8, pts);
  CHECK(rc.ph_harmonic);
  CHECK(rc.dbar_pluriharmonic);
  CHECK(rc.cr_pluriharmonic);
  CHECK(rc.cr);
  CHECK(!rc.anti_cr);

  MapSpec c;
  c.name = "constant";
  ClassifyResult rconst = classify(*S, *ball, make_map(c, S->layout, 3), 1e-8, pts);
  CHECK(rconst.ph_harmonic);
  CHECK(rconst.cr);
  CHECK(rconst.anti_cr);

  MapSpec poly;
  poly.name = "polynomial";
  poly.seed = 2;
  poly.scale = 0.4;
  ClassifyResult rp = classify(*S, *ball, make_map(poly, S->layout, 3), 1e-6, pts);
  CHECK(!rp.ph_harmonic);
  CHECK(!rp.cr_pluriharmonic);
  CHECK(!rp.cr);
  CHECK(!rp.anti_cr);
  CHECK(rp.dbar_pluriharmonic == (rp.cr_pluriharmonic && rp.ph_harmonic));

  auto S1 = make_sphere(1);
  auto ball2 = make_bergman_ball(2);
  std::mt19937_64 rng(7);
  std::vector<Point> p1{random_point(*S1, rng)};
  CHECK_THROWS_AS(classify(*S1, *ball2, make_map(cr, S1->layout, 2), 1e-6, p1),
                  UnsupportedError);
}
