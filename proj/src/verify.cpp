#include "crlab/verify.hpp"

#include <algorithm>
#include <numeric>

#include "crlab/parallel.hpp"

namespace crlab {

namespace {

double tensor_residual(const std::vector<cxd>& lhs, const std::vector<cxd>& rhs) {
  double dmax = 0, smax = 0;
  for (size_t i = 0; i < lhs.size(); ++i) {
    dmax = std::max(dmax, std::abs(lhs[i] - rhs[i]));
    smax = std::max({smax, std::abs(lhs[i]), std::abs(rhs[i])});
  }
  return dmax / (1.0 + smax);
}

// R^a_{b dbar c} = R_{b dbar c nubar} g^{nubar a}
Tensor4c raise_first(const Tensor4c& R, const MatrixXcd& ginv) {
  const int n = R.d0;
  Tensor4c out(n, n, n, n);  // (a, b, d, c)
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d)
        for (int c = 0; c < n; ++c) {
          cxd v(0);
          for (int nu = 0; nu < n; ++nu) v += R(b, d, c, nu) * ginv(nu, a);
          out(a, b, d, c) = v;
        }
  return out;
}

struct PointEval {
  GeomContext G;
  SecondCov S;
  TargetPoint t;
  Tensor4c RN;   // raised target curvature (a,b,dbar,c)
  Tensor4c RW;   // webster curvature (i,l,j,k)
  bool has_rw = false;
};

PointEval eval_point(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                     const Point& p, const FdSettings& fd, bool need_webster) {
  PointEval e{make_context(M, p, fd), {}, {}, {}, {}, false};
  e.S = second_cov(e.G, N, f, true);
  e.t = target_point(N, e.S.j1.f);
  e.RN = raise_first(N.curvature(e.S.j1.f), e.t.ginv);
  if (need_webster) {
    e.RW = webster_curvature(M, p, fd);
    e.has_rw = true;
  }
  return e;
}

double rel_second_mixed(const PointEval& e) {
  const int m = e.G.M->m, n = int(e.S.j1.f.size());
  std::vector<cxd> L, R;
  for (int al = 0; al < n; ++al)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        L.push_back(e.S.i_jb[al](i, j) - e.S.ib_j[al](j, i));
        R.push_back(I * e.S.j1.f0[al] * e.G.h(i, j));
      }
  return tensor_residual(L, R);
}

double rel_second_symmetric(const PointEval& e) {
  const int m = e.G.M->m, n = int(e.S.j1.f.size());
  std::vector<cxd> L, R;
  for (int al = 0; al < n; ++al)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        L.push_back(e.S.i_j[al](i, j));
        R.push_back(e.S.i_j[al](j, i));
      }
  return tensor_residual(L, R);
}

double rel_reeb(const PointEval& e) {
  const int m = e.G.M->m, n = int(e.S.j1.f.size());
  std::vector<cxd> L, R;
  for (int al = 0; al < n; ++al)
    for (int i = 0; i < m; ++i) {
      L.push_back(e.S.zero_ib(al, i) - e.S.ib_zero(al, i));
      cxd r(0);
      for (int k = 0; k < m; ++k) r += std::conj(e.G.conn.torsion(i, k)) * e.S.j1.fi(al, k);
      R.push_back(r);
    }
  return tensor_residual(L, R);
}

double rel_third_anti_pair(const PseudoHermitianModel& M, const KahlerTarget& N,
                           const SmoothMap& f, const Point& p, const FdSettings& fd,
                           const PointEval& e) {
  const int m = M.m, n = f.n();
  const Tensor3c X = third_cov(M, N, f, p, Slot::Hol, Slot::Anti, Slot::Anti, fd);
  std::vector<cxd> L, R;
  const auto& j1 = e.S.j1;
  for (int al = 0; al < n; ++al)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          L.push_back(X(al, i * m + j, k) - X(al, i * m + k, j));
          cxd r(0);
          for (int l = 0; l < m; ++l)
            r += I *
                 (e.G.h(i, j) * std::conj(e.G.conn.torsion(k, l)) -
                  e.G.h(i, k) * std::conj(e.G.conn.torsion(j, l))) *
                 j1.fi(al, l);
          for (int be = 0; be < n; ++be)
            for (int de = 0; de < n; ++de)
              for (int ga = 0; ga < n; ++ga)
                r += e.RN(al, be, de, ga) * j1.fi(be, i) *
                     (j1.fib(ga, j) * std::conj(j1.fi(de, k)) -
                      j1.fib(ga, k) * std::conj(j1.fi(de, j)));
          R.push_back(r);
        }
  return tensor_residual(L, R);
}

double rel_third_hol_pair(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                          const Point& p, const FdSettings& fd, const PointEval& e) {
  const int m = M.m, n = f.n();
  const Tensor3c X = third_cov(M, N, f, p, Slot::Anti, Slot::Hol, Slot::Hol, fd);
  std::vector<cxd> L, R;
  const auto& j1 = e.S.j1;
  for (int al = 0; al < n; ++al)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
          L.push_back(X(al, j * m + i, k) - X(al, j * m + k, i));
          cxd r(0);
          for (int l = 0; l < m; ++l)
            r += I *
                 (e.G.h(k, j) * e.G.conn.torsion(i, l) - e.G.h(i, j) * e.G.conn.torsion(k, l)) *
                 j1.fib(al, l);
          for (int be = 0; be < n; ++be)
            for (int de = 0; de < n; ++de)
              for (int ga = 0; ga < n; ++ga)
                r += e.RN(al, be, de, ga) * j1.fib(be, j) *
                     (j1.fi(ga, i) * std::conj(j1.fib(de, k)) -
                      j1.fi(ga, k) * std::conj(j1.fib(de, i)));
          R.push_back(r);
        }
  return tensor_residual(L, R);
}

double rel_third_webster(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                         const Point& p, const FdSettings& fd, const PointEval& e) {
  const int m = M.m, n = f.n();
  const Tensor3c X1 = third_cov(M, N, f, p, Slot::Hol, Slot::Hol, Slot::Anti, fd);
  const Tensor3c X2 = third_cov(M, N, f, p, Slot::Hol, Slot::Anti, Slot::Hol, fd);
  std::vector<cxd> L, R;
  const auto& j1 = e.S.j1;
  for (int al = 0; al < n; ++al)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          L.push_back(X1(al, i * m + j, k) - X2(al, i * m + k, j));
          cxd r = I * e.G.h(j, k) * e.S.i_zero(al, i);
          for (int l = 0; l < m; ++l) r += e.RW(i, l, j, k) * j1.fi(al, l);
          for (int be = 0; be < n; ++be)
            for (int de = 0; de < n; ++de)
              for (int ga = 0; ga < n; ++ga)
                r += e.RN(al, be, de, ga) * j1.fi(be, i) *
                     (j1.fi(ga, j) * std::conj(j1.fi(de, k)) -
                      j1.fib(ga, k) * std::conj(j1.fib(de, j)));
          R.push_back(r);
        }
  return tensor_residual(L, R);
}

struct CommutatorResiduals {
  double r[6];
};

CommutatorResiduals all_commutator_residuals(const PseudoHermitianModel& M, const KahlerTarget& N,
                                             const SmoothMap& f, const Point& p,
                                             const FdSettings& fd) {
  PointEval e = eval_point(M, N, f, p, fd, true);
  CommutatorResiduals c{};
  c.r[0] = rel_second_mixed(e);
  c.r[1] = rel_second_symmetric(e);
  c.r[2] = rel_reeb(e);
  c.r[3] = rel_third_anti_pair(M, N, f, p, fd, e);
  c.r[4] = rel_third_hol_pair(M, N, f, p, fd, e);
  c.r[5] = rel_third_webster(M, N, f, p, fd, e);
  return c;
}

const char* kCommutatorNames[6] = {
    "second-order-mixed-commutation", "second-order-symmetric",
    "reeb-commutation",               "third-order-antiholomorphic-pair",
    "third-order-holomorphic-pair",   "third-order-mixed-webster",
};

}  // namespace

VerificationReport make_report(std::string identity, const std::vector<Point>& pts,
                               const std::vector<double>& residuals, double tol) {
  VerificationReport r;
  r.identity = std::move(identity);
  r.point_count = int(residuals.size());
  r.tol = tol;
  if (residuals.empty()) {
    r.pass = true;
    return r;
  }
  std::vector<double> sorted = residuals;
  std::sort(sorted.begin(), sorted.end());
  r.max_residual = sorted.back();
  r.mean_residual = std::accumulate(sorted.begin(), sorted.end(), 0.0) / double(sorted.size());
  r.p50 = sorted[sorted.size() / 2];
  r.p90 = sorted[size_t(0.9 * double(sorted.size() - 1))];
  const size_t worst = size_t(std::max_element(residuals.begin(), residuals.end()) -
                              residuals.begin());
  r.worst_point = pts[worst];
  r.pass = r.max_residual < tol;
  return r;
}

std::vector<VerificationReport> check_commutators(const PseudoHermitianModel& M,
                                                  const KahlerTarget& N, const SmoothMap& f,
                                                  const std::vector<Point>& pts, double tol,
                                                  const FdSettings& fd, bool parallel,
                                                  bool step_sanity) {
  auto run = [&](const FdSettings& settings) {
    return parallel_map<CommutatorResiduals>(
        pts.size(),
        [&](size_t i) { return all_commutator_residuals(M, N, f, pts[i], settings); }, parallel);
  };
  std::vector<CommutatorResiduals> main = run(fd);

  std::vector<VerificationReport> out;
  for (int k = 0; k < 6; ++k) {
    std::vector<double> res(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) res[i] = main[i].r[k];
    out.push_back(make_report(kCommutatorNames[k], pts, res, tol));
  }
  if (step_sanity) {
    FdSettings raw = fd, half = fd;
    raw.richardson = half.richardson = false;
    half.step = fd.step / 2;
    half.bracket_step = fd.bracket_step / 2;
    std::vector<CommutatorResiduals> a = run(raw), b = run(half);
    for (int k = 0; k < 6; ++k) {
      double ra = 0, rb = 0;
      for (size_t i = 0; i < pts.size(); ++i) {
        ra = std::max(ra, a[i].r[k]);
        rb = std::max(rb, b[i].r[k]);
      }
      out[size_t(k)].raw_step = ra;
      out[size_t(k)].raw_half_step = rb;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// pointwise fields of the integrated identities

double curvature_term(const Tensor4c& R, const FirstJet& j, const MatrixXcd& hinv) {
  const int n = int(j.f.size()), m = int(j.fi.cols());
  cxd v(0);
  for (int rho = 0; rho < n; ++rho)
    for (int de = 0; de < n; ++de)
      for (int ga = 0; ga < n; ++ga)
        for (int be = 0; be < n; ++be)
          for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k)
              for (int jj = 0; jj < m; ++jj)
                for (int l = 0; l < m; ++l)
                  v += R(rho, de, ga, be) * std::conj(j.fi(be, l)) * j.fib(rho, jj) *
                       (j.fi(ga, i) * std::conj(j.fib(de, k)) -
                        j.fi(ga, k) * std::conj(j.fib(de, i))) *
                       hinv(l, i) * hinv(jj, k);
  return v.real();
}

IdentityFields identity_fields(const PseudoHermitianModel& M, const KahlerTarget& N,
                               const SmoothMap& f, const Point& p, const FdSettings& fd,
                               bool with_divergence) {
  const int m = M.m, n = f.n();
  GeomContext G = make_context(M, p, fd);
  SecondCov S = second_cov(G, N, f, false);
  const TargetPoint t = target_point(N, S.j1.f);
  IdentityFields out{};
  out.e = energy_density(S.j1, G, t);
  const std::vector<MatrixXcd> B = b_tensor(S, G);
  out.b2 = b_norm2(B, G, t);
  const MatrixXcd P = p_operator(M, N, f, p, fd);
  out.pair_p = p_pairing(P, S.j1, G, t);
  out.curv = curvature_term(N.curvature(S.j1.f), S.j1, G.hinv);

  const VectorXcd tau = tension(S, G);
  VectorXcd tmix = VectorXcd::Zero(n);
  for (int be = 0; be < n; ++be)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) tmix[be] += S.i_jb[be](i, j) * G.hinv(j, i);
  cxd tp(0);
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < n; ++be) tp += t.g(al, be) * tau[al] * std::conj(tmix[be]);
  out.tau_pair = tp;

  cxd ap(0);
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < n; ++be)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          for (int l = 0; l < m; ++l)
            ap += t.g(al, be) * G.conn.torsion(i, j) * S.j1.fib(al, j) *
                  std::conj(S.j1.fi(be, l)) * G.hinv(l, i);
  out.torsion_pair = ap;

  if (with_divergence) {
    auto efield = [&](const Point& q) {
      GeomContext Gq = make_context(M, q, fd);
      SecondCov Sq = second_cov(Gq, N, f, false);
      const TargetPoint tq = target_point(N, Sq.j1.f);
      const std::vector<MatrixXcd> Bq = b_tensor(Sq, Gq);
      VectorXcd E = VectorXcd::Zero(m);
      for (int j = 0; j < m; ++j)
        for (int al = 0; al < n; ++al)
          for (int be = 0; be < n; ++be)
            for (int i = 0; i < m; ++i)
              for (int l = 0; l < m; ++l)
                E[j] += tq.g(al, be) * std::conj(Sq.j1.fi(be, l)) * Bq[al](i, j) * Gq.hinv(l, i);
      return E;
    };
    const VectorXcd E0 = efield(p);
    cxd div(0);
    for (int k = 0; k < m; ++k) {
      VectorXcd dE = fd_dir(M.layout, efield, p, G.B[k], fd.step, fd.richardson);
      for (int j = 0; j < m; ++j) {
        cxd cov = dE[j];
        for (int s = 0; s < m; ++s) cov -= std::conj(G.conn.mixed[s](k, j)) * E0[s];
        div += G.hinv(j, k) * cov;
      }
    }
    out.div_e = div;
  }
  return out;
}

std::vector<VerificationReport> check_divergences(const PseudoHermitianModel& M,
                                                  const KahlerTarget& N, const SmoothMap& f,
                                                  const std::vector<Point>& pts, double tol,
                                                  const FdSettings& fd, bool parallel) {
  const int m = M.m, n = f.n();
  struct Two {
    double re, rf;
  };
  std::vector<Two> res = parallel_map<Two>(
      pts.size(),
      [&](size_t idx) {
        const Point& p = pts[idx];
        IdentityFields F = identity_fields(M, N, f, p, fd, true);
        // first identity: div E = |B|^2 + ((m-1)/m) <Pf, dbar fbar> + curvature
        const cxd rhs_e = cxd(F.b2 + F.curv, 0) + (double(m - 1) / double(m)) * F.pair_p;
        const double re =
            std::abs(F.div_e - rhs_e) / (1.0 + std::max(std::abs(F.div_e), std::abs(rhs_e)));

        // second identity: div F = <Pf, dbar fbar> - i m (torsion pair) + tau pair
        GeomContext G = make_context(M, p, fd);
        auto ffield = [&](const Point& q) {
          GeomContext Gq = make_context(M, q, fd);
          SecondCov Sq = second_cov(Gq, N, f, false);
          const TargetPoint tq = target_point(N, Sq.j1.f);
          const VectorXcd tau = tension(Sq, Gq);
          VectorXcd out = VectorXcd::Zero(m);
          for (int l = 0; l < m; ++l)
            for (int al = 0; al < n; ++al)
              for (int be = 0; be < n; ++be)
                out[l] += tq.g(al, be) * tau[al] * std::conj(Sq.j1.fi(be, l));
          return out;
        };
        const VectorXcd F0 = ffield(p);
        cxd div(0);
        for (int i = 0; i < m; ++i) {
          VectorXcd dF = fd_dir(M.layout, ffield, p, G.B[i], fd.step, fd.richardson);
          for (int l = 0; l < m; ++l) {
            cxd cov = dF[l];
            for (int s = 0; s < m; ++s) cov -= std::conj(G.conn.mixed[s](i, l)) * F0[s];
            div += G.hinv(l, i) * cov;
          }
        }
        const cxd rhs_f = F.pair_p - I * double(m) * F.torsion_pair + F.tau_pair;
        const double rf = std::abs(div - rhs_f) / (1.0 + std::max(std::abs(div), std::abs(rhs_f)));
        return Two{re, rf};
      },
      parallel);

  std::vector<double> re(pts.size()), rf(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    re[i] = res[i].re;
    rf[i] = res[i].rf;
  }
  return {make_report("divergence-trace-free-tensor", pts, re, tol),
          make_report("divergence-tension-tensor", pts, rf, tol)};
}

VerificationReport check_curvature_rearrangement(const KahlerTarget& N, const VectorXcd& z, int m,
                                                 int trials, double tol, uint64_t seed) {
  const int n = N.n;
  const Tensor4c R = N.curvature(z);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> res;
  std::vector<Point> dummy(static_cast<size_t>(trials));
  bool nonneg_ok = true;
  for (int t = 0; t < trials; ++t) {
    FirstJet j;
    j.f = VectorXcd::Zero(n);
    j.fi.resize(n, m);
    j.fib.resize(n, m);
    for (int al = 0; al < n; ++al)
      for (int i = 0; i < m; ++i) {
        j.fi(al, i) = cxd(g(rng), g(rng));
        j.fib(al, i) = cxd(g(rng), g(rng));
      }
    MatrixXcd A(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) A(a, b) = cxd(g(rng), g(rng));
    MatrixXcd hinv = A * A.adjoint() + 0.5 * MatrixXcd::Identity(m, m);

    const double lhs = curvature_term(R, j, hinv);
    cxd rhs(0);
    for (int ga = 0; ga < n; ++ga)
      for (int de = 0; de < n; ++de)
        for (int rho = 0; rho < n; ++rho)
          for (int be = 0; be < n; ++be)
            for (int i = 0; i < m; ++i)
              for (int k = 0; k < m; ++k)
                for (int jj = 0; jj < m; ++jj)
                  for (int l = 0; l < m; ++l)
                    rhs += 0.5 * R(ga, de, rho, be) *
                           (j.fi(ga, i) * std::conj(j.fib(de, k)) -
                            j.fi(ga, k) * std::conj(j.fib(de, i))) *
                           std::conj(j.fi(be, l) * std::conj(j.fib(rho, jj)) -
                                     j.fi(be, jj) * std::conj(j.fib(rho, l))) *
                           hinv(jj, k) * hinv(l, i);
    const double scale = 1.0 + std::max(std::abs(lhs), std::abs(rhs));
    res.push_back(std::abs(cxd(lhs, 0) - rhs) / scale);
    if (rhs.real() < -tol * scale) nonneg_ok = false;
  }
  VerificationReport r = make_report("curvature-rearrangement", dummy, res, tol);
  if (!nonneg_ok) {
    r.pass = false;
    r.note = "pair-sum form took a negative value on a semi-negative target";
  }
  return r;
}

std::vector<VerificationReport> check_conformal_invariance(ModelPtr M,
                                                           const ConformalFactor& sigma,
                                                           const KahlerTarget& N,
                                                           const SmoothMap& f,
                                                           const std::vector<Point>& pts,
                                                           double tol, const FdSettings& fd) {
  const int m = M->m, n = f.n();
  ClassifyResult base_class = classify(*M, N, f, tol, pts, fd);
  if (!base_class.cr_pluriharmonic) {
    VerificationReport r;
    r.identity = "conformal-invariance";
    r.skipped = true;
    r.note = "precondition failed: map is not CR-pluriharmonic for the base structure";
    r.point_count = int(pts.size());
    return {r};
  }

  ModelPtr Mh = conformal_change(M, sigma);
  auto flat = make_flat(n);
  const SmoothMap fbar = f.conjugated();

  std::vector<double> law_res(pts.size());
  for (size_t q = 0; q < pts.size(); ++q) {
    const Point& p = pts[q];
    GeomContext G = make_context(*M, p, fd);
    GeomContext Gh = make_context(*Mh, p, fd);
    // scalar Tanaka-Webster second derivatives of conj(f^a): target = flat
    SecondCov Sb = second_cov(G, *flat, fbar, false);
    SecondCov Sh = second_cov(Gh, *flat, fbar, false);
    const double e2s = std::exp(-2.0 * sigma.eval(M->layout, p));
    // sigma^l = h^{l jbar} sigma_jbar
    VectorXcd sjb(m), sl(m);
    for (int j = 0; j < m; ++j) sjb[j] = sigma.deriv(M->layout, p, G.B[m + j]);
    for (int l = 0; l < m; ++l) {
      cxd v(0);
      for (int j = 0; j < m; ++j) v += G.hinv(j, l) * sjb[j];
      sl[l] = v;
    }
    std::vector<cxd> L, R;
    for (int al = 0; al < n; ++al)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          L.push_back(Sh.i_jb[al](i, j));
          cxd corr(0);
          for (int l = 0; l < m; ++l) corr += 2.0 * sl[l] * Sb.j1.fi(al, l) * G.h(i, j);
          R.push_back(e2s * (Sb.i_jb[al](i, j) + corr));
        }
    law_res[q] = tensor_residual(L, R);
  }
  VerificationReport law = make_report("conformal-second-derivative-law", pts, law_res, tol);

  ClassifyResult hat_class = classify(*Mh, N, f, tol, pts, fd);
  VerificationReport persist;
  persist.identity = "conformal-pluriharmonic-persistence";
  persist.point_count = int(pts.size());
  persist.tol = tol;
  persist.max_residual = hat_class.res_crph;
  persist.mean_residual = hat_class.res_crph;
  persist.pass = hat_class.cr_pluriharmonic;
  return {law, persist};
}

// ---------------------------------------------------------------------------
// fault-injection fixtures

namespace {

class DecoratedModel : public PseudoHermitianModel {
 public:
  explicit DecoratedModel(ModelPtr base) : base_(std::move(base)) {
    m = base_->m;
    is_closed = base_->is_closed;
    layout = base_->layout;
  }
  std::string name() const override { return base_->name() + "-decorated"; }
  int n_charts() const override { return base_->n_charts(); }
  bool point_ok(const Point& p, double tol) const override { return base_->point_ok(p, tol); }
  int preferred_chart(const Point& p) const override { return base_->preferred_chart(p); }
  void check_chart(const Point& p) const override { base_->check_chart(p); }
  CVec frame_Z(const Point& p, int i) const override { return base_->frame_Z(p, i); }
  CVec reeb(const Point& p) const override { return base_->reeb(p); }
  cxd theta_eval(const Point& p, const CVec& v) const override { return base_->theta_eval(p, v); }
  cxd dtheta_eval(const Point& p, const CVec& u, const CVec& v) const override {
    return base_->dtheta_eval(p, u, v);
  }
  MatrixXcd levi(const Point& p) const override { return base_->levi(p); }
  CVec dframe_Z(const Point& p, int d, int i, const FdSettings& fd) const override {
    return base_->dframe_Z(p, d, i, fd);
  }
  CVec dreeb(const Point& p, int d, const FdSettings& fd) const override {
    return base_->dreeb(p, d, fd);
  }
  bool closed_form_connection() const override { return base_->closed_form_connection(); }
  ConnectionCoeffs connection(const Point& p, const FdSettings& fd) const override {
    return base_->connection(p, fd);
  }

 protected:
  ModelPtr base_;
};

class CorruptedConnectionModel final : public DecoratedModel {
 public:
  CorruptedConnectionModel(ModelPtr base, double bump) : DecoratedModel(std::move(base)), bump_(bump) {}
  std::string name() const override { return base_->name() + "-corrupted-gamma"; }
  ConnectionCoeffs connection(const Point& p, const FdSettings& fd) const override {
    ConnectionCoeffs C = base_->connection(p, fd);
    C.mixed[0](0, 0) += bump_;
    return C;
  }

 private:
  double bump_;
};

class CorruptedLeviModel final : public DecoratedModel {
 public:
  CorruptedLeviModel(ModelPtr base, double bump) : DecoratedModel(std::move(base)), bump_(bump) {}
  std::string name() const override { return base_->name() + "-corrupted-levi"; }
  MatrixXcd levi(const Point& p) const override {
    MatrixXcd h = base_->levi(p);
    h(0, 0) += bump_;
    return h;
  }
  ConnectionCoeffs connection(const Point& p, const FdSettings& fd) const override {
    ConnectionCoeffs C = base_->connection(p, fd);
    C.h = levi(p);
    C.hinv = C.h.inverse();
    return C;
  }

 private:
  double bump_;
};

}  // namespace

ModelPtr with_corrupted_connection(ModelPtr base, double bump) {
  return std::make_shared<CorruptedConnectionModel>(std::move(base), bump);
}
ModelPtr with_corrupted_levi(ModelPtr base, double bump) {
  return std::make_shared<CorruptedLeviModel>(std::move(base), bump);
}

std::vector<Point> sample_points(const PseudoHermitianModel& M, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  pts.reserve(size_t(count));
  for (int i = 0; i < count; ++i) pts.push_back(random_point(M, rng));
  return pts;
}

}  // namespace crlab
