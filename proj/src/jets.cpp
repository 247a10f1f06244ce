#include "crlab/jets.hpp"

namespace crlab {

GeomContext make_context(const PseudoHermitianModel& M, const Point& p, const FdSettings& fd) {
  GeomContext G;
  G.M = &M;
  G.p = p;
  G.fd = fd;
  G.B.resize(2 * M.m + 1);
  for (int s = 0; s < 2 * M.m + 1; ++s) G.B[s] = M.basis(p, s);
  G.conn = M.connection(p, fd);
  G.h = G.conn.h;
  G.hinv = G.conn.hinv;
  return G;
}

TargetPoint target_point(const KahlerTarget& N, const VectorXcd& w) {
  N.check_domain(w);
  TargetPoint t;
  t.g = N.metric(w);
  t.ginv = t.g.inverse();
  t.gamma = N.christoffel(w);
  return t;
}

namespace {

// first ambient-directional derivative of all components along V
VectorXcd dir1(const MapPointData& d, const CVec& V) {
  const int n = int(d.f.size()), mc = int(d.fz.cols());
  VectorXcd out = VectorXcd::Zero(n);
  for (int al = 0; al < n; ++al) {
    cxd s(0);
    for (int a = 0; a < mc; ++a) s += V.dz[a] * d.fz(al, a) + V.dzb[a] * d.fzb(al, a);
    if (V.dr.size()) s += V.dr[0] * d.ft[al];
    out[al] = s;
  }
  return out;
}

// second derivative D_W (D_V f) where dV = D_W(coefficients of V)
VectorXcd dir2(const MapPointData& d, const CVec& V, const CVec& W, const CVec& dV) {
  const int n = int(d.f.size()), mc = int(d.fz.cols());
  VectorXcd out = dir1(d, dV);
  for (int al = 0; al < n; ++al) {
    cxd s(0);
    for (int a = 0; a < mc; ++a) {
      cxd dz_a(0), dzb_a(0);  // D_W f_{z_a}, D_W f_{zbar_a}
      for (int b = 0; b < mc; ++b) {
        dz_a += W.dz[b] * d.fzz[al](a, b) + W.dzb[b] * d.fzzb[al](a, b);
        dzb_a += W.dz[b] * d.fzzb[al](b, a) + W.dzb[b] * d.fzbzb[al](a, b);
      }
      if (W.dr.size()) {
        dz_a += W.dr[0] * d.fzt(al, a);
        dzb_a += W.dr[0] * d.fzbt(al, a);
      }
      s += V.dz[a] * dz_a + V.dzb[a] * dzb_a;
    }
    if (V.dr.size()) {
      cxd dt(0);
      for (int b = 0; b < mc; ++b) dt += W.dz[b] * d.fzt(al, b) + W.dzb[b] * d.fzbt(al, b);
      if (W.dr.size()) dt += W.dr[0] * d.ftt[al];
      s += V.dr[0] * dt;
    }
    out[al] += s;
  }
  return out;
}

// pullback Christoffel correction: out[al] += sum gamma[al](b,c) u[b] v[c]
void add_gamma(VectorXcd& out, const TargetPoint& t, const VectorXcd& u, const VectorXcd& v) {
  const int n = int(out.size());
  for (int al = 0; al < n; ++al) {
    cxd s(0);
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) s += t.gamma[al](b, c) * u[b] * v[c];
    out[al] += s;
  }
}

}  // namespace

FirstJet first_jet(const GeomContext& G, const SmoothMap& f) {
  const int m = G.M->m, n = f.n();
  const MapPointData d = f.at(G.p);
  FirstJet j;
  j.f = d.f;
  j.fi.resize(n, m);
  j.fib.resize(n, m);
  for (int i = 0; i < m; ++i) {
    j.fi.col(i) = dir1(d, G.B[i]);
    j.fib.col(i) = dir1(d, G.B[m + i]);
  }
  j.f0 = dir1(d, G.B[2 * m]);
  return j;
}

SecondCov second_cov(const GeomContext& G, const KahlerTarget& N, const SmoothMap& f,
                     bool with_reeb_patterns) {
  const int m = G.M->m, n = f.n();
  const PseudoHermitianModel& M = *G.M;
  const MapPointData d = f.at(G.p);

  SecondCov S;
  S.j1 = first_jet(G, f);
  const TargetPoint t = target_point(N, S.j1.f);
  S.ib_j.assign(n, MatrixXcd::Zero(m, m));
  S.i_jb.assign(n, MatrixXcd::Zero(m, m));
  S.i_j.assign(n, MatrixXcd::Zero(m, m));

  for (int i = 0; i < m; ++i)
    for (int jd = 0; jd < m; ++jd) {
      // f_{ibar|j}: inner Z_ibar, outer Z_j
      VectorXcd v = dir2(d, G.B[m + i], G.B[jd], M.dbasis(G.p, jd, m + i, G.fd));
      for (int l = 0; l < m; ++l)
        v -= std::conj(G.conn.mixed[l](jd, i)) * S.j1.fib.col(l);
      add_gamma(v, t, S.j1.fib.col(i), S.j1.fi.col(jd));
      for (int al = 0; al < n; ++al) S.ib_j[al](i, jd) = v[al];

      // f_{i|jbar}: inner Z_i, outer Z_jbar
      VectorXcd w = dir2(d, G.B[i], G.B[m + jd], M.dbasis(G.p, m + jd, i, G.fd));
      for (int l = 0; l < m; ++l) w -= G.conn.mixed[l](jd, i) * S.j1.fi.col(l);
      add_gamma(w, t, S.j1.fi.col(i), S.j1.fib.col(jd));
      for (int al = 0; al < n; ++al) S.i_jb[al](i, jd) = w[al];

      // f_{i|j}: inner Z_i, outer Z_j
      VectorXcd u = dir2(d, G.B[i], G.B[jd], M.dbasis(G.p, jd, i, G.fd));
      for (int l = 0; l < m; ++l) u -= G.conn.hol[l](jd, i) * S.j1.fi.col(l);
      add_gamma(u, t, S.j1.fi.col(i), S.j1.fi.col(jd));
      for (int al = 0; al < n; ++al) S.i_j[al](i, jd) = u[al];
    }

  if (with_reeb_patterns) {
    S.with_reeb = true;
    S.zero_i.resize(n, m);
    S.i_zero.resize(n, m);
    S.zero_ib.resize(n, m);
    S.ib_zero.resize(n, m);
    const int T = 2 * m;
    for (int i = 0; i < m; ++i) {
      // f_{0|i} = Z_i(T f) + Gamma f_0 f_i
      VectorXcd a = dir2(d, G.B[T], G.B[i], M.dbasis(G.p, i, T, G.fd));
      add_gamma(a, t, S.j1.f0, S.j1.fi.col(i));
      S.zero_i.col(i) = a;
      // f_{i|0} = T(Z_i f) - Gamma^l_{0i} f_l + Gamma f_i f_0
      VectorXcd b = dir2(d, G.B[i], G.B[T], M.dbasis(G.p, T, i, G.fd));
      for (int l = 0; l < m; ++l) b -= G.conn.reeb_rot(l, i) * S.j1.fi.col(l);
      add_gamma(b, t, S.j1.fi.col(i), S.j1.f0);
      S.i_zero.col(i) = b;
      // conjugate-slot versions
      VectorXcd c = dir2(d, G.B[T], G.B[m + i], M.dbasis(G.p, m + i, T, G.fd));
      add_gamma(c, t, S.j1.f0, S.j1.fib.col(i));
      S.zero_ib.col(i) = c;
      VectorXcd e = dir2(d, G.B[m + i], G.B[T], M.dbasis(G.p, T, m + i, G.fd));
      for (int l = 0; l < m; ++l) e -= std::conj(G.conn.reeb_rot(l, i)) * S.j1.fib.col(l);
      add_gamma(e, t, S.j1.fib.col(i), S.j1.f0);
      S.ib_zero.col(i) = e;
    }
  }
  return S;
}

namespace {

// connection coefficient for differentiating an index of species `idx` along
// frame direction k of species `dir`: returns Gamma^s_{(dir k)(idx i)}
cxd cov_coeff(const ConnectionCoeffs& C, Slot dir, int k, Slot idx, int i, int s) {
  if (dir == Slot::Hol && idx == Slot::Hol) return C.hol[s](k, i);
  if (dir == Slot::Hol && idx == Slot::Anti) return std::conj(C.mixed[s](k, i));
  if (dir == Slot::Anti && idx == Slot::Hol) return C.mixed[s](k, i);
  return std::conj(C.hol[s](k, i));
}

std::vector<MatrixXcd>& pick_pattern(SecondCov& S, Slot a, Slot b) {
  if (a == Slot::Anti && b == Slot::Hol) return S.ib_j;
  if (a == Slot::Hol && b == Slot::Anti) return S.i_jb;
  if (a == Slot::Hol && b == Slot::Hol) return S.i_j;
  throw UnsupportedError("third_cov: the (Anti, Anti) base pattern is handled by conjugation");
}

}  // namespace

// Returned tensor layout: element (alpha, i*m + j, k) = f^alpha_{a(i)|b(j)|c(k)}.
Tensor3c third_cov(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                   const Point& p, Slot a, Slot b, Slot c, const FdSettings& fd) {
  const int m = M.m, n = f.n();
  GeomContext G = make_context(M, p, fd);
  SecondCov S0 = second_cov(G, N, f, false);
  const std::vector<MatrixXcd>& base = pick_pattern(S0, a, b);
  const TargetPoint t = target_point(N, S0.j1.f);

  auto field = [&](const Point& q) {
    GeomContext Gq = make_context(M, q, fd);
    SecondCov Sq = second_cov(Gq, N, f, false);
    const std::vector<MatrixXcd>& pat = pick_pattern(Sq, a, b);
    MatrixXcd flat(n, m * m);
    for (int al = 0; al < n; ++al)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) flat(al, i * m + j) = pat[al](i, j);
    return flat;
  };

  Tensor3c out(n, m * m, m);
  for (int k = 0; k < m; ++k) {
    const CVec dir = (c == Slot::Hol) ? G.B[k] : G.B[m + k];
    MatrixXcd dflat = fd_dir(M.layout, field, p, dir, fd.step, fd.richardson);
    for (int al = 0; al < n; ++al)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          cxd v = dflat(al, i * m + j);
          for (int s = 0; s < m; ++s) {
            v -= cov_coeff(G.conn, c, k, a, i, s) * base[al](s, j);
            v -= cov_coeff(G.conn, c, k, b, j, s) * base[al](i, s);
          }
          for (int be = 0; be < n; ++be)
            for (int ga = 0; ga < n; ++ga) {
              const cxd fgc = (c == Slot::Hol) ? S0.j1.fi(ga, k) : S0.j1.fib(ga, k);
              v += t.gamma[al](be, ga) * base[be](i, j) * fgc;
            }
          out(al, i * m + j, k) = v;
        }
  }
  return out;
}

VectorXcd tension(const SecondCov& S, const GeomContext& G) {
  const int m = G.M->m, n = int(S.j1.f.size());
  VectorXcd tau = VectorXcd::Zero(n);
  for (int al = 0; al < n; ++al)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) tau[al] += G.hinv(i, j) * S.ib_j[al](i, j);
  return tau;
}

std::vector<MatrixXcd> b_tensor(const SecondCov& S, const GeomContext& G) {
  const int m = G.M->m, n = int(S.j1.f.size());
  std::vector<MatrixXcd> B(n);
  for (int al = 0; al < n; ++al) {
    cxd tr(0);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) tr += G.hinv(l, k) * S.i_jb[al](k, l);
    B[al] = S.i_jb[al] - (tr / double(m)) * G.h;
  }
  return B;
}

MatrixXcd p_operator(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                     const Point& p, const FdSettings& fd) {
  const int m = M.m, n = f.n();
  const Tensor3c t3 = third_cov(M, N, f, p, Slot::Anti, Slot::Hol, Slot::Hol, fd);
  GeomContext G = make_context(M, p, fd);
  const FirstJet j = first_jet(G, f);
  MatrixXcd P = MatrixXcd::Zero(n, m);
  for (int al = 0; al < n; ++al)
    for (int i = 0; i < m; ++i) {
      cxd v(0);
      for (int jj = 0; jj < m; ++jj)
        for (int l = 0; l < m; ++l) v += t3(al, jj * m + l, i) * G.hinv(jj, l);
      for (int jj = 0; jj < m; ++jj)
        v += double(m) * I * G.conn.torsion(i, jj) * j.fib(al, jj);
      P(al, i) = v;
    }
  return P;
}

double energy_density(const FirstJet& j, const GeomContext& G, const TargetPoint& t) {
  const int m = G.M->m, n = int(j.f.size());
  cxd e(0);
  for (int i = 0; i < m; ++i)
    for (int jj = 0; jj < m; ++jj) {
      cxd inner(0);
      for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be)
          inner += t.g(al, be) * j.fib(al, i) * std::conj(j.fib(be, jj));
      e += G.hinv(i, jj) * inner;
    }
  return e.real();
}

double b_norm2(const std::vector<MatrixXcd>& B, const GeomContext& G, const TargetPoint& t) {
  const int m = G.M->m, n = int(B.size());
  cxd v(0);
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < n; ++be)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l)
              v += t.g(al, be) * B[al](i, j) * std::conj(B[be](k, l)) * G.hinv(k, i) *
                   G.hinv(j, l);
  return v.real();
}

cxd p_pairing(const MatrixXcd& P, const FirstJet& j, const GeomContext& G, const TargetPoint& t) {
  const int m = G.M->m, n = int(j.f.size());
  cxd v(0);
  for (int al = 0; al < n; ++al)
    for (int be = 0; be < n; ++be)
      for (int i = 0; i < m; ++i)
        for (int jj = 0; jj < m; ++jj)
          v += t.g(al, be) * P(al, i) * std::conj(j.fi(be, jj)) * G.hinv(jj, i);
  return v;
}

PointwiseScalars pairing(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                         const Point& p, const FdSettings& fd) {
  GeomContext G = make_context(M, p, fd);
  SecondCov S = second_cov(G, N, f, false);
  const TargetPoint t = target_point(N, S.j1.f);
  PointwiseScalars out;
  out.e = energy_density(S.j1, G, t);
  out.b2 = b_norm2(b_tensor(S, G), G, t);
  out.pair_p = p_pairing(p_operator(M, N, f, p, fd), S.j1, G, t);
  return out;
}

ClassifyResult classify(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                        double tol, const std::vector<Point>& sample_points, const FdSettings& fd) {
  ClassifyResult r;
  const int m = M.m, n = f.n();
  if (m < 2)
    throw UnsupportedError("CR-pluriharmonicity classification requires CR dimension >= 2");
  for (const Point& p : sample_points) {
    GeomContext G = make_context(M, p, fd);
    SecondCov S = second_cov(G, N, f, false);
    const VectorXcd tau = tension(S, G);
    r.res_tau = std::max(r.res_tau, tau.cwiseAbs().maxCoeff());
    for (int al = 0; al < n; ++al)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          r.res_dbph = std::max(r.res_dbph, std::abs(S.ib_j[al](i, j)));
          r.res_crph =
              std::max(r.res_crph, std::abs(S.ib_j[al](i, j) - tau[al] / double(m) * G.h(j, i)));
        }
    r.res_cr = std::max(r.res_cr, S.j1.fib.size() ? S.j1.fib.cwiseAbs().maxCoeff() : 0.0);
    r.res_anti = std::max(r.res_anti, S.j1.fi.size() ? S.j1.fi.cwiseAbs().maxCoeff() : 0.0);
  }
  r.ph_harmonic = r.res_tau < tol;
  r.cr_pluriharmonic = r.res_crph < tol;
  r.cr = r.res_cr < tol;
  r.anti_cr = r.res_anti < tol;
  r.dbar_pluriharmonic = r.cr_pluriharmonic && r.ph_harmonic;
  return r;
}

}  // namespace crlab
