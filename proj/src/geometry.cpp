#include "crlab/geometry.hpp"

#include <Eigen/SVD>

namespace crlab {

namespace {

int conj_slot(int m, int slot) {
  if (slot < m) return slot + m;
  if (slot < 2 * m) return slot - m;
  return slot;  // Reeb field is real
}

}  // namespace

// ---------------------------------------------------------------------------
// base-class helpers

CVec PseudoHermitianModel::basis(const Point& p, int slot) const {
  if (slot < m) return frame_Z(p, slot);
  if (slot < 2 * m) return frame_Z(p, slot - m).conj();
  return reeb(p);
}

CVec PseudoHermitianModel::dframe_Z(const Point& p, int dir_slot, int i,
                                    const FdSettings& fd) const {
  const CVec dir = basis(p, dir_slot);
  auto field = [&](const Point& q) { return frame_Z(q, i); };
  return fd_dir(layout, field, p, dir, fd.bracket_step, fd.richardson);
}

CVec PseudoHermitianModel::dreeb(const Point& p, int dir_slot, const FdSettings& fd) const {
  const CVec dir = basis(p, dir_slot);
  auto field = [&](const Point& q) { return reeb(q); };
  return fd_dir(layout, field, p, dir, fd.bracket_step, fd.richardson);
}

CVec PseudoHermitianModel::dbasis(const Point& p, int dir_slot, int slot,
                                  const FdSettings& fd) const {
  if (slot < m) return dframe_Z(p, dir_slot, slot, fd);
  if (slot < 2 * m) {
    // D_V conj(F) = conj(D_{conj V} F)
    return dframe_Z(p, conj_slot(m, dir_slot), slot - m, fd).conj();
  }
  return dreeb(p, dir_slot, fd);
}

ConnectionCoeffs PseudoHermitianModel::connection(const Point& p, const FdSettings& fd) const {
  return extract_connection(*this, p, fd);
}

// ---------------------------------------------------------------------------
// frame decomposition and brackets

VectorXcd decompose_in_frame(const PseudoHermitianModel& M, const Point& p, const CVec& w,
                             double* residual) {
  const int m = M.m;
  const int rows = 2 * M.layout.mc + M.layout.kr;
  MatrixXcd B(rows, 2 * m + 1);
  auto put = [&](int col, const CVec& v) {
    B.block(0, col, M.layout.mc, 1) = v.dz;
    B.block(M.layout.mc, col, M.layout.mc, 1) = v.dzb;
    if (M.layout.kr) B.block(2 * M.layout.mc, col, M.layout.kr, 1) = v.dr;
  };
  for (int s = 0; s < 2 * m + 1; ++s) put(s, M.basis(p, s));
  VectorXcd rhs(rows);
  rhs.segment(0, M.layout.mc) = w.dz;
  rhs.segment(M.layout.mc, M.layout.mc) = w.dzb;
  if (M.layout.kr) rhs.segment(2 * M.layout.mc, M.layout.kr) = w.dr;

  Eigen::JacobiSVD<MatrixXcd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0 || sv(0) / sv(sv.size() - 1) > 1e8)
    throw DegenerateFrameError("frame matrix condition number exceeds 1e8 at a sample point");
  VectorXcd c = svd.solve(rhs);
  if (residual) *residual = (B * c - rhs).norm();
  return c;
}

CVec frame_bracket(const PseudoHermitianModel& M, const Point& p, int slot_a, int slot_b,
                   const FdSettings& fd) {
  return M.dbasis(p, slot_a, slot_b, fd) - M.dbasis(p, slot_b, slot_a, fd);
}

ConnectionCoeffs extract_connection(const PseudoHermitianModel& M, const Point& p,
                                    const FdSettings& fd, double* bracket_residual) {
  const int m = M.m;
  ConnectionCoeffs C;
  C.h = M.levi(p);
  C.hinv = C.h.inverse();
  C.mixed.assign(m, MatrixXcd::Zero(m, m));
  C.hol.assign(m, MatrixXcd::Zero(m, m));
  C.reeb_rot = MatrixXcd::Zero(m, m);
  C.torsion = MatrixXcd::Zero(m, m);

  double worst = 0.0;
  auto track = [&](double r) { worst = std::max(worst, r); };

  // [Z_jbar, Z_i] = i h_{i jbar} T + Gamma^l_{jbar i} Z_l - Gamma^{lbar}_{i jbar} Z_lbar
  std::vector<MatrixXcd> zbar_coeff(m, MatrixXcd::Zero(m, m));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      double lsq = 0;
      CVec br = frame_bracket(M, p, m + j, i, fd);
      VectorXcd c = decompose_in_frame(M, p, br, &lsq);
      track(lsq);
      for (int l = 0; l < m; ++l) {
        C.mixed[l](j, i) = c[l];
        zbar_coeff[l](j, i) = c[m + l];
      }
      track(std::abs(c[2 * m] - I * C.h(i, j)));
    }

  // [Z_j, T] = -Gamma^k_{0 j} Z_k + A_j^{kbar} Z_kbar
  for (int j = 0; j < m; ++j) {
    double lsq = 0;
    CVec br = frame_bracket(M, p, j, 2 * m, fd);
    VectorXcd c = decompose_in_frame(M, p, br, &lsq);
    track(lsq);
    for (int k = 0; k < m; ++k) {
      C.reeb_rot(k, j) = -c[k];
      C.torsion(j, k) = c[m + k];
    }
    track(std::abs(c[2 * m]));
  }

  // Gamma^l_{k i} from metric compatibility
  //   Z_k h_{i jbar} = Gamma^l_{k i} h_{l jbar} + conj(Gamma^l_{kbar j}) h_{i lbar}.
  for (int k = 0; k < m; ++k) {
    const CVec Zk = M.basis(p, k);
    auto hfield = [&](const Point& q) { return M.levi(q); };
    MatrixXcd dh = fd_dir(M.layout, hfield, p, Zk, fd.bracket_step, fd.richardson);
    MatrixXcd R(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        cxd corr(0);
        for (int l = 0; l < m; ++l) corr += std::conj(C.mixed[l](k, j)) * C.h(i, l);
        R(i, j) = dh(i, j) - corr;
      }
    MatrixXcd X = R * C.hinv;  // X(i, l) = Gamma^l_{k i}
    for (int l = 0; l < m; ++l)
      for (int i = 0; i < m; ++i) C.hol[l](k, i) = X(i, l);
  }

  // consistency of the remaining bracket components
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < m; ++l)
        track(std::abs(zbar_coeff[l](j, i) + std::conj(C.mixed[l](i, j))));
  for (int j = 0; j < m; ++j)
    for (int i = j + 1; i < m; ++i) {
      double lsq = 0;
      CVec br = frame_bracket(M, p, j, i, fd);
      VectorXcd c = decompose_in_frame(M, p, br, &lsq);
      track(lsq);
      for (int k = 0; k < m; ++k) {
        track(std::abs(c[k] - (C.hol[k](j, i) - C.hol[k](i, j))));
        track(std::abs(c[m + k]));
      }
      track(std::abs(c[2 * m]));
    }

  if (bracket_residual) *bracket_residual = worst;
  return C;
}

// ---------------------------------------------------------------------------
// Webster curvature

Tensor4c webster_curvature(const PseudoHermitianModel& M, const Point& p, const FdSettings& fd) {
  const int m = M.m;
  const ConnectionCoeffs C = M.connection(p, fd);
  const double step = M.closed_form_connection() ? fd.step : fd.bracket_step;

  // frame derivatives of the connection coefficient fields
  std::vector<std::vector<MatrixXcd>> d_mixed(m), d_hol(m);  // [dir][l](a,b)
  for (int dir = 0; dir < m; ++dir) {
    auto fmix = [&](const Point& q) {
      ConnectionCoeffs cq = M.connection(q, fd);
      MatrixXcd flat(m, m * m);
      for (int l = 0; l < m; ++l) flat.block(0, l * m, m, m) = cq.mixed[l];
      return flat;
    };
    auto fhol = [&](const Point& q) {
      ConnectionCoeffs cq = M.connection(q, fd);
      MatrixXcd flat(m, m * m);
      for (int l = 0; l < m; ++l) flat.block(0, l * m, m, m) = cq.hol[l];
      return flat;
    };
    // d_mixed[dir] = Z_dir(mixed), d_hol[dir] = Z_dirbar(hol)
    MatrixXcd dm = fd_dir(M.layout, fmix, p, M.basis(p, dir), step, fd.richardson);
    MatrixXcd dh = fd_dir(M.layout, fhol, p, M.basis(p, m + dir), step, fd.richardson);
    d_mixed[dir].assign(m, MatrixXcd::Zero(m, m));
    d_hol[dir].assign(m, MatrixXcd::Zero(m, m));
    for (int l = 0; l < m; ++l) {
      d_mixed[dir][l] = dm.block(0, l * m, m, m);
      d_hol[dir][l] = dh.block(0, l * m, m, m);
    }
  }

  Tensor4c R(m, m, m, m);
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < m; ++l)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          cxd v = d_mixed[j][l](k, i) - d_hol[k][l](j, i) + I * C.h(j, k) * C.reeb_rot(l, i);
          for (int s = 0; s < m; ++s) {
            v += C.mixed[s](k, i) * C.hol[l](j, s);
            v -= C.hol[s](j, i) * C.mixed[l](k, s);
            v += C.mixed[s](k, j) * C.hol[l](s, i);
            v -= std::conj(C.mixed[s](j, k)) * C.mixed[l](s, i);
          }
          R(i, l, j, k) = v;
        }
  return R;
}

// ---------------------------------------------------------------------------
// Heisenberg group model

namespace {

class HeisenbergModel final : public PseudoHermitianModel {
 public:
  explicit HeisenbergModel(int mm) {
    m = mm;
    is_closed = false;
    layout = {mm, 1};
  }
  std::string name() const override { return "heisenberg"; }
  bool point_ok(const Point& p, double) const override {
    return p.chart == 0 && p.x.size() == layout.real_dim();
  }
  int preferred_chart(const Point&) const override { return 0; }
  void check_chart(const Point& p) const override {
    if (p.chart != 0) throw ChartSwitchError("heisenberg model has a single chart");
  }

  CVec frame_Z(const Point& p, int i) const override {
    CVec v = CVec::zero(layout);
    v.dz[i] = 1.0;
    v.dr[0] = I * std::conj(ambient_z(layout, p)[i]);
    return v;
  }
  CVec reeb(const Point& p) const override {
    (void)p;
    CVec v = CVec::zero(layout);
    v.dr[0] = 1.0;
    return v;
  }
  cxd theta_eval(const Point& p, const CVec& v) const override {
    const VectorXcd z = ambient_z(layout, p);
    cxd s = v.dr[0];
    for (int a = 0; a < m; ++a) s += I * (z[a] * v.dzb[a] - std::conj(z[a]) * v.dz[a]);
    return s;
  }
  cxd dtheta_eval(const Point&, const CVec& u, const CVec& v) const override {
    cxd s(0);
    for (int a = 0; a < m; ++a) s += 2.0 * I * (u.dz[a] * v.dzb[a] - v.dz[a] * u.dzb[a]);
    return s;
  }
  MatrixXcd levi(const Point&) const override { return 2.0 * MatrixXcd::Identity(m, m); }

  bool closed_form_connection() const override { return true; }
  ConnectionCoeffs connection(const Point& p, const FdSettings&) const override {
    ConnectionCoeffs C;
    C.h = levi(p);
    C.hinv = 0.5 * MatrixXcd::Identity(m, m);
    C.mixed.assign(m, MatrixXcd::Zero(m, m));
    C.hol.assign(m, MatrixXcd::Zero(m, m));
    C.reeb_rot = MatrixXcd::Zero(m, m);
    C.torsion = MatrixXcd::Zero(m, m);
    return C;
  }

  CVec dframe_Z(const Point&, int dir_slot, int i, const FdSettings&) const override {
    CVec v = CVec::zero(layout);
    if (dir_slot >= m && dir_slot < 2 * m && dir_slot - m == i) v.dr[0] = I;
    return v;
  }
  CVec dreeb(const Point&, int, const FdSettings&) const override { return CVec::zero(layout); }
};

// ---------------------------------------------------------------------------
// Sphere S^{2m+1} in C^{m+1}, contact form (i/2)(dbar - d)|z|^2 restricted.

class SphereModel final : public PseudoHermitianModel {
 public:
  static constexpr double kChartCutoff = 0.3;

  explicit SphereModel(int mm) {
    m = mm;
    is_closed = true;
    layout = {mm + 1, 0};
  }
  std::string name() const override { return "sphere"; }
  int n_charts() const override { return m + 1; }
  bool point_ok(const Point& p, double tol) const override {
    return std::abs(ambient_z(layout, p).squaredNorm() - 1.0) < tol;
  }
  int preferred_chart(const Point& p) const override {
    const VectorXcd z = ambient_z(layout, p);
    int best = 0;
    for (int c = 1; c <= m; ++c)
      if (std::abs(z[c]) > std::abs(z[best])) best = c;
    return best;
  }
  void check_chart(const Point& p) const override {
    if (p.chart < 0 || p.chart > m) throw ChartSwitchError("invalid sphere chart index");
    const VectorXcd z = ambient_z(layout, p);
    if (std::abs(z[p.chart]) < kChartCutoff)
      throw ChartSwitchError("point too close to the chart boundary; switch charts");
  }

  // holomorphic coordinate indices of chart c, in increasing order
  int hol_index(int chart, int a) const { return a < chart ? a : a + 1; }

  CVec frame_Z(const Point& p, int i) const override {
    check_chart(p);
    const VectorXcd z = ambient_z(layout, p);
    const int c = p.chart;
    CVec v = CVec::zero(layout);
    const int ia = hol_index(c, i);
    v.dz[ia] = 1.0;
    v.dz[c] = -std::conj(z[ia]) / std::conj(z[c]);
    return v;
  }
  CVec reeb(const Point& p) const override {
    const VectorXcd z = ambient_z(layout, p);
    CVec v = CVec::zero(layout);
    for (int a = 0; a <= m; ++a) {
      v.dz[a] = I * z[a];
      v.dzb[a] = -I * std::conj(z[a]);
    }
    return v;
  }
  cxd theta_eval(const Point& p, const CVec& v) const override {
    const VectorXcd z = ambient_z(layout, p);
    cxd s(0);
    for (int a = 0; a <= m; ++a)
      s += 0.5 * I * (z[a] * v.dzb[a] - std::conj(z[a]) * v.dz[a]);
    return s;
  }
  cxd dtheta_eval(const Point&, const CVec& u, const CVec& v) const override {
    cxd s(0);
    for (int a = 0; a <= m; ++a) s += I * (u.dz[a] * v.dzb[a] - v.dz[a] * u.dzb[a]);
    return s;
  }
  MatrixXcd levi(const Point& p) const override {
    check_chart(p);
    const VectorXcd z = ambient_z(layout, p);
    const int c = p.chart;
    const double wc2 = std::norm(z[c]);
    MatrixXcd h(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        h(a, b) = (a == b ? 1.0 : 0.0) +
                  std::conj(z[hol_index(c, a)]) * z[hol_index(c, b)] / wc2;
    return h;
  }

  bool closed_form_connection() const override { return true; }
  ConnectionCoeffs connection(const Point& p, const FdSettings&) const override {
    check_chart(p);
    const VectorXcd z = ambient_z(layout, p);
    const int c = p.chart;
    ConnectionCoeffs C;
    C.h = levi(p);
    C.hinv = C.h.inverse();
    C.mixed.assign(m, MatrixXcd::Zero(m, m));
    for (int l = 0; l < m; ++l)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) C.mixed[l](j, i) = C.h(i, j) * z[hol_index(c, l)];
    C.hol.assign(m, MatrixXcd::Zero(m, m));
    C.reeb_rot = -I * MatrixXcd::Identity(m, m);
    C.torsion = MatrixXcd::Zero(m, m);
    return C;
  }

  CVec dframe_Z(const Point& p, int dir_slot, int i, const FdSettings&) const override {
    check_chart(p);
    CVec v = CVec::zero(layout);
    if (dir_slot >= m && dir_slot < 2 * m) {
      const VectorXcd z = ambient_z(layout, p);
      const int c = p.chart;
      const int b = dir_slot - m;
      const cxd zc = z[c], zcb = std::conj(z[c]);
      // Z_bbar acting on the d/dz_c coefficient -zbar_{i_a}/zbar_c
      v.dz[c] = -((b == i ? 1.0 : 0.0) / zcb) -
                z[hol_index(c, b)] * std::conj(z[hol_index(c, i)]) / (zc * zcb * zcb);
    }
    return v;
  }
  CVec dreeb(const Point& p, int dir_slot, const FdSettings&) const override {
    check_chart(p);
    const VectorXcd z = ambient_z(layout, p);
    CVec v = CVec::zero(layout);
    if (dir_slot < m) {
      const CVec Zb = frame_Z(p, dir_slot);
      v.dz = I * Zb.dz;
    } else if (dir_slot < 2 * m) {
      const CVec Zb = frame_Z(p, dir_slot - m);
      v.dzb = (-I) * Zb.dz.conjugate();
    } else {
      for (int a = 0; a <= m; ++a) {
        v.dz[a] = -z[a];
        v.dzb[a] = -std::conj(z[a]);
      }
    }
    return v;
  }
};

// ---------------------------------------------------------------------------
// conformal change theta -> e^{2 sigma} theta

class ConformalModel final : public PseudoHermitianModel {
 public:
  ConformalModel(ModelPtr base, ConformalFactor sigma) : base_(std::move(base)), sig_(std::move(sigma)) {
    m = base_->m;
    is_closed = base_->is_closed;
    layout = base_->layout;
  }
  std::string name() const override { return base_->name() + "-conformal"; }
  int n_charts() const override { return base_->n_charts(); }
  bool point_ok(const Point& p, double tol) const override { return base_->point_ok(p, tol); }
  int preferred_chart(const Point& p) const override { return base_->preferred_chart(p); }
  void check_chart(const Point& p) const override { base_->check_chart(p); }

  CVec frame_Z(const Point& p, int i) const override {
    const double es = std::exp(-sig_.eval(layout, p));
    return base_->frame_Z(p, i) * cxd(es);
  }

  // Reeb field of e^{2 sigma} theta, solved pointwise from the linear system
  // theta_hat(T) = 1, dtheta_hat(T, basis) = 0 over real tangent parameters.
  CVec reeb(const Point& p) const override {
    const int n = 2 * m + 1;
    std::vector<CVec> bb(n);
    for (int s = 0; s < n; ++s) bb[s] = base_->basis(p, s);
    auto assemble = [&](const VectorXd& u) {
      CVec t = CVec::zero(layout);
      for (int a = 0; a < m; ++a) {
        const cxd al(u[2 * a], u[2 * a + 1]);
        t = t + bb[a] * al + bb[m + a] * std::conj(al);
      }
      t = t + bb[2 * m] * cxd(u[2 * m]);
      return t;
    };
    // rows: Re/Im of dtheta_hat(T, X_s) for each basis field, plus theta_hat(T) = 1
    const int rows = 2 * n + 2;
    MatrixXd A(rows, n);
    VectorXd rhs = VectorXd::Zero(rows);
    for (int col = 0; col < n; ++col) {
      VectorXd e = VectorXd::Zero(n);
      e[col] = 1.0;
      const CVec t = assemble(e);
      for (int s = 0; s < n; ++s) {
        const cxd val = dtheta_eval(p, t, bb[s]);
        A(2 * s, col) = val.real();
        A(2 * s + 1, col) = val.imag();
      }
      const cxd th = theta_eval(p, t);
      A(2 * n, col) = th.real();
      A(2 * n + 1, col) = th.imag();
    }
    rhs[2 * n] = 1.0;
    VectorXd u = A.colPivHouseholderQr().solve(rhs);
    if ((A * u - rhs).norm() > 1e-8)
      throw DegenerateFrameError("Reeb field solve failed for the rescaled contact form");
    return assemble(u);
  }

  cxd theta_eval(const Point& p, const CVec& v) const override {
    return std::exp(2.0 * sig_.eval(layout, p)) * base_->theta_eval(p, v);
  }
  cxd dtheta_eval(const Point& p, const CVec& u, const CVec& v) const override {
    const double e2s = std::exp(2.0 * sig_.eval(layout, p));
    const cxd du = sig_.deriv(layout, p, u), dv = sig_.deriv(layout, p, v);
    return e2s * (2.0 * (du * base_->theta_eval(p, v) - dv * base_->theta_eval(p, u)) +
                  base_->dtheta_eval(p, u, v));
  }
  MatrixXcd levi(const Point& p) const override { return base_->levi(p); }

  CVec dframe_Z(const Point& p, int dir_slot, int i, const FdSettings& fd) const override {
    if (dir_slot == 2 * m) return PseudoHermitianModel::dframe_Z(p, dir_slot, i, fd);
    // chain rule through the base closed forms:
    //   D_{e^{-s} X_d}(e^{-s} Z_i) = e^{-2s} (D_{X_d} Z_i - (X_d s) Z_i)
    const double es = std::exp(-sig_.eval(layout, p));
    const CVec xd = base_->basis(p, dir_slot);
    const cxd ds = sig_.deriv(layout, p, xd);
    const CVec dz = base_->dbasis(p, dir_slot, i, fd);
    return (dz - base_->frame_Z(p, i) * ds) * cxd(es * es);
  }

 private:
  ModelPtr base_;
  ConformalFactor sig_;
};

}  // namespace

// ---------------------------------------------------------------------------
// ConformalFactor

ConformalFactor ConformalFactor::make(const AmbientLayout& L, const Poly& real_part,
                                      std::string label) {
  ConformalFactor f;
  f.label = std::move(label);
  f.s = (real_part + real_part.conjugate()) * cxd(0.5);
  f.sz.resize(L.mc);
  f.szb.resize(L.mc);
  f.szz.assign(L.mc, std::vector<Poly>(L.mc));
  f.szzb.assign(L.mc, std::vector<Poly>(L.mc));
  f.szbzb.assign(L.mc, std::vector<Poly>(L.mc));
  f.szt.resize(L.mc);
  f.szbt.resize(L.mc);
  for (int a = 0; a < L.mc; ++a) {
    f.sz[a] = f.s.dz(a);
    f.szb[a] = f.s.dzb(a);
  }
  for (int a = 0; a < L.mc; ++a) {
    for (int b = 0; b < L.mc; ++b) {
      f.szz[a][b] = f.sz[a].dz(b);
      f.szzb[a][b] = f.sz[a].dzb(b);
      f.szbzb[a][b] = f.szb[a].dzb(b);
    }
    f.szt[a] = L.kr ? f.sz[a].dt() : Poly(L.mc);
    f.szbt[a] = L.kr ? f.szb[a].dt() : Poly(L.mc);
  }
  f.st = L.kr ? f.s.dt() : Poly(L.mc);
  f.stt = L.kr ? f.st.dt() : Poly(L.mc);
  return f;
}

ConformalFactor ConformalFactor::zero(const AmbientLayout& L) {
  return make(L, Poly(L.mc), "zero");
}

ConformalFactor ConformalFactor::constant(const AmbientLayout& L, double c) {
  return make(L, Poly::constant(L.mc, cxd(c)), "constant");
}

double ConformalFactor::eval(const AmbientLayout& L, const Point& p) const {
  const VectorXcd z = ambient_z(L, p);
  const double t = L.kr ? p.x[2 * L.mc] : 0.0;
  return s.eval(z, t).real();
}

cxd ConformalFactor::deriv(const AmbientLayout& L, const Point& p, const CVec& v) const {
  const VectorXcd z = ambient_z(L, p);
  const double t = L.kr ? p.x[2 * L.mc] : 0.0;
  cxd d(0);
  for (int a = 0; a < L.mc; ++a)
    d += v.dz[a] * sz[a].eval(z, t) + v.dzb[a] * szb[a].eval(z, t);
  if (L.kr) d += v.dr[0] * st.eval(z, t);
  return d;
}

cxd ConformalFactor::deriv2(const AmbientLayout& L, const Point& p, const CVec& v,
                            const CVec& w) const {
  const VectorXcd z = ambient_z(L, p);
  const double t = L.kr ? p.x[2 * L.mc] : 0.0;
  cxd d(0);
  for (int a = 0; a < L.mc; ++a) {
    cxd dz_a(0), dzb_a(0);  // D_w of sz[a], szb[a]
    for (int b = 0; b < L.mc; ++b) {
      dz_a += w.dz[b] * szz[a][b].eval(z, t) + w.dzb[b] * szzb[a][b].eval(z, t);
      dzb_a += w.dz[b] * szzb[b][a].eval(z, t) + w.dzb[b] * szbzb[a][b].eval(z, t);
    }
    if (L.kr) {
      dz_a += w.dr[0] * szt[a].eval(z, t);
      dzb_a += w.dr[0] * szbt[a].eval(z, t);
    }
    d += v.dz[a] * dz_a + v.dzb[a] * dzb_a;
  }
  if (L.kr) {
    cxd dt(0);
    for (int b = 0; b < L.mc; ++b)
      dt += w.dz[b] * szt[b].eval(z, t) + w.dzb[b] * szbt[b].eval(z, t);
    dt += w.dr[0] * stt.eval(z, t);
    d += v.dr[0] * dt;
  }
  return d;
}

cxd sigma_frame2(const PseudoHermitianModel& M, const ConformalFactor& s, const Point& p,
                 int slot_a, int slot_b, const FdSettings& fd) {
  const CVec A = M.basis(p, slot_a);
  const CVec B = M.basis(p, slot_b);
  const CVec dA = M.dbasis(p, slot_b, slot_a, fd);
  return s.deriv(M.layout, p, dA) + s.deriv2(M.layout, p, A, B);
}

// ---------------------------------------------------------------------------
// factories and sampling

ModelPtr make_heisenberg(int m) {
  if (m < 1) throw UnsupportedError("CR dimension must be at least 1");
  return std::make_shared<HeisenbergModel>(m);
}

ModelPtr make_sphere(int m) {
  if (m < 1) throw UnsupportedError("CR dimension must be at least 1");
  return std::make_shared<SphereModel>(m);
}

ModelPtr conformal_change(ModelPtr base, const ConformalFactor& sigma) {
  return std::make_shared<ConformalModel>(std::move(base), sigma);
}

Point random_point(const PseudoHermitianModel& M, std::mt19937_64& rng) {
  Point p;
  p.x = VectorXd::Zero(M.layout.real_dim());
  if (M.is_closed) {
    std::normal_distribution<double> g(0.0, 1.0);
    double n2 = 0;
    do {
      for (int k = 0; k < p.x.size(); ++k) p.x[k] = g(rng);
      n2 = p.x.squaredNorm();
    } while (n2 < 1e-6);
    p.x /= std::sqrt(n2);
    p.chart = M.preferred_chart(p);
  } else {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < p.x.size(); ++k) p.x[k] = u(rng);
    p.chart = 0;
  }
  return p;
}

}  // namespace crlab
