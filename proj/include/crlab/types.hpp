// Core value types shared across the library: ambient points, complexified
// tangent vectors, small tensors, error types and finite-difference settings.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace crlab {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr cxd I{0.0, 1.0};

// Ambient coordinate layout: mc complex coordinates followed by kr real ones.
// The real coordinate vector stores (Re z_0, Im z_0, ..., Re z_{mc-1},
// Im z_{mc-1}, x_0, ..., x_{kr-1}).
struct AmbientLayout {
  int mc = 0;
  int kr = 0;
  int real_dim() const { return 2 * mc + kr; }
};

// A point of a model: chart index plus ambient real coordinates.
struct Point {
  int chart = 0;
  VectorXd x;
};

// Complexified ambient tangent vector
//   V = sum_a dz[a] d/dz_a + dzb[a] d/dz_a-bar + sum_j dr[j] d/dx_j.
// A vector is real iff dzb == conj(dz) and dr is real.
struct CVec {
  VectorXcd dz, dzb, dr;

  static CVec zero(const AmbientLayout& L) {
    CVec v;
    v.dz = VectorXcd::Zero(L.mc);
    v.dzb = VectorXcd::Zero(L.mc);
    v.dr = VectorXcd::Zero(L.kr);
    return v;
  }
  CVec conj() const {
    CVec v;
    v.dz = dzb.conjugate();
    v.dzb = dz.conjugate();
    v.dr = dr.conjugate();
    return v;
  }
  CVec operator+(const CVec& o) const { return {dz + o.dz, dzb + o.dzb, dr + o.dr}; }
  CVec operator-(const CVec& o) const { return {dz - o.dz, dzb - o.dzb, dr - o.dr}; }
  CVec operator*(cxd s) const { return {s * dz, s * dzb, s * dr}; }
  double norm() const { return std::sqrt(dz.squaredNorm() + dzb.squaredNorm() + dr.squaredNorm()); }
};

inline VectorXcd ambient_z(const AmbientLayout& L, const Point& p) {
  VectorXcd z(L.mc);
  for (int a = 0; a < L.mc; ++a) z[a] = cxd(p.x[2 * a], p.x[2 * a + 1]);
  return z;
}

// Displace a point along a *real* tangent vector by step h.
inline Point displace(const AmbientLayout& L, const Point& p, const CVec& v, double h) {
  Point q = p;
  for (int a = 0; a < L.mc; ++a) {
    q.x[2 * a] += h * v.dz[a].real();
    q.x[2 * a + 1] += h * v.dz[a].imag();
  }
  for (int j = 0; j < L.kr; ++j) q.x[2 * L.mc + j] += h * v.dr[j].real();
  return q;
}

// Rank-3 / rank-4 complex tensors over small index ranges.
struct Tensor3c {
  int d0 = 0, d1 = 0, d2 = 0;
  std::vector<cxd> v;
  Tensor3c() = default;
  Tensor3c(int a, int b, int c) : d0(a), d1(b), d2(c), v(size_t(a) * b * c, cxd(0)) {}
  cxd& operator()(int i, int j, int k) { return v[(size_t(i) * d1 + j) * d2 + k]; }
  cxd operator()(int i, int j, int k) const { return v[(size_t(i) * d1 + j) * d2 + k]; }
};

struct Tensor4c {
  int d0 = 0, d1 = 0, d2 = 0, d3 = 0;
  std::vector<cxd> v;
  Tensor4c() = default;
  Tensor4c(int a, int b, int c, int d)
      : d0(a), d1(b), d2(c), d3(d), v(size_t(a) * b * c * d, cxd(0)) {}
  cxd& operator()(int i, int j, int k, int l) {
    return v[((size_t(i) * d1 + j) * d2 + k) * d3 + l];
  }
  cxd operator()(int i, int j, int k, int l) const {
    return v[((size_t(i) * d1 + j) * d2 + k) * d3 + l];
  }
  double max_abs() const {
    double m = 0;
    for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
  }
};

// Finite-difference settings. `step` drives frame-direction derivatives of
// pointwise fields (third covariant derivatives, divergences). `bracket_step`
// drives the coefficient derivatives inside bracket extraction; it is larger
// because those values are consumed by a second differentiation and the
// round-off floor scales like eps / (step_inner * step_outer).
struct FdSettings {
  double step = 1e-5;
  double bracket_step = 1e-4;
  bool richardson = true;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ChartSwitchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateFrameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace crlab
