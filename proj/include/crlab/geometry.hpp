// Strictly pseudoconvex pseudo-Hermitian models: frames, contact form,
// Reeb field, Levi form, Tanaka-Webster connection, torsion and curvature,
// plus conformal change of the contact form.
//
// Frame slot convention used throughout: slots 0..m-1 are the holomorphic
// frame fields Z_i, slots m..2m-1 their conjugates, slot 2m the Reeb field.
#pragma once

#include <memory>
#include <random>

#include "crlab/fd.hpp"
#include "crlab/poly.hpp"
#include "crlab/types.hpp"

namespace crlab {

// Connection coefficients of the Tanaka-Webster connection in a fixed frame.
//   mixed[l](j,i) = Gamma^l_{jbar i}   (nabla_{Z_jbar} Z_i)
//   hol[l](j,i)   = Gamma^l_{j i}      (nabla_{Z_j} Z_i)
//   reeb_rot(l,j) = Gamma^l_{0 j}      (nabla_T Z_j)
//   torsion(i,k)  = A_i^{kbar}         (Z_kbar component of [Z_i, T])
struct ConnectionCoeffs {
  MatrixXcd h, hinv;
  std::vector<MatrixXcd> mixed;
  std::vector<MatrixXcd> hol;
  MatrixXcd reeb_rot;
  MatrixXcd torsion;

  double torsion_norm() const { return torsion.size() ? torsion.cwiseAbs().maxCoeff() : 0.0; }
};

class PseudoHermitianModel {
 public:
  virtual ~PseudoHermitianModel() = default;

  int m = 1;
  bool is_closed = false;
  AmbientLayout layout;

  virtual std::string name() const = 0;
  virtual int n_charts() const { return 1; }
  virtual bool point_ok(const Point& p, double tol = 1e-12) const = 0;
  virtual int preferred_chart(const Point& p) const = 0;
  // Throws ChartSwitchError when the point's chart is unusable.
  virtual void check_chart(const Point& p) const = 0;

  virtual CVec frame_Z(const Point& p, int i) const = 0;
  virtual CVec reeb(const Point& p) const = 0;
  virtual cxd theta_eval(const Point& p, const CVec& v) const = 0;
  virtual cxd dtheta_eval(const Point& p, const CVec& u, const CVec& v) const = 0;
  virtual MatrixXcd levi(const Point& p) const = 0;

  // Derivatives of the frame coefficient functions along a basis direction.
  // Defaults fall back to finite differences of the evaluators.
  virtual CVec dframe_Z(const Point& p, int dir_slot, int i, const FdSettings& fd) const;
  virtual CVec dreeb(const Point& p, int dir_slot, const FdSettings& fd) const;

  virtual bool closed_form_connection() const { return false; }
  virtual ConnectionCoeffs connection(const Point& p, const FdSettings& fd) const;

  // slot accessors (see header comment for the slot convention)
  CVec basis(const Point& p, int slot) const;
  CVec dbasis(const Point& p, int dir_slot, int slot, const FdSettings& fd) const;
};

using ModelPtr = std::shared_ptr<const PseudoHermitianModel>;

// Smooth real function on the ambient space with exact Wirtinger partials,
// used as the conformal exponent.
struct ConformalFactor {
  Poly s;
  std::vector<Poly> sz, szb;
  Poly st;
  std::vector<std::vector<Poly>> szz, szzb, szbzb;  // second partials, [a][b]
  std::vector<Poly> szt, szbt;
  Poly stt;
  std::string label;

  static ConformalFactor make(const AmbientLayout& L, const Poly& real_part, std::string label);
  static ConformalFactor zero(const AmbientLayout& L);
  static ConformalFactor constant(const AmbientLayout& L, double c);

  double eval(const AmbientLayout& L, const Point& p) const;
  // directional derivative along a complexified ambient vector
  cxd deriv(const AmbientLayout& L, const Point& p, const CVec& v) const;
  // second ambient derivative D_w(D_v sigma) for *constant* ambient vectors
  cxd deriv2(const AmbientLayout& L, const Point& p, const CVec& v, const CVec& w) const;
};

// Second frame derivative X_b(X_a sigma) of a conformal factor, accounting
// for the variation of the frame coefficients.
cxd sigma_frame2(const PseudoHermitianModel& M, const ConformalFactor& s, const Point& p,
                 int slot_a, int slot_b, const FdSettings& fd = {});

ModelPtr make_heisenberg(int m);
ModelPtr make_sphere(int m);
ModelPtr conformal_change(ModelPtr base, const ConformalFactor& sigma);

// Coefficients of w in the frame basis {Z_l, Z_lbar, T} (least squares).
// Throws DegenerateFrameError when the frame matrix condition exceeds 1e8.
VectorXcd decompose_in_frame(const PseudoHermitianModel& M, const Point& p, const CVec& w,
                             double* residual = nullptr);

// Lie bracket [X_a, X_b] of two basis fields, by differentiating coefficients.
CVec frame_bracket(const PseudoHermitianModel& M, const Point& p, int slot_a, int slot_b,
                   const FdSettings& fd);

// Extracts the Tanaka-Webster connection and torsion from frame brackets and
// metric compatibility. `bracket_residual` reports the worst reassembly error.
ConnectionCoeffs extract_connection(const PseudoHermitianModel& M, const Point& p,
                                    const FdSettings& fd, double* bracket_residual = nullptr);

// Webster curvature R_i{}^l{}_{j kbar}, assembled from frame derivatives of
// the connection coefficients; indices (i, l, j, k).
Tensor4c webster_curvature(const PseudoHermitianModel& M, const Point& p, const FdSettings& fd);

// Random points: uniform on the sphere (chart = largest coordinate), or a
// unit box in the Heisenberg chart.
Point random_point(const PseudoHermitianModel& M, std::mt19937_64& rng);

}  // namespace crlab
