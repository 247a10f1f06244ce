// Pointwise differential calculus of a map f: M -> N: frame derivatives
// (FirstJet), Tanaka-Webster + pullback covariant derivatives through second
// order (SecondCov, which embeds the first jet) and third order on request
// (third_cov), the tension field, the trace-free second-order tensor B, the
// third-order operator P, scalar pairings and the harmonicity classifiers.
#pragma once

#include "crlab/geometry.hpp"
#include "crlab/kahler.hpp"
#include "crlab/maps.hpp"

namespace crlab {

// Geometry of M bundled at one point.
struct GeomContext {
  const PseudoHermitianModel* M = nullptr;
  Point p;
  FdSettings fd;
  std::vector<CVec> B;  // 2m+1 basis fields
  MatrixXcd h, hinv;
  ConnectionCoeffs conn;
};

GeomContext make_context(const PseudoHermitianModel& M, const Point& p, const FdSettings& fd);

// Target data at w = f(p).
struct TargetPoint {
  MatrixXcd g, ginv;
  std::vector<MatrixXcd> gamma;  // gamma[a](b,c) = Gamma^a_{bc}
};
TargetPoint target_point(const KahlerTarget& N, const VectorXcd& w);

struct FirstJet {
  VectorXcd f;        // n
  MatrixXcd fi, fib;  // n x m: f^a_i, f^a_{ibar}
  VectorXcd f0;       // n
};
FirstJet first_jet(const GeomContext& G, const SmoothMap& f);

// Second covariant derivatives (Tanaka-Webster plus pullback correction).
struct SecondCov {
  FirstJet j1;
  std::vector<MatrixXcd> ib_j;  // [a](i,j) = f^a_{ibar|j}
  std::vector<MatrixXcd> i_jb;  // [a](i,j) = f^a_{i|jbar}
  std::vector<MatrixXcd> i_j;   // [a](i,j) = f^a_{i|j}
  bool with_reeb = false;
  MatrixXcd zero_i, i_zero, zero_ib, ib_zero;  // n x m
};
SecondCov second_cov(const GeomContext& G, const KahlerTarget& N, const SmoothMap& f,
                     bool with_reeb_patterns = true);

// Index species of a covariant slot.
enum class Slot { Hol, Anti };

// Third covariant derivative f_{a|b|c}: the (a,b) pattern is differentiated
// along every frame direction of species c. Output indices: (alpha)(i, j, k).
Tensor3c third_cov(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                   const Point& p, Slot a, Slot b, Slot c, const FdSettings& fd);

// tau^a[f] = h^{j ibar} f^a_{ibar|j}
VectorXcd tension(const SecondCov& S, const GeomContext& G);
// B_{i jbar} f^a = f^a_{i|jbar} - (1/m)(f^a_{k|lbar} h^{k lbar}) h_{i jbar}
std::vector<MatrixXcd> b_tensor(const SecondCov& S, const GeomContext& G);
// P_i f^a = f^a_{jbar|l|i} h^{l jbar} + m i A_i^{jbar} f^a_{jbar}
MatrixXcd p_operator(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                     const Point& p, const FdSettings& fd);

double energy_density(const FirstJet& j, const GeomContext& G, const TargetPoint& t);
double b_norm2(const std::vector<MatrixXcd>& B, const GeomContext& G, const TargetPoint& t);
cxd p_pairing(const MatrixXcd& P, const FirstJet& j, const GeomContext& G, const TargetPoint& t);

struct PointwiseScalars {
  cxd pair_p;      // <Pf, dbar_b fbar>
  double b2;       // |B f|^2
  double e;        // energy density
};
PointwiseScalars pairing(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                         const Point& p, const FdSettings& fd);

struct ClassifyResult {
  bool ph_harmonic = false;
  bool dbar_pluriharmonic = false;
  bool cr_pluriharmonic = false;
  bool cr = false;
  bool anti_cr = false;
  double res_tau = 0, res_dbph = 0, res_crph = 0, res_cr = 0, res_anti = 0;
};
ClassifyResult classify(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
                        double tol, const std::vector<Point>& sample_points,
                        const FdSettings& fd = {});

}  // namespace crlab
