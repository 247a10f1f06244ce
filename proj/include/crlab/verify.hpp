// Batch identity verification: commutation relations of the covariant
// derivatives, divergence identities, the algebraic curvature rearrangement
// and conformal invariance of CR-pluriharmonicity. Left and right sides are
// evaluated through independent code paths and compared pointwise.
#pragma once

#include "crlab/jets.hpp"

namespace crlab {

struct VerificationReport {
  std::string identity;
  int point_count = 0;
  double max_residual = 0;
  double mean_residual = 0;
  double p50 = 0, p90 = 0;
  Point worst_point;
  double tol = 0;
  bool pass = false;
  bool skipped = false;
  std::string note;
  // raw residuals at step h and h/2 without extrapolation (order sanity)
  double raw_step = 0, raw_half_step = 0;
};

VerificationReport make_report(std::string identity, const std::vector<Point>& pts,
                               const std::vector<double>& residuals, double tol);

// The six commutation relations. Point-parallel when `parallel` is set.
std::vector<VerificationReport> check_commutators(const PseudoHermitianModel& M,
                                                  const KahlerTarget& N, const SmoothMap& f,
                                                  const std::vector<Point>& pts, double tol,
                                                  const FdSettings& fd = {}, bool parallel = true,
                                                  bool step_sanity = false);

// Divergence identities behind the integrated formulas: the trace-free-tensor
// divergence and the tension-tensor divergence.
std::vector<VerificationReport> check_divergences(const PseudoHermitianModel& M,
                                                  const KahlerTarget& N, const SmoothMap& f,
                                                  const std::vector<Point>& pts, double tol,
                                                  const FdSettings& fd = {}, bool parallel = true);

// Purely algebraic check on random first-jet data: the quartic curvature
// contraction equals half the Hermitian pair sum, and is nonnegative for
// semi-negative targets.
VerificationReport check_curvature_rearrangement(const KahlerTarget& N, const VectorXcd& z, int m,
                                                 int trials, double tol, uint64_t seed = 99);

// Prop-style conformal invariance: the second-derivative transformation law
// and persistence of CR-pluriharmonicity under theta -> e^{2 sigma} theta.
std::vector<VerificationReport> check_conformal_invariance(ModelPtr M,
                                                           const ConformalFactor& sigma,
                                                           const KahlerTarget& N,
                                                           const SmoothMap& f,
                                                           const std::vector<Point>& pts,
                                                           double tol, const FdSettings& fd = {});

// Fault-injection wrappers used to prove the verifiers are sensitive.
ModelPtr with_corrupted_connection(ModelPtr base, double bump);
ModelPtr with_corrupted_levi(ModelPtr base, double bump);

// Pointwise fields entering the divergence identities; shared with the
// quadrature module.
struct IdentityFields {
  cxd pair_p;        // <Pf, dbar_b fbar>
  double b2;         // |B f|^2
  double curv;       // curvature contraction of the first identity
  cxd tau_pair;      // g tau^a conj(tau^b + i m f^b_0)
  cxd torsion_pair;  // g A_i^{jbar} f^a_jbar conj(f^b_l) h^{i lbar}
  double e;          // energy density
  cxd div_e;         // divergence of the trace-free tensor (set on demand)
};
IdentityFields identity_fields(const PseudoHermitianModel& M, const KahlerTarget& N,
                               const SmoothMap& f, const Point& p, const FdSettings& fd,
                               bool with_divergence = false);

double curvature_term(const Tensor4c& R, const FirstJet& j, const MatrixXcd& hinv);

std::vector<Point> sample_points(const PseudoHermitianModel& M, int count, uint64_t seed);

}  // namespace crlab
