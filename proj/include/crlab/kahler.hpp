// Kahler target manifolds: metric, Christoffel symbols, curvature tensor,
// and randomized curvature-sign samplers.
#pragma once

#include <memory>
#include <random>

#include "crlab/types.hpp"

namespace crlab {

class KahlerTarget {
 public:
  virtual ~KahlerTarget() = default;

  int n = 1;
  virtual std::string name() const = 0;
  virtual bool in_domain(const VectorXcd&) const { return true; }
  virtual void check_domain(const VectorXcd& z) const;

  virtual MatrixXcd metric(const VectorXcd& z) const = 0;
  // dmetric[a](c, d) = d g_{c dbar} / d z_a; default: finite differences.
  virtual std::vector<MatrixXcd> dmetric(const VectorXcd& z) const;
  // ddmetric(a, b, c, d) = d^2 g_{c dbar} / (d z_a d zbar_b); default: FD.
  virtual Tensor4c ddmetric(const VectorXcd& z) const;
  // christoffel[a](b, c) = Gamma^a_{b c}; default assembled from dmetric.
  virtual std::vector<MatrixXcd> christoffel(const VectorXcd& z) const;

  // R_{a bbar c dbar} = dd g - g^{mu nubar} dg dbarg, indices (a, b, c, d).
  Tensor4c curvature(const VectorXcd& z) const;

  MatrixXcd metric_inverse(const VectorXcd& z) const { return metric(z).inverse(); }
};

using TargetPtr = std::shared_ptr<const KahlerTarget>;

TargetPtr make_flat(int n);
TargetPtr make_bergman_ball(int n);
// Test fixture: same domain as the ball, curvature tensor negated.
TargetPtr make_negated_bergman_ball(int n);
// Test fixture: wraps a target and hides its closed-form derivatives so the
// generic finite-difference path is exercised.
TargetPtr make_fd_oracle(TargetPtr base);

// Hermitian pairing behind the curvature-sign tests:
//   Q(X, Y) = sum R_{a bbar c dbar} X(a,b) conj(Y(d,c)).
cxd siu_form(const Tensor4c& R, const MatrixXcd& X, const MatrixXcd& Y);

struct NegativityVerdict {
  enum class Kind { StronglyNegativeSamplePass, SemiNegativeSamplePass, Fail };
  Kind kind = Kind::Fail;
  // Largest normalized value seen; negative-curvature targets give negative
  // values under the sign convention used here (value = -Q / scale).
  double worst_value = 0.0;
  MatrixXcd witness_A, witness_B, witness_C, witness_D;
  int trials = 0;
};

std::string to_string(NegativityVerdict::Kind k);

NegativityVerdict sample_strong_negativity(const KahlerTarget& T, const VectorXcd& z, int trials,
                                           uint64_t seed = 2024);
NegativityVerdict sample_negativity_order_k(const KahlerTarget& T, const VectorXcd& z, int k,
                                            int trials, uint64_t seed = 2024);

// Numerical rank of [[A, B], [conj B, conj A]] with a relative SVD threshold.
int rank_condition(const MatrixXcd& A, const MatrixXcd& B);

}  // namespace crlab
