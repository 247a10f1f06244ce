#include "crlab/kahler.hpp"

#include <Eigen/SVD>

namespace crlab {

void KahlerTarget::check_domain(const VectorXcd& z) const {
  if (!in_domain(z)) throw DomainError(name() + ": point outside the target domain");
}

// Generic metric derivatives: nested central differences with one Richardson
// level, step 1e-4.
namespace {
constexpr double kMetricStep = 1e-4;

template <class F>
MatrixXcd cdiff(const F& f, const VectorXcd& z, int a, bool re_part) {
  auto shift = [&](double s) {
    VectorXcd q = z;
    q[a] += re_part ? cxd(s, 0) : cxd(0, s);
    return f(q);
  };
  auto d = [&](double s) { return MatrixXcd(((shift(s) - shift(-s)) / (2.0 * s)).eval()); };
  MatrixXcd dh = d(kMetricStep), dh2 = d(kMetricStep / 2.0);
  return (4.0 * dh2 - dh) / 3.0;
}

// Wirtinger d/dz_a of a matrix-valued function
template <class F>
MatrixXcd wirt_dz(const F& f, const VectorXcd& z, int a) {
  MatrixXcd dx = cdiff(f, z, a, true), dy = cdiff(f, z, a, false);
  return 0.5 * (dx - I * dy);
}
template <class F>
MatrixXcd wirt_dzb(const F& f, const VectorXcd& z, int a) {
  MatrixXcd dx = cdiff(f, z, a, true), dy = cdiff(f, z, a, false);
  return 0.5 * (dx + I * dy);
}
}  // namespace

std::vector<MatrixXcd> KahlerTarget::dmetric(const VectorXcd& z) const {
  std::vector<MatrixXcd> dg(n);
  auto f = [&](const VectorXcd& q) { return metric(q); };
  for (int a = 0; a < n; ++a) dg[a] = wirt_dz(f, z, a);
  return dg;
}

Tensor4c KahlerTarget::ddmetric(const VectorXcd& z) const {
  Tensor4c dd(n, n, n, n);
  for (int b = 0; b < n; ++b) {
    auto f = [&](const VectorXcd& q) {
      std::vector<MatrixXcd> dg = dmetric(q);
      MatrixXcd flat(n, n * n);
      for (int a = 0; a < n; ++a) flat.block(0, a * n, n, n) = dg[a];
      return flat;
    };
    MatrixXcd ddb = wirt_dzb(f, z, b);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) dd(a, b, c, d) = ddb(c, a * n + d);
  }
  return dd;
}

std::vector<MatrixXcd> KahlerTarget::christoffel(const VectorXcd& z) const {
  // Gamma^a_{b c} = d_b g_{c dbar} g^{dbar a}; g^{dbar a} = Ginv(d, a)
  const MatrixXcd ginv = metric(z).inverse();
  const std::vector<MatrixXcd> dg = dmetric(z);
  std::vector<MatrixXcd> G(n, MatrixXcd::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        cxd s(0);
        for (int d = 0; d < n; ++d) s += dg[b](c, d) * ginv(d, a);
        G[a](b, c) = s;
      }
  return G;
}

Tensor4c KahlerTarget::curvature(const VectorXcd& z) const {
  check_domain(z);
  const MatrixXcd ginv = metric(z).inverse();
  const std::vector<MatrixXcd> dg = dmetric(z);
  const Tensor4c dd = ddmetric(z);
  Tensor4c R(n, n, n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cxd corr(0);
          for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu)
              corr += ginv(nu, mu) * dg[a](c, nu) * std::conj(dg[b](d, mu));
          R(a, b, c, d) = dd(a, b, c, d) - corr;
        }
  return R;
}

// ---------------------------------------------------------------------------

namespace {

class FlatTarget final : public KahlerTarget {
 public:
  explicit FlatTarget(int nn) { n = nn; }
  std::string name() const override { return "flat"; }
  MatrixXcd metric(const VectorXcd&) const override { return MatrixXcd::Identity(n, n); }
  std::vector<MatrixXcd> dmetric(const VectorXcd&) const override {
    return std::vector<MatrixXcd>(n, MatrixXcd::Zero(n, n));
  }
  Tensor4c ddmetric(const VectorXcd&) const override { return Tensor4c(n, n, n, n); }
  std::vector<MatrixXcd> christoffel(const VectorXcd&) const override {
    return std::vector<MatrixXcd>(n, MatrixXcd::Zero(n, n));
  }
};

class BergmanBall : public KahlerTarget {
 public:
  explicit BergmanBall(int nn) { n = nn; }
  std::string name() const override { return "bergman-ball"; }
  bool in_domain(const VectorXcd& z) const override { return z.norm() <= 1.0 - 1e-6; }

  MatrixXcd metric(const VectorXcd& z) const override {
    check_domain(z);
    const double s = 1.0 - z.squaredNorm();
    MatrixXcd g(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        g(a, b) = (std::conj(z[a]) * z[b] + (a == b ? s : 0.0)) / (s * s);
    return g;
  }

  std::vector<MatrixXcd> dmetric(const VectorXcd& z) const override {
    check_domain(z);
    const double s = 1.0 - z.squaredNorm();
    std::vector<MatrixXcd> dg(n, MatrixXcd::Zero(n, n));
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cxd v = 2.0 * std::conj(z[a]) * std::conj(z[c]) * z[d] / (s * s * s);
          if (a == d) v += std::conj(z[c]) / (s * s);
          if (c == d) v += std::conj(z[a]) / (s * s);
          dg[a](c, d) = v;
        }
    return dg;
  }

  Tensor4c ddmetric(const VectorXcd& z) const override {
    check_domain(z);
    const double s = 1.0 - z.squaredNorm();
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    Tensor4c dd(n, n, n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            cxd v = 6.0 * std::conj(z[a]) * z[b] * std::conj(z[c]) * z[d] / s4;
            if (a == b) v += 2.0 * std::conj(z[c]) * z[d] / s3;
            if (b == c) v += 2.0 * std::conj(z[a]) * z[d] / s3;
            if (a == d) v += 2.0 * z[b] * std::conj(z[c]) / s3;
            if (c == d) v += 2.0 * z[b] * std::conj(z[a]) / s3;
            if (a == d && b == c) v += 1.0 / s2;
            if (c == d && a == b) v += 1.0 / s2;
            dd(a, b, c, d) = v;
          }
    return dd;
  }

  std::vector<MatrixXcd> christoffel(const VectorXcd& z) const override {
    check_domain(z);
    const double s = 1.0 - z.squaredNorm();
    std::vector<MatrixXcd> G(n, MatrixXcd::Zero(n, n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          cxd v(0);
          if (a == c) v += std::conj(z[b]);
          if (a == b) v += std::conj(z[c]);
          G[a](b, c) = v / s;
        }
    return G;
  }
};

class NegatedBergmanBall final : public BergmanBall {
 public:
  explicit NegatedBergmanBall(int nn) : BergmanBall(nn) {}
  std::string name() const override { return "negated-bergman-ball"; }
  Tensor4c ddmetric(const VectorXcd& z) const override {
    // flips the sign of the assembled curvature while keeping g and Gamma
    Tensor4c dd = BergmanBall::ddmetric(z);
    const MatrixXcd ginv = metric(z).inverse();
    const std::vector<MatrixXcd> dg = BergmanBall::dmetric(z);
    Tensor4c out(n, n, n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            cxd corr(0);
            for (int mu = 0; mu < n; ++mu)
              for (int nu = 0; nu < n; ++nu)
                corr += ginv(nu, mu) * dg[a](c, nu) * std::conj(dg[b](d, mu));
            out(a, b, c, d) = 2.0 * corr - dd(a, b, c, d);
          }
    return out;
  }
};

class FdOracleTarget final : public KahlerTarget {
 public:
  explicit FdOracleTarget(TargetPtr base) : base_(std::move(base)) { n = base_->n; }
  std::string name() const override { return base_->name() + "-fd"; }
  bool in_domain(const VectorXcd& z) const override { return base_->in_domain(z); }
  MatrixXcd metric(const VectorXcd& z) const override { return base_->metric(z); }

 private:
  TargetPtr base_;
};

}  // namespace

TargetPtr make_flat(int n) {
  if (n < 1) throw UnsupportedError("target dimension must be at least 1");
  return std::make_shared<FlatTarget>(n);
}
TargetPtr make_bergman_ball(int n) {
  if (n < 1) throw UnsupportedError("target dimension must be at least 1");
  return std::make_shared<BergmanBall>(n);
}
TargetPtr make_negated_bergman_ball(int n) { return std::make_shared<NegatedBergmanBall>(n); }
TargetPtr make_fd_oracle(TargetPtr base) { return std::make_shared<FdOracleTarget>(std::move(base)); }

// ---------------------------------------------------------------------------

cxd siu_form(const Tensor4c& R, const MatrixXcd& X, const MatrixXcd& Y) {
  const int n = R.d0;
  cxd q(0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) q += R(a, b, c, d) * X(a, b) * std::conj(Y(d, c));
  return q;
}

std::string to_string(NegativityVerdict::Kind k) {
  switch (k) {
    case NegativityVerdict::Kind::StronglyNegativeSamplePass:
      return "strongly-negative-sample-pass";
    case NegativityVerdict::Kind::SemiNegativeSamplePass:
      return "semi-negative-sample-pass";
    default:
      return "fail";
  }
}

namespace {
VectorXcd random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXcd v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = cxd(g(rng), g(rng));
  } while (v.norm() < 1e-8);
  return v / v.norm();
}

NegativityVerdict classify_worst(double worst) {
  NegativityVerdict v;
  v.worst_value = worst;
  if (worst < -1e-9)
    v.kind = NegativityVerdict::Kind::StronglyNegativeSamplePass;
  else if (worst <= 1e-12)
    v.kind = NegativityVerdict::Kind::SemiNegativeSamplePass;
  else
    v.kind = NegativityVerdict::Kind::Fail;
  return v;
}
}  // namespace

NegativityVerdict sample_strong_negativity(const KahlerTarget& T, const VectorXcd& z, int trials,
                                           uint64_t seed) {
  if (trials < 1) throw UnsupportedError("trials must be positive");
  T.check_domain(z);
  const Tensor4c R = T.curvature(z);
  const double rmax = R.max_abs();
  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  MatrixXcd wa, wb, wc, wd;
  const int n = T.n;
  for (int t = 0; t < trials; ++t) {
    VectorXcd A, B, C, D;
    MatrixXcd X;
    do {
      A = random_unit(rng, n);
      B = random_unit(rng, n);
      C = random_unit(rng, n);
      D = random_unit(rng, n);
      X = A * B.adjoint() - C * D.adjoint();
    } while (X.norm() < 1e-12);
    const double q = siu_form(R, X, X).real();
    const double val = -q / (X.squaredNorm() * (1.0 + rmax));
    if (val > worst) {
      worst = val;
      wa = A;
      wb = B;
      wc = C;
      wd = D;
    }
  }
  NegativityVerdict v = classify_worst(worst);
  v.witness_A = wa;
  v.witness_B = wb;
  v.witness_C = wc;
  v.witness_D = wd;
  v.trials = trials;
  return v;
}

NegativityVerdict sample_negativity_order_k(const KahlerTarget& T, const VectorXcd& z, int k,
                                            int trials, uint64_t seed) {
  if (k < 1 || k > T.n) throw UnsupportedError("order k must satisfy 1 <= k <= n");
  if (trials < 1) throw UnsupportedError("trials must be positive");
  T.check_domain(z);
  const Tensor4c R = T.curvature(z);
  const double rmax = R.max_abs();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = T.n;
  double worst = -std::numeric_limits<double>::infinity();
  MatrixXcd wa, wb;
  for (int t = 0; t < trials; ++t) {
    MatrixXcd A(n, k), B(n, k);
    int redraws = 0;
    for (;;) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) {
          A(i, j) = cxd(g(rng), g(rng));
          B(i, j) = cxd(g(rng), g(rng));
        }
      if (rank_condition(A, B) == 2 * k) break;
      if (++redraws > 100) throw UnsupportedError("rank condition unattainable after 100 redraws");
    }
    double q = 0.0, norm = 0.0;
    if (k == 1) {
      // the antisymmetrized pair sum degenerates for k = 1; use the rank-one
      // quadratic form with xi = A_1 conj(B_1)^T
      MatrixXcd xi = A.col(0) * B.col(0).adjoint();
      q = siu_form(R, xi, xi).real();
      norm = xi.squaredNorm();
    } else {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          MatrixXcd xi = A.col(i) * B.col(j).adjoint() - A.col(j) * B.col(i).adjoint();
          q += siu_form(R, xi, xi).real();
          norm += xi.squaredNorm();
        }
    }
    const double val = -q / (std::max(norm, 1e-300) * (1.0 + rmax));
    if (val > worst) {
      worst = val;
      wa = A;
      wb = B;
    }
  }
  NegativityVerdict v = classify_worst(worst);
  v.witness_A = wa;
  v.witness_B = wb;
  v.trials = trials;
  return v;
}

int rank_condition(const MatrixXcd& A, const MatrixXcd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw UnsupportedError("rank_condition: dimension mismatch");
  const int r = int(A.rows()), c = int(A.cols());
  MatrixXcd S(2 * r, 2 * c);
  S.block(0, 0, r, c) = A;
  S.block(0, c, r, c) = B;
  S.block(r, 0, r, c) = B.conjugate();
  S.block(r, c, r, c) = A.conjugate();
  Eigen::JacobiSVD<MatrixXcd> svd(S);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0) return 0;
  const double thresh = 1e-10 * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return rank;
}

}  // namespace crlab
