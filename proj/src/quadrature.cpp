#include "crlab/quadrature.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "crlab/parallel.hpp"

namespace crlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(size_t(n), 0.0);
  w.assign(size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[size_t(i)] = 0.5 * (t + 1.0);
    w[size_t(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Evaluates theta ^ (dtheta)^m on an ordered tuple of 2m+1 real tangent
// vectors. The pair recursion enumerates each perfect matching once, so the
// m! multiplicity of the identical dtheta factors is restored at the end.
double volume_form(const PseudoHermitianModel& M, const Point& p, const std::vector<CVec>& v) {
  const int k = int(v.size());
  const int m = (k - 1) / 2;
  cxd total(0);
  // choose one index for theta, pair up the rest for the dtheta factors
  std::vector<int> rest;
  std::function<cxd(std::vector<int>&)> pair_sum = [&](std::vector<int>& r) -> cxd {
    if (r.empty()) return cxd(1);
    cxd acc(0);
    const int first = r[0];
    for (size_t j = 1; j < r.size(); ++j) {
      std::vector<int> next;
      for (size_t q = 1; q < r.size(); ++q)
        if (q != j) next.push_back(r[q]);
      // sign of moving r[j] next to first: (j-1) transpositions
      const double sgn = (j % 2 == 1) ? 1.0 : -1.0;
      acc += sgn * M.dtheta_eval(p, v[size_t(first)], v[size_t(r[j])]) * pair_sum(next);
    }
    return acc;
  };
  for (int t = 0; t < k; ++t) {
    rest.clear();
    for (int i = 0; i < k; ++i)
      if (i != t) rest.push_back(i);
    const double sgn = (t % 2 == 0) ? 1.0 : -1.0;
    total += sgn * M.theta_eval(p, v[size_t(t)]) * pair_sum(rest);
  }
  double factorial = 1.0;
  for (int q = 2; q <= m; ++q) factorial *= q;
  return factorial * total.real();
}

// orthonormal basis of the tangent space of the unit sphere at p
std::vector<CVec> tangent_basis(const PseudoHermitianModel& M, const Point& p) {
  const int d = M.layout.real_dim();
  VectorXd nrm = p.x;  // sphere normal in ambient real coordinates
  Eigen::MatrixXd A(d, 1);
  A.col(0) = nrm.normalized();
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.matrixQ();
  std::vector<CVec> basis;
  for (int c = 1; c < d; ++c) {
    CVec v = CVec::zero(M.layout);
    for (int a = 0; a < M.layout.mc; ++a) v.dz[a] = cxd(Q(2 * a, c), Q(2 * a + 1, c));
    v.dzb = v.dz.conjugate();
    basis.push_back(v);
  }
  return basis;
}

double sphere_area(int real_dim) {
  // surface area of the unit sphere S^{real_dim - 1} in R^{real_dim}
  return 2.0 * std::pow(kPi, 0.5 * real_dim) / std::tgamma(0.5 * real_dim);
}

QuadratureRule hopf_rule_s3(const PseudoHermitianModel& M, int R) {
  QuadratureRule rule;
  rule.kind = RuleKind::ProductDeterministic;
  rule.resolution = R;
  std::vector<double> gx, gw;
  gauss_legendre(R, gx, gw);
  rule.pts.reserve(size_t(R) * R * R);
  std::vector<double> wts;
  wts.reserve(size_t(R) * R * R);
  const double dxi = 2.0 * kPi / R;
  for (int q = 0; q < R; ++q) {
    const double eta = 0.5 * kPi * gx[size_t(q)];
    const double weta = 0.5 * kPi * gw[size_t(q)] * std::sin(2.0 * eta);
    const double c = std::cos(eta), s = std::sin(eta);
    for (int a = 0; a < R; ++a)
      for (int b = 0; b < R; ++b) {
        const double xi1 = dxi * a, xi2 = dxi * b;
        Point p;
        p.x = VectorXd(4);
        p.x[0] = c * std::cos(xi1);
        p.x[1] = c * std::sin(xi1);
        p.x[2] = s * std::cos(xi2);
        p.x[3] = s * std::sin(xi2);
        p.chart = M.preferred_chart(p);
        rule.pts.push_back(p);
        wts.push_back(weta * dxi * dxi);
      }
  }
  rule.w = Eigen::Map<VectorXd>(wts.data(), long(wts.size()));

  // fallback: rotate the whole grid by a fixed unitary if any node ended up
  // outside its chart cutoff (cannot happen with per-node chart selection,
  // but the guard keeps the rule well formed if the chart policy changes)
  bool ok = true;
  for (const Point& p : rule.pts) {
    const VectorXcd z = ambient_z(M.layout, p);
    if (std::abs(z[p.chart]) < 0.3) ok = false;
  }
  if (!ok) {
    const double a = 0.7227342478134157;  // fixed generic angle
    Eigen::Matrix2cd U;
    U << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    for (Point& p : rule.pts) {
      VectorXcd z = ambient_z(M.layout, p);
      VectorXcd zr = U * z;
      for (int c = 0; c < 2; ++c) {
        p.x[2 * c] = zr[c].real();
        p.x[2 * c + 1] = zr[c].imag();
      }
      p.chart = M.preferred_chart(p);
    }
    rule.rotated = true;
  }
  return rule;
}

QuadratureRule mc_rule(const PseudoHermitianModel& M, int count, uint64_t seed) {
  QuadratureRule rule;
  rule.kind = RuleKind::MonteCarlo;
  rule.resolution = count;
  rule.seed = seed;
  std::mt19937_64 rng(seed);
  const double area = sphere_area(M.layout.real_dim());
  rule.pts.reserve(size_t(count));
  std::vector<double> wts(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    Point p = random_point(M, rng);
    // density of theta ^ (dtheta)^m against the Euclidean surface measure
    const double rho = std::abs(volume_form(M, p, tangent_basis(M, p)));
    wts[size_t(i)] = rho * area / count;
    rule.pts.push_back(std::move(p));
  }
  rule.w = Eigen::Map<VectorXd>(wts.data(), long(wts.size()));
  return rule;
}

}  // namespace

QuadratureRule make_rule(const PseudoHermitianModel& M, int resolution, RuleKind kind,
                         uint64_t seed) {
  if (!M.is_closed)
    throw UnsupportedError("quadrature rules require a closed model");
  if (kind == RuleKind::ProductDeterministic) {
    if (M.m != 1 || M.layout.kr != 0)
      throw UnsupportedError("the deterministic product rule is implemented for S^3 only");
    return hopf_rule_s3(M, resolution);
  }
  return mc_rule(M, resolution, seed);
}

void save_rule_csv(const QuadratureRule& rule, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open rule cache file for writing: " + path);
  out.precision(17);
  out << "# kind,resolution,seed,rotated\n";
  out << (rule.kind == RuleKind::ProductDeterministic ? "product-deterministic" : "monte-carlo")
      << "," << rule.resolution << "," << rule.seed << "," << (rule.rotated ? 1 : 0) << "\n";
  for (size_t i = 0; i < rule.pts.size(); ++i) {
    out << rule.pts[i].chart;
    for (int k = 0; k < rule.pts[i].x.size(); ++k) out << "," << rule.pts[i].x[k];
    out << "," << rule.w[long(i)] << "\n";
  }
}

QuadratureRule load_rule_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule cache file: " + path);
  std::string line;
  std::getline(in, line);  // comment
  std::getline(in, line);
  QuadratureRule rule;
  {
    std::stringstream ss(line);
    std::string kind;
    std::getline(ss, kind, ',');
    rule.kind = kind == "product-deterministic" ? RuleKind::ProductDeterministic
                                                : RuleKind::MonteCarlo;
    std::string tok;
    std::getline(ss, tok, ',');
    rule.resolution = std::stoi(tok);
    std::getline(ss, tok, ',');
    rule.seed = std::stoull(tok);
    std::getline(ss, tok, ',');
    rule.rotated = tok == "1";
  }
  std::vector<double> wts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    std::getline(ss, tok, ',');
    Point p;
    p.chart = std::stoi(tok);
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    p.x = Eigen::Map<VectorXd>(vals.data(), long(vals.size()) - 1);
    wts.push_back(vals.back());
    rule.pts.push_back(std::move(p));
  }
  rule.w = Eigen::Map<VectorXd>(wts.data(), long(wts.size()));
  return rule;
}

IntegralValue integrate_field(const QuadratureRule& rule,
                              const std::function<double(const Point&)>& field, bool parallel) {
  const size_t n = rule.pts.size();
  std::vector<double> vals =
      parallel_map<double>(n, [&](size_t i) { return field(rule.pts[i]); }, parallel);
  double total = chunked_reduce<double>(
      n, [&](size_t i) { return vals[i] * rule.w[long(i)]; }, 0.0, false);
  IntegralValue out;
  out.value = total;
  if (rule.kind == RuleKind::MonteCarlo) {
    // weighted standard error
    const double mean = total;
    double var = 0;
    for (size_t i = 0; i < n; ++i) {
      const double c = vals[i] * rule.w[long(i)] * double(n) - mean;
      var += c * c;
    }
    var /= double(n) * double(n - 1);
    out.stderr_ = std::sqrt(var);
  }
  return out;
}

double energy(const PseudoHermitianModel& M, const KahlerTarget& N, const SmoothMap& f,
              const QuadratureRule& rule, const FdSettings& fd, bool parallel) {
  const size_t n = rule.pts.size();
  std::vector<double> vals = parallel_map<double>(
      n,
      [&](size_t i) {
        GeomContext G = make_context(M, rule.pts[i], fd);
        FirstJet j = first_jet(G, f);
        if (!N.in_domain(j.f))
          throw DomainError("energy: map leaves the target domain at node " + std::to_string(i));
        const TargetPoint t = target_point(N, j.f);
        return energy_density(j, G, t);
      },
      parallel);
  return chunked_reduce<double>(
      n, [&](size_t i) { return vals[i] * rule.w[long(i)]; }, 0.0, false);
}

namespace {

struct FieldRow {
  cxd pair_p;
  double b2, curv;
  cxd tau_pair, torsion_pair;
};

std::vector<FieldRow> field_rows(const PseudoHermitianModel& M, const KahlerTarget& N,
                                 const SmoothMap& f, const QuadratureRule& rule,
                                 const FdSettings& fd, bool parallel) {
  return parallel_map<FieldRow>(
      rule.pts.size(),
      [&](size_t i) {
        IdentityFields F = identity_fields(M, N, f, rule.pts[i], fd, false);
        return FieldRow{F.pair_p, F.b2, F.curv, F.tau_pair, F.torsion_pair};
      },
      parallel);
}

// weighted sum + MC stderr of a complex column
std::pair<cxd, double> column_integral(const QuadratureRule& rule, const std::vector<cxd>& col) {
  const size_t n = col.size();
  cxd total = chunked_reduce<cxd>(
      n, [&](size_t i) { return col[i] * rule.w[long(i)]; }, cxd(0), false);
  double se = 0;
  if (rule.kind == RuleKind::MonteCarlo && n > 1) {
    double var = 0;
    for (size_t i = 0; i < n; ++i) {
      const cxd c = col[i] * rule.w[long(i)] * double(n) - total;
      var += std::norm(c);
    }
    var /= double(n) * double(n - 1);
    se = std::sqrt(var);
  }
  return {total, se};
}

}  // namespace

SiuResiduals siu_identity_residuals(const PseudoHermitianModel& M, const KahlerTarget& N,
                                    const SmoothMap& f, const QuadratureRule& rule,
                                    const FdSettings& fd, bool parallel) {
  const std::vector<FieldRow> rows = field_rows(M, N, f, rule, fd, parallel);
  const size_t n = rows.size();
  std::vector<cxd> c_pair(n), c_b2(n), c_curv(n), c_tau(n), c_tor(n);
  for (size_t i = 0; i < n; ++i) {
    c_pair[i] = rows[i].pair_p;
    c_b2[i] = cxd(rows[i].b2, 0);
    c_curv[i] = cxd(rows[i].curv, 0);
    c_tau[i] = rows[i].tau_pair;
    c_tor[i] = rows[i].torsion_pair;
  }
  auto [I_pair, se_pair] = column_integral(rule, c_pair);
  auto [I_b2, se_b2] = column_integral(rule, c_b2);
  auto [I_curv, se_curv] = column_integral(rule, c_curv);
  auto [I_tau, se_tau] = column_integral(rule, c_tau);
  auto [I_tor, se_tor] = column_integral(rule, c_tor);

  SiuResiduals out;
  const int m = M.m;
  const cxd lhs1 = -(double(m - 1) / double(m)) * I_pair;
  const cxd rhs1 = I_b2 + I_curv;
  out.lhs1_re = lhs1.real();
  out.lhs1_im = lhs1.imag();
  out.rhs1 = rhs1.real();
  out.res1 = std::abs(lhs1 - rhs1) / (1.0 + std::max(std::abs(lhs1), std::abs(rhs1)));
  out.lhs2 = -I_pair;
  out.rhs2 = I_tau - I * double(m) * I_tor;
  out.res2 = std::abs(out.lhs2 - out.rhs2) /
             (1.0 + std::max(std::abs(out.lhs2), std::abs(out.rhs2)));
  out.stderr1 = std::sqrt(se_pair * se_pair + se_b2 * se_b2 + se_curv * se_curv);
  out.stderr2 = std::sqrt(se_pair * se_pair + se_tau * se_tau +
                          double(m) * double(m) * se_tor * se_tor);
  out.pair_value = I_pair.real();
  return out;
}

PositivityResult positivity_check(const PseudoHermitianModel& M, const KahlerTarget& N,
                                  const SmoothMap& f, const QuadratureRule& rule, double tol,
                                  const FdSettings& fd, bool parallel) {
  if (M.m < 2)
    throw UnsupportedError("the positivity check needs CR dimension at least 2");

  PositivityResult out;
  // precondition: the target must look semi-negative where the map lives
  {
    GeomContext G = make_context(M, rule.pts[0], fd);
    FirstJet j = first_jet(G, f);
    NegativityVerdict v = sample_strong_negativity(N, j.f, 2000);
    out.target_verdict = v.kind;
    if (v.kind == NegativityVerdict::Kind::Fail)
      throw UnsupportedError("positivity check requires a semi-negative target");
  }

  std::vector<cxd> col = parallel_map<cxd>(
      rule.pts.size(),
      [&](size_t i) {
        IdentityFields F = identity_fields(M, N, f, rule.pts[i], fd, false);
        return F.pair_p;
      },
      parallel);
  auto [total, se] = column_integral(rule, col);
  out.value = total.real();
  out.imag_value = total.imag();
  out.stderr_ = se;
  out.gate = std::max(tol, 3.0 * se);
  out.nonpositive = out.value <= out.gate;
  out.equality = std::abs(out.value) <= out.gate;
  if (out.equality) {
    std::vector<Point> sample(rule.pts.begin(),
                              rule.pts.begin() + std::min<size_t>(rule.pts.size(), 25));
    out.cr_pluriharmonic = classify(M, N, f, 1e-6, sample, fd).cr_pluriharmonic;
  }
  return out;
}

IntegralValue integrate_divergence(const PseudoHermitianModel& M, const KahlerTarget& N,
                                   const SmoothMap& f, const QuadratureRule& rule,
                                   const FdSettings& fd, bool parallel) {
  std::vector<cxd> col = parallel_map<cxd>(
      rule.pts.size(),
      [&](size_t i) { return identity_fields(M, N, f, rule.pts[i], fd, true).div_e; }, parallel);
  auto [total, se] = column_integral(rule, col);
  IntegralValue out;
  out.value = std::abs(total);
  out.stderr_ = se;
  return out;
}

}  // namespace crlab
