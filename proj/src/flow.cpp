#include "crlab/flow.hpp"

#include <fstream>

#include "crlab/parallel.hpp"

namespace crlab {

SmoothMap MapAnsatz::to_map() const {
  std::vector<Poly> comps;
  comps.reserve(size_t(n));
  for (int al = 0; al < n; ++al) {
    Poly q(layout.mc);
    for (size_t k = 0; k < basis.size(); ++k)
      if (C(long(k), al) != cxd(0))
        q = q + Poly::monomial(layout.mc, C(long(k), al), basis[k].az, basis[k].ab);
    comps.push_back(q);
  }
  return SmoothMap("ansatz", std::move(comps), layout);
}

double MapAnsatz::max_image_norm(const QuadratureRule& rule) const {
  const SmoothMap f = to_map();
  double worst = 0;
  for (const Point& p : rule.pts) worst = std::max(worst, f.value(p).norm());
  return worst;
}

MapAnsatz make_ansatz(const AmbientLayout& layout, int n, int degree, double rho_max) {
  MapAnsatz a;
  a.layout = layout;
  a.n = n;
  a.rho_max = rho_max;
  // enumerate exponents with |az| + |ab| <= degree
  std::vector<uint8_t> az(size_t(layout.mc), 0), ab(size_t(layout.mc), 0);
  std::function<void(int, int)> rec = [&](int var, int left) {
    if (var == 2 * layout.mc) {
      a.basis.push_back({az, ab});
      return;
    }
    for (int e = 0; e <= left; ++e) {
      if (var < layout.mc)
        az[size_t(var)] = uint8_t(e);
      else
        ab[size_t(var - layout.mc)] = uint8_t(e);
      rec(var + 1, left - e);
    }
    if (var < layout.mc)
      az[size_t(var)] = 0;
    else
      ab[size_t(var - layout.mc)] = 0;
  };
  rec(0, degree);
  a.C = MatrixXcd::Zero(long(a.basis.size()), n);
  return a;
}

namespace {

// per-node data reused across the energy/gradient assembly
struct NodeGeom {
  double w;           // quadrature weight
  double hinv;        // h^{1 1bar} (the S^3 case has m = 1)
  VectorXcd phi;      // basis values at the node
  VectorXcd psi;      // Z_1bar basis values at the node
};

std::vector<NodeGeom> node_geometry(const MapAnsatz& a, const PseudoHermitianModel& M,
                                    const QuadratureRule& rule, bool parallel) {
  if (M.m != 1) throw UnsupportedError("the coefficient flow is implemented for m = 1 sources");
  const int nb = int(a.basis.size());
  // basis monomials as polynomials, with their zbar-frame derivatives exact
  std::vector<Poly> mono;
  mono.reserve(size_t(nb));
  for (const Monomial& mn : a.basis)
    mono.push_back(Poly::monomial(a.layout.mc, cxd(1), mn.az, mn.ab));
  std::vector<std::vector<Poly>> mono_dzb(static_cast<size_t>(nb));
  for (int k = 0; k < nb; ++k) {
    mono_dzb[size_t(k)].reserve(size_t(a.layout.mc));
    for (int c = 0; c < a.layout.mc; ++c) mono_dzb[size_t(k)].push_back(mono[size_t(k)].dzb(c));
  }
  return parallel_map<NodeGeom>(
      rule.pts.size(),
      [&](size_t i) {
        const Point& p = rule.pts[i];
        NodeGeom g;
        g.w = rule.w[long(i)];
        const MatrixXcd h = M.levi(p);
        g.hinv = 1.0 / h(0, 0).real();
        const CVec zb = M.basis(p, 1);  // Z_1bar
        const VectorXcd z = ambient_z(a.layout, p);
        g.phi.resize(nb);
        g.psi.resize(nb);
        for (int k = 0; k < nb; ++k) {
          g.phi[k] = mono[size_t(k)].eval(z, 0.0);
          cxd d(0);
          for (int c = 0; c < a.layout.mc; ++c)
            d += zb.dzb[c] * mono_dzb[size_t(k)][size_t(c)].eval(z, 0.0);
          g.psi[k] = d;
        }
        return g;
      },
      parallel);
}

}  // namespace

EnergyGrad discrete_energy_and_gradient(const MapAnsatz& a, const PseudoHermitianModel& M,
                                        const KahlerTarget& N, const QuadratureRule& rule,
                                        bool parallel) {
  const std::vector<NodeGeom> geom = node_geometry(a, M, rule, parallel);
  const int nb = int(a.basis.size()), n = a.n;

  struct Contrib {
    double E;
    MatrixXcd G;
    Contrib operator+(const Contrib& o) const { return {E + o.E, G + o.G}; }
  };
  Contrib zero{0.0, MatrixXcd::Zero(nb, n)};
  std::vector<Contrib> rows = parallel_map<Contrib>(
      rule.pts.size(),
      [&](size_t i) {
        const NodeGeom& g = geom[i];
        VectorXcd w(n), u(n);  // image point and u = f_{1bar}
        for (int al = 0; al < n; ++al) {
          w[al] = (a.C.col(al).transpose() * g.phi)(0, 0);
          u[al] = (a.C.col(al).transpose() * g.psi)(0, 0);
        }
        if (w.norm() > a.rho_max + 1e-12)
          throw DomainError("ansatz leaves the ball cap at node " + std::to_string(i));
        const MatrixXcd met = N.metric(w);
        const std::vector<MatrixXcd> dg = N.dmetric(w);
        cxd e(0);
        for (int al = 0; al < n; ++al)
          for (int be = 0; be < n; ++be) e += met(al, be) * u[al] * std::conj(u[be]);
        Contrib c{g.w * g.hinv * e.real(), MatrixXcd::Zero(nb, n)};
        // dE/d conj(C[k][al]) = w hinv [ (sum_a g_{a albar} u_a) conj(psi_k)
        //   + conj(phi_k) sum_{a b} conj(dg[al](b, a)) u_a conj(u_b) ]
        // using d g_{a bbar} / d zbar_al = conj(d g_{b abar} / d z_al)
        VectorXcd gu = VectorXcd::Zero(n);
        for (int al = 0; al < n; ++al)
          for (int aa = 0; aa < n; ++aa) gu[al] += met(aa, al) * u[aa];
        VectorXcd dgu = VectorXcd::Zero(n);
        for (int al = 0; al < n; ++al) {
          cxd s(0);
          for (int aa = 0; aa < n; ++aa)
            for (int bb = 0; bb < n; ++bb)
              s += std::conj(dg[al](bb, aa)) * u[aa] * std::conj(u[bb]);
          dgu[al] = s;
        }
        for (int k = 0; k < nb; ++k)
          for (int al = 0; al < n; ++al)
            c.G(k, al) = g.w * g.hinv *
                         (gu[al] * std::conj(g.psi[k]) + dgu[al] * std::conj(g.phi[k]));
        return c;
      },
      parallel);

  Contrib total = chunked_reduce<Contrib>(
      rows.size(), [&](size_t i) { return rows[i]; }, zero, false);
  return {total.E, total.G};
}

double gradient_fd_relative_error(const MapAnsatz& a, const PseudoHermitianModel& M,
                                  const KahlerTarget& N, const QuadratureRule& rule,
                                  int directions, uint64_t seed) {
  EnergyGrad eg = discrete_energy_and_gradient(a, M, N, rule);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0;
  for (int d = 0; d < directions; ++d) {
    MatrixXcd dir(a.C.rows(), a.C.cols());
    for (long r = 0; r < dir.rows(); ++r)
      for (long c = 0; c < dir.cols(); ++c) dir(r, c) = cxd(g(rng), g(rng));
    dir /= dir.norm();
    const double h = 1e-5;
    auto eval = [&](double s) {
      MapAnsatz b = a;
      b.C = a.C + s * dir;
      return discrete_energy_and_gradient(b, M, N, rule).E;
    };
    const double fd = (eval(h) - eval(-h)) / (2.0 * h);
    // dE along C -> C + s dir equals 2 Re <grad, dir>
    const double an = 2.0 * (eg.grad.array() * dir.array().conjugate()).sum().real();
    worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(an)));
  }
  return worst;
}

FlowResult minimize(const MapAnsatz& start, const PseudoHermitianModel& M, const KahlerTarget& N,
                    const QuadratureRule& rule, const FlowSettings& settings) {
  FlowResult out;
  out.ansatz = start;
  FdSettings fd;

  auto node_diagnostics = [&](const MapAnsatz& a, double& tau_max, double& e_max) {
    tau_max = 0;
    e_max = 0;
    if (!settings.track_tau) return;
    const SmoothMap f = a.to_map();
    // subsample the rule for the per-iteration diagnostics
    const size_t stride = std::max<size_t>(1, rule.pts.size() / 512);
    std::vector<size_t> idx;
    for (size_t i = 0; i < rule.pts.size(); i += stride) idx.push_back(i);
    struct TwoMax {
      double t, e;
      TwoMax operator+(const TwoMax& o) const { return {std::max(t, o.t), std::max(e, o.e)}; }
    };
    TwoMax r = chunked_reduce<TwoMax>(
        idx.size(),
        [&](size_t q) {
          GeomContext G = make_context(M, rule.pts[idx[q]], fd);
          SecondCov S = second_cov(G, N, f, false);
          const TargetPoint t = target_point(N, S.j1.f);
          const VectorXcd tau = tension(S, G);
          return TwoMax{tau.cwiseAbs().maxCoeff(), energy_density(S.j1, G, t)};
        },
        TwoMax{0, 0}, settings.parallel);
    tau_max = r.t;
    e_max = r.e;
  };

  EnergyGrad eg = discrete_energy_and_gradient(out.ansatz, M, N, rule, settings.parallel);
  double step = settings.initial_step;
  for (int it = 0; it < settings.max_iterations; ++it) {
    const double gnorm = eg.grad.norm();
    double tau_max = 0, e_max = 0;
    node_diagnostics(out.ansatz, tau_max, e_max);
    out.trace.push_back({it, eg.E, gnorm, tau_max, e_max, step});
    if (gnorm < settings.gtol) {
      out.converged = true;
      break;
    }
    // Armijo backtracking along -grad
    bool accepted = false;
    for (int half = 0; half <= settings.max_halvings; ++half) {
      MapAnsatz trial = out.ansatz;
      trial.C = out.ansatz.C - step * eg.grad;
      EnergyGrad trial_eg;
      try {
        trial_eg = discrete_energy_and_gradient(trial, M, N, rule, settings.parallel);
      } catch (const DomainError&) {
        step *= 0.5;  // ball-cap violation rejects the step
        continue;
      }
      const double decrease = 2.0 * settings.armijo * step * gnorm * gnorm;
      if (trial_eg.E <= eg.E - decrease + 1e-12 * std::abs(eg.E)) {
        out.ansatz = trial;
        eg = trial_eg;
        accepted = true;
        step = std::min(step * 2.0, settings.initial_step);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.stalled = true;
      break;
    }
  }
  if (!out.trace.empty()) {
    double tau_max = 0, e_max = 0;
    node_diagnostics(out.ansatz, tau_max, e_max);
    out.trace.push_back({int(out.trace.size()), eg.E, eg.grad.norm(), tau_max, e_max, step});
  }
  return out;
}

void save_trace_csv(const std::vector<FlowTraceRow>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open trace file for writing: " + path);
  out.precision(17);
  out << "iteration,E,grad_norm,tau_max,e_max,step\n";
  for (const auto& r : trace)
    out << r.iteration << "," << r.E << "," << r.grad_norm << "," << r.tau_max << "," << r.e_max
        << "," << r.step << "\n";
}

}  // namespace crlab
