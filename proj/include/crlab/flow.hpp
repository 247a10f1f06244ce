// Energy descent over a finite family of maps S^3 -> Bergman ball: monomial
// ansatz, analytic coefficient gradient through the quadrature sum, and a
// backtracking line search.
#pragma once

#include "crlab/quadrature.hpp"

namespace crlab {

struct Monomial {
  std::vector<uint8_t> az, ab;  // exponents over the ambient complex coordinates
};

struct MapAnsatz {
  AmbientLayout layout;
  int n = 0;
  std::vector<Monomial> basis;
  MatrixXcd C;          // basis x n coefficients
  double rho_max = 0.9;  // hard cap on |f| at the nodes

  SmoothMap to_map() const;
  // largest |f| over the rule nodes
  double max_image_norm(const QuadratureRule& rule) const;
};

// monomial basis z^a zbar^b with |a| + |b| <= degree
MapAnsatz make_ansatz(const AmbientLayout& layout, int n, int degree, double rho_max = 0.9);

struct EnergyGrad {
  double E = 0;
  MatrixXcd grad;  // dE / d conj(C); descent direction is -grad
};
EnergyGrad discrete_energy_and_gradient(const MapAnsatz& a, const PseudoHermitianModel& M,
                                        const KahlerTarget& N, const QuadratureRule& rule,
                                        bool parallel = true);

// directional finite-difference check of the analytic gradient
double gradient_fd_relative_error(const MapAnsatz& a, const PseudoHermitianModel& M,
                                  const KahlerTarget& N, const QuadratureRule& rule,
                                  int directions, uint64_t seed = 4242);

struct FlowSettings {
  double gtol = 1e-8;
  double armijo = 1e-4;
  int max_iterations = 2000;
  int max_halvings = 60;
  double initial_step = 1.0;
  bool track_tau = true;
  bool parallel = true;
};

struct FlowTraceRow {
  int iteration = 0;
  double E = 0, grad_norm = 0, tau_max = 0, e_max = 0, step = 0;
};

struct FlowResult {
  MapAnsatz ansatz;
  std::vector<FlowTraceRow> trace;
  bool stalled = false;
  bool converged = false;
};

FlowResult minimize(const MapAnsatz& start, const PseudoHermitianModel& M, const KahlerTarget& N,
                    const QuadratureRule& rule, const FlowSettings& settings);

void save_trace_csv(const std::vector<FlowTraceRow>& trace, const std::string& path);

}  // namespace crlab
