// Experiment configuration: a JSON file selecting the model, target, map,
// quadrature rule and tolerances, with command-line overrides.
#pragma once

#include "json.hpp"

#include "crlab/flow.hpp"
#include "crlab/jets.hpp"

namespace crlab {

struct ExperimentConfig {
  // model
  std::string model_name = "sphere";  // heisenberg | sphere | sphere-conformal
  int m = 1;
  std::string sigma_name = "zero";  // zero | constant | re-z1-zb2 | im-z1-zb2 | quadratic-mix
  double sigma_amp = 1.0;
  // target
  std::string target_name = "bergman-ball";  // flat | bergman-ball
  int n = 2;
  // map
  MapSpec map;
  // rule
  std::string rule_kind = "product-deterministic";  // or monte-carlo
  int resolution = 24;
  uint64_t seed = 12345;
  // checks
  double tol = 1e-5;
  int points = 100;
  int trials = 10000;
  int order_k = 2;
  // flow
  int flow_degree = 2;
  FlowSettings flow;
  // output
  std::string out_dir = "reports";
  std::string format = "table";  // table | json | csv

  nlohmann::json resolved() const;  // full config echoed into reports
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

ConformalFactor make_sigma(const std::string& name, double amp, const AmbientLayout& L);

struct Experiment {
  ExperimentConfig cfg;
  ModelPtr model;
  TargetPtr target;
  SmoothMap map;
};
// builds the model/target/map triple and validates dimensions
Experiment build_experiment(const ExperimentConfig& cfg);

}  // namespace crlab
