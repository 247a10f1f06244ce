#include "crlab/config.hpp"

#include <fstream>

namespace crlab {

using nlohmann::json;

namespace {

template <class T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Poly poly_from_json(const json& j, int mc) {
  // list of terms: {"re":.., "im":.., "az":[..], "ab":[..], "at":0}
  Poly q(mc);
  for (const auto& term : j) {
    std::vector<uint8_t> az(size_t(mc), 0), ab(size_t(mc), 0);
    if (term.contains("az"))
      for (size_t a = 0; a < term["az"].size() && a < size_t(mc); ++a)
        az[a] = term["az"][a].get<uint8_t>();
    if (term.contains("ab"))
      for (size_t a = 0; a < term["ab"].size() && a < size_t(mc); ++a)
        ab[a] = term["ab"][a].get<uint8_t>();
    const cxd c(term.value("re", 0.0), term.value("im", 0.0));
    q = q + Poly::monomial(mc, c, az, ab, term.value("at", uint8_t(0)));
  }
  return q;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  if (j.contains("model")) {
    const json& m = j["model"];
    maybe(m, "name", c.model_name);
    if (!m.contains("m")) throw ConfigError("config: model.m is required");
    c.m = m["m"].get<int>();
    if (m.contains("sigma")) {
      maybe(m["sigma"], "name", c.sigma_name);
      maybe(m["sigma"], "amp", c.sigma_amp);
    }
  } else {
    throw ConfigError("config: missing model section");
  }
  if (!j.contains("target") || !j["target"].contains("n"))
    throw ConfigError("config: target.n is required");
  maybe(j["target"], "name", c.target_name);
  c.n = j["target"]["n"].get<int>();

  if (j.contains("map")) {
    const json& m = j["map"];
    maybe(m, "name", c.map.name);
    maybe(m, "r", c.map.r);
    maybe(m, "eps", c.map.eps);
    maybe(m, "scale", c.map.scale);
    maybe(m, "seed", c.map.seed);
    maybe(m, "degree", c.map.degree);
    if (c.map.name == "custom") {
      if (!m.contains("components")) throw ConfigError("config: custom map needs components");
      const int mc = c.model_name == "heisenberg" ? c.m : c.m + 1;
      for (const auto& comp : m["components"]) c.map.custom.push_back(poly_from_json(comp, mc));
    }
  } else {
    c.map.name = "perturbed-cr";
  }

  if (j.contains("rule")) {
    maybe(j["rule"], "kind", c.rule_kind);
    maybe(j["rule"], "resolution", c.resolution);
    if (j["rule"].contains("seed")) c.seed = j["rule"]["seed"].get<uint64_t>();
  }
  maybe(j, "tol", c.tol);
  maybe(j, "points", c.points);
  maybe(j, "trials", c.trials);
  maybe(j, "order_k", c.order_k);
  maybe(j, "out", c.out_dir);
  maybe(j, "format", c.format);
  if (j.contains("flow")) {
    const json& f = j["flow"];
    maybe(f, "degree", c.flow_degree);
    maybe(f, "gtol", c.flow.gtol);
    maybe(f, "max_iterations", c.flow.max_iterations);
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

json ExperimentConfig::resolved() const {
  json j;
  j["model"]["name"] = model_name;
  j["model"]["m"] = m;
  j["model"]["sigma"]["name"] = sigma_name;
  j["model"]["sigma"]["amp"] = sigma_amp;
  j["target"]["name"] = target_name;
  j["target"]["n"] = n;
  j["map"]["name"] = map.name;
  j["map"]["r"] = map.r;
  j["map"]["eps"] = map.eps;
  j["map"]["scale"] = map.scale;
  j["map"]["seed"] = map.seed;
  j["map"]["degree"] = map.degree;
  j["rule"]["kind"] = rule_kind;
  j["rule"]["resolution"] = resolution;
  j["rule"]["seed"] = seed;
  j["tol"] = tol;
  j["points"] = points;
  j["trials"] = trials;
  j["order_k"] = order_k;
  j["flow"]["degree"] = flow_degree;
  j["flow"]["gtol"] = flow.gtol;
  j["flow"]["max_iterations"] = flow.max_iterations;
  j["out"] = out_dir;
  j["format"] = format;
  return j;
}

ConformalFactor make_sigma(const std::string& name, double amp, const AmbientLayout& L) {
  const int mc = L.mc;
  if (name == "zero") return ConformalFactor::zero(L);
  if (name == "constant") return ConformalFactor::constant(L, amp);
  if (name == "re-z1-zb2") {
    if (mc < 2) throw ConfigError("re-z1-zb2 needs at least two complex coordinates");
    return ConformalFactor::make(L, Poly::coordinate(mc, 0) * Poly::coordinate_bar(mc, 1) * cxd(amp),
                                 name);
  }
  if (name == "im-z1-zb2") {
    if (mc < 2) throw ConfigError("im-z1-zb2 needs at least two complex coordinates");
    return ConformalFactor::make(
        L, Poly::coordinate(mc, 0) * Poly::coordinate_bar(mc, 1) * cxd(0.0, -amp), name);
  }
  if (name == "quadratic-mix") {
    Poly q = Poly::coordinate(mc, 0) * Poly::coordinate(mc, 0) * cxd(0.5 * amp);
    if (mc >= 2) q = q + Poly::coordinate(mc, 1) * Poly::coordinate_bar(mc, 0) * cxd(0.0, 0.7 * amp);
    q = q + Poly::coordinate(mc, 0) * cxd(0.3 * amp);
    return ConformalFactor::make(L, q, name);
  }
  throw ConfigError("unknown conformal factor: " + name);
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  Experiment e;
  e.cfg = cfg;
  if (cfg.model_name == "heisenberg") {
    e.model = make_heisenberg(cfg.m);
  } else if (cfg.model_name == "sphere") {
    e.model = make_sphere(cfg.m);
  } else if (cfg.model_name == "sphere-conformal") {
    auto base = make_sphere(cfg.m);
    e.model = conformal_change(base, make_sigma(cfg.sigma_name, cfg.sigma_amp, base->layout));
  } else {
    throw ConfigError("unknown model: " + cfg.model_name);
  }

  if (cfg.target_name == "flat")
    e.target = make_flat(cfg.n);
  else if (cfg.target_name == "bergman-ball")
    e.target = make_bergman_ball(cfg.n);
  else
    throw ConfigError("unknown target: " + cfg.target_name);

  e.map = make_map(cfg.map, e.model->layout, cfg.n);
  return e;
}

}  // namespace crlab
