#include "crlab/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace crlab {

using nlohmann::json;

json to_json(const VerificationReport& r) {
  json j;
  j["identity"] = r.identity;
  j["points"] = r.point_count;
  j["max_residual"] = r.max_residual;
  j["mean_residual"] = r.mean_residual;
  j["p50"] = r.p50;
  j["p90"] = r.p90;
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  if (r.skipped) j["skipped"] = true;
  if (!r.note.empty()) j["note"] = r.note;
  if (r.raw_step > 0) {
    j["raw_residual_step"] = r.raw_step;
    j["raw_residual_half_step"] = r.raw_half_step;
  }
  if (r.worst_point.x.size()) {
    j["worst_point"]["chart"] = r.worst_point.chart;
    j["worst_point"]["x"] = std::vector<double>(r.worst_point.x.data(),
                                                r.worst_point.x.data() + r.worst_point.x.size());
    j["worst_point"]["residual"] = r.max_residual;
  }
  return j;
}

json to_json(const NegativityVerdict& v) {
  json j;
  j["kind"] = to_string(v.kind);
  j["worst_value"] = v.worst_value;
  j["trials"] = v.trials;
  return j;
}

json to_json(const SiuResiduals& s) {
  json j;
  j["identity1"]["lhs_re"] = s.lhs1_re;
  j["identity1"]["lhs_im"] = s.lhs1_im;
  j["identity1"]["rhs"] = s.rhs1;
  j["identity1"]["residual"] = s.res1;
  j["identity1"]["stderr"] = s.stderr1;
  j["identity2"]["lhs_re"] = s.lhs2.real();
  j["identity2"]["lhs_im"] = s.lhs2.imag();
  j["identity2"]["rhs_re"] = s.rhs2.real();
  j["identity2"]["rhs_im"] = s.rhs2.imag();
  j["identity2"]["residual"] = s.res2;
  j["identity2"]["stderr"] = s.stderr2;
  j["pair_integral"] = s.pair_value;
  return j;
}

json to_json(const PositivityResult& p) {
  json j;
  j["pair_integral"] = p.value;
  j["pair_integral_imag"] = p.imag_value;
  j["stderr"] = p.stderr_;
  j["gate"] = p.gate;
  j["nonpositive"] = p.nonpositive;
  j["equality"] = p.equality;
  j["cr_pluriharmonic"] = p.cr_pluriharmonic;
  j["target_verdict"] = to_string(p.target_verdict);
  return j;
}

json to_json(const FlowResult& f) {
  json j;
  j["converged"] = f.converged;
  j["stalled"] = f.stalled;
  j["iterations"] = f.trace.empty() ? 0 : f.trace.back().iteration;
  if (!f.trace.empty()) {
    j["initial_energy"] = f.trace.front().E;
    j["final_energy"] = f.trace.back().E;
    j["final_grad_norm"] = f.trace.back().grad_norm;
    j["final_tau_max"] = f.trace.back().tau_max;
  }
  json coeffs = json::array();
  for (long r = 0; r < f.ansatz.C.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < f.ansatz.C.cols(); ++c)
      row.push_back({f.ansatz.C(r, c).real(), f.ansatz.C(r, c).imag()});
    coeffs.push_back(row);
  }
  j["coefficients"] = coeffs;
  return j;
}

void print_report_table(std::ostream& os, const std::vector<VerificationReport>& reports) {
  os << std::left << std::setw(36) << "identity" << std::right << std::setw(7) << "points"
     << std::setw(12) << "max" << std::setw(12) << "mean" << std::setw(12) << "p90"
     << std::setw(10) << "tol" << std::setw(9) << "result" << "\n";
  for (const auto& r : reports) {
    os << std::left << std::setw(36) << r.identity << std::right << std::setw(7) << r.point_count
       << std::setw(12) << std::scientific << std::setprecision(2) << r.max_residual
       << std::setw(12) << r.mean_residual << std::setw(12) << r.p90 << std::setw(10)
       << std::setprecision(0) << r.tol << std::setw(9)
       << (r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL")) << "\n";
  }
  os.unsetf(std::ios::floatfield);
  os << std::setprecision(6);
}

void write_json_report(const std::string& dir, const std::string& name, const json& doc) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name + ".json";
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace crlab
