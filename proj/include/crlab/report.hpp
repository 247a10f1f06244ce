// JSON report serialization and plain-text summary tables.
#pragma once

#include <iosfwd>

#include "json.hpp"

#include "crlab/flow.hpp"
#include "crlab/quadrature.hpp"
#include "crlab/verify.hpp"

namespace crlab {

nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const NegativityVerdict& v);
nlohmann::json to_json(const SiuResiduals& s);
nlohmann::json to_json(const PositivityResult& p);
nlohmann::json to_json(const FlowResult& f);

void print_report_table(std::ostream& os, const std::vector<VerificationReport>& reports);

// writes `doc` to <dir>/<name>.json; creates the directory when needed
void write_json_report(const std::string& dir, const std::string& name,
                       const nlohmann::json& doc);

}  // namespace crlab
