#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "hartogs/verify.hpp"

namespace hartogs::report {

/// Bumped whenever a field of the JSON documents changes meaning or name.
inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const ComplexEstimate& e);
/// 2 -> 2, inf -> "inf".
nlohmann::json exponent_json(const norms::NormSpec& norm);

nlohmann::json params_json(const domain::DomainParams& params, const forms::CutoffSpec& cutoff);
nlohmann::json tolerances_json(const verify::Tolerances& tol);

nlohmann::json to_json(const verify::GammaTable& table);
nlohmann::json to_json(const verify::Lemma1Report& report);
nlohmann::json to_json(const verify::MomentReport& report);
nlohmann::json to_json(const verify::ConstantsEstimate& c);
nlohmann::json to_json(const verify::GramReport& gram);

/// Witness document:
///   schema_version, params, config, gamma[], constants, lambda,
///   per_nu{nu[], u_norm_sq[], u_norm_sq_stderr[], closed_form[], dbar_norm_sq[], ...},
///   gram[[{re, im, stderr}]], separation, verdicts{...}, complete, failed_stage.
nlohmann::json to_json(const verify::WitnessReport& report);

/// A CSV table with a header row.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_number(double x);
std::string to_csv(const Table& table);

Table gamma_csv(const verify::GammaTable& table);
Table per_nu_csv(const std::vector<verify::UNormRecord>& u_norms, const verify::GraphSweep& graph);
Table gram_csv(const verify::GramReport& gram);
Table lemma1_csv(const std::vector<verify::Lemma1Report>& reports);
Table moments_csv(const std::vector<verify::MomentReport>& reports);
Table constants_csv(const verify::ConstantsEstimate& c);

}  // namespace hartogs::report
