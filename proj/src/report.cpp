#include "hartogs/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace hartogs::report {

using nlohmann::json;

json to_json(const Estimate& e) {
  return {{"value", e.value}, {"stderr", e.std_error}, {"n_samples", e.n_samples}, {"valid", e.valid}};
}

json to_json(const ComplexEstimate& e) {
  return {{"re", e.re.value}, {"im", e.im.value}, {"stderr", e.std_error()}};
}

json exponent_json(const norms::NormSpec& norm) {
  if (norm.is_max()) return "inf";
  return norm.p();
}

json params_json(const domain::DomainParams& params, const forms::CutoffSpec& cutoff) {
  return {{"n1", params.n1()},
          {"n2", params.n2()},
          {"alpha", params.alpha()},
          {"p1", exponent_json(params.norm1())},
          {"p2", exponent_json(params.norm2())},
          {"a", cutoff.a()},
          {"b", cutoff.b()}};
}

json tolerances_json(const verify::Tolerances& tol) {
  return {{"z_threshold", tol.z_threshold},
          {"relative", tol.relative},
          {"lemma_relative", tol.lemma_relative},
          {"separation_slack", tol.separation_slack},
          {"growth_slack", tol.growth_slack}};
}

json to_json(const verify::GammaTable& table) {
  json rows = json::array();
  for (const auto& [nu, entry] : table) {
    rows.push_back({{"nu", nu},
                    {"gamma_ball", to_json(entry.ball)},
                    {"gamma_surface", to_json(entry.surface)},
                    {"z", entry.z},
                    {"consistent", entry.consistent}});
  }
  return rows;
}

json to_json(const verify::Lemma1Report& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"beta", row.beta},
                    {"moment", to_json(row.moment)},
                    {"rescaled", to_json(row.rescaled)},
                    {"z_vs_gamma", row.z_vs_gamma},
                    {"relative_vs_gamma", row.relative_vs_gamma}});
  }
  return {{"nu", report.nu},
          {"n2", report.norm.k()},
          {"p2", exponent_json(report.norm)},
          {"gamma_ball", to_json(report.gamma_ball)},
          {"rows", rows},
          {"max_pairwise_z", report.max_pairwise_z},
          {"max_relative", report.max_relative},
          {"pass", report.pass}};
}

json to_json(const verify::MomentReport& report) {
  return {{"nu", report.nu},
          {"estimate", to_json(report.estimate)},
          {"closed_form", to_json(report.closed_form)},
          {"z", report.z},
          {"relative", report.relative},
          {"pass", report.pass}};
}

json to_json(const verify::ConstantsEstimate& c) {
  return {{"K1", c.K1}, {"K2", c.K2}, {"I_chi", c.I_chi}, {"volume1", c.volume1}};
}

json to_json(const verify::GramReport& gram) {
  json matrix = json::array();
  for (const auto& row : gram.matrix) {
    json out = json::array();
    for (const auto& g : row) out.push_back(to_json(g));
    matrix.push_back(out);
  }
  return {{"nu", gram.nus},
          {"matrix", matrix},
          {"max_offdiag_z", gram.max_offdiag_z},
          {"hermitian_defect", gram.hermitian_defect},
          {"lambda", gram.lambda},
          {"min_distance", gram.min_distance},
          {"closest_pair", {gram.closest.first, gram.closest.second}},
          {"offdiag_zero", gram.offdiag_zero},
          {"separated", gram.separated}};
}

json to_json(const verify::WitnessReport& report) {
  json per_nu = {{"nu", json::array()},
                 {"u_norm_sq", json::array()},
                 {"u_norm_sq_stderr", json::array()},
                 {"closed_form", json::array()},
                 {"u_norm_pass", json::array()},
                 {"dbar_norm_sq", json::array()},
                 {"dbar_norm_sq_stderr", json::array()},
                 {"theta_norm_sq", json::array()},
                 {"theta_norm_sq_stderr", json::array()},
                 {"graph_norm", json::array()},
                 {"bound", json::array()}};
  for (const auto& r : report.u_norms) {
    per_nu["nu"].push_back(r.nu);
    per_nu["u_norm_sq"].push_back(r.estimate.value);
    per_nu["u_norm_sq_stderr"].push_back(r.estimate.std_error);
    per_nu["closed_form"].push_back(r.closed_form);
    per_nu["u_norm_pass"].push_back(r.pass);
  }
  for (const auto& r : report.graph.records) {
    per_nu["dbar_norm_sq"].push_back(r.dbar_sq.value);
    per_nu["dbar_norm_sq_stderr"].push_back(r.dbar_sq.std_error);
    per_nu["theta_norm_sq"].push_back(r.theta_sq.value);
    per_nu["theta_norm_sq_stderr"].push_back(r.theta_sq.std_error);
    per_nu["graph_norm"].push_back(r.graph_norm);
    per_nu["bound"].push_back(r.bound);
  }
  json gram = json::array();
  for (const auto& row : report.gram.matrix) {
    json out = json::array();
    for (const auto& g : row) out.push_back(to_json(g));
    gram.push_back(out);
  }
  json doc = {
      {"schema_version", kSchemaVersion},
      {"command", "witness"},
      {"params", params_json(report.params, report.cutoff)},
      {"config",
       {{"nu", report.config.nus},
        {"samples", report.config.samples},
        {"seed", report.config.seed},
        {"tolerances", tolerances_json(report.config.tol)}}},
      {"gamma", to_json(report.gamma)},
      {"constants", to_json(report.constants)},
      {"lambda", report.lambda},
      {"per_nu", per_nu},
      {"graph_uniform_bound", report.graph.uniform_bound},
      {"gram", gram},
      {"gram_max_offdiag_z", report.gram.max_offdiag_z},
      {"separation", report.gram.min_distance},
      {"separation_threshold", std::sqrt(2.0) * report.lambda * (1.0 - report.config.tol.separation_slack)},
      {"verdicts",
       {{"graph_norm_bounded", report.verdicts.graph_bounded},
        {"l2_lower_bound", report.verdicts.l2_lower_bound},
        {"separation", report.verdicts.separated},
        {"noncompactness_witnessed", report.complete && report.verdicts.witnessed()}}},
      {"complete", report.complete},
      {"failed_stage", report.complete ? json(nullptr) : json(report.failed_stage)},
  };
  return doc;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out.str();
}

namespace {

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

Table gamma_csv(const verify::GammaTable& table) {
  Table t{"gamma", {"nu", "gamma_ball", "gamma_ball_stderr", "gamma_surface", "gamma_surface_stderr", "z", "consistent"}, {}};
  for (const auto& [nu, e] : table) {
    t.rows.push_back({std::to_string(nu), format_number(e.ball.value), format_number(e.ball.std_error),
                      format_number(e.surface.value), format_number(e.surface.std_error), format_number(e.z),
                      flag(e.consistent)});
  }
  return t;
}

Table per_nu_csv(const std::vector<verify::UNormRecord>& u_norms, const verify::GraphSweep& graph) {
  Table t{"per_nu",
          {"nu", "u_norm_sq", "u_norm_sq_stderr", "closed_form", "relative", "dbar_norm_sq", "dbar_norm_sq_stderr",
           "theta_norm_sq", "theta_norm_sq_stderr", "graph_norm", "bound"},
          {}};
  for (std::size_t i = 0; i < u_norms.size(); ++i) {
    const auto& u = u_norms[i];
    std::vector<std::string> row{std::to_string(u.nu), format_number(u.estimate.value),
                                 format_number(u.estimate.std_error), format_number(u.closed_form),
                                 format_number(u.relative)};
    if (i < graph.records.size()) {
      const auto& g = graph.records[i];
      for (double x : {g.dbar_sq.value, g.dbar_sq.std_error, g.theta_sq.value, g.theta_sq.std_error, g.graph_norm,
                       g.bound}) {
        row.push_back(format_number(x));
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table gram_csv(const verify::GramReport& gram) {
  Table t{"gram", {"mu", "nu", "re", "im", "stderr"}, {}};
  for (std::size_t i = 0; i < gram.nus.size(); ++i) {
    for (std::size_t j = 0; j < gram.nus.size(); ++j) {
      const auto& g = gram.matrix[i][j];
      t.rows.push_back({std::to_string(gram.nus[i]), std::to_string(gram.nus[j]), format_number(g.re.value),
                        format_number(g.im.value), format_number(g.std_error())});
    }
  }
  return t;
}

Table lemma1_csv(const std::vector<verify::Lemma1Report>& reports) {
  Table t{"lemma1", {"nu", "beta", "moment", "moment_stderr", "rescaled", "rescaled_stderr", "gamma_ball", "z", "relative"}, {}};
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      t.rows.push_back({std::to_string(r.nu), format_number(row.beta), format_number(row.moment.value),
                        format_number(row.moment.std_error), format_number(row.rescaled.value),
                        format_number(row.rescaled.std_error), format_number(r.gamma_ball.value),
                        format_number(row.z_vs_gamma), format_number(row.relative_vs_gamma)});
    }
  }
  return t;
}

Table moments_csv(const std::vector<verify::MomentReport>& reports) {
  Table t{"moments", {"nu", "estimate", "estimate_stderr", "closed_form", "closed_form_stderr", "z", "relative", "pass"}, {}};
  for (const auto& r : reports) {
    t.rows.push_back({std::to_string(r.nu), format_number(r.estimate.value), format_number(r.estimate.std_error),
                      format_number(r.closed_form.value), format_number(r.closed_form.std_error), format_number(r.z),
                      format_number(r.relative), flag(r.pass)});
  }
  return t;
}

Table constants_csv(const verify::ConstantsEstimate& c) {
  return {"constants",
          {"K1", "K2", "I_chi", "volume1"},
          {{format_number(c.K1), format_number(c.K2), format_number(c.I_chi), format_number(c.volume1)}}};
}

}  // namespace hartogs::report
