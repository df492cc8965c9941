#include "hartogs/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <type_traits>

#include "hartogs/errors.hpp"
#include "hartogs/report.hpp"

namespace hartogs::cli {

using nlohmann::json;

namespace {

// Stream ids for the single-check subcommands; the witness stages use 1..5.
constexpr std::uint64_t kLemmaStream = 6;
constexpr std::uint64_t kMomentStream = 7;

struct Outcome {
  json doc;
  std::vector<report::Table> tables;
  bool pass = false;
};

domain::DomainParams make_domain(const RunConfig& c) {
  return {c.n1, c.n2, c.alpha, norms::parse_exponent(c.p1), norms::parse_exponent(c.p2)};
}

json header(const RunConfig& c, const domain::DomainParams& params, const forms::CutoffSpec& cutoff) {
  return {{"schema_version", report::kSchemaVersion},
          {"command", c.command},
          {"params", report::params_json(params, cutoff)},
          {"config",
           {{"nu", nu_values(c)},
            {"samples", c.samples},
            {"seed", c.seed},
            {"tolerances", report::tolerances_json(c.tol)}}}};
}

verify::GammaTable gamma_for(const RunConfig& c, const domain::DomainParams& params, const std::vector<int>& nus) {
  return verify::gamma_table(params.norm2(), nus, c.samples, verify::stage_stream(c.seed, verify::Stage::gamma),
                             c.tol);
}

Outcome run_gamma(const RunConfig& c, const domain::DomainParams& params, const forms::CutoffSpec& cutoff) {
  const auto nus = nu_values(c);
  const auto table = gamma_for(c, params, nus);
  const bool consistent =
      std::all_of(table.begin(), table.end(), [](const auto& kv) { return kv.second.consistent; });
  json doc = header(c, params, cutoff);
  doc["gamma"] = report::to_json(table);
  doc["verdicts"] = {{"gamma_consistent", consistent}};
  return {doc, {report::gamma_csv(table)}, consistent};
}

Outcome run_lemma1(const RunConfig& c, const domain::DomainParams& params, const forms::CutoffSpec& cutoff) {
  const sampling::RngStream rng{c.seed, kLemmaStream};
  std::vector<verify::Lemma1Report> reports;
  json rows = json::array();
  bool pass = true;
  for (int nu : nu_values(c)) {
    reports.push_back(verify::lemma1_check(params.norm2(), nu, c.betas, c.samples, rng.child(nu), c.tol));
    rows.push_back(report::to_json(reports.back()));
    pass = pass && reports.back().pass;
  }
  json doc = header(c, params, cutoff);
  doc["config"]["beta"] = c.betas;
  doc["lemma1"] = rows;
  doc["verdicts"] = {{"beta_invariant", pass}};
  return {doc, {report::lemma1_csv(reports)}, pass};
}

Outcome run_moments(const RunConfig& c, const domain::DomainParams& params, const forms::CutoffSpec& cutoff) {
  const auto nus = nu_values(c);
  const auto gamma = gamma_for(c, params, nus);
  const sampling::RngStream rng{c.seed, kMomentStream};
  std::vector<verify::MomentReport> reports;
  json rows = json::array();
  bool pass = true;
  for (int nu : nus) {
    reports.push_back(verify::weighted_moment_check(params, nu, gamma.at(nu).ball, c.samples, rng, c.tol));
    rows.push_back(report::to_json(reports.back()));
    pass = pass && reports.back().pass;
  }
  json doc = header(c, params, cutoff);
  doc["moments"] = rows;
  doc["verdicts"] = {{"closed_form_agreement", pass}};
  return {doc, {report::moments_csv(reports)}, pass};
}

Outcome run_constants(const RunConfig& c, const domain::DomainParams& params, const forms::CutoffSpec& cutoff) {
  const auto k = verify::estimate_constants(params, cutoff, c.samples,
                                            verify::stage_stream(c.seed, verify::Stage::constants));
  const bool sane = k.K1 > 0.0 && std::isfinite(k.K1) && k.K2 > 0.0 && std::isfinite(k.K2) && k.I_chi > 0.0 &&
                    k.I_chi <= k.volume1;
  json doc = header(c, params, cutoff);
  doc["constants"] = report::to_json(k);
  doc["verdicts"] = {{"constants_finite", sane}};
  return {doc, {report::constants_csv(k)}, sane};
}

Outcome run_norms(const RunConfig& c, const domain::DomainParams& params, const forms::CutoffSpec& cutoff) {
  const auto nus = nu_values(c);
  const auto gamma = gamma_for(c, params, nus);
  const auto k = verify::estimate_constants(params, cutoff, c.samples,
                                            verify::stage_stream(c.seed, verify::Stage::constants));
  const auto u = verify::u_norm_sweep(params, cutoff, gamma, nus, k.I_chi, c.samples,
                                      verify::stage_stream(c.seed, verify::Stage::u_norm), c.tol);
  const auto graph = verify::graph_norm_sweep(params, cutoff, gamma, nus, k.K2, c.samples,
                                              verify::stage_stream(c.seed, verify::Stage::graph), c.tol);

  const bool agree = std::all_of(u.begin(), u.end(), [](const auto& r) { return r.pass; });
  bool increasing = true;
  for (std::size_t i = 1; i < u.size(); ++i) increasing = increasing && u[i].closed_form > u[i - 1].closed_form;

  json doc = header(c, params, cutoff);
  doc["constants"] = report::to_json(k);
  doc["gamma"] = report::to_json(gamma);
  json per_nu = json::array();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& g = graph.records[i];
    per_nu.push_back({{"nu", u[i].nu},
                      {"u_norm_sq", report::to_json(u[i].estimate)},
                      {"closed_form", u[i].closed_form},
                      {"relative", u[i].relative},
                      {"dbar_norm_sq", report::to_json(g.dbar_sq)},
                      {"theta_norm_sq", report::to_json(g.theta_sq)},
                      {"graph_norm", g.graph_norm},
                      {"bound", g.bound},
                      {"within_bound", g.within_bound}});
  }
  doc["per_nu"] = per_nu;
  doc["c_squared"] = graph.c_squared;
  doc["graph_uniform_bound"] = graph.uniform_bound;

  json verdicts = {{"u_norm_closed_form", agree}, {"u_norm_increasing", increasing}, {"graph_norm_bounded", graph.bounded}};
  bool pass = agree && increasing && graph.bounded;
  if (nus.back() > c.growth_reference && nus.front() <= c.growth_reference) {
    const double ratio = verify::growth_ratio(graph, c.growth_reference);
    doc["growth_ratio"] = ratio;
    const bool flat = ratio <= 1.0 + c.tol.growth_slack;
    verdicts["graph_norm_growth"] = flat;
    pass = pass && flat;
  }
  doc["verdicts"] = verdicts;
  return {doc, {report::per_nu_csv(u, graph), report::gamma_csv(gamma)}, pass};
}

Outcome run_gram(const RunConfig& c, const domain::DomainParams& params, const forms::CutoffSpec& cutoff) {
  const auto nus = nu_values(c);
  const auto gamma = gamma_for(c, params, nus);
  const double lambda = verify::lambda_bound(params, nus, verify::chi_mass(cutoff, params.norm1()));
  const auto gram = verify::gram_check(params, cutoff, gamma, nus, lambda, c.samples,
                                       verify::stage_stream(c.seed, verify::Stage::gram), c.tol);
  json doc = header(c, params, cutoff);
  doc["gram"] = report::to_json(gram);
  doc["verdicts"] = {{"offdiag_zero", gram.offdiag_zero}, {"separation", gram.separated}};
  return {doc, {report::gram_csv(gram)}, gram.offdiag_zero && gram.separated};
}

Outcome run_witness(const RunConfig& c, const domain::DomainParams& params, const forms::CutoffSpec& cutoff) {
  verify::WitnessConfig wc{nu_values(c), c.samples, c.seed, c.tol};
  const auto r = verify::witness_report(params, cutoff, wc);
  return {report::to_json(r),
          {report::per_nu_csv(r.u_norms, r.graph), report::gamma_csv(r.gamma), report::gram_csv(r.gram)},
          r.complete && r.verdicts.witnessed()};
}

Outcome dispatch(const RunConfig& c) {
  const auto params = make_domain(c);
  const forms::CutoffSpec cutoff(c.a, c.b);
  if (c.command == "gamma") return run_gamma(c, params, cutoff);
  if (c.command == "lemma1") return run_lemma1(c, params, cutoff);
  if (c.command == "moments") return run_moments(c, params, cutoff);
  if (c.command == "constants") return run_constants(c, params, cutoff);
  if (c.command == "norms") return run_norms(c, params, cutoff);
  if (c.command == "gram") return run_gram(c, params, cutoff);
  if (c.command == "witness") return run_witness(c, params, cutoff);
  throw UsageError("command: unknown subcommand '" + c.command + "'");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("output: cannot open '" + path.string() + "'");
  file << text;
}

void emit(const RunConfig& c, const Outcome& outcome, std::ostream& out) {
  if (c.format == "json") {
    const std::string text = outcome.doc.dump(2) + "\n";
    if (c.output.empty()) {
      out << text;
    } else {
      write_file(c.output, text);
    }
    return;
  }
  if (c.output.empty()) {
    for (const auto& t : outcome.tables) out << "# " << t.name << '\n' << report::to_csv(t);
    return;
  }
  // First table at the given path, the rest beside it as <stem>.<table>.csv.
  const std::filesystem::path primary(c.output);
  for (std::size_t i = 0; i < outcome.tables.size(); ++i) {
    const auto& t = outcome.tables[i];
    auto path = primary;
    if (i > 0) path.replace_filename(primary.stem().string() + "." + t.name + ".csv");
    write_file(path, report::to_csv(t));
  }
}

std::string toml_string(const std::string& s) { return nlohmann::json(s).dump(); }

template <class T>
std::string toml_array(const std::vector<T>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += report::format_number(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out + "]";
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

}  // namespace

std::string dump_config(const RunConfig& c) {
  std::ostringstream out;
  out << "n1 = " << c.n1 << '\n'
      << "n2 = " << c.n2 << '\n'
      << "alpha = " << report::format_number(c.alpha) << '\n'
      << "p1 = " << toml_string(c.p1) << '\n'
      << "p2 = " << toml_string(c.p2) << '\n'
      << "a = " << report::format_number(c.a) << '\n'
      << "b = " << report::format_number(c.b) << '\n'
      << "nu-min = " << c.nu_min << '\n'
      << "nu-max = " << c.nu_max << '\n';
  if (!c.nus.empty()) out << "nu = " << toml_array(c.nus) << '\n';
  out << "beta = " << toml_array(c.betas) << '\n'
      << "samples = " << c.samples << '\n'
      << "seed = " << c.seed << '\n'
      << "growth-reference = " << c.growth_reference << '\n'
      << "z-threshold = " << report::format_number(c.tol.z_threshold) << '\n'
      << "relative-tol = " << report::format_number(c.tol.relative) << '\n'
      << "lemma-tol = " << report::format_number(c.tol.lemma_relative) << '\n'
      << "separation-slack = " << report::format_number(c.tol.separation_slack) << '\n'
      << "growth-slack = " << report::format_number(c.tol.growth_slack) << '\n'
      << "format = " << toml_string(c.format) << '\n';
  if (!c.output.empty()) out << "output = " << toml_string(c.output) << '\n';
  return out.str();
}

std::vector<int> nu_values(const RunConfig& config) {
  if (!config.nus.empty()) {
    auto nus = config.nus;
    std::sort(nus.begin(), nus.end());
    nus.erase(std::unique(nus.begin(), nus.end()), nus.end());
    return nus;
  }
  std::vector<int> nus;
  for (int nu = config.nu_min; nu <= config.nu_max; ++nu) nus.push_back(nu);
  return nus;
}

void validate(const RunConfig& c) {
  require(c.n1 >= 1, "n1: must be >= 1");
  require(c.n2 >= 1, "n2: must be >= 1");
  require(c.alpha > 0.0 && std::isfinite(c.alpha), "alpha: must be positive and finite");
  for (const auto& [name, text] : {std::pair{"p1", c.p1}, std::pair{"p2", c.p2}}) {
    try {
      norms::parse_exponent(text);
    } catch (const UsageError& e) {
      throw UsageError(std::string(name) + ": " + e.what());
    }
  }
  require(c.a > 0.0, "a: must be > 0");
  require(c.b < 1.0, "b: must be < 1");
  require(c.a < c.b, "a: must be < b (got a >= b)");
  require(c.nu_min >= 1, "nu_min: must be >= 1");
  require(c.nu_max >= c.nu_min, "nu_max: must be >= nu_min");
  for (int nu : c.nus) require(nu >= 1, "nu: every entry must be >= 1");
  for (double beta : c.betas) require(beta >= 0.0 && std::isfinite(beta), "beta: every entry must be >= 0");
  require(!c.betas.empty(), "beta: list is empty");
  require(c.samples >= 2, "samples: must be >= 2");
  require(c.growth_reference >= 1, "growth_reference: must be >= 1");
  require(c.tol.z_threshold > 0.0, "z_threshold: must be > 0");
  require(c.tol.relative > 0.0, "relative_tol: must be > 0");
  require(c.tol.lemma_relative > 0.0, "lemma_tol: must be > 0");
  require(c.tol.separation_slack >= 0.0 && c.tol.separation_slack < 1.0, "separation_slack: must be in [0, 1)");
  require(c.tol.growth_slack >= 0.0, "growth_slack: must be >= 0");
  require(c.format == "json" || c.format == "csv", "format: must be json or csv");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string dump_path;
  CLI::App app{"Monte Carlo checks of witness forms on generalized Hartogs triangles",
               "hartogs_witness"};
  app.set_config("--config", "", "TOML file with flag values; flags on the command line win");
  app.require_subcommand(1);

  app.add_option("--n1", c.n1, "Dimension of the inner block")->capture_default_str();
  app.add_option("--n2", c.n2, "Dimension of the outer block")->capture_default_str();
  app.add_option("--alpha", c.alpha, "Exponent on the outer norm")->capture_default_str();
  app.add_option("--p1", c.p1, "Inner norm exponent (real >= 1 or inf)")->capture_default_str();
  app.add_option("--p2", c.p2, "Outer norm exponent (real >= 1 or inf)")->capture_default_str();
  app.add_option("--a", c.a, "Cutoff plateau end")->capture_default_str();
  app.add_option("--b", c.b, "Cutoff support end")->capture_default_str();
  app.add_option("--nu-min", c.nu_min, "Smallest nu")->capture_default_str();
  app.add_option("--nu-max", c.nu_max, "Largest nu")->capture_default_str();
  app.add_option("--nu", c.nus, "Explicit nu list, overrides the range")->delimiter(',');
  app.add_option("--beta", c.betas, "Radial exponents for lemma1")->delimiter(',')->capture_default_str();
  app.add_option("--samples", c.samples, "Monte Carlo samples per estimate")->capture_default_str();
  app.add_option("--seed", c.seed, "Root seed")->capture_default_str();
  app.add_option("--growth-reference", c.growth_reference, "Reference nu for the graph-norm growth ratio")
      ->capture_default_str();
  app.add_option("--z-threshold", c.tol.z_threshold, "Standard errors allowed in agreement tests")
      ->capture_default_str();
  app.add_option("--relative-tol", c.tol.relative, "Relative tolerance against closed forms")->capture_default_str();
  app.add_option("--lemma-tol", c.tol.lemma_relative, "Relative tolerance for lemma1")->capture_default_str();
  app.add_option("--separation-slack", c.tol.separation_slack, "Slack on the separation threshold")
      ->capture_default_str();
  app.add_option("--growth-slack", c.tol.growth_slack, "Slack on the graph-norm growth ratio")->capture_default_str();
  app.add_option("--format", c.format, "json or csv")->capture_default_str();
  app.add_option("--output", c.output, "Output path (default stdout)");
  app.add_option("--dump-config", dump_path, "Write the effective configuration as TOML")->configurable(false);

  for (const auto& [name, help] :
       {std::pair{"gamma", "gamma(nu) by ball and boundary estimators"},
        std::pair{"lemma1", "beta-invariance of the rescaled radial moments"},
        std::pair{"moments", "weighted |z_n|^(2nu) moment over H against its closed form"},
        std::pair{"norms", "L2 norms and graph norms of the witness forms"},
        std::pair{"gram", "Gram matrix of the witness forms"},
        std::pair{"witness", "full pipeline with verdicts"},
        std::pair{"constants", "K1, K2 and the cutoff mass"}}) {
    app.add_subcommand(name, help)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    validate(c);
    if (!dump_path.empty()) write_file(dump_path, dump_config(c));
    const Outcome outcome = dispatch(c);
    emit(c, outcome, out);
    return outcome.pass ? kExitPass : kExitVerdictFailure;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DiagnosticError& e) {
    err << "diagnostic: " << e.what() << '\n';
    return kExitVerdictFailure;
  }
}

}  // namespace hartogs::cli
