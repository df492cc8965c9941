#include "hartogs/verify.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "hartogs/errors.hpp"
#include "hartogs/sampling.hpp"

namespace hartogs::verify {

namespace {

constexpr double kQuadratureTolerance = 1e-10;

const GammaEntry& gamma_for(const GammaTable& table, int nu) {
  const auto it = table.find(nu);
  if (it == table.end()) throw UsageError("no gamma estimate for nu=" + std::to_string(nu));
  return it->second;
}

void check_nus(std::span<const int> nus) {
  if (nus.empty()) throw UsageError("nu list is empty");
  for (int nu : nus) {
    if (nu < 1) throw UsageError("nu must be >= 1, got " + std::to_string(nu));
  }
}

// |w_{n2}|^{2 nu} for every nu, written into out.
void fill_powers(double modulus_sq, std::span<const int> nus, std::span<double> out) {
  for (std::size_t i = 0; i < nus.size(); ++i) out[i] = std::pow(modulus_sq, nus[i]);
}

// nu / gamma_nu * x, propagating the error of gamma.
Estimate normalize(const Estimate& raw, int nu, const Estimate& gamma) { return quotient(scaled(raw, nu), gamma); }

}  // namespace

// ---------------------------------------------------------------------------

GammaTable gamma_table(const norms::NormSpec& norm2, std::span<const int> nus, std::uint64_t n_samples,
                       const sampling::RngStream& rng, const Tolerances& tol) {
  check_nus(nus);
  const std::vector<int> list(nus.begin(), nus.end());
  auto moments = [&list](const auto& sampler, std::uint64_t n, const sampling::RngStream& stream) {
    return sampling::mc_vector(n, stream, list.size(), sampler.mass(), [&] {
      return [&list, s = sampler, w = ComplexVector(sampler.dimension())](sampling::Philox4x32& engine,
                                                                          std::span<double> out) mutable {
        s.draw(engine, w);
        fill_powers(std::norm(w.back()), list, out);
        return true;
      };
    });
  };
  const auto ball = moments(sampling::BallSampler(norm2), n_samples, rng);
  const auto surface = moments(sampling::ConeSampler(norm2), n_samples, rng.child(1));

  GammaTable table;
  for (std::size_t i = 0; i < list.size(); ++i) {
    GammaEntry entry;
    entry.nu = list[i];
    entry.ball = scaled(ball[i], 2.0 * (list[i] + norm2.k()));
    entry.surface = surface[i];
    entry.z = z_score(entry.ball, entry.surface);
    entry.consistent = entry.ball.valid && entry.surface.valid && entry.ball.value > 0.0 && entry.z <= tol.z_threshold;
    table[entry.nu] = entry;
  }
  return table;
}

GammaEntry gamma_estimate(const norms::NormSpec& norm2, int nu, std::uint64_t n_samples,
                          const sampling::RngStream& rng, const Tolerances& tol) {
  const int nus[] = {nu};
  return gamma_table(norm2, nus, n_samples, rng, tol).at(nu);
}

// ---------------------------------------------------------------------------

Lemma1Report lemma1_check(const norms::NormSpec& norm2, int nu, std::span<const double> betas,
                          std::uint64_t n_samples, const sampling::RngStream& rng, const Tolerances& tol) {
  if (nu < 1) throw UsageError("lemma1: nu must be >= 1");
  if (betas.empty()) throw UsageError("lemma1: beta list is empty");
  for (double beta : betas) {
    if (!(beta >= 0.0)) throw UsageError("lemma1: beta must be >= 0");
  }
  const std::vector<double> exponents(betas.begin(), betas.end());
  const sampling::BallSampler sampler(norm2);
  // Component 0 is the beta = 0 moment that defines gamma_ball.
  const auto est = sampling::mc_vector(n_samples, rng, exponents.size() + 1, sampler.mass(), [&] {
    return [&, s = sampler, w = ComplexVector(sampler.dimension())](sampling::Philox4x32& engine,
                                                                    std::span<double> out) mutable {
      s.draw(engine, w);
      const double base = std::pow(std::norm(w.back()), nu);
      const double radius = norms::norm_eval(norm2, w);
      out[0] = base;
      for (std::size_t i = 0; i < exponents.size(); ++i) out[i + 1] = base * std::pow(radius, 2.0 * exponents[i]);
      return true;
    };
  });

  Lemma1Report report;
  report.nu = nu;
  report.norm = norm2;
  report.gamma_ball = scaled(est[0], 2.0 * (nu + norm2.k()));
  bool valid = report.gamma_ball.valid;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    Lemma1Row row;
    row.beta = exponents[i];
    row.moment = est[i + 1];
    row.rescaled = scaled(row.moment, 2.0 * (nu + row.beta + norm2.k()));
    row.z_vs_gamma = z_score(row.rescaled, report.gamma_ball);
    row.relative_vs_gamma = relative_deviation(row.rescaled.value, report.gamma_ball.value);
    report.max_relative = std::max(report.max_relative, row.relative_vs_gamma);
    valid = valid && row.rescaled.valid;
    report.rows.push_back(row);
  }
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    for (std::size_t j = i + 1; j < report.rows.size(); ++j) {
      report.max_pairwise_z =
          std::max(report.max_pairwise_z, z_score(report.rows[i].rescaled, report.rows[j].rescaled));
    }
  }
  report.pass = valid && report.max_pairwise_z <= tol.z_threshold && report.max_relative <= tol.lemma_relative;
  return report;
}

// ---------------------------------------------------------------------------

double weighted_moment_closed_form(const domain::DomainParams& params, int nu, double gamma) {
  const double denominator = 2.0 * (nu + params.alpha() * (params.n1() - 1) + params.n2());
  return norms::ball_volume(params.norm1()) * gamma / denominator;
}

MomentReport weighted_moment_check(const domain::DomainParams& params, int nu, const Estimate& gamma_ball,
                                   std::uint64_t n_samples, const sampling::RngStream& rng, const Tolerances& tol) {
  if (nu < 1) throw UsageError("moments: nu must be >= 1");
  MomentReport report;
  report.nu = nu;
  report.estimate = domain::integrate_H(
      params,
      [&params, nu](std::span<const Complex> z) {
        const double outer = norms::norm_eval(params.norm2(), params.tail(z));
        return std::pow(std::norm(z.back()), nu) / std::pow(outer, 2.0 * params.alpha());
      },
      n_samples, rng);
  report.closed_form = scaled(gamma_ball, weighted_moment_closed_form(params, nu, 1.0));
  report.z = z_score(report.estimate, report.closed_form);
  report.relative = relative_deviation(report.estimate.value, report.closed_form.value);
  report.pass = report.estimate.valid && report.closed_form.valid && report.z <= tol.z_threshold &&
                report.relative <= tol.relative;
  return report;
}

// ---------------------------------------------------------------------------

double chi_mass(const forms::CutoffSpec& cutoff, const norms::NormSpec& norm1) {
  using boost::math::quadrature::gauss_kronrod;
  const int two_k = 2 * norm1.k();
  // chi = 1 on [0, a] integrates in closed form; chi = 0 past b.
  const double plateau = std::pow(cutoff.a(), two_k) / two_k;
  double error = 0.0;
  const double shell = gauss_kronrod<double, 61>::integrate(
      [&](double r) {
        const double c = forms::chi(cutoff, r);
        return c * c * std::pow(r, two_k - 1);
      },
      cutoff.a(), cutoff.b(), 15, 1e-13, &error);
  if (!(error <= kQuadratureTolerance) || !std::isfinite(shell)) {
    throw ConfigError("chi_mass: quadrature did not reach absolute tolerance 1e-10 (error " + std::to_string(error) +
                      ")");
  }
  return two_k * norms::ball_volume(norm1) * (plateau + shell);
}

double max_gradient_norm(const norms::NormSpec& norm, std::uint64_t n_samples, const sampling::RngStream& rng) {
  const sampling::ConeSampler sampler(norm);
  const auto maxima = sampling::map_chunks<double>(
      n_samples, rng, [&](std::uint64_t, sampling::Philox4x32& engine, std::uint64_t count) {
        auto s = sampler;
        ComplexVector t(s.dimension());
        std::vector<double> grad(2 * t.size());
        double best = 0.0;
        for (std::uint64_t i = 0; i < count; ++i) {
          s.draw(engine, t);
          try {
            norms::norm_gradient(norm, as_real(std::span<const Complex>(t)), grad);
          } catch (const NotDifferentiable&) {
            continue;
          }
          double sq = 0.0;
          for (double g : grad) sq += g * g;
          best = std::max(best, std::sqrt(sq));
        }
        return best;
      });
  return *std::max_element(maxima.begin(), maxima.end());
}

double estimate_K2(const domain::DomainParams& params, const forms::CutoffSpec& cutoff, std::uint64_t n_samples,
                   const sampling::RngStream& rng) {
  const sampling::BallSampler first(params.norm1());
  const sampling::BallSampler second(params.norm2());
  const auto maxima = sampling::map_chunks<double>(
      n_samples, rng, [&](std::uint64_t, sampling::Philox4x32& engine, std::uint64_t count) {
        auto s1 = first;
        auto s2 = second;
        ComplexVector v(s1.dimension());
        ComplexVector w(s2.dimension());
        ComplexVector z(static_cast<std::size_t>(params.n()));
        std::vector<double> grad(2 * z.size());
        double best = 0.0;
        for (std::uint64_t i = 0; i < count; ++i) {
          s1.draw(engine, v);
          s2.draw(engine, w);
          const double outer = norms::norm_eval(params.norm2(), w);
          if (outer == 0.0) continue;
          domain::phi(params, v, w, z);
          const double r = forms::rho(params, z);
          if (r <= cutoff.a() || r >= cutoff.b()) continue;
          try {
            forms::cutoff_gradient(params, cutoff, z, grad);
          } catch (const NotDifferentiable&) {
            continue;
          }
          double sq = 0.0;
          for (double g : grad) sq += g * g;
          best = std::max(best, std::sqrt(sq) * std::pow(outer, params.alpha()));
        }
        return best;
      });
  return *std::max_element(maxima.begin(), maxima.end());
}

ConstantsEstimate estimate_constants(const domain::DomainParams& params, const forms::CutoffSpec& cutoff,
                                     std::uint64_t n_samples, const sampling::RngStream& rng) {
  ConstantsEstimate c;
  c.K1 = std::max(max_gradient_norm(params.norm1(), n_samples, rng.child(1)),
                  max_gradient_norm(params.norm2(), n_samples, rng.child(2)));
  c.K2 = estimate_K2(params, cutoff, n_samples, rng.child(3));
  c.I_chi = chi_mass(cutoff, params.norm1());
  c.volume1 = norms::ball_volume(params.norm1());
  return c;
}

// ---------------------------------------------------------------------------

double u_norm_closed_form(const domain::DomainParams& params, int nu, double I_chi) {
  return I_chi * nu / (2.0 * (nu + params.alpha() * params.n1() + params.n2()));
}

std::vector<UNormRecord> u_norm_sweep(const domain::DomainParams& params, const forms::CutoffSpec& cutoff,
                                      const GammaTable& gamma, std::span<const int> nus, double I_chi,
                                      std::uint64_t n_samples, const sampling::RngStream& rng,
                                      const Tolerances& tol) {
  check_nus(nus);
  const std::vector<int> list(nus.begin(), nus.end());
  const auto raw = domain::integrate_H_vector(params, list.size(), n_samples, rng, [&] {
    return [&](std::span<const Complex> z, std::span<double> out) {
      const double c = forms::chi(cutoff, forms::rho(params, z));
      fill_powers(std::norm(z.back()), list, out);
      for (double& x : out) x *= c * c;
      return true;
    };
  });
  std::vector<UNormRecord> records;
  for (std::size_t i = 0; i < list.size(); ++i) {
    UNormRecord r;
    r.nu = list[i];
    r.estimate = normalize(raw[i], r.nu, gamma_for(gamma, r.nu).ball);
    r.closed_form = u_norm_closed_form(params, r.nu, I_chi);
    r.z = z_score(r.estimate, r.closed_form);
    r.relative = relative_deviation(r.estimate.value, r.closed_form);
    r.pass = r.estimate.valid && r.z <= tol.z_threshold && r.relative <= tol.relative;
    records.push_back(r);
  }
  return records;
}

UNormRecord u_norm_check(const forms::FormParams& fp, double I_chi, std::uint64_t n_samples,
                         const sampling::RngStream& rng, const Tolerances& tol, double gamma_std_error) {
  GammaTable table;
  table[fp.nu()] = GammaEntry{fp.nu(), Estimate{fp.gamma_nu(), gamma_std_error, 1, true}, {}, 0.0, true};
  const int nus[] = {fp.nu()};
  return u_norm_sweep(fp.domain(), fp.cutoff(), table, nus, I_chi, n_samples, rng, tol).front();
}

// ---------------------------------------------------------------------------

GraphSweep graph_norm_sweep(const domain::DomainParams& params, const forms::CutoffSpec& cutoff,
                            const GammaTable& gamma, std::span<const int> nus, double K2, std::uint64_t n_samples,
                            const sampling::RngStream& rng, const Tolerances& tol) {
  check_nus(nus);
  const std::vector<int> list(nus.begin(), nus.end());
  const std::size_t m = list.size();
  // Per nu: dbar, theta, and their sum (kept as its own component so its
  // standard error reflects the shared draws).
  const auto raw = domain::integrate_H_vector(params, 3 * m, n_samples, rng, [&] {
    return [&](std::span<const Complex> z, std::span<double> out) {
      forms::CutoffEnergy e;
      try {
        e = forms::cutoff_energy(params, cutoff, z);
      } catch (const NotDifferentiable&) {
        return false;
      }
      const double modulus_sq = std::norm(z.back());
      for (std::size_t i = 0; i < m; ++i) {
        const double p = std::pow(modulus_sq, list[i]);
        out[3 * i] = p * e.tail;
        out[3 * i + 1] = p * e.head;
        out[3 * i + 2] = p * (e.tail + e.head);
      }
      return true;
    };
  });

  GraphSweep sweep;
  sweep.c_squared = K2 * K2 * norms::ball_volume(params.norm1()) / 2.0;
  sweep.uniform_bound = 2.0 * sweep.c_squared;
  sweep.bounded = true;
  const double shift = params.alpha() * (params.n1() - 1) + params.n2();
  for (std::size_t i = 0; i < m; ++i) {
    GraphRecord r;
    r.nu = list[i];
    const Estimate& g = gamma_for(gamma, r.nu).ball;
    r.dbar_sq = normalize(raw[3 * i], r.nu, g);
    r.theta_sq = normalize(raw[3 * i + 1], r.nu, g);
    r.graph_sq = normalize(raw[3 * i + 2], r.nu, g);
    r.graph_norm = std::sqrt(r.graph_sq.value);
    r.bound = sweep.c_squared * r.nu / (r.nu + shift);
    const double z = tol.z_threshold;
    r.within_bound = r.graph_sq.valid && r.dbar_sq.value <= r.bound + z * r.dbar_sq.std_error &&
                     r.theta_sq.value <= r.bound + z * r.theta_sq.std_error;
    sweep.bounded = sweep.bounded && r.within_bound &&
                    r.graph_sq.value <= sweep.uniform_bound + z * r.graph_sq.std_error;
    sweep.records.push_back(r);
  }
  return sweep;
}

GraphRecord graph_norm_check(const forms::FormParams& fp, double K2, std::uint64_t n_samples,
                             const sampling::RngStream& rng, const Tolerances& tol) {
  GammaTable table;
  table[fp.nu()] = GammaEntry{fp.nu(), Estimate{fp.gamma_nu(), 0.0, 1, true}, {}, 0.0, true};
  const int nus[] = {fp.nu()};
  return graph_norm_sweep(fp.domain(), fp.cutoff(), table, nus, K2, n_samples, rng, tol).records.front();
}

double growth_ratio(const GraphSweep& sweep, int reference_max_nu) {
  double all = 0.0;
  double reference = 0.0;
  for (const auto& r : sweep.records) {
    all = std::max(all, r.graph_norm);
    if (r.nu <= reference_max_nu) reference = std::max(reference, r.graph_norm);
  }
  return reference > 0.0 ? all / reference : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------

double lambda_bound(const domain::DomainParams& params, std::span<const int> nus, double I_chi) {
  check_nus(nus);
  double smallest = std::numeric_limits<double>::infinity();
  for (int nu : nus) smallest = std::min(smallest, u_norm_closed_form(params, nu, I_chi));
  return std::sqrt(smallest);
}

GramReport gram_check(const domain::DomainParams& params, const forms::CutoffSpec& cutoff, const GammaTable& gamma,
                      std::span<const int> nus, double lambda, std::uint64_t n_samples,
                      const sampling::RngStream& rng, const Tolerances& tol) {
  check_nus(nus);
  const std::vector<int> list(nus.begin(), nus.end());
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      if (list[i] == list[j]) throw UsageError("gram: nu values must be distinct");
    }
  }
  const std::size_t m = list.size();
  std::vector<double> weights(m);
  for (std::size_t i = 0; i < m; ++i) weights[i] = std::sqrt(list[i] / gamma_for(gamma, list[i]).ball.value);

  const auto raw = domain::integrate_H_vector(params, 2 * m * m, n_samples, rng, [&] {
    return [&, u = ComplexVector(m)](std::span<const Complex> z, std::span<double> out) mutable {
      const double c = forms::chi(cutoff, forms::rho(params, z));
      for (std::size_t i = 0; i < m; ++i) u[i] = weights[i] * c * forms::integer_power(z.back(), list[i]);
      for (std::size_t i = 0; i < m; ++i) {
        const double a = u[i].real();
        const double b = u[i].imag();
        for (std::size_t j = 0; j < m; ++j) {
          const double x = u[j].real();
          const double y = u[j].imag();
          // u_i * conj(u_j)
          out[2 * (i * m + j)] = a * x + b * y;
          out[2 * (i * m + j) + 1] = b * x - a * y;
        }
      }
      return true;
    };
  });

  GramReport report;
  report.nus = list;
  report.lambda = lambda;
  report.matrix.assign(m, std::vector<ComplexEstimate>(m));
  bool valid = true;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      report.matrix[i][j] = {raw[2 * (i * m + j)], raw[2 * (i * m + j) + 1]};
      valid = valid && report.matrix[i][j].valid();
    }
  }
  report.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto& g = report.matrix[i][j];
      const auto& h = report.matrix[j][i];
      report.max_offdiag_z = std::max(report.max_offdiag_z, g.magnitude() / g.std_error());
      report.hermitian_defect =
          std::max(report.hermitian_defect, std::hypot(g.re.value - h.re.value, g.im.value + h.im.value));
      if (j > i) {
        const double d2 =
            report.matrix[i][i].re.value + report.matrix[j][j].re.value - 2.0 * report.matrix[i][j].re.value;
        const double d = std::sqrt(std::max(0.0, d2));
        if (d < report.min_distance) {
          report.min_distance = d;
          report.closest = {list[i], list[j]};
        }
      }
    }
  }
  if (m < 2) report.min_distance = 0.0;
  report.offdiag_zero = valid && report.max_offdiag_z <= tol.z_threshold;
  report.separated =
      valid && m >= 2 && report.min_distance >= std::sqrt(2.0) * lambda * (1.0 - tol.separation_slack);
  return report;
}

// ---------------------------------------------------------------------------

RotationReport rotation_check(const domain::DomainParams& params, int mu, int nu, double theta,
                              std::uint64_t n_samples, const sampling::RngStream& rng, const Tolerances& tol) {
  const double weight_exponent = 2.0 * params.alpha() * params.n1();
  auto integrand = [&params, mu, nu, weight_exponent](std::span<const Complex> w) {
    const Complex last = w.back();
    return forms::integer_power(last, mu) * forms::integer_power(std::conj(last), nu) *
           std::pow(norms::norm_eval(params.norm2(), w), weight_exponent);
  };
  const sampling::BallSampler sampler(params.norm2());
  const Complex turn = std::polar(1.0, theta);

  RotationReport report;
  report.mu = mu;
  report.nu = nu;
  report.theta = theta;
  report.direct = sampling::mc_estimate(integrand, sampler, n_samples, rng);
  report.rotated = sampling::mc_estimate(
      [&](std::span<const Complex> t) {
        ComplexVector w(t.begin(), t.end());
        for (auto& c : w) c *= turn;
        return integrand(w);
      },
      sampler, n_samples, rng.child(7));
  const double gap = std::hypot(report.direct.re.value - report.rotated.re.value,
                                report.direct.im.value - report.rotated.im.value);
  report.z_difference = gap / std::hypot(report.direct.std_error(), report.rotated.std_error());
  report.z_direct = report.direct.magnitude() / report.direct.std_error();
  report.pass = report.direct.valid() && report.rotated.valid() && report.z_difference <= tol.z_threshold &&
                (mu == nu || report.z_direct <= tol.z_threshold);
  return report;
}

// ---------------------------------------------------------------------------

sampling::RngStream stage_stream(std::uint64_t seed, Stage stage) {
  return {seed, static_cast<std::uint64_t>(stage)};
}

namespace {

template <class Records, class Get>
bool all_valid(const Records& records, Get get) {
  return std::all_of(records.begin(), records.end(), [&](const auto& r) { return get(r).valid; });
}

}  // namespace

WitnessReport witness_report(const domain::DomainParams& params, const forms::CutoffSpec& cutoff,
                             const WitnessConfig& config) {
  if (config.nus.empty()) throw UsageError("witness: nu range is empty");
  check_nus(config.nus);
  WitnessReport report{.params = params,
                       .cutoff = cutoff,
                       .config = config,
                       .gamma = {},
                       .constants = {},
                       .u_norms = {},
                       .graph = {},
                       .gram = {},
                       .lambda = 0.0,
                       .verdicts = {},
                       .complete = true,
                       .failed_stage = {}};
  const auto& tol = config.tol;
  const auto seed = config.seed;
  std::string stage = "gamma";
  auto poisoned = [&](const std::string& name) {
    report.complete = false;
    report.failed_stage = name;
    return report;
  };
  try {
    report.gamma = gamma_table(params.norm2(), config.nus, config.samples, stage_stream(seed, Stage::gamma), tol);
    for (const auto& [nu, entry] : report.gamma) {
      if (!entry.ball.valid || !entry.surface.valid) return poisoned(stage);
    }

    stage = "constants";
    report.constants = estimate_constants(params, cutoff, config.samples, stage_stream(seed, Stage::constants));
    if (!std::isfinite(report.constants.K2) || !(report.constants.I_chi > 0.0)) return poisoned(stage);
    report.lambda = lambda_bound(params, config.nus, report.constants.I_chi);

    stage = "u_norm";
    report.u_norms = u_norm_sweep(params, cutoff, report.gamma, config.nus, report.constants.I_chi, config.samples,
                                  stage_stream(seed, Stage::u_norm), tol);
    if (!all_valid(report.u_norms, [](const UNormRecord& r) { return r.estimate; })) return poisoned(stage);

    stage = "graph";
    report.graph = graph_norm_sweep(params, cutoff, report.gamma, config.nus, report.constants.K2, config.samples,
                                    stage_stream(seed, Stage::graph), tol);
    if (!all_valid(report.graph.records, [](const GraphRecord& r) { return r.graph_sq; })) return poisoned(stage);

    stage = "gram";
    report.gram = gram_check(params, cutoff, report.gamma, config.nus, report.lambda, config.samples,
                             stage_stream(seed, Stage::gram), tol);
    for (const auto& row : report.gram.matrix) {
      for (const auto& g : row) {
        if (!g.valid()) return poisoned(stage);
      }
    }
  } catch (const DiagnosticError&) {
    return poisoned(stage);
  }

  const double lambda_sq = report.lambda * report.lambda;
  report.verdicts.graph_bounded = report.graph.bounded;
  report.verdicts.l2_lower_bound =
      report.lambda > 0.0 && std::all_of(report.u_norms.begin(), report.u_norms.end(), [&](const UNormRecord& r) {
        return r.estimate.value + tol.z_threshold * r.estimate.std_error >= lambda_sq;
      });
  report.verdicts.separated = report.gram.separated;
  return report;
}

}  // namespace hartogs::verify
