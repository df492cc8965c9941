#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hartogs/domain.hpp"
#include "hartogs/estimate.hpp"
#include "hartogs/forms.hpp"
#include "hartogs/norms.hpp"
#include "hartogs/rng.hpp"

namespace hartogs::verify {

/// Every pass/fail threshold used by the checks. Zero-tests and agreement
/// tests are in combined standard errors; closed-form agreement is also
/// bounded in relative terms.
struct Tolerances {
  double z_threshold = 4.0;
  double relative = 0.02;
  double lemma_relative = 0.01;
  double separation_slack = 0.05;
  double growth_slack = 0.05;
};

// ---------------------------------------------------------------------------
// gamma(nu) = int_{dB2} |t_{n2}|^{2 nu} dsigma(t)

struct GammaEntry {
  int nu = 0;
  /// 2 (nu + n2) int_{B2} |w_{n2}|^{2 nu} dV; the canonical value.
  Estimate ball;
  /// Direct cone-measure estimate of the boundary integral.
  Estimate surface;
  double z = 0.0;
  bool consistent = false;
};
using GammaTable = std::map<int, GammaEntry>;

/// Both routes for every nu from shared draws: ball samples on `rng`,
/// boundary samples on `rng.child(1)`.
GammaTable gamma_table(const norms::NormSpec& norm2, std::span<const int> nus, std::uint64_t n_samples,
                       const sampling::RngStream& rng, const Tolerances& tol = {});
GammaEntry gamma_estimate(const norms::NormSpec& norm2, int nu, std::uint64_t n_samples,
                          const sampling::RngStream& rng, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Radial moment identity int_{B2} |w_{n2}|^{2nu} N(w)^{2beta} dV = gamma / (2 (nu + beta + n2))

struct Lemma1Row {
  double beta = 0.0;
  Estimate moment;
  /// 2 (nu + beta + n2) * moment.
  Estimate rescaled;
  double z_vs_gamma = 0.0;
  double relative_vs_gamma = 0.0;
};

struct Lemma1Report {
  int nu = 0;
  norms::NormSpec norm;
  Estimate gamma_ball;
  std::vector<Lemma1Row> rows;
  double max_pairwise_z = 0.0;
  double max_relative = 0.0;
  bool pass = false;
};

/// All moments (and gamma_ball, the beta = 0 rescaling) from shared draws.
Lemma1Report lemma1_check(const norms::NormSpec& norm2, int nu, std::span<const double> betas,
                          std::uint64_t n_samples, const sampling::RngStream& rng, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// int_H |z_n|^{2nu} / N2(z')^{2 alpha} dV = Vol(B1) gamma / (2 (nu + alpha (n1 - 1) + n2))

double weighted_moment_closed_form(const domain::DomainParams& params, int nu, double gamma);

struct MomentReport {
  int nu = 0;
  Estimate estimate;
  Estimate closed_form;
  double z = 0.0;
  double relative = 0.0;
  bool pass = false;
};

MomentReport weighted_moment_check(const domain::DomainParams& params, int nu, const Estimate& gamma_ball,
                                   std::uint64_t n_samples, const sampling::RngStream& rng,
                                   const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Cutoff mass and constants

/// I_chi = int_{B1} chi^2(N1(v)) dV = 2 n1 Vol(B1) int_0^1 chi^2(r) r^{2 n1 - 1} dr,
/// by adaptive Gauss-Kronrod (absolute tolerance 1e-10). Throws ConfigError
/// if the quadrature does not converge.
double chi_mass(const forms::CutoffSpec& cutoff, const norms::NormSpec& norm1);

struct ConstantsEstimate {
  /// Empirical sup of |grad N| over boundary samples of both norms.
  double K1 = 0.0;
  /// Empirical sup over H of |grad chi(rho)| * N2(z')^alpha.
  double K2 = 0.0;
  double I_chi = 0.0;
  double volume1 = 0.0;
};

double max_gradient_norm(const norms::NormSpec& norm, std::uint64_t n_samples, const sampling::RngStream& rng);
double estimate_K2(const domain::DomainParams& params, const forms::CutoffSpec& cutoff, std::uint64_t n_samples,
                   const sampling::RngStream& rng);
ConstantsEstimate estimate_constants(const domain::DomainParams& params, const forms::CutoffSpec& cutoff,
                                     std::uint64_t n_samples, const sampling::RngStream& rng);

// ---------------------------------------------------------------------------
// ||u_nu||^2 = I_chi nu / (2 (nu + alpha n1 + n2))

double u_norm_closed_form(const domain::DomainParams& params, int nu, double I_chi);

struct UNormRecord {
  int nu = 0;
  /// Includes the propagated error of the gamma normalization.
  Estimate estimate;
  double closed_form = 0.0;
  double z = 0.0;
  double relative = 0.0;
  bool pass = false;
};

/// One pass over shared draws for all nus in the table order given.
std::vector<UNormRecord> u_norm_sweep(const domain::DomainParams& params, const forms::CutoffSpec& cutoff,
                                      const GammaTable& gamma, std::span<const int> nus, double I_chi,
                                      std::uint64_t n_samples, const sampling::RngStream& rng,
                                      const Tolerances& tol = {});
UNormRecord u_norm_check(const forms::FormParams& fp, double I_chi, std::uint64_t n_samples,
                         const sampling::RngStream& rng, const Tolerances& tol = {},
                         double gamma_std_error = 0.0);

// ---------------------------------------------------------------------------
// Graph norm ||dbar u||^2 + ||theta u||^2 and the K2 bound chain

struct GraphRecord {
  int nu = 0;
  Estimate dbar_sq;
  Estimate theta_sq;
  Estimate graph_sq;
  double graph_norm = 0.0;
  /// C^2 nu / (nu + alpha (n1 - 1) + n2) with C^2 = K2^2 Vol(B1) / 2;
  /// bounds each of dbar_sq and theta_sq.
  double bound = 0.0;
  bool within_bound = false;
};

struct GraphSweep {
  std::vector<GraphRecord> records;
  double c_squared = 0.0;
  /// nu-independent bound 2 C^2 on graph_sq.
  double uniform_bound = 0.0;
  bool bounded = false;
};

GraphSweep graph_norm_sweep(const domain::DomainParams& params, const forms::CutoffSpec& cutoff,
                            const GammaTable& gamma, std::span<const int> nus, double K2, std::uint64_t n_samples,
                            const sampling::RngStream& rng, const Tolerances& tol = {});
GraphRecord graph_norm_check(const forms::FormParams& fp, double K2, std::uint64_t n_samples,
                             const sampling::RngStream& rng, const Tolerances& tol = {});

/// sup over all records of graph_norm divided by sup over records with
/// nu <= reference_max_nu.
double growth_ratio(const GraphSweep& sweep, int reference_max_nu);

// ---------------------------------------------------------------------------
// Gram matrix G_{mu nu} = int_H U_mu conj(U_nu) dV

struct GramReport {
  std::vector<int> nus;
  std::vector<std::vector<ComplexEstimate>> matrix;
  double max_offdiag_z = 0.0;
  double hermitian_defect = 0.0;
  double lambda = 0.0;
  double min_distance = 0.0;
  std::pair<int, int> closest{0, 0};
  bool offdiag_zero = false;
  bool separated = false;
};

/// Full 2n-dimensional estimate of every entry from shared draws. `lambda`
/// is the L2 lower bound the separation is measured against.
GramReport gram_check(const domain::DomainParams& params, const forms::CutoffSpec& cutoff, const GammaTable& gamma,
                      std::span<const int> nus, double lambda, std::uint64_t n_samples,
                      const sampling::RngStream& rng, const Tolerances& tol = {});

/// min over nus of sqrt(u_norm_closed_form).
double lambda_bound(const domain::DomainParams& params, std::span<const int> nus, double I_chi);

// ---------------------------------------------------------------------------
// K = int_{B2} w_{n2}^mu conj(w_{n2})^nu N2(w)^{2 alpha n1} dV under w -> e^{i theta} w

struct RotationReport {
  int mu = 0;
  int nu = 0;
  double theta = 0.0;
  ComplexEstimate direct;
  ComplexEstimate rotated;
  double z_difference = 0.0;
  double z_direct = 0.0;
  bool pass = false;
};

RotationReport rotation_check(const domain::DomainParams& params, int mu, int nu, double theta,
                              std::uint64_t n_samples, const sampling::RngStream& rng, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Full pipeline

struct WitnessConfig {
  std::vector<int> nus;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 42;
  Tolerances tol;
};

struct Verdicts {
  bool graph_bounded = false;
  bool l2_lower_bound = false;
  bool separated = false;
  bool witnessed() const { return graph_bounded && l2_lower_bound && separated; }
};

struct WitnessReport {
  domain::DomainParams params;
  forms::CutoffSpec cutoff;
  WitnessConfig config;
  GammaTable gamma;
  ConstantsEstimate constants;
  std::vector<UNormRecord> u_norms;
  GraphSweep graph;
  GramReport gram;
  double lambda = 0.0;
  Verdicts verdicts;
  bool complete = true;
  std::string failed_stage;
};

/// Stream ids of the pipeline stages (seed is shared).
enum class Stage : std::uint64_t { gamma = 1, constants = 2, u_norm = 3, graph = 4, gram = 5 };
sampling::RngStream stage_stream(std::uint64_t seed, Stage stage);

/// Throws UsageError for an empty nu list.
WitnessReport witness_report(const domain::DomainParams& params, const forms::CutoffSpec& cutoff,
                             const WitnessConfig& config);

}  // namespace hartogs::verify
