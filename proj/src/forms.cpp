#include "hartogs/forms.hpp"

#include <cmath>
#include <string>

#include "hartogs/errors.hpp"

namespace hartogs::forms {

namespace {

// Logistic form of psi(t) / (psi(t) + psi(1 - t)); returns g and 1 - g
// separately so neither end loses precision.
struct Glue {
  double g;
  double one_minus_g;
};

Glue glue(double t) {
  if (t <= 0.0) return {0.0, 1.0};
  if (t >= 1.0) return {1.0, 0.0};
  const double e = 1.0 / t - 1.0 / (1.0 - t);
  return {1.0 / (1.0 + std::exp(e)), 1.0 / (1.0 + std::exp(-e))};
}

void check_unit(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw UsageError("chi: argument " + std::to_string(s) + " outside [0,1]");
}

double squared_block(std::span<const double> grad, std::size_t first, std::size_t last) {
  double s = 0.0;
  for (std::size_t i = 2 * first; i < 2 * last; ++i) s += grad[i] * grad[i];
  return s;
}

}  // namespace

CutoffSpec::CutoffSpec(double a, double b) : a_(a), b_(b) {
  if (!(0.0 < a && a < b && b < 1.0)) {
    throw UsageError("cutoff: need 0 < a < b < 1, got a=" + std::to_string(a) + ", b=" + std::to_string(b));
  }
}

double chi(const CutoffSpec& cutoff, double s) {
  check_unit(s);
  if (s <= cutoff.a()) return 1.0;
  if (s >= cutoff.b()) return 0.0;
  return glue((cutoff.b() - s) / (cutoff.b() - cutoff.a())).g;
}

double chi_derivative(const CutoffSpec& cutoff, double s) {
  check_unit(s);
  if (s <= cutoff.a() || s >= cutoff.b()) return 0.0;
  const double width = cutoff.b() - cutoff.a();
  const double t = (cutoff.b() - s) / width;
  const Glue v = glue(t);
  // g'(t) = g (1 - g) (1/t^2 + 1/(1-t)^2); ds = -width dt.
  const double dg = v.g * v.one_minus_g * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
  return -dg / width;
}

double rho(const domain::DomainParams& params, std::span<const Complex> z) {
  if (z.size() != static_cast<std::size_t>(params.n())) throw UsageError("rho: dimension mismatch");
  const double outer = norms::norm_eval(params.norm2(), params.tail(z));
  if (outer == 0.0) throw DomainError("rho: z' = 0");
  return norms::norm_eval(params.norm1(), params.head(z)) / std::pow(outer, params.alpha());
}

FormParams::FormParams(domain::DomainParams domain, CutoffSpec cutoff, int nu, double gamma_nu)
    : domain_(std::move(domain)), cutoff_(cutoff), nu_(nu), gamma_nu_(gamma_nu) {
  if (nu < 1) throw UsageError("form: nu must be >= 1");
  if (!(gamma_nu > 0.0) || !std::isfinite(gamma_nu)) throw UsageError("form: gamma_nu must be positive and finite");
}

double FormParams::normalization() const { return std::sqrt(nu_ / gamma_nu_); }

Complex integer_power(Complex z, int m) {
  Complex result{1.0, 0.0};
  while (m > 0) {
    if (m & 1) result *= z;
    z *= z;
    m >>= 1;
  }
  return result;
}

Complex U_nu(const FormParams& fp, std::span<const Complex> z) {
  if (!domain::contains(fp.domain(), z)) return {0.0, 0.0};
  const double cut = chi(fp.cutoff(), rho(fp.domain(), z));
  if (cut == 0.0) return {0.0, 0.0};
  return fp.normalization() * cut * integer_power(z.back(), fp.nu());
}

void cutoff_gradient(const domain::DomainParams& params, const CutoffSpec& cutoff, std::span<const Complex> z,
                     std::span<double> grad) {
  const auto n1 = static_cast<std::size_t>(params.n1());
  if (grad.size() != 2 * z.size()) throw UsageError("cutoff_gradient: output length mismatch");
  const double inner = norms::norm_eval(params.norm1(), params.head(z));
  const double outer = norms::norm_eval(params.norm2(), params.tail(z));
  if (outer == 0.0) throw DomainError("cutoff_gradient: z' = 0");
  const double scale = std::pow(outer, params.alpha());
  const double r = inner / scale;
  const double slope = (r >= 0.0 && r <= 1.0) ? chi_derivative(cutoff, r) : 0.0;
  std::fill(grad.begin(), grad.end(), 0.0);
  if (slope == 0.0) return;

  auto head_grad = grad.first(2 * n1);
  auto tail_grad = grad.subspan(2 * n1);
  norms::norm_gradient(params.norm1(), as_real(params.head(z)), head_grad);
  norms::norm_gradient(params.norm2(), as_real(params.tail(z)), tail_grad);
  for (double& g : head_grad) g *= slope / scale;
  const double tail_factor = -slope * params.alpha() * r / outer;
  for (double& g : tail_grad) g *= tail_factor;
}

Wirtinger wirtinger_from_gradient(std::span<const double> grad) {
  const std::size_t m = grad.size() / 2;
  Wirtinger w{ComplexVector(m), ComplexVector(m)};
  for (std::size_t j = 0; j < m; ++j) {
    const double dx = grad[2 * j];
    const double dy = grad[2 * j + 1];
    w.d_z[j] = {0.5 * dx, -0.5 * dy};
    w.d_zbar[j] = {0.5 * dx, 0.5 * dy};
  }
  return w;
}

CutoffEnergy cutoff_energy(const domain::DomainParams& params, const CutoffSpec& cutoff, std::span<const Complex> z) {
  if (!domain::contains(params, z)) return {};
  if (rho(params, z) <= cutoff.a()) return {};
  std::vector<double> grad(2 * z.size());
  cutoff_gradient(params, cutoff, z, grad);
  // For real f, |df/dz_j|^2 = |df/dzbar_j|^2 = |grad_j f|^2 / 4.
  const auto n1 = static_cast<std::size_t>(params.n1());
  return {0.25 * squared_block(grad, n1, z.size()), 0.25 * squared_block(grad, 0, n1)};
}

double energy_dbar(const FormParams& fp, std::span<const Complex> z) {
  const CutoffEnergy e = cutoff_energy(fp.domain(), fp.cutoff(), z);
  if (e.tail == 0.0) return 0.0;
  return fp.nu() / fp.gamma_nu() * std::pow(std::norm(z.back()), fp.nu()) * e.tail;
}

double energy_theta(const FormParams& fp, std::span<const Complex> z) {
  const CutoffEnergy e = cutoff_energy(fp.domain(), fp.cutoff(), z);
  if (e.head == 0.0) return 0.0;
  return fp.nu() / fp.gamma_nu() * std::pow(std::norm(z.back()), fp.nu()) * e.head;
}

}  // namespace hartogs::forms
