#pragma once

#include <span>
#include <vector>

#include "hartogs/domain.hpp"
#include "hartogs/norms.hpp"

namespace hartogs::forms {

/// Smooth cutoff chi: [0,1] -> [0,1], chi = 1 on [0,a], chi = 0 on [b,1],
/// glued on (a,b) by g((b - s)/(b - a)) with
///   g(t) = psi(t) / (psi(t) + psi(1 - t)),  psi(t) = exp(-1/t) (t > 0).
class CutoffSpec {
 public:
  /// Throws UsageError unless 0 < a < b < 1.
  CutoffSpec(double a = 0.5, double b = 0.75);
  double a() const { return a_; }
  double b() const { return b_; }

 private:
  double a_;
  double b_;
};

/// Throws UsageError for s outside [0,1].
double chi(const CutoffSpec& cutoff, double s);
double chi_derivative(const CutoffSpec& cutoff, double s);

/// rho(z) = N1('z) / N2(z')^alpha. Throws DomainError when z' = 0.
double rho(const domain::DomainParams& params, std::span<const Complex> z);

/// Parameters of one member u_nu = U_nu dzbar_1 ^ ... ^ dzbar_{n1} of the
/// sequence, with U_nu = sqrt(nu / gamma_nu) chi(rho) z_n^nu on H.
class FormParams {
 public:
  /// Throws UsageError unless nu >= 1 and gamma_nu > 0.
  FormParams(domain::DomainParams domain, CutoffSpec cutoff, int nu, double gamma_nu);

  const domain::DomainParams& domain() const { return domain_; }
  const CutoffSpec& cutoff() const { return cutoff_; }
  int nu() const { return nu_; }
  double gamma_nu() const { return gamma_nu_; }
  /// sqrt(nu / gamma_nu).
  double normalization() const;

 private:
  domain::DomainParams domain_;
  CutoffSpec cutoff_;
  int nu_;
  double gamma_nu_;
};

/// z^m by repeated squaring (bit-reproducible, unlike std::pow).
Complex integer_power(Complex z, int m);

/// Coefficient U_nu(z); zero outside H.
Complex U_nu(const FormParams& fp, std::span<const Complex> z);

/// Euclidean gradient of chi(rho(z)) on R^{2n}, written into `grad`
/// (length 2n). Chain rule through the norm gradients; identically zero
/// where chi' vanishes. Throws NotDifferentiable on the norms' singular
/// loci and DomainError when z' = 0.
void cutoff_gradient(const domain::DomainParams& params, const CutoffSpec& cutoff, std::span<const Complex> z,
                     std::span<double> grad);

/// Wirtinger derivatives of a real function from its real gradient:
///   d/dz_j = (d_x - i d_y)/2,  d/dzbar_j = (d_x + i d_y)/2.
struct Wirtinger {
  ComplexVector d_z;
  ComplexVector d_zbar;
};
Wirtinger wirtinger_from_gradient(std::span<const double> grad);

/// Squared Wirtinger energies of chi(rho) split by coordinate block:
///   tail = sum_{j > n1} |d(chi o rho)/dzbar_j|^2   (feeds dbar u_nu)
///   head = sum_{j <= n1} |d(chi o rho)/dz_j|^2     (feeds theta u_nu)
/// Both vanish outside H and on the plateau rho < a.
struct CutoffEnergy {
  double tail = 0.0;
  double head = 0.0;
};
CutoffEnergy cutoff_energy(const domain::DomainParams& params, const CutoffSpec& cutoff, std::span<const Complex> z);

/// Pointwise squared coefficient norm of dbar u_nu:
/// sum_{j > n1} |dU_nu/dzbar_j|^2 (the j <= n1 terms die in the wedge).
double energy_dbar(const FormParams& fp, std::span<const Complex> z);

/// Pointwise squared coefficient norm of theta u_nu: sum_{j <= n1} |dU_nu/dz_j|^2.
double energy_theta(const FormParams& fp, std::span<const Complex> z);

}  // namespace hartogs::forms
