#pragma once

#include <span>
#include <type_traits>
#include <vector>

#include "hartogs/estimate.hpp"
#include "hartogs/norms.hpp"
#include "hartogs/sampling.hpp"

namespace hartogs::domain {

/// Generalized Hartogs triangle
///   H = { z = ('z, z') in C^{n1} x C^{n2} : N1('z) < N2(z')^alpha < 1 }.
class DomainParams {
 public:
  /// Throws UsageError unless n1, n2 >= 1, alpha > 0 and the norm
  /// dimensions match n1 and n2.
  DomainParams(int n1, int n2, double alpha, norms::NormSpec norm1, norms::NormSpec norm2);
  DomainParams(int n1, int n2, double alpha, double p1, double p2);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int n() const { return n1_ + n2_; }
  double alpha() const { return alpha_; }
  const norms::NormSpec& norm1() const { return norm1_; }
  const norms::NormSpec& norm2() const { return norm2_; }

  /// The leading block 'z and trailing block z' of a point of C^n.
  std::span<const Complex> head(std::span<const Complex> z) const { return z.first(static_cast<std::size_t>(n1_)); }
  std::span<const Complex> tail(std::span<const Complex> z) const { return z.last(static_cast<std::size_t>(n2_)); }

 private:
  int n1_;
  int n2_;
  double alpha_;
  norms::NormSpec norm1_;
  norms::NormSpec norm2_;
};

bool contains(const DomainParams& params, std::span<const Complex> z);

/// Phi(v, w) = (N2(w)^alpha v, w), a homeomorphism B1 x (B2 \ {0}) -> H.
ComplexVector phi(const DomainParams& params, std::span<const Complex> v, std::span<const Complex> w);
void phi(const DomainParams& params, std::span<const Complex> v, std::span<const Complex> w, std::span<Complex> out);

/// Real Jacobian determinant of Phi: N2(w)^{2 alpha n1}.
double phi_jacobian(const DomainParams& params, std::span<const Complex> w);

/// Vector-valued integral over H by pullback: (v, w) uniform in B1 x B2,
/// each component weighted by the Jacobian and scaled by Vol(B1) Vol(B2).
/// `make_integrand()` is invoked once per chunk and returns a callable
/// `bool(std::span<const Complex> z, std::span<double> out)`; returning
/// false rejects the draw.
template <class IntegrandFactory>
std::vector<Estimate> integrate_H_vector(const DomainParams& params, std::size_t components, std::uint64_t n_samples,
                                         const sampling::RngStream& rng, IntegrandFactory make_integrand) {
  sampling::BallSampler first(params.norm1());
  sampling::BallSampler second(params.norm2());
  const double mass = first.mass() * second.mass();
  return sampling::mc_vector(n_samples, rng, components, mass, [&] {
    return [&params, first, second, integrand = make_integrand(), v = ComplexVector(first.dimension()),
            w = ComplexVector(second.dimension()),
            z = ComplexVector(static_cast<std::size_t>(params.n()))](sampling::Philox4x32& engine,
                                                                     std::span<double> out) mutable {
      first.draw(engine, v);
      do {
        second.draw(engine, w);
      } while (norms::norm_eval(params.norm2(), w) == 0.0);
      phi(params, v, w, z);
      if (!integrand(std::span<const Complex>(z), out)) return false;
      const double jacobian = phi_jacobian(params, w);
      for (double& x : out) x *= jacobian;
      return true;
    };
  });
}

/// Scalar integral of f over H; complex-valued f yields a ComplexEstimate.
template <class F>
auto integrate_H(const DomainParams& params, F f, std::uint64_t n_samples, const sampling::RngStream& rng) {
  using Value = std::invoke_result_t<F&, std::span<const Complex>>;
  constexpr bool is_complex = std::is_same_v<std::remove_cvref_t<Value>, Complex>;
  constexpr std::size_t components = is_complex ? 2 : 1;
  auto estimates = integrate_H_vector(params, components, n_samples, rng, [&f] {
    return [&f](std::span<const Complex> z, std::span<double> out) {
      if constexpr (is_complex) {
        const Complex value = f(z);
        out[0] = value.real();
        out[1] = value.imag();
      } else {
        out[0] = static_cast<double>(f(z));
      }
      return true;
    };
  });
  if constexpr (is_complex) {
    return ComplexEstimate{estimates[0], estimates[1]};
  } else {
    return estimates[0];
  }
}

}  // namespace hartogs::domain
