#include "hartogs/domain.hpp"

#include <cmath>
#include <string>

#include "hartogs/errors.hpp"

namespace hartogs::domain {

DomainParams::DomainParams(int n1, int n2, double alpha, norms::NormSpec norm1, norms::NormSpec norm2)
    : n1_(n1), n2_(n2), alpha_(alpha), norm1_(norm1), norm2_(norm2) {
  if (n1 < 1) throw UsageError("domain: n1 must be >= 1");
  if (n2 < 1) throw UsageError("domain: n2 must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw UsageError("domain: alpha must be a positive real");
  if (norm1.k() != n1) throw UsageError("domain: first norm acts on C^" + std::to_string(norm1.k()));
  if (norm2.k() != n2) throw UsageError("domain: second norm acts on C^" + std::to_string(norm2.k()));
}

DomainParams::DomainParams(int n1, int n2, double alpha, double p1, double p2)
    : DomainParams(n1, n2, alpha, norms::NormSpec(std::max(n1, 1), p1), norms::NormSpec(std::max(n2, 1), p2)) {}

bool contains(const DomainParams& params, std::span<const Complex> z) {
  if (z.size() != static_cast<std::size_t>(params.n())) {
    throw UsageError("contains: point has " + std::to_string(z.size()) + " coordinates, expected " +
                     std::to_string(params.n()));
  }
  const double outer = norms::norm_eval(params.norm2(), params.tail(z));
  if (!(outer < 1.0) || outer == 0.0) return false;
  return norms::norm_eval(params.norm1(), params.head(z)) < std::pow(outer, params.alpha());
}

void phi(const DomainParams& params, std::span<const Complex> v, std::span<const Complex> w, std::span<Complex> out) {
  if (v.size() != static_cast<std::size_t>(params.n1()) || w.size() != static_cast<std::size_t>(params.n2()) ||
      out.size() != static_cast<std::size_t>(params.n())) {
    throw UsageError("phi: dimension mismatch");
  }
  const double radius = norms::norm_eval(params.norm2(), w);
  if (radius == 0.0) throw DomainError("phi: w = 0 is not in the domain of Phi");
  const double scale = std::pow(radius, params.alpha());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = scale * v[j];
  std::copy(w.begin(), w.end(), out.begin() + static_cast<std::ptrdiff_t>(v.size()));
}

ComplexVector phi(const DomainParams& params, std::span<const Complex> v, std::span<const Complex> w) {
  ComplexVector out(static_cast<std::size_t>(params.n()));
  phi(params, v, w, out);
  return out;
}

double phi_jacobian(const DomainParams& params, std::span<const Complex> w) {
  if (w.size() != static_cast<std::size_t>(params.n2())) throw UsageError("phi_jacobian: dimension mismatch");
  const double radius = norms::norm_eval(params.norm2(), w);
  if (radius == 0.0) throw DomainError("phi_jacobian: w = 0");
  return std::pow(radius, 2.0 * params.alpha() * params.n1());
}

}  // namespace hartogs::domain
