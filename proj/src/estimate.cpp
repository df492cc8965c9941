#include "hartogs/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hartogs {

double Estimate::relative_error() const {
  return value == 0.0 ? std::numeric_limits<double>::infinity() : std_error / std::abs(value);
}

Estimate Estimate::exact(double value) { return {value, 0.0, 0, std::isfinite(value)}; }

Estimate pool(const Estimate& a, const Estimate& b) {
  if (a.n_samples == 0) return b;
  if (b.n_samples == 0) return a;
  const double na = static_cast<double>(a.n_samples);
  const double nb = static_cast<double>(b.n_samples);
  const double n = na + nb;
  // Sum of squared deviations recovered from se^2 = M2 / ((n - 1) n).
  const double m2a = a.std_error * a.std_error * na * (na - 1.0);
  const double m2b = b.std_error * b.std_error * nb * (nb - 1.0);
  const double delta = b.value - a.value;
  const double mean = a.value + delta * nb / n;
  const double m2 = m2a + m2b + delta * delta * na * nb / n;
  return {mean, std::sqrt(m2 / ((n - 1.0) * n)), a.n_samples + b.n_samples, a.valid && b.valid};
}

Estimate scaled(const Estimate& e, double c) {
  return {c * e.value, std::abs(c) * e.std_error, e.n_samples, e.valid && std::isfinite(c)};
}

Estimate product(const Estimate& a, const Estimate& b) {
  const double se = std::hypot(a.std_error * b.value, b.std_error * a.value);
  return {a.value * b.value, se, std::max(a.n_samples, b.n_samples), a.valid && b.valid};
}

Estimate quotient(const Estimate& a, const Estimate& b) {
  const double q = a.value / b.value;
  const double se = std::hypot(a.std_error / b.value, q * b.std_error / b.value);
  return {q, se, std::max(a.n_samples, b.n_samples), a.valid && b.valid && std::isfinite(q)};
}

double z_score(const Estimate& a, const Estimate& b) {
  const double combined = std::hypot(a.std_error, b.std_error);
  const double gap = std::abs(a.value - b.value);
  if (combined == 0.0) return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return gap / combined;
}

double z_score(const Estimate& a, double reference) { return z_score(a, Estimate::exact(reference)); }

double relative_deviation(double a, double b) { return std::abs(a / b - 1.0); }

double ComplexEstimate::std_error() const { return std::hypot(re.std_error, im.std_error); }

double ComplexEstimate::magnitude() const { return std::hypot(re.value, im.value); }

}  // namespace hartogs
