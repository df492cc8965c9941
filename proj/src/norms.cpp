#include "hartogs/norms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hartogs/errors.hpp"

namespace hartogs::norms {

namespace {

// Relative gap between the two largest moduli below which the max-norm is
// treated as non-differentiable.
constexpr double kTieTolerance = 1e-9;
constexpr double kFdRelativeStep = 1e-6;

void check_length(const NormSpec& spec, std::size_t real_length) {
  if (real_length != 2 * static_cast<std::size_t>(spec.k())) {
    throw UsageError("norm: vector has " + std::to_string(real_length / 2) +
                     " complex coordinates, expected " + std::to_string(spec.k()));
  }
}

double modulus(std::span<const double> x, std::size_t j) {
  const double re = x[2 * j];
  const double im = x[2 * j + 1];
  return std::sqrt(re * re + im * im);
}

double euclidean_length(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

double central_difference(const NormSpec& spec, std::vector<double>& x, std::size_t i, double h) {
  const double saved = x[i];
  x[i] = saved + h;
  const double up = norm_eval_real(spec, x);
  x[i] = saved - h;
  const double down = norm_eval_real(spec, x);
  x[i] = saved;
  return (up - down) / (2.0 * h);
}

}  // namespace

NormSpec::NormSpec(int k, double p) : k_(k), p_(p) {
  if (k < 1) throw UsageError("norm: complex dimension k must be >= 1, got " + std::to_string(k));
  if (!(p >= 1.0)) throw UsageError("norm: exponent p must be >= 1 or inf");
}

std::string NormSpec::p_label() const {
  if (is_max()) return "inf";
  std::ostringstream out;
  out << p_;
  return out.str();
}

double parse_exponent(const std::string& text) {
  std::string lower;
  std::transform(text.begin(), text.end(), std::back_inserter(lower),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinity") return kInfinity;
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("exponent '" + text + "' is not a number or 'inf'");
  }
  if (used != text.size()) throw UsageError("exponent '" + text + "' has trailing characters");
  if (!(p >= 1.0)) throw UsageError("exponent must be >= 1, got '" + text + "'");
  return p;
}

double norm_eval(const NormSpec& spec, std::span<const Complex> z) {
  return norm_eval_real(spec, as_real(z));
}

double norm_eval_real(const NormSpec& spec, std::span<const double> x) {
  check_length(spec, x.size());
  const auto k = static_cast<std::size_t>(spec.k());
  const double p = spec.p();
  if (p == 2.0) return euclidean_length(x);

  double largest = 0.0;
  for (std::size_t j = 0; j < k; ++j) largest = std::max(largest, modulus(x, j));
  if (spec.is_max() || largest == 0.0) return largest;

  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += modulus(x, j);
    return s;
  }
  // Scale by the largest modulus so large p cannot overflow.
  double s = 0.0;
  for (std::size_t j = 0; j < k; ++j) s += std::pow(modulus(x, j) / largest, p);
  return largest * std::pow(s, 1.0 / p);
}

void norm_gradient(const NormSpec& spec, std::span<const double> x, std::span<double> grad) {
  check_length(spec, x.size());
  if (grad.size() != x.size()) throw UsageError("norm_gradient: output length mismatch");
  const auto k = static_cast<std::size_t>(spec.k());
  const double length = euclidean_length(x);
  if (length == 0.0) throw NotDifferentiable("norm_gradient: x = 0");

  if (spec.is_euclidean()) {
    for (std::size_t i = 0; i < x.size(); ++i) grad[i] = x[i] / length;
    return;
  }

  if (spec.is_max()) {
    std::size_t top = 0;
    double first = -1.0;
    double second = -1.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double m = modulus(x, j);
      if (m > first) {
        second = first;
        first = m;
        top = j;
      } else if (m > second) {
        second = m;
      }
    }
    if (k > 1 && first - second < kTieTolerance * first) {
      throw NotDifferentiable("norm_gradient: tie between largest moduli");
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    grad[2 * top] = x[2 * top] / first;
    grad[2 * top + 1] = x[2 * top + 1] / first;
    return;
  }

  const double h = kFdRelativeStep * std::max(1.0, length);
  if (spec.p() == 1.0) {
    // |z_j| has a cone point at z_j = 0; keep the stencil clear of it.
    for (std::size_t j = 0; j < k; ++j) {
      if (modulus(x, j) <= 10.0 * h) throw NotDifferentiable("norm_gradient: vanishing modulus for p = 1");
    }
  }
  std::vector<double> work(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double coarse = central_difference(spec, work, i, h);
    const double fine = central_difference(spec, work, i, 0.5 * h);
    grad[i] = (4.0 * fine - coarse) / 3.0;
  }
}

std::vector<double> norm_gradient(const NormSpec& spec, std::span<const double> x) {
  std::vector<double> grad(x.size());
  norm_gradient(spec, x, grad);
  return grad;
}

double ball_volume(const NormSpec& spec) {
  const double k = spec.k();
  const double pi_k = std::pow(std::numbers::pi, k);
  if (spec.is_max()) return pi_k;
  const double p = spec.p();
  // Work in logs: Gamma(1 + 2k/p) overflows early for small p and large k.
  return pi_k * std::exp(k * std::lgamma(1.0 + 2.0 / p) - std::lgamma(1.0 + 2.0 * k / p));
}

}  // namespace hartogs::norms
