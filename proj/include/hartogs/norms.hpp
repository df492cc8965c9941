#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace hartogs {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// View a complex vector as its interleaved real coordinates
/// (Re z1, Im z1, Re z2, ...). std::complex guarantees this layout.
inline std::span<const double> as_real(std::span<const Complex> z) {
  return {reinterpret_cast<const double*>(z.data()), 2 * z.size()};
}
inline std::span<double> as_real(std::span<Complex> z) {
  return {reinterpret_cast<double*>(z.data()), 2 * z.size()};
}

namespace norms {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// p-norm of the coordinate moduli on C^k, p in [1, inf].
class NormSpec {
 public:
  NormSpec() = default;
  /// Throws UsageError unless k >= 1 and p >= 1 (p may be +inf).
  NormSpec(int k, double p);

  int k() const { return k_; }
  double p() const { return p_; }
  bool is_euclidean() const { return p_ == 2.0; }
  bool is_max() const { return p_ == kInfinity; }
  /// Gradient available in closed form (p = 2 or p = inf).
  bool has_analytic_gradient() const { return is_euclidean() || is_max(); }

  /// "2", "3.5", "inf".
  std::string p_label() const;

  friend bool operator==(const NormSpec&, const NormSpec&) = default;

 private:
  int k_ = 1;
  double p_ = 2.0;
};

/// Parse "inf"/"infinity" or a real >= 1. Throws UsageError.
double parse_exponent(const std::string& text);

double norm_eval(const NormSpec& spec, std::span<const Complex> z);
/// Same norm on the interleaved real representation (length 2k).
double norm_eval_real(const NormSpec& spec, std::span<const double> x);

/// Euclidean gradient of the norm on R^{2k}, written into `grad`.
/// Closed form for p = 2 and p = inf; central differences with one
/// Richardson step otherwise. Throws NotDifferentiable at x = 0, at ties
/// of the largest moduli (p = inf), and at vanishing moduli (p = 1).
void norm_gradient(const NormSpec& spec, std::span<const double> x, std::span<double> grad);
std::vector<double> norm_gradient(const NormSpec& spec, std::span<const double> x);

/// Lebesgue volume of the unit ball in R^{2k}:
///   pi^k Gamma(1 + 2/p)^k / Gamma(1 + 2k/p).
double ball_volume(const NormSpec& spec);

}  // namespace norms
}  // namespace hartogs
