#pragma once

#include <cstdint>

namespace hartogs {

/// A Monte Carlo value with its standard error (sample standard deviation
/// over sqrt(n)). `valid` is cleared when any contributing draw was
/// non-finite; such estimates poison everything derived from them.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  bool valid = true;

  double relative_error() const;

  /// Deterministic quantity carried through estimate arithmetic.
  static Estimate exact(double value);
};

/// Pool two estimates built from disjoint samples of the same integrand.
Estimate pool(const Estimate& a, const Estimate& b);

/// c * e (exact scale).
Estimate scaled(const Estimate& e, double c);

/// First-order delta-method propagation, treating the inputs as independent.
Estimate product(const Estimate& a, const Estimate& b);
Estimate quotient(const Estimate& a, const Estimate& b);

/// |a - b| / sqrt(se_a^2 + se_b^2). Zero combined error gives 0 when the
/// values agree exactly and +inf otherwise.
double z_score(const Estimate& a, const Estimate& b);
double z_score(const Estimate& a, double reference);

/// |a / b - 1|.
double relative_deviation(double a, double b);

/// Real and imaginary parts estimated from the same draws.
struct ComplexEstimate {
  Estimate re;
  Estimate im;

  /// sqrt(se_re^2 + se_im^2).
  double std_error() const;
  double magnitude() const;
  bool valid() const { return re.valid && im.valid; }
};

}  // namespace hartogs
