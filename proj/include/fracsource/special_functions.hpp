#pragma once

namespace fracsource {

/// Gamma function on the real line by a Lanczos approximation (g = 7, 9 terms),
/// with the reflection formula for arguments below 1/2. Relative error is
/// below 1e-13 away from the poles. Poles (nonpositive integers) return +/-inf.
double gamma_fn(double x);

/// 1/Gamma(x) for real x. Exactly zero at the poles of Gamma (nonpositive
/// integers), which is the value the asymptotic series of the Mittag-Leffler
/// function needs there.
double reciprocal_gamma(double x);

/// ln Gamma(x) for x > 0, extended precision. Thin wrapper used by series
/// evaluations that need term magnitudes beyond double.
long double log_gamma_positive(long double x);

}  // namespace fracsource
