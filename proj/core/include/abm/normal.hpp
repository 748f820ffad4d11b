#pragma once

namespace abm {

/// Standard normal CDF, erfc-based. Symmetric by construction:
/// cdf(x) + cdf(-x) == 1 holds exactly in floating point.
/// Throws std::domain_error on non-finite input.
double std_normal_cdf(double x);

/// Standard normal density exp(-x^2/2)/sqrt(2*pi).
/// Throws std::domain_error on non-finite input.
double std_normal_pdf(double x);

/// Inverse of std_normal_cdf on (0, 1). Rational initial guess refined with
/// one Halley step against the erfc-based CDF, so the round trip
/// cdf(inv_cdf(p)) = p holds to machine precision.
/// Throws std::domain_error unless 0 < p < 1.
double std_normal_inv_cdf(double p);

} // namespace abm
