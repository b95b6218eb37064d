#pragma once

namespace poua {

// Regularized lower incomplete gamma P(a, x): series for x < a + 1, Lentz
// continued fraction otherwise.
double regularized_gamma_p(double a, double x);

double chi_squared_cdf(double dof, double x);

// Inverse CDF by bracketing then bisection on chi_squared_cdf to 1e-13
// relative width. Requires 0 < p < 1.
double chi_squared_quantile(double dof, double p);

double normal_cdf(double x);

// Acklam's rational approximation, then one Halley step against erfc.
double normal_quantile(double p);

}  // namespace poua
