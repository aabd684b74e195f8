#pragma once

// Special functions and distribution tails used by the significance tests.
// Accuracy target: absolute error below 1e-10 on the CDFs.

namespace fraccite::stats {

// ln Γ(x) for x > 0 (Lanczos, g = 7).
double log_gamma(double x);

// Regularized lower / upper incomplete gamma functions, a > 0, x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b), a, b > 0, 0 <= x <= 1.
double beta_inc(double a, double b, double x);

double normal_cdf(double z);

// Upper tails.
double chi_squared_sf(double x, double df);
double f_sf(double x, double df1, double df2);
// P(|T| >= |t|) for Student t with df degrees of freedom.
double t_two_sided_p(double t, double df);

}  // namespace fraccite::stats
