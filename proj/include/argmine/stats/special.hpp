#pragma once

// Tail probabilities for the t and chi-squared distributions, computed via
// continued-fraction incomplete beta / gamma so results are reproducible
// to ~1e-12 without linking a stats library.

namespace argmine::stats {

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
double regularized_incomplete_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x) and upper Q(a, x) = 1 - P(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Two-sided p-value for a t statistic with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Survival function of the chi-squared distribution with `df` degrees of freedom.
double chi_squared_sf(double x, double df);

}  // namespace argmine::stats
