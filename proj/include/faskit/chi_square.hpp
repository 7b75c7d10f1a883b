#pragma once

namespace faskit {

// Regularized lower and upper incomplete gamma functions P(a, x), Q(a, x).
// Series expansion below x < a + 1, Lentz continued fraction above.
[[nodiscard]] double gamma_p(double a, double x);
[[nodiscard]] double gamma_q(double a, double x);

// Upper-tail probability of a chi-square variate with `dof` degrees of freedom.
[[nodiscard]] double chi_square_sf(double statistic, double dof);

}  // namespace faskit
