#pragma once

#include <limits>

namespace ke::stats {

double ln_gamma(double x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
// relative error around 1e-14 on the unit interval.
double incomplete_beta(double a, double b, double x);

double normal_pdf(double z);
double normal_cdf(double z);

double student_t_cdf(double t, double df);
double student_t_two_sided_p(double t, double df);
double student_t_quantile(double p, double df);

// P(F > f) for an F(df1, df2) variate.
double f_upper_tail(double f, double df1, double df2);

// Studentized range distribution for k groups and df error degrees of
// freedom (pass infinity for the asymptotic case). Evaluated by numerical
// integration: the range probability is an integral over the normal kernel,
// and finite df adds an outer integral over the chi distribution of the
// scale estimate. Absolute accuracy well inside 1e-4.
double studentized_range_cdf(double q, int k, double df);
double studentized_range_quantile(double p, int k, double df);

inline constexpr double kInfiniteDf = std::numeric_limits<double>::infinity();

}  // namespace ke::stats
