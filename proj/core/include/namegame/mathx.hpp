#pragma once

#include <span>

namespace namegame::mathx {

double log_sum_exp(std::span<const double> xs);

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
// Continued-fraction evaluation (modified Lentz), converged to ~1e-15.
double regularized_ibeta(double a, double b, double x);

// Upper tail P[F(d1, d2) >= f].
double f_tail(double f, double d1, double d2);

// Two-sided p-value P[|T(df)| >= |t|].
double t_two_sided_p(double t, double df);

}  // namespace namegame::mathx
