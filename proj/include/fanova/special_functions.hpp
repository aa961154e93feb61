#pragma once

namespace fanova {

// Regularized incomplete beta I_x(a, b), a,b > 0, x in [0,1].
double incomplete_beta(double a, double b, double x);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
double upper_gamma(double a, double x);

// P(F(df1, df2) > f).
double f_tail(double f, double df1, double df2);

// P(chi^2(df) > x).
double chi_square_tail(double x, double df);

} // namespace fanova
