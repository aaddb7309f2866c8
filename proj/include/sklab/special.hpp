#pragma once

namespace sklab {

// Li2(x) = sum x^n / n^2 on [0,1].
double dilog(double x);

// Riemann zeta for real s > 1.
double zeta_value(double s);

double log_factorial(double n);
double log_binomial(double n, double k);

}  // namespace sklab
