#ifndef DETFUSE_SPECFUN_HPP
#define DETFUSE_SPECFUN_HPP

// Scalar special functions used by the estimators, fusion rules and the
// closed-form divergence expressions.  All routines are pure, thread safe
// and throw std::domain_error on non-finite or out-of-domain arguments.

namespace detfuse::specfun {

// Gaussian tail probability Q(x) = P(Z > x), Z standard normal.
// Absolute error below 1e-12 over the real line.
double q_function(double x);

// Exponential integral E1(x) = int_x^inf exp(-t)/t dt, x > 0.
// Relative error below 1e-10 on [1e-8, 50].
double exp_integral_e1(double x);

// exp(x) * E1(x) without overflow for large x.
double exp_integral_e1_scaled(double x);

// Modified Bessel functions of the first kind, orders 0 and 1.
// Guarded to |x| <= 700 where the result still fits in a double;
// larger arguments throw std::range_error.
double bessel_i0(double x);
double bessel_i1(double x);

// exp(-|x|) * I0(x) and exp(-|x|) * I1(x), valid for any finite x.
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

// log(I0(x)) for any finite x, no overflow.
double log_bessel_i0(double x);

// Confluent hypergeometric value F(-1/2, 1; x) for x <= 0, evaluated
// through the Bessel identity
//   F(-1/2,1;x) = exp(x/2) * (x I1(x/2) - (x - 1) I0(x/2)).
// Relative error below 1e-8 against the defining series on [-50, 0].
double kummer_f1_half(double x);

// D(x) = x * exp(x) * E1(x) for x > 0.  Strictly increasing from 0 to 1.
double d_func(double x);

} // namespace detfuse::specfun

#endif
