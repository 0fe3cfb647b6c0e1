#pragma once

#include <cmath>
#include <functional>

namespace pufkey {

// Standard normal CDF / tail / density.
double norm_cdf(double x);
double norm_tail(double x);  // Q(x) = 1 - Phi(x), accurate in the far tail
double norm_pdf(double x);

// Inverse standard normal CDF (Wichura's PPND16, ~1e-15 relative).
// p must be in (0,1).
double norm_quantile(double p);

// Binary entropy in bits. H(0) = H(1) = 0.
double binary_entropy(double p);

// p * q convolution for BSCs: p(1-q) + (1-p)q.
double bsc_convolve(double p, double q);

// log of C(n,k) via lgamma.
double log_choose(int n, int k);

// Adaptive Gauss-Legendre quadrature on [a,b], absolute tolerance.
// 15-point rule per panel, bisect until the two-half estimate agrees.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12);

}  // namespace pufkey
