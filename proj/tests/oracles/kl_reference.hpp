#pragma once

// Reference divergences computed straight from the densities, independent of
// the closed forms used by the library.

namespace purex::testref {

/// ∫ φ_p log(φ_p/φ_q) for N(p, σ²) against N(q, σ²) by composite Simpson.
double kl_gaussian_quadrature(double sigma2, double p, double q);

/// Σ_{x∈{0,1}} P(x) log(P(x)/Q(x)) with 0 log 0 = 0.
double kl_bernoulli_sum(double p, double q);

/// θ with E_θ[X] = p, by bisection on the log-partition derivative.
double natural_param_gaussian(double sigma2, double p);
double natural_param_bernoulli(double p);

}  // namespace purex::testref
