#pragma once

namespace avrank {

// Standard normal density and CDF.
double normal_pdf(double x);
double normal_cdf(double x);

// Table-interpolated variants, |error| < 1e-8. Used in the kernel-density
// and Monte Carlo inner loops where erfc/exp dominate the runtime.
double fast_normal_pdf(double x);
double fast_normal_cdf(double x);

}  // namespace avrank
