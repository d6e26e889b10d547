#pragma once

namespace l96da {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal cdf.
double normal_cdf(double x);

/// Upper tail 1 - cdf(x), accurate for large positive x.
double normal_cdf_upper(double x);

/// Inverse of the standard normal cdf. Requires p in (0,1); accurate to
/// near machine precision over the full range.
double normal_quantile(double p);

}  // namespace l96da
