#pragma once

namespace iacr {

/// Tracy-Widom CDF of order two. Backed by a table on [-9, 6] (step 0.01)
/// produced by integrating Painleve II with Airy boundary data
/// (tools/gen_tw2_table.py) and interpolated with a monotone cubic.
/// Returns 0 below and 1 above the table.
double tw2_cdf(double x);

/// Inverse of tw2_cdf. Throws InputError unless 0 < p < 1. Probabilities
/// beyond the table ends clamp to the table's abscissa range.
double tw2_quantile(double p);

/// Table abscissa range.
double tw2_table_min();
double tw2_table_max();

}  // namespace iacr
