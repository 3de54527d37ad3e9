#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "iacr/metrics.hpp"

namespace iacr {

inline constexpr const char* kMetricSchema = "iacr-metrics/1";

/// First line "# schema: iacr-metrics/1", then the header
/// experiment,group,point_name,point,metric,mean,std_error,trials,seed.
/// Doubles are written with 17 significant digits.
void write_metric_csv(std::ostream& out, const MetricTable& table);

/// Inverse of write_metric_csv. Throws InputError on a missing or unknown
/// schema stamp or a malformed row.
MetricTable read_metric_csv(std::istream& in);

/// Python/matplotlib script that reads <experiment>.csv from its own
/// directory and draws one panel per group.
std::string plot_script(const MetricTable& table);

/// Writes <experiment>.csv and plot_<experiment>.py per table into out_dir
/// (created if needed) and returns the paths written, in order.
std::vector<std::filesystem::path> emit_outputs(std::span<const MetricTable> tables,
                                                const std::filesystem::path& out_dir);

}  // namespace iacr
