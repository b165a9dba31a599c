#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "hpccarbon/timestamp.hpp"

namespace hpccarbon {

struct IntensitySample {
  UtcSeconds timestamp_s = 0;
  double intensity_g_per_kwh = 0.0;

  friend bool operator==(const IntensitySample&, const IntensitySample&) = default;
};

/// A regional carbon-intensity time series. Samples are strictly
/// increasing in time. Each sample's value holds from its timestamp
/// until the next sample; the last value holds indefinitely. The span
/// before the first sample has no data.
struct IntensityTrace {
  std::string region_id;
  int utc_offset_minutes = 0;
  std::vector<IntensitySample> samples;

  friend bool operator==(const IntensityTrace&, const IntensityTrace&) = default;
};

/// Population statistics over a trace's sample values (divide by n).
/// Quartiles interpolate linearly between order statistics; the median
/// of an even-sized trace is the midpoint of the two central values.
struct IntensityStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
  double cov_percent = 0.0; // 100 * std / mean; 0 when mean == 0
  double min = 0.0;
  double max = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Per-hour-of-day winner counts in the reference time zone. counts[h]
/// maps every analyzed region to the number of instants (one per day)
/// at which it alone had the lowest intensity; exact ties land in
/// ties[h] instead. Only instants covered by all regions are counted.
struct HourlyWinnerTable {
  int reference_utc_offset_minutes = 0;
  std::vector<std::string> regions; // input order
  std::array<std::map<std::string, long>, 24> counts{};
  std::array<long, 24> ties{};
  long complete_instants = 0;
};

/// Integral of the trace's step function over [start, end):
/// weighted_sum is gCO2/kWh * seconds over the covered span.
struct StepIntegral {
  double weighted_sum = 0.0;
  std::int64_t covered_seconds = 0;
};

/// Parses the intensity CSV (header `timestamp,intensity_gco2_per_kwh`,
/// RFC 3339 timestamps, `#` comment lines). Rows may arrive unsorted;
/// the trace is sorted on load. Comment directives `# region_id: X` and
/// `# utc_offset_minutes: N` override the defaults passed in.
/// Throws ValidationError with line numbers on malformed rows,
/// duplicate timestamps, or negative intensities.
IntensityTrace load_trace(std::istream& in, const std::string& default_region_id,
                          int default_utc_offset_minutes);

/// load_trace with the filename stem as the default region id.
IntensityTrace load_trace_file(const std::string& path);

IntensityStats stats(const IntensityTrace& trace);

StepIntegral step_integral(const IntensityTrace& trace, UtcSeconds start, UtcSeconds end);

/// Time-weighted mean intensity over [start, end); throws AnalysisError
/// when the window does not overlap the trace.
double window_average(const IntensityTrace& trace, UtcSeconds start, UtcSeconds end);

/// Down-samples to one sample per UTC hour by time-weighted mean. An
/// hour appears only if at least one source sample falls inside it; gaps
/// are preserved, not filled.
IntensityTrace resample_hourly(const IntensityTrace& trace);

/// For every UTC hour covered by all regions (after hourly resampling),
/// credits the region with strictly lowest intensity under that hour's
/// reference-zone hour-of-day. Throws AnalysisError for < 2 traces.
HourlyWinnerTable hourly_winners(const std::vector<IntensityTrace>& traces,
                                 int reference_utc_offset_minutes);

} // namespace hpccarbon
