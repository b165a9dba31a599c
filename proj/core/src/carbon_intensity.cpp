#include "hpccarbon/carbon_intensity.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "hpccarbon/errors.hpp"
#include "hpccarbon/lineformat.hpp"

namespace hpccarbon {

namespace {

constexpr const char* kCsvHeader = "timestamp,intensity_gco2_per_kwh";

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line, const std::string& why) {
  throw ValidationError("line " + std::to_string(line) + ": " + why);
}

// `# region_id: X` / `# utc_offset_minutes: N` comment directives let a
// file carry its own identity instead of relying on caller defaults.
void apply_directive(const std::string& comment, int line, IntensityTrace& trace) {
  const std::string body = trim(comment);
  const auto colon = body.find(':');
  if (colon == std::string::npos) return;
  const std::string key = trim(body.substr(0, colon));
  const std::string value = trim(body.substr(colon + 1));
  if (key == "region_id") {
    if (value.empty()) fail(line, "region_id directive needs a value");
    trace.region_id = value;
  } else if (key == "utc_offset_minutes") {
    trace.utc_offset_minutes = static_cast<int>(
        lineformat::parse_integer(value, "line " + std::to_string(line) +
                                             ": utc_offset_minutes directive"));
  }
}

// Linear interpolation between order statistics of a sorted vector.
double quantile(const std::vector<double>& sorted, double p) {
  const double position = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(position);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = position - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

int local_hour_of_day(std::int64_t utc_hour_index, int utc_offset_minutes) {
  const std::int64_t local_seconds =
      utc_hour_index * kSecondsPerHour + std::int64_t{utc_offset_minutes} * 60;
  const std::int64_t hour = floor_div(local_seconds, kSecondsPerHour) % 24;
  return static_cast<int>(hour < 0 ? hour + 24 : hour);
}

} // namespace

IntensityTrace load_trace(std::istream& in, const std::string& default_region_id,
                          int default_utc_offset_minutes) {
  IntensityTrace trace;
  trace.region_id = default_region_id;
  trace.utc_offset_minutes = default_utc_offset_minutes;

  std::string raw;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      apply_directive(line.substr(1), line_no, trace);
      continue;
    }
    if (!saw_header) {
      if (line != kCsvHeader)
        fail(line_no, std::string("expected header \"") + kCsvHeader + "\"");
      saw_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      fail(line_no, "expected \"<timestamp>,<intensity>\"");
    IntensitySample sample;
    try {
      sample.timestamp_s = parse_rfc3339(trim(line.substr(0, comma)));
    } catch (const ValidationError& err) {
      fail(line_no, err.what());
    }
    sample.intensity_g_per_kwh =
        lineformat::parse_number(trim(line.substr(comma + 1)),
                                 "line " + std::to_string(line_no) + ": intensity");
    if (sample.intensity_g_per_kwh < 0.0)
      fail(line_no, "intensity must be >= 0");
    trace.samples.push_back(sample);
  }
  if (!saw_header) throw ValidationError("missing CSV header line");
  if (trace.samples.empty()) throw ValidationError("trace has no samples");

  std::stable_sort(trace.samples.begin(), trace.samples.end(),
                   [](const IntensitySample& a, const IntensitySample& b) {
                     return a.timestamp_s < b.timestamp_s;
                   });
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    if (trace.samples[i].timestamp_s == trace.samples[i - 1].timestamp_s)
      throw ValidationError("duplicate timestamp \"" +
                            format_rfc3339_utc(trace.samples[i].timestamp_s) + "\"");
  }
  return trace;
}

IntensityTrace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trace file \"" + path + "\"");
  try {
    return load_trace(in, std::filesystem::path(path).stem().string(), 0);
  } catch (const ValidationError& err) {
    throw ValidationError(path + ": " + err.what());
  }
}

IntensityStats stats(const IntensityTrace& trace) {
  if (trace.samples.empty()) throw ValidationError("trace has no samples");

  std::vector<double> values;
  values.reserve(trace.samples.size());
  for (const auto& sample : trace.samples) values.push_back(sample.intensity_g_per_kwh);
  std::sort(values.begin(), values.end());

  IntensityStats out;
  out.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  out.cov_percent = out.mean > 0.0 ? 100.0 * out.std / out.mean : 0.0;
  out.min = values.front();
  out.max = values.back();
  out.q1 = quantile(values, 0.25);
  out.median = quantile(values, 0.5);
  out.q3 = quantile(values, 0.75);
  return out;
}

StepIntegral step_integral(const IntensityTrace& trace, UtcSeconds start, UtcSeconds end) {
  if (start >= end) throw ValidationError("window start must precede its end");

  StepIntegral out;
  const auto& samples = trace.samples;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const UtcSeconds from = std::max(start, samples[i].timestamp_s);
    const UtcSeconds to = i + 1 < samples.size()
                              ? std::min(end, samples[i + 1].timestamp_s)
                              : end;
    if (to <= from) continue;
    const auto seconds = to - from;
    out.weighted_sum += samples[i].intensity_g_per_kwh * static_cast<double>(seconds);
    out.covered_seconds += seconds;
  }
  return out;
}

double window_average(const IntensityTrace& trace, UtcSeconds start, UtcSeconds end) {
  const StepIntegral integral = step_integral(trace, start, end);
  if (integral.covered_seconds == 0)
    throw AnalysisError("window [" + format_rfc3339_utc(start) + ", " +
                        format_rfc3339_utc(end) + ") does not overlap trace \"" +
                        trace.region_id + "\"");
  return integral.weighted_sum / static_cast<double>(integral.covered_seconds);
}

IntensityTrace resample_hourly(const IntensityTrace& trace) {
  IntensityTrace hourly;
  hourly.region_id = trace.region_id;
  hourly.utc_offset_minutes = trace.utc_offset_minutes;
  if (trace.samples.empty()) return hourly;

  // Hours carrying at least one source sample, in order.
  std::vector<std::int64_t> hour_indices;
  for (const auto& sample : trace.samples) {
    const std::int64_t hour = floor_div(sample.timestamp_s, kSecondsPerHour);
    if (hour_indices.empty() || hour_indices.back() != hour)
      hour_indices.push_back(hour);
  }
  // One forward sweep: `seg` never moves backwards, so the total work is
  // linear in samples + buckets rather than quadratic.
  const auto& samples = trace.samples;
  std::size_t seg = 0;
  for (std::int64_t hour : hour_indices) {
    const UtcSeconds bucket_start = hour * kSecondsPerHour;
    const UtcSeconds bucket_end = bucket_start + kSecondsPerHour;
    while (seg + 1 < samples.size() && samples[seg + 1].timestamp_s <= bucket_start)
      ++seg;
    double weighted_sum = 0.0;
    std::int64_t covered_seconds = 0;
    for (std::size_t j = seg; j < samples.size() && samples[j].timestamp_s < bucket_end;
         ++j) {
      const UtcSeconds from = std::max(bucket_start, samples[j].timestamp_s);
      const UtcSeconds to = j + 1 < samples.size()
                                ? std::min(bucket_end, samples[j + 1].timestamp_s)
                                : bucket_end;
      if (to <= from) continue;
      weighted_sum += samples[j].intensity_g_per_kwh * static_cast<double>(to - from);
      covered_seconds += to - from;
    }
    hourly.samples.push_back(IntensitySample{
        bucket_start, weighted_sum / static_cast<double>(covered_seconds)});
  }
  return hourly;
}

HourlyWinnerTable hourly_winners(const std::vector<IntensityTrace>& traces,
                                 int reference_utc_offset_minutes) {
  if (traces.size() < 2)
    throw AnalysisError("winner analysis requires at least 2 regions, got " +
                        std::to_string(traces.size()));

  HourlyWinnerTable table;
  table.reference_utc_offset_minutes = reference_utc_offset_minutes;

  std::vector<std::map<std::int64_t, double>> by_hour(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& trace = traces[i];
    if (std::find(table.regions.begin(), table.regions.end(), trace.region_id) !=
        table.regions.end())
      throw ValidationError("duplicate region id \"" + trace.region_id + "\"");
    table.regions.push_back(trace.region_id);
    for (const auto& sample : resample_hourly(trace).samples)
      by_hour[i].emplace(floor_div(sample.timestamp_s, kSecondsPerHour),
                         sample.intensity_g_per_kwh);
  }
  for (int hour = 0; hour < 24; ++hour)
    for (const auto& region : table.regions) table.counts[hour][region] = 0;

  // Walk the sparsest region's hours; keep instants every region covers.
  std::size_t sparsest = 0;
  for (std::size_t i = 1; i < traces.size(); ++i)
    if (by_hour[i].size() < by_hour[sparsest].size()) sparsest = i;

  for (const auto& [hour_index, _] : by_hour[sparsest]) {
    double lowest = std::numeric_limits<double>::infinity();
    std::size_t winner = 0;
    bool tie = false;
    bool complete = true;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto it = by_hour[i].find(hour_index);
      if (it == by_hour[i].end()) {
        complete = false;
        break;
      }
      if (it->second < lowest) {
        lowest = it->second;
        winner = i;
        tie = false;
      } else if (it->second == lowest) {
        tie = true;
      }
    }
    if (!complete) continue;
    ++table.complete_instants;
    const int hour = local_hour_of_day(hour_index, reference_utc_offset_minutes);
    if (tie)
      ++table.ties[hour];
    else
      ++table.counts[hour][table.regions[winner]];
  }
  return table;
}

} // namespace hpccarbon
