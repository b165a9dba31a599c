#pragma once

#include <string>

#include "hpccarbon/carbon_intensity.hpp"

namespace hpccarbon {

// Usage-rate sweep points: medium, and 1.5x less / more of it.
inline constexpr double kLowUsageRate = 0.2667;
inline constexpr double kMediumUsageRate = 0.40;
inline constexpr double kHighUsageRate = 0.60;
inline constexpr double kDefaultAllocationRate = 1.0;

/// How busy a device is: usage_rate is the fraction of allocated time it
/// is active; allocation_rate the fraction of wall time it is allocated.
struct UsagePattern {
  double usage_rate = kMediumUsageRate;
  double allocation_rate = kDefaultAllocationRate;
  std::string name;

  friend bool operator==(const UsagePattern&, const UsagePattern&) = default;
};

/// Facility-level draw of a fleet of identical devices. Active time
/// draws active_power, the rest idle_power; PUE scales everything.
struct PowerModel {
  double active_power_w = 0.0;
  double idle_power_w = 0.0;
  long device_count = 1;
  double pue = 1.0;

  friend bool operator==(const PowerModel&, const PowerModel&) = default;
};

struct EnergyQuantity {
  double kwh = 0.0;
};

void validate(const UsagePattern& pattern);
void validate(const PowerModel& model);

/// Facility power of the blend, in kW:
/// device_count * pue * allocation * (u * active + (1-u) * idle) / 1000.
double effective_kw(const PowerModel& model, const UsagePattern& pattern);

/// effective_kw * duration. Throws ValidationError on invalid inputs or
/// negative duration.
EnergyQuantity operational_energy(const PowerModel& model, const UsagePattern& pattern,
                                  double duration_hours);

/// Grams CO2 for energy drawn at a constant intensity.
double operational(EnergyQuantity energy, double intensity_g_per_kwh);

/// Operational carbon over [start, end) with the trace's time-varying
/// intensity, counting only the trace-covered part of the window.
/// Throws AnalysisError when the window does not overlap the trace.
double operational_over_trace(const PowerModel& model, const UsagePattern& pattern,
                              const IntensityTrace& trace, UtcSeconds start,
                              UtcSeconds end);

} // namespace hpccarbon
