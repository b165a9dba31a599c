#include "hpccarbon/operational_carbon.hpp"

#include <cmath>

#include "hpccarbon/errors.hpp"

namespace hpccarbon {

namespace {

bool in_unit_interval(double value) {
  return std::isfinite(value) && value >= 0.0 && value <= 1.0;
}

} // namespace

void validate(const UsagePattern& pattern) {
  if (!in_unit_interval(pattern.usage_rate))
    throw ValidationError("usage_rate must be in [0, 1]");
  if (!in_unit_interval(pattern.allocation_rate))
    throw ValidationError("allocation_rate must be in [0, 1]");
}

void validate(const PowerModel& model) {
  if (!std::isfinite(model.idle_power_w) || model.idle_power_w < 0.0)
    throw ValidationError("idle_power_w must be >= 0");
  if (!std::isfinite(model.active_power_w) || model.active_power_w < model.idle_power_w)
    throw ValidationError("active_power_w must be >= idle_power_w");
  if (model.device_count < 1) throw ValidationError("device_count must be >= 1");
  if (!std::isfinite(model.pue) || model.pue < 1.0)
    throw ValidationError("pue must be >= 1");
}

double effective_kw(const PowerModel& model, const UsagePattern& pattern) {
  validate(model);
  validate(pattern);
  const double blend_w = pattern.usage_rate * model.active_power_w +
                         (1.0 - pattern.usage_rate) * model.idle_power_w;
  return static_cast<double>(model.device_count) * model.pue *
         pattern.allocation_rate * blend_w / 1000.0;
}

EnergyQuantity operational_energy(const PowerModel& model, const UsagePattern& pattern,
                                  double duration_hours) {
  if (!std::isfinite(duration_hours) || duration_hours < 0.0)
    throw ValidationError("duration must be >= 0 hours");
  return EnergyQuantity{effective_kw(model, pattern) * duration_hours};
}

double operational(EnergyQuantity energy, double intensity_g_per_kwh) {
  if (!std::isfinite(intensity_g_per_kwh) || intensity_g_per_kwh < 0.0)
    throw ValidationError("intensity must be >= 0");
  if (!std::isfinite(energy.kwh) || energy.kwh < 0.0)
    throw ValidationError("energy must be >= 0 kWh");
  return energy.kwh * intensity_g_per_kwh;
}

double operational_over_trace(const PowerModel& model, const UsagePattern& pattern,
                              const IntensityTrace& trace, UtcSeconds start,
                              UtcSeconds end) {
  const double kw = effective_kw(model, pattern);
  const StepIntegral integral = step_integral(trace, start, end);
  if (integral.covered_seconds == 0)
    throw AnalysisError("window [" + format_rfc3339_utc(start) + ", " +
                        format_rfc3339_utc(end) + ") does not overlap trace \"" +
                        trace.region_id + "\"");
  // weighted_sum is (g/kWh)*s; divide by 3600 to pair with kW.
  return kw * integral.weighted_sum / 3600.0;
}

} // namespace hpccarbon
