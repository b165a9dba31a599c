#include "hpccarbon/upgrade_advisor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hpccarbon/errors.hpp"
#include "hpccarbon/lineformat.hpp"

namespace hpccarbon {

namespace {

constexpr int kFormatVersion = 1;
constexpr double kSecondsPerYear = kHoursPerYear * 3600.0;

double effective_active_fraction(const UpgradeScenario& scenario) {
  return scenario.mode == UpgradeMode::WorkConserving
             ? 1.0 - scenario.perf_improvement
             : 1.0;
}

UsagePattern scaled_pattern(const UsagePattern& pattern, double effective_active_fraction) {
  UsagePattern scaled = pattern;
  scaled.usage_rate *= effective_active_fraction;
  return scaled;
}

/// Facility-power drop the upgrade buys, kW (may be negative).
double saving_kw(const UpgradeScenario& scenario) {
  return effective_kw(scenario.old_power, scenario.pattern) -
         effective_kw(scenario.new_power,
                      scaled_pattern(scenario.pattern, effective_active_fraction(scenario)));
}

double saving_at(const UpgradeScenario& scenario, double t_years) {
  if (const auto* constant = std::get_if<double>(&scenario.intensity)) {
    return *constant * annual_saving_rate_kwh(scenario) * t_years -
           scenario.new_embodied_g;
  }
  const auto& trace = std::get<IntensityTrace>(scenario.intensity);
  if (t_years <= 0.0) return -scenario.new_embodied_g;
  const UtcSeconds start = trace.samples.front().timestamp_s;
  const auto span = static_cast<UtcSeconds>(std::llround(t_years * kSecondsPerYear));
  const StepIntegral integral = step_integral(trace, start, start + span);
  return saving_kw(scenario) * integral.weighted_sum / 3600.0 - scenario.new_embodied_g;
}

std::optional<double> break_even_trace(const UpgradeScenario& scenario) {
  const double kw = saving_kw(scenario);
  if (kw <= 0.0) return std::nullopt;

  const auto& samples = std::get<IntensityTrace>(scenario.intensity).samples;
  const UtcSeconds start = samples.front().timestamp_s;
  const UtcSeconds horizon_end =
      start + static_cast<UtcSeconds>(std::llround(scenario.horizon_years * kSecondsPerYear));
  // Grams break even when the intensity integral reaches this many
  // (g/kWh)-seconds; walk the trace's constant segments to the crossing.
  const double target = scenario.new_embodied_g * 3600.0 / kw;
  double integral = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const UtcSeconds from = samples[i].timestamp_s;
    const UtcSeconds to =
        i + 1 < samples.size() ? std::min(horizon_end, samples[i + 1].timestamp_s)
                               : horizon_end;
    if (to <= from) break;
    const double rate = samples[i].intensity_g_per_kwh;
    const double gain = rate * static_cast<double>(to - from);
    if (integral + gain >= target && rate > 0.0) {
      const double cross_s = static_cast<double>(from - start) + (target - integral) / rate;
      return cross_s / kSecondsPerYear;
    }
    integral += gain;
  }
  return std::nullopt;
}

[[noreturn]] void scenario_fail(const lineformat::SectionReader& reader,
                                const std::string& message) {
  throw ValidationError(reader.describe() + ": " + message);
}

PowerModel read_power_model(lineformat::SectionReader& reader, const std::string& prefix) {
  PowerModel model;
  model.active_power_w = reader.require_number(prefix + "_active_power_w");
  model.idle_power_w = reader.require_number(prefix + "_idle_power_w");
  model.device_count = reader.optional_integer(prefix + "_device_count").value_or(1);
  model.pue = reader.optional_number(prefix + "_pue").value_or(1.0);
  return model;
}

} // namespace

void validate(const UpgradeScenario& scenario) {
  if (!std::isfinite(scenario.new_embodied_g) || scenario.new_embodied_g < 0.0)
    throw ValidationError("new_embodied_g must be >= 0");
  if (!std::isfinite(scenario.perf_improvement) || scenario.perf_improvement < 0.0 ||
      scenario.perf_improvement >= 1.0)
    throw ValidationError("perf_improvement must be in [0, 1)");
  if (!std::isfinite(scenario.horizon_years) || scenario.horizon_years <= 0.0)
    throw ValidationError("horizon_years must be > 0");
  validate(scenario.old_power);
  validate(scenario.new_power);
  validate(scenario.pattern);
  if (const auto* constant = std::get_if<double>(&scenario.intensity)) {
    if (!std::isfinite(*constant) || *constant < 0.0)
      throw ValidationError("intensity must be >= 0");
  } else if (std::get<IntensityTrace>(scenario.intensity).samples.empty()) {
    throw ValidationError("intensity trace has no samples");
  }
}

double annual_operational_rate(const PowerModel& power, const UsagePattern& pattern,
                               double effective_active_fraction) {
  if (!std::isfinite(effective_active_fraction) || effective_active_fraction < 0.0 ||
      effective_active_fraction > 1.0)
    throw ValidationError("effective_active_fraction must be in [0, 1]");
  return operational_energy(power, scaled_pattern(pattern, effective_active_fraction),
                            kHoursPerYear)
      .kwh;
}

double annual_saving_rate_kwh(const UpgradeScenario& scenario) {
  return annual_operational_rate(scenario.old_power, scenario.pattern, 1.0) -
         annual_operational_rate(scenario.new_power, scenario.pattern,
                                 effective_active_fraction(scenario));
}

SavingCurve saving_curve(const UpgradeScenario& scenario, int samples_per_year) {
  validate(scenario);
  if (samples_per_year < 1) throw ValidationError("samples_per_year must be >= 1");

  SavingCurve curve;
  const auto last_step = static_cast<long>(
      std::floor(scenario.horizon_years * samples_per_year + 1e-9));
  for (long i = 0; i <= last_step; ++i) {
    const double t = static_cast<double>(i) / samples_per_year;
    curve.points.push_back(CurvePoint{t, saving_at(scenario, t)});
  }
  if (curve.points.back().t_years < scenario.horizon_years - 1e-12) {
    curve.points.push_back(CurvePoint{scenario.horizon_years,
                                      saving_at(scenario, scenario.horizon_years)});
  }
  curve.break_even_years = break_even(scenario);
  return curve;
}

std::optional<double> break_even(const UpgradeScenario& scenario) {
  validate(scenario);
  if (scenario.new_embodied_g <= 0.0) return 0.0;

  if (const auto* constant = std::get_if<double>(&scenario.intensity)) {
    const double slope_g_per_year = *constant * annual_saving_rate_kwh(scenario);
    if (slope_g_per_year <= 0.0) return std::nullopt;
    const double t = scenario.new_embodied_g / slope_g_per_year;
    if (t > scenario.horizon_years) return std::nullopt;
    return t;
  }
  auto t = break_even_trace(scenario);
  if (t && *t > scenario.horizon_years) return std::nullopt;
  return t;
}

std::vector<SavingCurve> usage_sensitivity(const UpgradeScenario& scenario,
                                           const std::vector<double>& usage_rates,
                                           int samples_per_year) {
  std::vector<SavingCurve> curves;
  curves.reserve(usage_rates.size());
  for (double rate : usage_rates) {
    UpgradeScenario variant = scenario;
    variant.pattern.usage_rate = rate;
    curves.push_back(saving_curve(variant, samples_per_year));
  }
  return curves;
}

void write_curve_csv(std::ostream& out, const SavingCurve& curve) {
  out << "t_years,cumulative_saving_g\n";
  char row[64];
  for (const auto& point : curve.points) {
    std::snprintf(row, sizeof(row), "%.6f,%.1f\n", point.t_years,
                  point.cumulative_saving_g);
    out << row;
  }
}

ScenarioFile load_scenario(std::istream& in, const std::string& base_dir) {
  auto doc = lineformat::parse(in);
  lineformat::require_version(doc, kFormatVersion);
  if (doc.sections.size() != 1 || doc.sections.front().type != "scenario") {
    int line = doc.sections.empty() ? 0 : doc.sections.front().line;
    throw ValidationError("line " + std::to_string(line) +
                          ": expected exactly one [scenario <name>] section");
  }

  const auto& section = doc.sections.front();
  lineformat::SectionReader reader(section);
  ScenarioFile file;
  file.name = section.name;
  UpgradeScenario& scenario = file.scenario;

  scenario.new_embodied_g = reader.require_number("new_embodied_g");
  scenario.perf_improvement = reader.optional_number("perf_improvement").value_or(0.0);
  scenario.horizon_years = reader.optional_number("horizon_years").value_or(5.0);
  scenario.pattern.usage_rate =
      reader.optional_number("usage_rate").value_or(kMediumUsageRate);
  scenario.pattern.allocation_rate =
      reader.optional_number("allocation_rate").value_or(kDefaultAllocationRate);
  if (auto mode = reader.optional_string("mode")) {
    if (*mode == "work_conserving")
      scenario.mode = UpgradeMode::WorkConserving;
    else if (*mode == "constant_active_time")
      scenario.mode = UpgradeMode::ConstantActiveTime;
    else
      scenario_fail(reader, "mode must be work_conserving or constant_active_time");
  }

  const bool has_constant = reader.has("intensity_g_per_kwh");
  const bool has_trace = reader.has("intensity_trace_csv");
  if (has_constant == has_trace)
    scenario_fail(reader,
                  "expected exactly one of intensity_g_per_kwh or intensity_trace_csv");
  if (has_constant) {
    scenario.intensity = reader.require_number("intensity_g_per_kwh");
  } else {
    std::filesystem::path trace_path(reader.require_string("intensity_trace_csv"));
    if (trace_path.is_relative() && !base_dir.empty())
      trace_path = std::filesystem::path(base_dir) / trace_path;
    scenario.intensity = load_trace_file(trace_path.string());
  }

  scenario.old_power = read_power_model(reader, "old");
  scenario.new_power = read_power_model(reader, "new");
  reader.finish();

  try {
    validate(scenario);
  } catch (const ValidationError& err) {
    scenario_fail(reader, err.what());
  }
  return file;
}

ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file \"" + path + "\"");
  return load_scenario(in, std::filesystem::path(path).parent_path().string());
}

} // namespace hpccarbon
