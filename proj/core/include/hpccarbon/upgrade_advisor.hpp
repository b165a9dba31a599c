#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "hpccarbon/carbon_intensity.hpp"
#include "hpccarbon/operational_carbon.hpp"

namespace hpccarbon {

// Intensity sweep points, gCO2/kWh: high, medium, low scenarios.
inline constexpr double kHighIntensity = 400.0;
inline constexpr double kMediumIntensity = 200.0;
inline constexpr double kLowIntensity = 20.0;

inline constexpr double kHoursPerYear = 8760.0;

/// How a performance improvement turns into energy savings.
/// WorkConserving: the same work finishes in proportionally less active
/// time on the new hardware (active fraction shrinks by 1 - improvement).
/// ConstantActiveTime: active time stays put; only the new power model's
/// lower draw saves energy.
enum class UpgradeMode { WorkConserving, ConstantActiveTime };

/// Run-old-vs-run-new comparison for the same incoming work; the old
/// hardware retires at the upgrade. Intensity is either a constant or a
/// trace (evaluation starts at the trace's first sample).
struct UpgradeScenario {
  double new_embodied_g = 0.0;
  PowerModel old_power;
  PowerModel new_power;
  UsagePattern pattern;
  double perf_improvement = 0.0; // fraction of active time shaved off, [0, 1)
  UpgradeMode mode = UpgradeMode::WorkConserving;
  std::variant<double, IntensityTrace> intensity = kMediumIntensity;
  double horizon_years = 5.0;
};

struct CurvePoint {
  double t_years = 0.0;
  double cumulative_saving_g = 0.0;
};

/// Cumulative saving over time. Starts at -new_embodied at t = 0;
/// break_even_years is the first root, absent if the curve never
/// reaches zero within the horizon.
struct SavingCurve {
  std::string label;
  std::vector<CurvePoint> points;
  std::optional<double> break_even_years;
};

void validate(const UpgradeScenario& scenario);

/// Annual energy with the active share scaled by
/// effective_active_fraction (1 = run as-is), kWh per 8760 h year.
double annual_operational_rate(const PowerModel& power, const UsagePattern& pattern,
                               double effective_active_fraction);

/// Energy the scenario saves per year of operation, kWh: old rate minus
/// new rate after applying the scenario's upgrade mode.
double annual_saving_rate_kwh(const UpgradeScenario& scenario);

/// Samples the cumulative-saving curve on [0, horizon] at
/// samples_per_year resolution (plus the exact horizon endpoint).
SavingCurve saving_curve(const UpgradeScenario& scenario, int samples_per_year);

/// Smallest t >= 0 with cumulative saving >= 0: closed form under
/// constant intensity, exact interval walk under a trace. Absent when
/// the scenario never pays back within the horizon.
std::optional<double> break_even(const UpgradeScenario& scenario);

/// One curve per usage rate, everything else fixed.
std::vector<SavingCurve> usage_sensitivity(const UpgradeScenario& scenario,
                                           const std::vector<double>& usage_rates,
                                           int samples_per_year = 12);

/// CSV with header `t_years,cumulative_saving_g`.
void write_curve_csv(std::ostream& out, const SavingCurve& curve);

/// A named scenario parsed from a scenario file.
struct ScenarioFile {
  std::string name;
  UpgradeScenario scenario;
};

/// Parses a scenario file; a referenced intensity trace CSV is resolved
/// relative to `base_dir`.
ScenarioFile load_scenario(std::istream& in, const std::string& base_dir);
ScenarioFile load_scenario_file(const std::string& path);

} // namespace hpccarbon
