// hpc-carbon: embodied/operational carbon estimation for HPC hardware.
//
// Subcommands: embodied, system, intensity, upgrade. Output is
// deterministic for identical inputs (opt into timestamps with --stamp)
// and starts with an envelope comment carrying an input digest.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "hpccarbon/carbon_intensity.hpp"
#include "hpccarbon/component_carbon.hpp"
#include "hpccarbon/digest.hpp"
#include "hpccarbon/errors.hpp"
#include "hpccarbon/lineformat.hpp"
#include "hpccarbon/operational_carbon.hpp"
#include "hpccarbon/registry.hpp"
#include "hpccarbon/system_composition.hpp"
#include "hpccarbon/timestamp.hpp"
#include "hpccarbon/upgrade_advisor.hpp"

namespace hc = hpccarbon;

namespace {

// Fixed output precision keeps diffs and golden tests stable.
std::string grams(double v) { return fmt::format("{:.1f}", v); }
std::string fraction(double v) { return fmt::format("{:.4f}", v); }
std::string percent(double fraction) { return fmt::format("{:.1f}", 100.0 * fraction); }
std::string years(double v) { return fmt::format("{:.4f}", v); }
std::string compact(double v) { return hc::lineformat::format_number(v); }

constexpr const char* kNoBreakEven = "none within horizon";

struct OutputOpts {
  std::string format = "table";
  bool stamp = false;

  bool csv() const { return format == "csv"; }
};

void add_output_flags(CLI::App* cmd, OutputOpts& opts) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"table", "csv"}))
      ->capture_default_str();
  cmd->add_flag("--stamp", opts.stamp, "Add a generation timestamp line");
}

void print_envelope(const std::string& command, const std::string& digest_material,
                    const OutputOpts& opts) {
  fmt::print("# hpc-carbon schema=1 command={} inputs={}\n", command,
             hc::fnv1a64_hex(digest_material));
  if (opts.stamp)
    fmt::print("# generated {}\n",
               hc::format_rfc3339_utc(static_cast<hc::UtcSeconds>(std::time(nullptr))));
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw hc::ValidationError(fmt::format("cannot open {} \"{}\"", what, path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Two-column key/value block ("field,value" rows in CSV mode).
void print_pairs(const std::vector<std::pair<std::string, std::string>>& rows,
                 const OutputOpts& opts) {
  if (opts.csv()) {
    fmt::print("field,value\n");
    for (const auto& [key, value] : rows) fmt::print("{},{}\n", key, value);
    return;
  }
  std::size_t width = 0;
  for (const auto& [key, value] : rows) width = std::max(width, key.size());
  for (const auto& [key, value] : rows)
    fmt::print("{:<{}}  {}\n", key, width, value);
}

// Space-aligned table; first row is the header. CSV mode joins on commas.
void print_table(const std::vector<std::vector<std::string>>& rows,
                 const OutputOpts& opts) {
  if (rows.empty()) return;
  if (opts.csv()) {
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        fmt::print("{}{}", c == 0 ? "" : ",", row[c]);
      fmt::print("\n");
    }
    return;
  }
  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c + 1 == row.size())
        fmt::print("{}", row[c]);
      else
        fmt::print("{:<{}}  ", row[c], widths[c]);
    }
    fmt::print("\n");
  }
}

hc::Registry open_registry(const std::string& flag_path) {
  std::string path = flag_path;
  if (path.empty()) {
    if (const char* env = std::getenv("HPC_CARBON_REGISTRY")) path = env;
  }
  if (path.empty())
    throw hc::ValidationError(
        "no registry given: pass --registry or set HPC_CARBON_REGISTRY");
  return hc::load_registry_file(path);
}

// ---------------------------------------------------------------- embodied

struct EmbodiedOpts {
  std::string registry_path;
  std::string component_id;
  bool per_flops = false;
  bool per_bandwidth = false;
  OutputOpts out;
};

int cmd_embodied(const EmbodiedOpts& opts) {
  const hc::Registry registry = open_registry(opts.registry_path);
  const hc::ComponentRecord& record = registry.get(opts.component_id);
  const hc::EmbodiedBreakdown breakdown = hc::embodied(record);

  std::vector<std::pair<std::string, std::string>> rows = {
      {"component", record.id},
      {"kind", hc::to_string(record.kind)},
      {"manufacturing_g", grams(breakdown.manufacturing_g)},
      {"packaging_g", grams(breakdown.packaging_g)},
      {"total_g", grams(breakdown.total_g)},
  };
  if (opts.per_flops) {
    rows.emplace_back("per_flops_g_per_tflops",
                      grams(hc::normalize_per_flops(
                          breakdown, record.peak_fp64_tflops.value_or(0.0))));
  }
  if (opts.per_bandwidth) {
    rows.emplace_back("per_bandwidth_g_per_gbps",
                      grams(hc::normalize_per_bandwidth(
                          breakdown, record.bandwidth_gb_per_s.value_or(0.0))));
  }

  print_envelope("embodied",
                 fmt::format("embodied|{}|{}|{}{}", registry.source_digest(),
                             opts.component_id, opts.per_flops ? "f" : "",
                             opts.per_bandwidth ? "b" : ""),
                 opts.out);
  print_pairs(rows, opts.out);
  return 0;
}

// ------------------------------------------------------------------ system

struct SystemOpts {
  std::string registry_path;
  std::string system_path;
  OutputOpts out;
};

int cmd_system(const SystemOpts& opts) {
  const hc::Registry registry = open_registry(opts.registry_path);
  const std::string system_bytes = read_file(opts.system_path, "system file");
  std::istringstream system_stream(system_bytes);
  const hc::SystemConfig config = hc::load_system(system_stream, registry);
  const hc::SystemEmbodiedReport report = hc::system_embodied(config, registry);

  print_envelope("system",
                 fmt::format("system|{}|{}", registry.source_digest(),
                             hc::fnv1a64_hex(system_bytes)),
                 opts.out);

  std::vector<std::pair<std::string, std::string>> overview = {
      {"system", config.name},
      {"pue", compact(config.pue)},
  };
  if (!config.region.empty()) overview.emplace_back("region", config.region);
  overview.emplace_back("total_g", grams(report.total_g));
  if (report.zero_total) {
    overview.emplace_back("warning", "zero embodied total; shares reported as 0");
  }
  overview.emplace_back("compute_share_pct", percent(report.compute_share));
  overview.emplace_back("memstorage_share_pct", percent(report.memstorage_share));
  print_pairs(overview, opts.out);
  fmt::print("\n");

  std::map<std::string, long> counts;
  for (const auto& item : config.items) counts[item.component_id] += item.count;

  std::vector<std::vector<std::string>> items;
  items.push_back({"component_id", "kind", "count", "embodied_g", "share_pct"});
  for (const auto& [id, grams_total] : report.per_component_g) {
    const double share = report.zero_total ? 0.0 : grams_total / report.total_g;
    items.push_back({id, hc::to_string(registry.entries().at(id).kind()),
                     std::to_string(counts.at(id)), grams(grams_total), percent(share)});
  }
  print_table(items, opts.out);
  fmt::print("\n");

  std::vector<std::vector<std::string>> kinds;
  kinds.push_back({"kind", "embodied_g", "share_pct"});
  for (hc::ComponentKind kind : hc::kAllKinds) {
    kinds.push_back({hc::to_string(kind), grams(report.per_kind_g.at(kind)),
                     percent(report.shares.at(kind))});
  }
  print_table(kinds, opts.out);
  return 0;
}

// --------------------------------------------------------------- intensity

struct IntensityOpts {
  std::vector<std::string> trace_paths;
  bool stats = false;
  bool winners = false;
  int ref_offset_minutes = 0;
  OutputOpts out;
};

int cmd_intensity(const IntensityOpts& opts) {
  std::vector<hc::IntensityTrace> traces;
  std::string digest_material =
      fmt::format("intensity|{}|{}", opts.winners ? "winners" : "stats",
                  opts.ref_offset_minutes);
  for (const auto& path : opts.trace_paths) {
    const std::string bytes = read_file(path, "trace file");
    digest_material += "|" + hc::fnv1a64_hex(bytes);
    std::istringstream stream(bytes);
    try {
      traces.push_back(
          hc::load_trace(stream, std::filesystem::path(path).stem().string(), 0));
    } catch (const hc::ValidationError& err) {
      throw hc::ValidationError(fmt::format("{}: {}", path, err.what()));
    }
  }

  if (!opts.winners) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"region_id", "count", "mean", "median", "std", "cov_pct", "min",
                    "q1", "q3", "max"});
    for (const auto& trace : traces) {
      const hc::IntensityStats s = hc::stats(trace);
      rows.push_back({trace.region_id, std::to_string(s.count), grams(s.mean),
                      grams(s.median), grams(s.std),
                      fmt::format("{:.1f}", s.cov_percent), grams(s.min), grams(s.q1),
                      grams(s.q3), grams(s.max)});
    }
    print_envelope("intensity", digest_material, opts.out);
    print_table(rows, opts.out);
    return 0;
  }

  const hc::HourlyWinnerTable table =
      hc::hourly_winners(traces, opts.ref_offset_minutes);
  print_envelope("intensity", digest_material, opts.out);
  fmt::print("# reference_utc_offset_minutes {}\n", table.reference_utc_offset_minutes);
  fmt::print("# complete_instants {}\n", table.complete_instants);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"hour"};
  header.insert(header.end(), table.regions.begin(), table.regions.end());
  header.push_back("ties");
  rows.push_back(header);
  for (int hour = 0; hour < 24; ++hour) {
    std::vector<std::string> row = {std::to_string(hour)};
    for (const auto& region : table.regions)
      row.push_back(std::to_string(table.counts[hour].at(region)));
    row.push_back(std::to_string(table.ties[hour]));
    rows.push_back(row);
  }
  print_table(rows, opts.out);
  return 0;
}

// ----------------------------------------------------------------- upgrade

struct UpgradeOpts {
  std::string scenario_path;
  std::vector<double> sweep_intensity;
  std::vector<double> sweep_usage;
  std::string curves_dir;
  int samples_per_year = 12;
  OutputOpts out;
};

std::string intensity_label(const hc::UpgradeScenario& scenario) {
  if (const auto* constant = std::get_if<double>(&scenario.intensity))
    return fmt::format("{} g/kWh", compact(*constant));
  return fmt::format("trace {}",
                     std::get<hc::IntensityTrace>(scenario.intensity).region_id);
}

void write_curve_file(const std::string& dir, const std::string& stem,
                      const hc::SavingCurve& curve) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / (stem + ".csv")).string();
  std::ofstream out(path);
  if (!out) throw hc::ValidationError(fmt::format("cannot write curve file \"{}\"", path));
  hc::write_curve_csv(out, curve);
}

int cmd_upgrade(const UpgradeOpts& opts) {
  const std::string scenario_bytes = read_file(opts.scenario_path, "scenario file");
  std::istringstream scenario_stream(scenario_bytes);
  const hc::ScenarioFile file = hc::load_scenario(
      scenario_stream,
      std::filesystem::path(opts.scenario_path).parent_path().string());
  const hc::UpgradeScenario& base = file.scenario;

  // With no sweep flag both default sweeps run: the paper-style intensity
  // what-if (constants replace the scenario's own intensity) plus the
  // usage sweep under the scenario's own intensity.
  std::vector<double> intensities = opts.sweep_intensity;
  std::vector<double> usages = opts.sweep_usage;
  if (intensities.empty() && usages.empty()) {
    intensities = {hc::kHighIntensity, hc::kMediumIntensity, hc::kLowIntensity};
    usages = {hc::kLowUsageRate, hc::kMediumUsageRate, hc::kHighUsageRate};
  }

  // Evaluate everything before the first byte of output so a failing
  // sweep point cannot leave a half-written report behind.
  std::vector<std::pair<std::string, hc::SavingCurve>> intensity_curves;
  for (double intensity : intensities) {
    hc::UpgradeScenario variant = base;
    variant.intensity = intensity;
    intensity_curves.emplace_back(compact(intensity),
                                  hc::saving_curve(variant, opts.samples_per_year));
  }
  std::vector<std::pair<std::string, hc::SavingCurve>> usage_curves;
  for (double usage : usages) {
    hc::UpgradeScenario variant = base;
    variant.pattern.usage_rate = usage;
    usage_curves.emplace_back(compact(usage),
                              hc::saving_curve(variant, opts.samples_per_year));
  }
  for (const auto& [label, curve] : intensity_curves)
    write_curve_file(opts.curves_dir, fmt::format("{}_intensity_{}", file.name, label),
                     curve);
  for (const auto& [label, curve] : usage_curves)
    write_curve_file(opts.curves_dir, fmt::format("{}_usage_{}", file.name, label),
                     curve);

  std::string digest_material =
      fmt::format("upgrade|{}|{}", hc::fnv1a64_hex(scenario_bytes), opts.samples_per_year);
  for (double v : intensities) digest_material += "|i" + compact(v);
  for (double v : usages) digest_material += "|u" + compact(v);
  print_envelope("upgrade", digest_material, opts.out);

  print_pairs(
      {
          {"scenario", file.name},
          {"mode", base.mode == hc::UpgradeMode::WorkConserving ? "work_conserving"
                                                                : "constant_active_time"},
          {"new_embodied_g", grams(base.new_embodied_g)},
          {"perf_improvement", fraction(base.perf_improvement)},
          {"usage_rate", fraction(base.pattern.usage_rate)},
          {"allocation_rate", fraction(base.pattern.allocation_rate)},
          {"horizon_years", years(base.horizon_years)},
          {"intensity", intensity_label(base)},
      },
      opts.out);

  if (!intensity_curves.empty()) {
    fmt::print("\n");
    if (!opts.out.csv()) fmt::print("sweep intensity_g_per_kwh\n");
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"intensity_g_per_kwh", "break_even_years"});
    for (const auto& [label, curve] : intensity_curves)
      rows.push_back({label, curve.break_even_years ? years(*curve.break_even_years)
                                                    : kNoBreakEven});
    print_table(rows, opts.out);
  }

  if (!usage_curves.empty()) {
    fmt::print("\n");
    if (!opts.out.csv()) fmt::print("sweep usage_rate\n");
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"usage_rate", "break_even_years"});
    for (std::size_t i = 0; i < usage_curves.size(); ++i)
      rows.push_back({fraction(usages[i]), usage_curves[i].second.break_even_years
                                               ? years(*usage_curves[i].second.break_even_years)
                                               : kNoBreakEven});
    print_table(rows, opts.out);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embodied and operational carbon estimation for HPC hardware"};
  app.require_subcommand(1);

  EmbodiedOpts embodied_opts;
  auto* embodied_cmd =
      app.add_subcommand("embodied", "Embodied carbon of one registry component");
  embodied_cmd->add_option("component", embodied_opts.component_id, "Component id")
      ->required();
  embodied_cmd->add_option("--registry", embodied_opts.registry_path,
                           "Registry file (default: $HPC_CARBON_REGISTRY)");
  embodied_cmd->add_flag("--per-flops", embodied_opts.per_flops,
                         "Also print gCO2 per TFLOPS (FP64)");
  embodied_cmd->add_flag("--per-bandwidth", embodied_opts.per_bandwidth,
                         "Also print gCO2 per GB/s");
  add_output_flags(embodied_cmd, embodied_opts.out);

  SystemOpts system_opts;
  auto* system_cmd =
      app.add_subcommand("system", "Embodied carbon of a whole bill of materials");
  system_cmd->add_option("system_file", system_opts.system_path, "System config file")
      ->required();
  system_cmd->add_option("--registry", system_opts.registry_path,
                         "Registry file (default: $HPC_CARBON_REGISTRY)");
  add_output_flags(system_cmd, system_opts.out);

  IntensityOpts intensity_opts;
  auto* intensity_cmd =
      app.add_subcommand("intensity", "Carbon-intensity trace statistics and winners");
  intensity_cmd->add_option("traces", intensity_opts.trace_paths, "Intensity CSV files")
      ->required();
  auto* stats_flag = intensity_cmd->add_flag("--stats", intensity_opts.stats,
                                             "Per-region statistics (default)");
  auto* winners_flag = intensity_cmd->add_flag(
      "--winners", intensity_opts.winners, "Hourly lowest-intensity winner counts");
  winners_flag->excludes(stats_flag);
  intensity_cmd
      ->add_option("--ref-offset", intensity_opts.ref_offset_minutes,
                   "Reference zone UTC offset, minutes (winners)")
      ->needs(winners_flag)
      ->capture_default_str();
  add_output_flags(intensity_cmd, intensity_opts.out);

  UpgradeOpts upgrade_opts;
  auto* upgrade_cmd =
      app.add_subcommand("upgrade", "Upgrade saving curves and break-even times");
  upgrade_cmd->add_option("scenario", upgrade_opts.scenario_path, "Scenario file")
      ->required();
  auto* sweep_intensity_flag =
      upgrade_cmd
          ->add_option("--sweep-intensity", upgrade_opts.sweep_intensity,
                       "Constant intensities to sweep, gCO2/kWh (default 400,200,20)")
          ->delimiter(',');
  upgrade_cmd
      ->add_option("--sweep-usage", upgrade_opts.sweep_usage,
                   "Usage rates to sweep (default 0.2667,0.40,0.60)")
      ->delimiter(',')
      ->excludes(sweep_intensity_flag);
  upgrade_cmd->add_option("--curves-dir", upgrade_opts.curves_dir,
                          "Write one saving-curve CSV per sweep point here");
  upgrade_cmd
      ->add_option("--samples-per-year", upgrade_opts.samples_per_year,
                   "Curve sampling resolution")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_output_flags(upgrade_cmd, upgrade_opts.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2; // help/version exit clean; bad usage is 2
  }

  try {
    if (app.got_subcommand(embodied_cmd)) return cmd_embodied(embodied_opts);
    if (app.got_subcommand(system_cmd)) return cmd_system(system_opts);
    if (app.got_subcommand(intensity_cmd)) return cmd_intensity(intensity_opts);
    if (app.got_subcommand(upgrade_cmd)) return cmd_upgrade(upgrade_opts);
  } catch (const hc::MissingDataError& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return 3;
  } catch (const hc::AnalysisError& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return 4;
  } catch (const hc::Error& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return 2;
  }
  return 0;
}
