#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "hpccarbon/errors.hpp"

namespace hpccarbon {

// Per-device embodied carbon model. All carbon values are grams of CO2;
// capacities are decimal GB, areas cm^2, performance TFLOPS (FP64),
// bandwidth GB/s.

enum class ComponentKind { Gpu, Cpu, Dram, Ssd, Hdd };

inline constexpr ComponentKind kAllKinds[] = {
    ComponentKind::Gpu, ComponentKind::Cpu, ComponentKind::Dram,
    ComponentKind::Ssd, ComponentKind::Hdd};

const char* to_string(ComponentKind kind);
std::optional<ComponentKind> parse_component_kind(std::string_view text);

/// GPUs and CPUs carry a die spec; DRAM/SSD/HDD carry a capacity spec.
bool is_processor(ComponentKind kind);

/// Fraction of manufactured dies that are usable, when not overridden.
inline constexpr double kDefaultFabYield = 0.875;

/// Average packaging overhead per integrated-circuit package, grams CO2.
inline constexpr double kPackagingGramsPerIc = 150.0;

/// Die-level inputs for processor manufacturing carbon.
struct ProcessorDieSpec {
  double die_area_cm2 = 0.0;
  double fpa_g_per_cm2 = 0.0; // fab operations emissions per unit area
  double gpa_g_per_cm2 = 0.0; // process chemicals and gases per unit area
  double mpa_g_per_cm2 = 0.0; // raw materials per unit area
  double fab_yield = kDefaultFabYield;
  long ic_count = 0;

  friend bool operator==(const ProcessorDieSpec&, const ProcessorDieSpec&) = default;
};

struct PerIcPackaging {
  long ic_count = 0;
  friend bool operator==(const PerIcPackaging&, const PerIcPackaging&) = default;
};

struct RatioPackaging {
  double ratio = 0.0; // packaging-to-manufacturing ratio
  friend bool operator==(const RatioPackaging&, const RatioPackaging&) = default;
};

using PackagingMode = std::variant<PerIcPackaging, RatioPackaging>;

/// Capacity-based inputs for DRAM/SSD/HDD manufacturing carbon.
struct CapacityDeviceSpec {
  double capacity_gb = 0.0;
  double epc_g_per_gb = 0.0; // emission per capacity
  PackagingMode packaging = PerIcPackaging{};

  friend bool operator==(const CapacityDeviceSpec&, const CapacityDeviceSpec&) = default;
};

/// One hardware part with its carbon parameters and optional figures of
/// merit. Optional numeric fields, when present, must be > 0 (idle power
/// may be 0).
struct ComponentRecord {
  std::string id;
  ComponentKind kind = ComponentKind::Gpu;
  std::variant<ProcessorDieSpec, CapacityDeviceSpec> spec;
  std::optional<double> peak_fp64_tflops;
  std::optional<double> bandwidth_gb_per_s;
  std::optional<double> active_power_w;
  std::optional<double> idle_power_w;
  std::optional<std::string> release_date; // YYYY-MM-DD, metadata only

  friend bool operator==(const ComponentRecord&, const ComponentRecord&) = default;
};

/// Manufacturing + packaging split for one device, grams CO2.
struct EmbodiedBreakdown {
  double manufacturing_g = 0.0;
  double packaging_g = 0.0;
  double total_g = 0.0;
};

// Throw ValidationError naming the offending field.
void validate(const ProcessorDieSpec& spec);
void validate(const CapacityDeviceSpec& spec);
void validate(const ComponentRecord& record);

/// (fpa + gpa + mpa) * die_area / fab_yield, grams CO2.
double manufacturing_processor(const ProcessorDieSpec& spec);

/// epc * capacity, grams CO2.
double manufacturing_capacity(const CapacityDeviceSpec& spec);

/// Per-IC overhead for processors and per-IC-mode capacity devices;
/// ratio-of-manufacturing otherwise.
double packaging(const ComponentRecord& record);

/// Manufacturing plus packaging for one device.
EmbodiedBreakdown embodied(const ComponentRecord& record);

/// total / peak FP64; throws MissingDataError unless peak > 0.
double normalize_per_flops(const EmbodiedBreakdown& breakdown, double peak_fp64_tflops);

/// total / bandwidth; throws MissingDataError unless bandwidth > 0.
double normalize_per_bandwidth(const EmbodiedBreakdown& breakdown, double bandwidth_gb_per_s);

} // namespace hpccarbon
