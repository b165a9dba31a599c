#include "hpccarbon/component_carbon.hpp"

#include <cmath>

namespace hpccarbon {
namespace {

void check_finite_nonneg(double value, const char* field) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ValidationError(std::string(field) + " must be finite and >= 0");
  }
}

void check_positive_optional(const std::optional<double>& value, const char* field) {
  if (value && (!std::isfinite(*value) || *value <= 0.0)) {
    throw ValidationError(std::string(field) + " must be > 0 when present");
  }
}

} // namespace

const char* to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Gpu: return "gpu";
    case ComponentKind::Cpu: return "cpu";
    case ComponentKind::Dram: return "dram";
    case ComponentKind::Ssd: return "ssd";
    case ComponentKind::Hdd: return "hdd";
  }
  return "?";
}

std::optional<ComponentKind> parse_component_kind(std::string_view text) {
  for (ComponentKind kind : kAllKinds) {
    if (text == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

bool is_processor(ComponentKind kind) {
  return kind == ComponentKind::Gpu || kind == ComponentKind::Cpu;
}

void validate(const ProcessorDieSpec& spec) {
  if (!std::isfinite(spec.die_area_cm2) || spec.die_area_cm2 <= 0.0) {
    throw ValidationError("die_area_cm2 must be > 0");
  }
  check_finite_nonneg(spec.fpa_g_per_cm2, "fpa_g_per_cm2");
  check_finite_nonneg(spec.gpa_g_per_cm2, "gpa_g_per_cm2");
  check_finite_nonneg(spec.mpa_g_per_cm2, "mpa_g_per_cm2");
  if (!std::isfinite(spec.fab_yield) || spec.fab_yield <= 0.0 || spec.fab_yield > 1.0) {
    throw ValidationError("fab_yield must be in (0, 1]");
  }
  if (spec.ic_count < 0) {
    throw ValidationError("ic_count must be >= 0");
  }
}

void validate(const CapacityDeviceSpec& spec) {
  if (!std::isfinite(spec.capacity_gb) || spec.capacity_gb <= 0.0) {
    throw ValidationError("capacity_gb must be > 0");
  }
  check_finite_nonneg(spec.epc_g_per_gb, "epc_g_per_gb");
  if (const auto* per_ic = std::get_if<PerIcPackaging>(&spec.packaging)) {
    if (per_ic->ic_count < 0) {
      throw ValidationError("ic_count must be >= 0");
    }
  } else {
    check_finite_nonneg(std::get<RatioPackaging>(spec.packaging).ratio, "packaging_ratio");
  }
}

void validate(const ComponentRecord& record) {
  if (record.id.empty()) {
    throw ValidationError("component id must not be empty");
  }
  const bool has_die_spec = std::holds_alternative<ProcessorDieSpec>(record.spec);
  if (is_processor(record.kind) != has_die_spec) {
    throw ValidationError("kind/spec mismatch: component \"" + record.id + "\" of kind " +
                          to_string(record.kind) +
                          (has_die_spec ? " cannot carry a processor die spec"
                                        : " cannot carry a capacity device spec"));
  }
  if (has_die_spec) {
    validate(std::get<ProcessorDieSpec>(record.spec));
  } else {
    validate(std::get<CapacityDeviceSpec>(record.spec));
  }
  check_positive_optional(record.peak_fp64_tflops, "peak_fp64_tflops");
  check_positive_optional(record.bandwidth_gb_per_s, "bandwidth_gb_per_s");
  check_positive_optional(record.active_power_w, "active_power_w");
  if (record.idle_power_w &&
      (!std::isfinite(*record.idle_power_w) || *record.idle_power_w < 0.0)) {
    throw ValidationError("idle_power_w must be >= 0 when present");
  }
}

double manufacturing_processor(const ProcessorDieSpec& spec) {
  validate(spec);
  return (spec.fpa_g_per_cm2 + spec.gpa_g_per_cm2 + spec.mpa_g_per_cm2) *
         spec.die_area_cm2 / spec.fab_yield;
}

double manufacturing_capacity(const CapacityDeviceSpec& spec) {
  validate(spec);
  return spec.epc_g_per_gb * spec.capacity_gb;
}

double packaging(const ComponentRecord& record) {
  validate(record);
  if (const auto* die = std::get_if<ProcessorDieSpec>(&record.spec)) {
    return kPackagingGramsPerIc * static_cast<double>(die->ic_count);
  }
  const auto& device = std::get<CapacityDeviceSpec>(record.spec);
  if (const auto* per_ic = std::get_if<PerIcPackaging>(&device.packaging)) {
    return kPackagingGramsPerIc * static_cast<double>(per_ic->ic_count);
  }
  return std::get<RatioPackaging>(device.packaging).ratio * manufacturing_capacity(device);
}

EmbodiedBreakdown embodied(const ComponentRecord& record) {
  validate(record);
  EmbodiedBreakdown breakdown;
  if (const auto* die = std::get_if<ProcessorDieSpec>(&record.spec)) {
    breakdown.manufacturing_g = manufacturing_processor(*die);
  } else {
    breakdown.manufacturing_g = manufacturing_capacity(std::get<CapacityDeviceSpec>(record.spec));
  }
  breakdown.packaging_g = packaging(record);
  breakdown.total_g = breakdown.manufacturing_g + breakdown.packaging_g;
  return breakdown;
}

double normalize_per_flops(const EmbodiedBreakdown& breakdown, double peak_fp64_tflops) {
  if (!std::isfinite(peak_fp64_tflops) || peak_fp64_tflops <= 0.0) {
    throw MissingDataError("performance figure required for normalization");
  }
  return breakdown.total_g / peak_fp64_tflops;
}

double normalize_per_bandwidth(const EmbodiedBreakdown& breakdown, double bandwidth_gb_per_s) {
  if (!std::isfinite(bandwidth_gb_per_s) || bandwidth_gb_per_s <= 0.0) {
    throw MissingDataError("bandwidth figure required for normalization");
  }
  return breakdown.total_g / bandwidth_gb_per_s;
}

} // namespace hpccarbon
