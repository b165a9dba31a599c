#pragma once

#include <map>
#include <string>
#include <vector>

#include "hpccarbon/component_carbon.hpp"
#include "hpccarbon/registry.hpp"
#include "hpccarbon/system_config.hpp"

namespace hpccarbon {

/// Embodied carbon of a whole bill of materials, grams CO2, with
/// per-component and per-kind breakdowns. Shares are fractions of the
/// total; all five kinds appear in per_kind/shares even when absent
/// from the system (value 0).
struct SystemEmbodiedReport {
  double total_g = 0.0;
  std::map<std::string, double> per_component_g;
  std::map<ComponentKind, double> per_kind_g;
  std::map<ComponentKind, double> shares;
  double compute_share = 0.0;    // GPU + CPU
  double memstorage_share = 0.0; // DRAM + SSD + HDD
  bool zero_total = false;       // set instead of reporting NaN shares
};

/// Aggregates count * embodied(record).total over the system's items.
/// Throws ValidationError for unresolved ids or an empty system, and
/// MissingDataError when an item's record carries UNKNOWN fields.
SystemEmbodiedReport system_embodied(const SystemConfig& config, const Registry& registry);

/// The (GPU+CPU, DRAM+SSD+HDD) share split of an existing report.
std::pair<double, double> compute_vs_memstorage(const SystemEmbodiedReport& report);

/// Performance-to-embodied-carbon ratios against a baseline entry:
/// ratio_i = (perf_i / perf_base) / (embodied_i / embodied_base).
/// The ratio at baseline_index is exactly 1.
std::vector<double> perf_to_embodied_ratios(const std::vector<double>& embodied_totals,
                                            const std::vector<double>& performance,
                                            std::size_t baseline_index);

} // namespace hpccarbon
