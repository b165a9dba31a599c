#include "hpccarbon/system_composition.hpp"

#include "hpccarbon/errors.hpp"

namespace hpccarbon {

SystemEmbodiedReport system_embodied(const SystemConfig& config, const Registry& registry) {
  if (config.items.empty()) throw ValidationError("empty system");

  SystemEmbodiedReport report;
  for (ComponentKind kind : kAllKinds) {
    report.per_kind_g[kind] = 0.0;
    report.shares[kind] = 0.0;
  }

  for (const auto& item : config.items) {
    const ComponentRecord& record = registry.get(item.component_id);
    const double grams = static_cast<double>(item.count) * embodied(record).total_g;
    report.per_component_g[item.component_id] += grams;
    report.per_kind_g[record.kind] += grams;
    report.total_g += grams;
  }

  if (report.total_g <= 0.0) {
    report.zero_total = true;
    return report;
  }
  for (ComponentKind kind : kAllKinds)
    report.shares[kind] = report.per_kind_g[kind] / report.total_g;
  report.compute_share =
      report.shares[ComponentKind::Gpu] + report.shares[ComponentKind::Cpu];
  report.memstorage_share = report.shares[ComponentKind::Dram] +
                            report.shares[ComponentKind::Ssd] +
                            report.shares[ComponentKind::Hdd];
  return report;
}

std::pair<double, double> compute_vs_memstorage(const SystemEmbodiedReport& report) {
  return {report.compute_share, report.memstorage_share};
}

std::vector<double> perf_to_embodied_ratios(const std::vector<double>& embodied_totals,
                                            const std::vector<double>& performance,
                                            std::size_t baseline_index) {
  if (embodied_totals.size() != performance.size())
    throw ValidationError("embodied and performance lists differ in length");
  if (embodied_totals.empty()) throw ValidationError("empty ratio input");
  if (baseline_index >= embodied_totals.size())
    throw ValidationError("baseline index out of range");
  for (double value : embodied_totals)
    if (!(value > 0.0)) throw ValidationError("embodied totals must be > 0");
  for (double value : performance)
    if (!(value > 0.0)) throw ValidationError("performance values must be > 0");

  const double embodied_base = embodied_totals[baseline_index];
  const double perf_base = performance[baseline_index];
  std::vector<double> ratios(embodied_totals.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    ratios[i] =
        (performance[i] / perf_base) / (embodied_totals[i] / embodied_base);
  }
  ratios[baseline_index] = 1.0; // exact, by definition
  return ratios;
}

} // namespace hpccarbon
