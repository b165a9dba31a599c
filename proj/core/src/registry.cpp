#include "hpccarbon/registry.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hpccarbon/digest.hpp"
#include "hpccarbon/errors.hpp"
#include "hpccarbon/lineformat.hpp"
#include "hpccarbon/timestamp.hpp"

namespace hpccarbon {

namespace {

constexpr int kFormatVersion = 1;

using lineformat::SectionReader;

[[noreturn]] void fail(const SectionReader& reader, const std::string& message) {
  throw ValidationError(reader.describe() + ": " + message);
}

// Keys that only make sense for the other spec family; naming them in the
// error beats a generic "unknown field".
const std::set<std::string> kProcessorOnlyKeys = {
    "die_area_cm2", "fpa_g_per_cm2", "gpa_g_per_cm2", "mpa_g_per_cm2", "fab_yield"};
const std::set<std::string> kCapacityOnlyKeys = {"capacity_gb", "epc_g_per_gb",
                                                 "packaging_ratio"};

void reject_mismatched_keys(const SectionReader& reader,
                            const lineformat::Section& section, ComponentKind kind) {
  const auto& wrong = is_processor(kind) ? kCapacityOnlyKeys : kProcessorOnlyKeys;
  for (const auto& entry : section.entries) {
    if (wrong.count(entry.key) > 0) {
      fail(reader, "kind/spec mismatch: field \"" + entry.key + "\" does not apply to " +
                       to_string(kind) + " components (line " +
                       std::to_string(entry.line) + ")");
    }
  }
}

// Optional figure-of-merit field; the literal UNKNOWN counts as absent
// (the gap surfaces later as a missing-data error if the figure is used).
std::optional<double> optional_figure(SectionReader& reader, const std::string& key) {
  auto raw = reader.optional_string(key);
  if (!raw || *raw == "UNKNOWN") return std::nullopt;
  return lineformat::parse_number(*raw, "field \"" + key + "\" in " + reader.describe());
}

void check_positive(const SectionReader& reader, const std::string& key,
                    std::optional<double> value, bool allow_zero = false) {
  if (!value) return;
  if (*value > 0.0 || (allow_zero && *value == 0.0)) return;
  fail(reader, key + std::string(allow_zero ? " must be >= 0" : " must be > 0"));
}

RegistryEntry parse_component(const lineformat::Section& section, ComponentKind kind) {
  SectionReader reader(section);
  reject_mismatched_keys(reader, section, kind);

  std::vector<std::string> unknown;
  ComponentRecord record;
  record.id = section.name;
  record.kind = kind;

  if (is_processor(kind)) {
    ProcessorDieSpec spec;
    auto die_area = reader.require_number_or_unknown("die_area_cm2", unknown);
    auto fpa = reader.require_number_or_unknown("fpa_g_per_cm2", unknown);
    auto gpa = reader.require_number_or_unknown("gpa_g_per_cm2", unknown);
    auto mpa = reader.require_number_or_unknown("mpa_g_per_cm2", unknown);
    auto yield = reader.optional_number("fab_yield");
    spec.fab_yield = yield.value_or(kDefaultFabYield);
    spec.ic_count = reader.require_integer("ic_count");
    check_positive(reader, "die_area_cm2", die_area);
    check_positive(reader, "fpa_g_per_cm2", fpa, /*allow_zero=*/true);
    check_positive(reader, "gpa_g_per_cm2", gpa, /*allow_zero=*/true);
    check_positive(reader, "mpa_g_per_cm2", mpa, /*allow_zero=*/true);
    if (spec.fab_yield <= 0.0 || spec.fab_yield > 1.0)
      fail(reader, "fab_yield must be in (0, 1]");
    if (spec.ic_count < 0) fail(reader, "ic_count must be >= 0");
    spec.die_area_cm2 = die_area.value_or(0.0);
    spec.fpa_g_per_cm2 = fpa.value_or(0.0);
    spec.gpa_g_per_cm2 = gpa.value_or(0.0);
    spec.mpa_g_per_cm2 = mpa.value_or(0.0);
    record.spec = spec;
  } else {
    CapacityDeviceSpec spec;
    auto capacity = reader.require_number_or_unknown("capacity_gb", unknown);
    auto epc = reader.require_number_or_unknown("epc_g_per_gb", unknown);
    check_positive(reader, "capacity_gb", capacity);
    check_positive(reader, "epc_g_per_gb", epc, /*allow_zero=*/true);
    spec.capacity_gb = capacity.value_or(0.0);
    spec.epc_g_per_gb = epc.value_or(0.0);

    const bool has_ic = reader.has("ic_count");
    const bool has_ratio = reader.has("packaging_ratio");
    if (has_ic == has_ratio)
      fail(reader, "expected exactly one of ic_count or packaging_ratio");
    if (has_ic) {
      long ic_count = reader.require_integer("ic_count");
      if (ic_count < 0) fail(reader, "ic_count must be >= 0");
      spec.packaging = PerIcPackaging{ic_count};
    } else {
      auto ratio = reader.require_number_or_unknown("packaging_ratio", unknown);
      check_positive(reader, "packaging_ratio", ratio, /*allow_zero=*/true);
      spec.packaging = RatioPackaging{ratio.value_or(0.0)};
    }
    record.spec = spec;
  }

  record.peak_fp64_tflops = optional_figure(reader, "peak_fp64_tflops");
  record.bandwidth_gb_per_s = optional_figure(reader, "bandwidth_gb_per_s");
  record.active_power_w = optional_figure(reader, "active_power_w");
  record.idle_power_w = optional_figure(reader, "idle_power_w");
  check_positive(reader, "peak_fp64_tflops", record.peak_fp64_tflops);
  check_positive(reader, "bandwidth_gb_per_s", record.bandwidth_gb_per_s);
  check_positive(reader, "active_power_w", record.active_power_w);
  check_positive(reader, "idle_power_w", record.idle_power_w, /*allow_zero=*/true);
  if (auto date = reader.optional_string("release_date")) {
    try {
      check_calendar_date(*date);
    } catch (const ValidationError& err) {
      fail(reader, err.what());
    }
    record.release_date = *date;
  }

  reader.finish();

  if (!unknown.empty()) {
    IncompleteComponent incomplete;
    incomplete.kind = kind;
    incomplete.unknown_fields = unknown;
    incomplete.fields.reserve(section.entries.size());
    for (const auto& entry : section.entries)
      incomplete.fields.emplace_back(entry.key, entry.value);
    return RegistryEntry{std::move(incomplete)};
  }

  validate(record);
  return RegistryEntry{std::move(record)};
}

std::string read_all(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::ifstream open_or_fail(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ValidationError(std::string("cannot open ") + what + " \"" + path + "\"");
  return in;
}

void append_optional(std::ostringstream& out, const char* key,
                     const std::optional<double>& value) {
  if (value) out << key << ' ' << lineformat::format_number(*value) << '\n';
}

} // namespace

ComponentKind RegistryEntry::kind() const {
  if (const auto* record = std::get_if<ComponentRecord>(&value)) return record->kind;
  return std::get<IncompleteComponent>(value).kind;
}

Registry Registry::from_records(std::vector<ComponentRecord> records) {
  Registry registry;
  for (auto& record : records) {
    validate(record);
    std::string id = record.id;
    auto [it, inserted] =
        registry.entries_.emplace(std::move(id), RegistryEntry{std::move(record)});
    if (!inserted)
      throw ValidationError("duplicate component id \"" + it->first + "\"");
  }
  registry.source_digest_ = fnv1a64_hex(serialize_registry(registry));
  return registry;
}

bool Registry::contains(const std::string& id) const {
  return entries_.find(id) != entries_.end();
}

const ComponentRecord& Registry::get(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end())
    throw ValidationError("unknown component id \"" + id + "\"");
  if (const auto* record = std::get_if<ComponentRecord>(&it->second.value))
    return *record;
  const auto& incomplete = std::get<IncompleteComponent>(it->second.value);
  std::string fields;
  for (const auto& field : incomplete.unknown_fields) {
    if (!fields.empty()) fields += ", ";
    fields += field;
  }
  throw MissingDataError("component \"" + id + "\" has UNKNOWN fields: " + fields);
}

Registry load_registry(std::istream& in) {
  const std::string bytes = read_all(in);
  std::istringstream stream(bytes);
  auto doc = lineformat::parse(stream);
  lineformat::require_version(doc, kFormatVersion);

  Registry registry;
  for (const auto& section : doc.sections) {
    auto kind = parse_component_kind(section.type);
    if (!kind)
      throw ValidationError("line " + std::to_string(section.line) +
                            ": unknown component kind \"" + section.type + "\"");
    auto entry = parse_component(section, *kind);
    auto [it, inserted] = registry.entries_.emplace(section.name, std::move(entry));
    if (!inserted)
      throw ValidationError("line " + std::to_string(section.line) +
                            ": duplicate component id \"" + section.name + "\"");
  }
  registry.source_digest_ = fnv1a64_hex(bytes);
  return registry;
}

Registry load_registry_file(const std::string& path) {
  auto in = open_or_fail(path, "registry file");
  return load_registry(in);
}

std::string serialize_registry(const Registry& registry) {
  std::ostringstream out;
  out << "format_version " << kFormatVersion << '\n';
  for (const auto& [id, entry] : registry.entries()) {
    out << '\n' << '[' << to_string(entry.kind()) << ' ' << id << "]\n";
    if (const auto* incomplete = std::get_if<IncompleteComponent>(&entry.value)) {
      for (const auto& [key, value] : incomplete->fields)
        out << key << ' ' << value << '\n';
      continue;
    }
    const auto& record = std::get<ComponentRecord>(entry.value);
    if (const auto* die = std::get_if<ProcessorDieSpec>(&record.spec)) {
      out << "die_area_cm2 " << lineformat::format_number(die->die_area_cm2) << '\n';
      out << "fpa_g_per_cm2 " << lineformat::format_number(die->fpa_g_per_cm2) << '\n';
      out << "gpa_g_per_cm2 " << lineformat::format_number(die->gpa_g_per_cm2) << '\n';
      out << "mpa_g_per_cm2 " << lineformat::format_number(die->mpa_g_per_cm2) << '\n';
      out << "fab_yield " << lineformat::format_number(die->fab_yield) << '\n';
      out << "ic_count " << die->ic_count << '\n';
    } else {
      const auto& device = std::get<CapacityDeviceSpec>(record.spec);
      out << "capacity_gb " << lineformat::format_number(device.capacity_gb) << '\n';
      out << "epc_g_per_gb " << lineformat::format_number(device.epc_g_per_gb) << '\n';
      if (const auto* per_ic = std::get_if<PerIcPackaging>(&device.packaging))
        out << "ic_count " << per_ic->ic_count << '\n';
      else
        out << "packaging_ratio "
            << lineformat::format_number(std::get<RatioPackaging>(device.packaging).ratio)
            << '\n';
    }
    append_optional(out, "peak_fp64_tflops", record.peak_fp64_tflops);
    append_optional(out, "bandwidth_gb_per_s", record.bandwidth_gb_per_s);
    append_optional(out, "active_power_w", record.active_power_w);
    append_optional(out, "idle_power_w", record.idle_power_w);
    if (record.release_date) out << "release_date " << *record.release_date << '\n';
  }
  return out.str();
}

SystemConfig load_system(std::istream& in, const Registry& registry) {
  auto doc = lineformat::parse(in);
  lineformat::require_version(doc, kFormatVersion);
  if (doc.sections.size() != 1 || doc.sections.front().type != "system") {
    int line = doc.sections.empty() ? 0 : doc.sections.front().line;
    throw ValidationError("line " + std::to_string(line) +
                          ": expected exactly one [system <name>] section");
  }

  const auto& section = doc.sections.front();
  SectionReader reader(section);
  SystemConfig config;
  config.name = section.name;
  config.pue = reader.optional_number("pue").value_or(1.0);
  if (config.pue < 1.0) fail(reader, "pue must be >= 1");
  config.region = reader.optional_string("region").value_or("");

  std::set<std::string> seen;
  for (const auto* entry : reader.repeated("component")) {
    const std::string at = "line " + std::to_string(entry->line) + ": ";
    std::istringstream fields(entry->value);
    std::string id, count_text, extra;
    if (!(fields >> id >> count_text) || (fields >> extra))
      throw ValidationError(at + "expected \"component <id> <count>\"");
    if (!registry.contains(id))
      throw ValidationError(at + "unknown component id \"" + id + "\"");
    if (!seen.insert(id).second)
      throw ValidationError(at + "duplicate component \"" + id + "\" in system");
    long count = lineformat::parse_integer(count_text, "count for component \"" + id + "\"");
    if (count < 1) throw ValidationError(at + "component count must be >= 1");
    config.items.push_back(SystemItem{id, count});
  }
  reader.finish();

  if (config.items.empty()) fail(reader, "empty system");
  return config;
}

SystemConfig load_system_file(const std::string& path, const Registry& registry) {
  auto in = open_or_fail(path, "system file");
  return load_system(in, registry);
}

} // namespace hpccarbon
