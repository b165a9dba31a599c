#pragma once

#include <istream>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hpccarbon/component_carbon.hpp"
#include "hpccarbon/system_config.hpp"

namespace hpccarbon {

/// A component whose file entry carries UNKNOWN markers. It loads and
/// lists fine, but cannot be evaluated until the data is supplied.
struct IncompleteComponent {
  ComponentKind kind = ComponentKind::Gpu;
  std::vector<std::pair<std::string, std::string>> fields; // key -> raw value, file order
  std::vector<std::string> unknown_fields;

  friend bool operator==(const IncompleteComponent&, const IncompleteComponent&) = default;
};

struct RegistryEntry {
  std::variant<ComponentRecord, IncompleteComponent> value;

  ComponentKind kind() const;
  bool complete() const { return std::holds_alternative<ComponentRecord>(value); }

  friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

/// Validated component lookup. Immutable after load; safe to share.
class Registry {
public:
  Registry() = default;

  /// Programmatic construction from already-validated records.
  static Registry from_records(std::vector<ComponentRecord> records);

  bool contains(const std::string& id) const;

  /// Throws ValidationError for an unregistered id, MissingDataError for
  /// a component with UNKNOWN fields.
  const ComponentRecord& get(const std::string& id) const;

  const std::map<std::string, RegistryEntry>& entries() const { return entries_; }
  const std::string& source_digest() const { return source_digest_; }

  friend Registry load_registry(std::istream& in);
  friend bool operator==(const Registry& a, const Registry& b) {
    return a.entries_ == b.entries_; // digest reflects bytes, not content
  }

private:
  std::map<std::string, RegistryEntry> entries_;
  std::string source_digest_;
};

/// Parses and validates a registry file. All-or-nothing: the first
/// problem aborts the load with a line-numbered ValidationError.
Registry load_registry(std::istream& in);
Registry load_registry_file(const std::string& path);

/// Canonical text form; load_registry(serialize_registry(r)) == r.
std::string serialize_registry(const Registry& registry);

/// Parses a system-config file against a loaded registry. Every
/// component reference must resolve; counts must be >= 1; pue >= 1.
SystemConfig load_system(std::istream& in, const Registry& registry);
SystemConfig load_system_file(const std::string& path, const Registry& registry);

} // namespace hpccarbon
