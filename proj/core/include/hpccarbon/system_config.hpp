#pragma once

#include <string>
#include <vector>

namespace hpccarbon {

/// One line item in a system bill of materials.
struct SystemItem {
  std::string component_id;
  long count = 1;

  friend bool operator==(const SystemItem&, const SystemItem&) = default;
};

/// A named collection of components plus facility-level parameters.
struct SystemConfig {
  std::string name;
  std::vector<SystemItem> items; // file order, ids unique
  double pue = 1.0;
  std::string region; // optional, informational

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

} // namespace hpccarbon
