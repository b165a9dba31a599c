#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace hpccarbon::lineformat {

// Grammar shared by the registry, system, and scenario files:
//
//   format_version 1
//
//   [gpu a100]              # '[' <section-type> <name> ']'
//   die_area_cm2 8.26       # <key> <value...>, one per line
//
// '#' starts a comment anywhere in a line. Blank lines are ignored.
// Numeric values use plain decimal notation (no exponents, no unit
// suffixes); units are fixed by the field name.

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string type;
  std::string name;
  int line = 0;
  std::vector<Entry> entries;
};

struct Document {
  int format_version = 0;
  std::vector<Section> sections;
};

/// Parses a whole stream; throws ValidationError with line numbers.
Document parse(std::istream& in);

/// Rejects documents whose format_version differs from `supported`.
void require_version(const Document& doc, int supported);

/// Strict plain-decimal number parse ("-12", "0.875"); no exponents.
/// Throws ValidationError mentioning `context` on failure.
double parse_number(const std::string& text, const std::string& context);

/// Shortest plain-decimal rendering that parses back to exactly `value`.
std::string format_number(double value);

/// Strict integer parse; throws ValidationError mentioning `context`.
long parse_integer(const std::string& text, const std::string& context);

/// Typed, consume-tracking view over one section. Getter errors carry the
/// section name and line number; finish() rejects unrecognized keys.
class SectionReader {
public:
  explicit SectionReader(const Section& section);

  std::string require_string(const std::string& key);
  std::optional<std::string> optional_string(const std::string& key);

  double require_number(const std::string& key);
  std::optional<double> optional_number(const std::string& key);

  long require_integer(const std::string& key);
  std::optional<long> optional_integer(const std::string& key);

  /// Number field that may carry the literal UNKNOWN marker. Returns
  /// nullopt and appends `key` to `unknown_out` when marked UNKNOWN.
  std::optional<double> require_number_or_unknown(const std::string& key,
                                                  std::vector<std::string>& unknown_out);

  /// All entries with this key, in file order (for repeatable keys).
  std::vector<const Entry*> repeated(const std::string& key);

  bool has(const std::string& key) const;

  /// Throws if any entry was never consumed ("unknown field ...").
  void finish();

  std::string describe() const; // e.g. "[component a100] (line 4)"

private:
  const Entry* find_unique(const std::string& key);

  const Section& section_;
  std::vector<bool> consumed_;
};

} // namespace hpccarbon::lineformat
