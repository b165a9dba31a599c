#include "hpccarbon/lineformat.hpp"

#include <cctype>
#include <charconv>
#include <string>

#include "hpccarbon/errors.hpp"

namespace hpccarbon::lineformat {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
    ++b;
  }
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
    --e;
  }
  return std::string(s.substr(b, e - b));
}

bool valid_name(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.') {
      return false;
    }
  }
  return true;
}

[[noreturn]] void fail(int line, const std::string& why) {
  throw ValidationError("line " + std::to_string(line) + ": " + why);
}

} // namespace

Document parse(std::istream& in) {
  Document doc;
  bool saw_version = false;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string line = trim(raw);
    if (line.empty()) {
      continue;
    }

    if (!saw_version) {
      const auto space = line.find_first_of(" \t");
      if (space == std::string::npos || trim(line.substr(0, space)) != "format_version") {
        fail(line_no, "file must start with a format_version line");
      }
      doc.format_version =
          static_cast<int>(parse_integer(trim(line.substr(space)), "format_version"));
      saw_version = true;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') {
        fail(line_no, "unterminated section header");
      }
      const std::string inner = trim(line.substr(1, line.size() - 2));
      const auto space = inner.find_first_of(" \t");
      if (space == std::string::npos) {
        fail(line_no, "section header needs a type and a name, e.g. [gpu a100]");
      }
      Section section;
      section.type = trim(inner.substr(0, space));
      section.name = trim(inner.substr(space));
      section.line = line_no;
      if (!valid_name(section.name)) {
        fail(line_no, "invalid section name \"" + section.name +
                          "\" (use letters, digits, '_', '-', '.')");
      }
      doc.sections.push_back(std::move(section));
      continue;
    }

    if (doc.sections.empty()) {
      fail(line_no, "field outside of any section");
    }
    const auto space = line.find_first_of(" \t");
    if (space == std::string::npos) {
      fail(line_no, "field \"" + line + "\" has no value");
    }
    Entry entry;
    entry.key = trim(line.substr(0, space));
    entry.value = trim(line.substr(space));
    entry.line = line_no;
    doc.sections.back().entries.push_back(std::move(entry));
  }
  if (!saw_version) {
    throw ValidationError("empty file: expected a format_version line");
  }
  return doc;
}

void require_version(const Document& doc, int supported) {
  if (doc.format_version != supported) {
    throw ValidationError("unsupported format_version " +
                          std::to_string(doc.format_version) + " (expected " +
                          std::to_string(supported) + ")");
  }
}

double parse_number(const std::string& text, const std::string& context) {
  // Plain decimal only: [+-]digits[.digits]
  std::string_view s = text;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    ++i;
  }
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    ++digits;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++digits;
    }
  }
  if (digits == 0 || i != s.size()) {
    throw ValidationError(context + ": \"" + text +
                          "\" is not a plain decimal number");
  }
  double value = 0.0;
  // from_chars rejects an explicit plus sign; the grammar above allows it.
  const char* first = s.data() + (s.front() == '+' ? 1 : 0);
  const auto result = std::from_chars(first, s.data() + s.size(), value);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size()) {
    throw ValidationError(context + ": \"" + text + "\" is out of range");
  }
  return value;
}

std::string format_number(double value) {
  char buf[1200];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    std::string candidate(buf);
    if (candidate.find_first_of("eE") != std::string::npos) {
      continue;
    }
    double parsed = 0.0;
    const auto result =
        std::from_chars(candidate.data(), candidate.data() + candidate.size(), parsed);
    if (result.ec == std::errc() && parsed == value) {
      return candidate;
    }
  }
  // Exact decimal expansion; every double has a finite one.
  std::snprintf(buf, sizeof(buf), "%.1074f", value);
  std::string out(buf);
  const auto last = out.find_last_not_of('0');
  out.erase(out[last] == '.' ? last : last + 1);
  return out;
}

long parse_integer(const std::string& text, const std::string& context) {
  long value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw ValidationError(context + ": \"" + text + "\" is not an integer");
  }
  return value;
}

SectionReader::SectionReader(const Section& section)
    : section_(section), consumed_(section.entries.size(), false) {}

std::string SectionReader::describe() const {
  return "[" + section_.type + " " + section_.name + "] (line " +
         std::to_string(section_.line) + ")";
}

const Entry* SectionReader::find_unique(const std::string& key) {
  const Entry* found = nullptr;
  for (std::size_t i = 0; i < section_.entries.size(); ++i) {
    if (section_.entries[i].key != key) {
      continue;
    }
    if (found != nullptr) {
      fail(section_.entries[i].line, "duplicate field \"" + key + "\" in " + describe());
    }
    found = &section_.entries[i];
    consumed_[i] = true;
  }
  return found;
}

std::string SectionReader::require_string(const std::string& key) {
  const Entry* entry = find_unique(key);
  if (entry == nullptr) {
    throw ValidationError("missing field \"" + key + "\" in " + describe());
  }
  return entry->value;
}

std::optional<std::string> SectionReader::optional_string(const std::string& key) {
  const Entry* entry = find_unique(key);
  if (entry == nullptr) {
    return std::nullopt;
  }
  return entry->value;
}

double SectionReader::require_number(const std::string& key) {
  const Entry* entry = find_unique(key);
  if (entry == nullptr) {
    throw ValidationError("missing field \"" + key + "\" in " + describe());
  }
  return parse_number(entry->value, "line " + std::to_string(entry->line) + ": " + key);
}

std::optional<double> SectionReader::optional_number(const std::string& key) {
  const Entry* entry = find_unique(key);
  if (entry == nullptr) {
    return std::nullopt;
  }
  return parse_number(entry->value, "line " + std::to_string(entry->line) + ": " + key);
}

long SectionReader::require_integer(const std::string& key) {
  const Entry* entry = find_unique(key);
  if (entry == nullptr) {
    throw ValidationError("missing field \"" + key + "\" in " + describe());
  }
  return parse_integer(entry->value, "line " + std::to_string(entry->line) + ": " + key);
}

std::optional<long> SectionReader::optional_integer(const std::string& key) {
  const Entry* entry = find_unique(key);
  if (entry == nullptr) {
    return std::nullopt;
  }
  return parse_integer(entry->value, "line " + std::to_string(entry->line) + ": " + key);
}

std::optional<double> SectionReader::require_number_or_unknown(
    const std::string& key, std::vector<std::string>& unknown_out) {
  const Entry* entry = find_unique(key);
  if (entry == nullptr) {
    throw ValidationError("missing field \"" + key + "\" in " + describe());
  }
  if (entry->value == "UNKNOWN") {
    unknown_out.push_back(key);
    return std::nullopt;
  }
  return parse_number(entry->value, "line " + std::to_string(entry->line) + ": " + key);
}

std::vector<const Entry*> SectionReader::repeated(const std::string& key) {
  std::vector<const Entry*> out;
  for (std::size_t i = 0; i < section_.entries.size(); ++i) {
    if (section_.entries[i].key == key) {
      out.push_back(&section_.entries[i]);
      consumed_[i] = true;
    }
  }
  return out;
}

bool SectionReader::has(const std::string& key) const {
  for (const Entry& entry : section_.entries) {
    if (entry.key == key) {
      return true;
    }
  }
  return false;
}

void SectionReader::finish() {
  for (std::size_t i = 0; i < section_.entries.size(); ++i) {
    if (!consumed_[i]) {
      fail(section_.entries[i].line, "unknown field \"" + section_.entries[i].key +
                                         "\" in " + describe());
    }
  }
}

} // namespace hpccarbon::lineformat
