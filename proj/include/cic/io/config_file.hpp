#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cic::io {

// Line-based "[section]" headers followed by "key = value" pairs. '#' and
// ';' start comment lines. Keys are addressed as "section.key".
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::string& path);

  void set(const std::string& section, const std::string& key, const std::string& value);
  // "--section.key=value" or "section.key=value".
  void apply_override(std::string_view flag);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  bool has(const std::string& section, const std::string& key) const { return get(section, key).has_value(); }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::string trim(std::string_view s);

}  // namespace cic::io
