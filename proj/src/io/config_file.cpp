#include "cic/io/config_file.hpp"

#include <fstream>
#include <sstream>

#include "cic/core/errors.hpp"

namespace cic::io {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": key outside of a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (cfg.has(section, key)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key [" + section + "] " + key);
    }
    cfg.set(section, key, trim(std::string_view(line).substr(eq + 1)));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[section + "." + key] = value;
}

void ConfigFile::apply_override(std::string_view flag) {
  std::string_view f = flag;
  if (f.starts_with("--")) f.remove_prefix(2);
  const auto eq = f.find('=');
  const auto dot = f.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ConfigError("malformed override '" + std::string(flag) + "' (expected --section.key=value)");
  }
  set(trim(f.substr(0, dot)), trim(f.substr(dot + 1, eq - dot - 1)), trim(f.substr(eq + 1)));
}

std::optional<std::string> ConfigFile::get(const std::string& section, const std::string& key) const {
  const auto it = values_.find(section + "." + key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

}  // namespace cic::io
