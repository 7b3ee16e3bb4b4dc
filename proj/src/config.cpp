#include "dic/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "dic/errors.hpp"

namespace dic {
namespace {

void flatten(const YAML::Node& node, const std::string& prefix,
             std::map<std::string, std::string>& out) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      flatten(kv.second, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (node.IsSequence()) {
    std::ostringstream oss;
    for (size_t i = 0; i < node.size(); ++i) {
      if (i) oss << ",";
      oss << node[i].as<std::string>();
    }
    out[prefix] = oss.str();
  } else if (node.IsScalar()) {
    out[prefix] = node.as<std::string>();
  }
}

}  // namespace

ConfigTree ConfigTree::fromFile(const std::string& path) {
  ConfigTree t;
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const std::exception& e) {
    throw ConfigError("failed to load config '" + path + "': " + e.what());
  }
  flatten(root, "", t.values_);
  return t;
}

ConfigTree ConfigTree::fromString(const std::string& yaml) {
  ConfigTree t;
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("failed to parse config: ") + e.what());
  }
  flatten(root, "", t.values_);
  return t;
}

std::string ConfigTree::envName(const std::string& key) {
  std::string name = "DIC_";
  for (char c : key) name += (c == '.') ? '_' : static_cast<char>(std::toupper(c));
  return name;
}

std::string ConfigTree::lookup(const std::string& key, bool* found) const {
  if (const char* env = std::getenv(envName(key).c_str())) {
    *found = true;
    return env;
  }
  auto it = values_.find(key);
  if (it != values_.end()) {
    *found = true;
    return it->second;
  }
  *found = false;
  return {};
}

double ConfigTree::getDouble(const std::string& key, double fallback) const {
  bool found = false;
  const std::string s = lookup(key, &found);
  if (!found) return fallback;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: " + s);
  }
}

int ConfigTree::getInt(const std::string& key, int fallback) const {
  bool found = false;
  const std::string s = lookup(key, &found);
  if (!found) return fallback;
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: " + s);
  }
}

bool ConfigTree::getBool(const std::string& key, bool fallback) const {
  bool found = false;
  std::string s = lookup(key, &found);
  if (!found) return fallback;
  std::transform(s.begin(), s.end(), s.begin(), ::tolower);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + s);
}

std::string ConfigTree::getString(const std::string& key, const std::string& fallback) const {
  bool found = false;
  const std::string s = lookup(key, &found);
  return found ? s : fallback;
}

std::vector<double> ConfigTree::getDoubleList(const std::string& key,
                                              const std::vector<double>& fallback) const {
  bool found = false;
  const std::string s = lookup(key, &found);
  if (!found) return fallback;
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has a non-numeric element: " + item);
    }
  }
  return out;
}

bool ConfigTree::has(const std::string& key) const {
  bool found = false;
  lookup(key, &found);
  return found;
}

void ConfigTree::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::vector<std::string> ConfigTree::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& kv : values_) out.push_back(kv.first);
  return out;
}

}  // namespace dic
