#pragma once

#include <map>
#include <string>
#include <vector>

namespace dic {

// Flat key/value view over a nested YAML config file. Keys are dotted paths
// ("robot.mass"). Every key can be overridden with an environment variable:
// DIC_ + path upper-cased with '.' -> '_' (e.g. DIC_ROBOT_MASS).
class ConfigTree {
 public:
  ConfigTree() = default;

  static ConfigTree fromFile(const std::string& path);
  static ConfigTree fromString(const std::string& yaml);

  double getDouble(const std::string& key, double fallback) const;
  int getInt(const std::string& key, int fallback) const;
  bool getBool(const std::string& key, bool fallback) const;
  std::string getString(const std::string& key, const std::string& fallback) const;
  std::vector<double> getDoubleList(const std::string& key,
                                    const std::vector<double>& fallback) const;

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  // All keys present in the file/overrides (sorted).
  std::vector<std::string> keys() const;

  static std::string envName(const std::string& key);

 private:
  std::string lookup(const std::string& key, bool* found) const;
  std::map<std::string, std::string> values_;
};

}  // namespace dic
