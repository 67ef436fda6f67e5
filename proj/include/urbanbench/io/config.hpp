#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "urbanbench/core/error.hpp"

namespace urbanbench::io {

// Flat key/value configuration. INI sections become key prefixes, so
// "[align] lambda = 0.3" and "align.lambda = 0.3" are the same key.
class Config {
 public:
  static Config from_file(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) fail(ErrorCode::kMissingFile, "config file not found: " + path.string());
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      fail(ErrorCode::kConfig, "config " + path.string() + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    Config c;
    c.flatten(tree, "");
    return c;
  }

  // Explicit file, else $URBANBENCH_CONFIG, else empty.
  static Config load(const std::optional<std::filesystem::path>& path) {
    if (path) return from_file(*path);
    if (const char* env = std::getenv("URBANBENCH_CONFIG"); env && *env) return from_file(env);
    return {};
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  template <typename T>
  void bind(const std::string& key, T& target) const {
    known_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return;
    target = parse<T>(key, it->second);
  }

  // Keys never bound, in sorted order.
  std::vector<std::string> unknown_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : values_)
      if (!known_.count(k)) out.push_back(k);
    return out;
  }

  void reject_unknown() const {
    const auto u = unknown_keys();
    if (!u.empty()) fail(ErrorCode::kConfig, "unknown config key '" + u.front() + "'");
  }

 private:
  void flatten(const boost::property_tree::ptree& t, const std::string& prefix) {
    for (const auto& [name, child] : t) {
      const std::string key = prefix.empty() ? name : prefix + "." + name;
      if (child.empty())
        values_[key] = child.data();
      else
        flatten(child, key);
    }
  }

  template <typename T>
  static T parse(const std::string& key, const std::string& s) {
    auto bad = [&]() -> T { fail(ErrorCode::kConfig, "config key '" + key + "': cannot parse '" + s + "'"); };
    if constexpr (std::is_same_v<T, std::string>) {
      return s;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (s == "true" || s == "1" || s == "yes") return true;
      if (s == "false" || s == "0" || s == "no") return false;
      return bad();
    } else if constexpr (std::is_floating_point_v<T>) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || *end != '\0') return bad();
      return static_cast<T>(v);
    } else {
      T v{};
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) return bad();
      return v;
    }
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> known_;
};

}  // namespace urbanbench::io
