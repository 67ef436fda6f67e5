#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace urbanbench::io {

// Named scalar results in display order plus free-form breakdowns.
struct MetricReport {
  std::string task;
  std::vector<std::pair<std::string, std::optional<double>>> values;
  nlohmann::json details = nlohmann::json::object();

  void add(std::string name, std::optional<double> v) { values.emplace_back(std::move(name), v); }

  nlohmann::json to_json() const {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [k, v] : values) m[k] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    return {{"task", task}, {"metrics", m}, {"details", details}};
  }

  // Two-row table; "n/a" marks metrics that are undefined for the input.
  std::string table() const {
    std::vector<std::string> cells;
    std::size_t width = 6;
    for (const auto& [k, v] : values) {
      char buf[32];
      if (v)
        std::snprintf(buf, sizeof buf, "%.4f", *v);
      else
        std::snprintf(buf, sizeof buf, "n/a");
      cells.emplace_back(buf);
      width = std::max({width, k.size(), cells.back().size()});
    }
    std::string head, row;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::string sep = i ? "  " : "";
      head += sep + std::string(width - values[i].first.size(), ' ') + values[i].first;
      row += sep + std::string(width - cells[i].size(), ' ') + cells[i];
    }
    return head + "\n" + row + "\n";
  }
};

}  // namespace urbanbench::io
