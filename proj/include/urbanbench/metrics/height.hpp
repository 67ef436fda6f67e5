#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "urbanbench/metrics/instance.hpp"

namespace urbanbench::metrics {

struct HeightOptions {
  double min_height = 0.1;               // meters; heights are clamped to this before the log
  std::optional<double> unmatched_penalty;  // log-domain error charged per unmatched gt instance
};

struct HeightReport {
  std::optional<double> log_rmse;               // matched pairs only
  std::optional<double> log_rmse_with_penalty;  // when a penalty is configured
  std::size_t matched = 0;
  std::size_t unmatched_gt = 0;
};

// RMSE of natural-log heights over explicit (pred, gt) index pairs.
inline HeightReport height_log_rmse(const std::vector<double>& pred_heights, const std::vector<double>& gt_heights,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& matches,
                                    const HeightOptions& opt = {}) {
  HeightReport r;
  std::vector<char> used(gt_heights.size(), 0);
  double sq = 0.0;
  for (auto [p, g] : matches) {
    require(p < pred_heights.size() && g < gt_heights.size(), "height match index out of range");
    require(std::isfinite(pred_heights[p]) && std::isfinite(gt_heights[g]), "height is not finite");
    const double e = std::log(std::max(pred_heights[p], opt.min_height)) -
                     std::log(std::max(gt_heights[g], opt.min_height));
    sq += e * e;
    used[g] = 1;
  }
  r.matched = matches.size();
  for (char u : used) r.unmatched_gt += !u;
  if (r.matched > 0) r.log_rmse = std::sqrt(sq / static_cast<double>(r.matched));
  if (opt.unmatched_penalty && r.matched + r.unmatched_gt > 0) {
    const double pen = *opt.unmatched_penalty;
    r.log_rmse_with_penalty = std::sqrt((sq + static_cast<double>(r.unmatched_gt) * pen * pen) /
                                        static_cast<double>(r.matched + r.unmatched_gt));
  }
  return r;
}

// Instances matched one-to-one at IoU >= 0.5; both sides must carry heights.
inline HeightReport height_log_rmse(const InstanceSet& pred, const InstanceSet& gt, const HeightOptions& opt = {}) {
  const auto t = overlap_table(pred, gt);
  std::vector<double> ph, gh;
  for (const auto& p : t.pred) ph.push_back(p.height.value_or(std::nan("")));
  for (const auto& g : t.gt) {
    require(g.height.has_value(), "ground-truth instance without height", ErrorCode::kSchema);
    gh.push_back(*g.height);
  }
  std::vector<std::pair<std::size_t, std::size_t>> m;
  for (const auto& o : greedy_match(t, 0.5)) {
    require(t.pred[o.pred].height.has_value(), "predicted instance without height", ErrorCode::kSchema);
    m.emplace_back(o.pred, o.gt);
  }
  return height_log_rmse(ph, gh, m, opt);
}

}  // namespace urbanbench::metrics
