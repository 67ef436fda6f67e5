#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "urbanbench/core/raster.hpp"

namespace urbanbench::metrics {

struct ClassIou {
  std::uint64_t tp = 0, fp = 0, fn = 0;
  std::optional<double> iou;  // empty when the class is absent from both
};

struct SemanticReport {
  std::map<int, ClassIou> per_class;
  std::optional<double> mean_iou;  // over classes present in the ground truth
};

// Per-class IoU over pixels outside the don't-care mask. `classes` lists the
// labels to score; an empty list scores every label seen in either image.
template <typename Label>
SemanticReport semantic_miou(const Raster<Label>& pred, const Raster<Label>& gt, std::vector<int> classes = {},
                             const Mask* dontcare = nullptr) {
  require(pred.same_shape(gt), "semantic_miou: dimension mismatch");
  if (dontcare) require(dontcare->same_shape(gt), "semantic_miou: don't-care mask dimension mismatch");
  std::map<int, ClassIou> counts;
  std::map<int, std::uint64_t> gt_count;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (dontcare && (*dontcare)[i]) continue;
    const int p = static_cast<int>(pred[i]);
    const int g = static_cast<int>(gt[i]);
    ++gt_count[g];
    if (p == g) {
      ++counts[g].tp;
    } else {
      ++counts[p].fp;
      ++counts[g].fn;
    }
  }
  if (classes.empty())
    for (const auto& [c, _] : counts) classes.push_back(c);

  SemanticReport rep;
  double sum = 0.0;
  int present = 0;
  for (int c : classes) {
    ClassIou ci = counts.count(c) ? counts[c] : ClassIou{};
    const std::uint64_t denom = ci.tp + ci.fp + ci.fn;
    if (denom > 0) ci.iou = static_cast<double>(ci.tp) / static_cast<double>(denom);
    if (gt_count.count(c)) {
      sum += ci.iou.value_or(0.0);
      ++present;
    }
    rep.per_class[c] = ci;
  }
  if (present > 0) rep.mean_iou = sum / present;
  return rep;
}

inline std::optional<double> top1_accuracy(const std::vector<int>& pred, const std::vector<int>& gt) {
  require(pred.size() == gt.size(), "top1_accuracy: length mismatch");
  if (gt.empty()) return std::nullopt;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) hit += pred[i] == gt[i];
  return static_cast<double>(hit) / static_cast<double>(gt.size());
}

}  // namespace urbanbench::metrics
