#include "arspo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arspo/errors.hpp"

namespace arspo {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::iou: return "iou";
    case MetricKind::f1: return "f1";
    case MetricKind::tiou: return "tiou";
  }
  return "unknown";
}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification: return "classification";
    case TaskKind::image_localization: return "image_localization";
    case TaskKind::text_localization: return "text_localization";
    case TaskKind::video_localization: return "video_localization";
  }
  return "unknown";
}

MetricKind metric_kind_for(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification: return MetricKind::accuracy;
    case TaskKind::image_localization: return MetricKind::iou;
    case TaskKind::text_localization: return MetricKind::f1;
    case TaskKind::video_localization: return MetricKind::tiou;
  }
  throw UsageError("unknown task kind");
}

MetricValue MetricValue::make(double value, MetricKind kind) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("metric value " + std::to_string(value) + " outside [0, 1]");
  }
  return MetricValue{value, kind};
}

MetricValue iou_box(const Box2D& a, const Box2D& b) {
  if (!a.valid() || !b.valid()) throw DomainError("iou_box: box with min > max");
  const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return {0.0, MetricKind::iou};
  return {std::clamp(inter / uni, 0.0, 1.0), MetricKind::iou};
}

MetricValue tiou_interval(const Interval& a, const Interval& b) {
  if (!a.valid() || !b.valid()) throw DomainError("tiou_interval: interval with start > end");
  const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = a.length() + b.length() - inter;
  if (uni <= 0.0) return {0.0, MetricKind::tiou};
  return {std::clamp(inter / uni, 0.0, 1.0), MetricKind::tiou};
}

MetricValue span_f1(const TokenIndexSet& pred, const TokenIndexSet& gt) {
  if (pred.empty() || gt.empty()) return {0.0, MetricKind::f1};
  // Both sets are ordered; a merge walk counts the intersection.
  std::size_t common = 0;
  auto p = pred.begin();
  auto g = gt.begin();
  while (p != pred.end() && g != gt.end()) {
    if (*p < *g) {
      ++p;
    } else if (*g < *p) {
      ++g;
    } else {
      ++common;
      ++p;
      ++g;
    }
  }
  if (common == 0) return {0.0, MetricKind::f1};
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(gt.size());
  return {2.0 * precision * recall / (precision + recall), MetricKind::f1};
}

MetricValue accuracy_indicator(std::int64_t pred, std::int64_t gt) {
  return {pred == gt ? 1.0 : 0.0, MetricKind::accuracy};
}

bool filter_gate(const MetricValue& metric, TaskKind task, const FilterThresholds& thresholds) {
  if (metric.kind != metric_kind_for(task)) {
    throw UsageError("filter_gate: metric " + std::string(to_string(metric.kind)) +
                     " does not score task " + std::string(to_string(task)));
  }
  switch (task) {
    case TaskKind::classification: return metric.value == 1.0;
    case TaskKind::image_localization: return metric.value >= thresholds.image_iou;
    case TaskKind::text_localization: return metric.value >= thresholds.text_f1;
    case TaskKind::video_localization: return metric.value >= thresholds.video_tiou;
  }
  return false;
}

}  // namespace arspo
