#pragma once

#include <cstdint>
#include <set>
#include <string_view>

namespace arspo {

enum class MetricKind { accuracy, iou, f1, tiou };

/// The four task families; each is scored by exactly one metric kind.
enum class TaskKind { classification, image_localization, text_localization, video_localization };

std::string_view to_string(MetricKind kind);
std::string_view to_string(TaskKind kind);
MetricKind metric_kind_for(TaskKind kind);

/// A task metric in [0, 1] tagged with the metric that produced it.
struct MetricValue {
  double value = 0.0;
  MetricKind kind = MetricKind::accuracy;

  /// Throws DomainError unless 0 <= value <= 1.
  static MetricValue make(double value, MetricKind kind);
};

struct Box2D {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool valid() const noexcept { return x_min <= x_max && y_min <= y_max; }
  double area() const noexcept { return (x_max - x_min) * (y_max - y_min); }
};

struct Interval {
  double start = 0.0;
  double end = 0.0;

  bool valid() const noexcept { return start <= end; }
  double length() const noexcept { return end - start; }
};

using TokenIndexSet = std::set<std::int64_t>;

// Degenerate geometry (empty union) scores 0. Invalid operands throw DomainError.
MetricValue iou_box(const Box2D& a, const Box2D& b);
MetricValue tiou_interval(const Interval& a, const Interval& b);

/// Harmonic mean of precision and recall over opaque indices; 0 when either
/// set or the intersection is empty.
MetricValue span_f1(const TokenIndexSet& pred, const TokenIndexSet& gt);

MetricValue accuracy_indicator(std::int64_t pred, std::int64_t gt);

struct FilterThresholds {
  double image_iou = 0.75;
  double text_f1 = 0.75;
  double video_tiou = 0.75;
};

/// Data-filter gate: classification needs an exact hit, localization tasks
/// need metric >= threshold. Throws UsageError on a metric/task mismatch.
bool filter_gate(const MetricValue& metric, TaskKind task, const FilterThresholds& thresholds = {});

}  // namespace arspo
