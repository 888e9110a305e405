#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "owl3d/hungarian.hpp"
#include "owl3d/sceneio.hpp"

namespace owl3d::eval {

enum class IouKind { k3d, kBev };
enum class RecallMode { kCoverage, kOneToOne };

IouKind iou_kind_from_string(std::string_view s);
std::string_view to_string(IouKind kind);
RecallMode recall_mode_from_string(std::string_view s);
std::string_view to_string(RecallMode mode);

struct EvalConfig {
  std::size_t proposal_k = 500;
  std::vector<double> iou_thresholds = {0.10, 0.25, 0.40};
  IouKind iou_kind = IouKind::k3d;
  RecallMode recall_mode = RecallMode::kCoverage;

  // Throws std::invalid_argument unless k >= 1 and thresholds lie in (0, 1].
  void validate() const;
};

double box_iou(const geom::Box3D& a, const geom::Box3D& b, IouKind kind);

// Detection indices ordered by conf descending (ties keep input order),
// truncated to k.
std::vector<std::size_t> top_k(const std::vector<sceneio::Detection>& dets, std::size_t k);
std::vector<sceneio::Detection> truncate_top_k(const std::vector<sceneio::Detection>& dets,
                                               std::size_t k);

enum class MatchStage { kIou, kDistance };

struct MatchPair {
  std::size_t gt = 0;
  std::size_t det = 0;
  MatchStage stage = MatchStage::kIou;
  double iou = 0.0;
  double distance = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // sorted by gt index
  std::vector<std::size_t> unmatched_gt;
};

// Two-stage assignment. GTs overlapping any detection are matched first by
// maximum total IoU; the remaining GTs are then matched to the leftover
// detections by minimum total center distance.
MatchResult match_scene(const std::vector<sceneio::GtObject>& gts,
                        const std::vector<sceneio::Detection>& dets, const EvalConfig& cfg);

struct SceneEval {
  std::vector<sceneio::GtObject> gts;
  std::vector<sceneio::Detection> dets;
};

struct RecallRow {
  std::string class_label;  // "all" aggregates every class
  std::size_t k = 0;
  double iou_threshold = 0.0;
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::optional<double> recall;  // empty when there is no ground truth
};

struct RecallReport {
  std::vector<RecallRow> rows;  // "all" first, then classes by name; k, threshold ascending

  const RecallRow* find(std::string_view class_label, std::size_t k, double threshold) const;
};

inline constexpr std::string_view kAllClasses = "all";

RecallReport recall_curve(const std::vector<SceneEval>& scenes, const EvalConfig& cfg,
                          std::vector<std::size_t> k_values, std::size_t threads = 1);

}  // namespace owl3d::eval
