#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "owl3d/match_eval.hpp"
#include "owl3d/sceneio.hpp"

namespace owl3d::ood {

enum class ScoreKind {
  kMsp,
  kMaxLogit,
  kSumLogit,
  kMaxProb,
  kSumProb,
  kMaxEnergy,
  kJointEnergy,
  kEnergy,
};

inline constexpr std::array<ScoreKind, 8> kAllScoreKinds = {
    ScoreKind::kMsp,     ScoreKind::kMaxLogit,  ScoreKind::kSumLogit,    ScoreKind::kMaxProb,
    ScoreKind::kSumProb, ScoreKind::kMaxEnergy, ScoreKind::kJointEnergy, ScoreKind::kEnergy};

std::string_view to_string(ScoreKind kind);
ScoreKind score_kind_from_string(std::string_view s);

struct ScoreMetric {
  ScoreKind kind = ScoreKind::kEnergy;
  double temperature = 1.0;
};

// Numerically stable log(sum(exp(x))).
double log_sum_exp(std::span<const double> x);
double softplus(double x);
double sigmoid(double x);

// In-distribution score (higher means more in-distribution). Throws
// std::invalid_argument on an empty or non-finite input or T <= 0.
double id_score(std::span<const double> logits, const ScoreMetric& metric);

// Metrics usable when detections carry probabilities instead of logits;
// MaxProb / SumProb then apply to the given values directly.
bool accepts_probabilities(ScoreKind kind);
double id_score(std::span<const double> scores, const ScoreMetric& metric,
                sceneio::ScoreSpace space);

// OOD is the positive class and OOD-ness is -id_score throughout. All three
// throw owl3d::Error when either pool is empty.
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);
double aupr(std::span<const double> id_scores, std::span<const double> ood_scores);
double fpr_at_tpr(std::span<const double> id_scores, std::span<const double> ood_scores,
                  double tpr_target = 0.95);

struct MetricValues {
  double auroc = 0.0;
  double aupr = 0.0;
  double fpr95 = 0.0;
};

struct OODReport {
  std::map<std::string, MetricValues> metrics;  // keyed by metric name
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
  std::size_t n_unmatched_ood = 0;
};

struct MatchedScene {
  const std::vector<sceneio::GtObject>* gts = nullptr;
  const std::vector<sceneio::Detection>* dets = nullptr;
  sceneio::ScoreSpace space = sceneio::ScoreSpace::kLogit;
  eval::MatchResult matches;
};

// Scores each matched (gt, det) pair, pools by whether the GT class is one of
// `id_classes`, and reports AUROC / AUPR / FPR95 per metric. Unmatched OOD GTs
// are counted but not scored.
OODReport evaluate_ood(const std::vector<MatchedScene>& scenes,
                       const std::set<std::string>& id_classes,
                       std::span<const ScoreMetric> metrics);

}  // namespace owl3d::ood
