#include "owl3d/ood_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "owl3d/error.hpp"

namespace owl3d::ood {

namespace {

struct KindName {
  ScoreKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 8> kNames = {{{ScoreKind::kMsp, "MSP"},
                                             {ScoreKind::kMaxLogit, "MaxLogit"},
                                             {ScoreKind::kSumLogit, "SumLogit"},
                                             {ScoreKind::kMaxProb, "MaxProb"},
                                             {ScoreKind::kSumProb, "SumProb"},
                                             {ScoreKind::kMaxEnergy, "MaxEnergy"},
                                             {ScoreKind::kJointEnergy, "JointEnergy"},
                                             {ScoreKind::kEnergy, "Energy"}}};

}  // namespace

std::string_view to_string(ScoreKind kind) {
  for (const auto& kn : kNames)
    if (kn.kind == kind) return kn.name;
  return "?";
}

ScoreKind score_kind_from_string(std::string_view s) {
  for (const auto& kn : kNames)
    if (kn.name == s) return kn.kind;
  throw std::invalid_argument("unknown score metric: " + std::string(s));
}

double log_sum_exp(std::span<const double> x) {
  const double m = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double id_score(std::span<const double> f, const ScoreMetric& metric) {
  if (f.empty()) throw std::invalid_argument("id_score: empty logit vector");
  for (double v : f)
    if (!std::isfinite(v)) throw std::invalid_argument("id_score: non-finite logit");
  if (!(metric.temperature > 0.0)) throw std::invalid_argument("id_score: temperature must be > 0");

  switch (metric.kind) {
    case ScoreKind::kMsp: {
      // max softmax = exp(max - lse)
      const double m = *std::max_element(f.begin(), f.end());
      return std::exp(m - log_sum_exp(f));
    }
    case ScoreKind::kMaxLogit:
      return *std::max_element(f.begin(), f.end());
    case ScoreKind::kSumLogit:
      return std::accumulate(f.begin(), f.end(), 0.0);
    case ScoreKind::kMaxProb:
      return sigmoid(*std::max_element(f.begin(), f.end()));
    case ScoreKind::kSumProb: {
      double s = 0.0;
      for (double v : f) s += sigmoid(v);
      return s;
    }
    case ScoreKind::kMaxEnergy:
      return softplus(*std::max_element(f.begin(), f.end()));
    case ScoreKind::kJointEnergy: {
      double s = 0.0;
      for (double v : f) s += softplus(v);
      return s;
    }
    case ScoreKind::kEnergy: {
      const double t = metric.temperature;
      std::vector<double> scaled(f.begin(), f.end());
      for (double& v : scaled) v /= t;
      return t * log_sum_exp(scaled);
    }
  }
  throw std::invalid_argument("id_score: unknown metric");
}

bool accepts_probabilities(ScoreKind kind) {
  return kind == ScoreKind::kMaxProb || kind == ScoreKind::kSumProb;
}

double id_score(std::span<const double> scores, const ScoreMetric& metric,
                sceneio::ScoreSpace space) {
  if (space == sceneio::ScoreSpace::kLogit) return id_score(scores, metric);
  if (!accepts_probabilities(metric.kind)) {
    throw Error(std::string(to_string(metric.kind)) +
                " needs logits but detections are in probability space");
  }
  if (scores.empty()) throw std::invalid_argument("id_score: empty score vector");
  for (double p : scores) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("id_score: probability outside [0, 1]");
  }
  if (metric.kind == ScoreKind::kMaxProb) return *std::max_element(scores.begin(), scores.end());
  return std::accumulate(scores.begin(), scores.end(), 0.0);
}

namespace {

void require_pools(std::span<const double> id, std::span<const double> ood) {
  if (id.empty()) throw Error("OOD metric: in-distribution score pool is empty");
  if (ood.empty()) throw Error("OOD metric: out-of-distribution score pool is empty");
}

// Samples sorted by OOD-ness descending, OOD first within a tie block is
// irrelevant because ties are always consumed as a whole block.
struct Ranked {
  double oodness;
  bool is_ood;
};

std::vector<Ranked> rank_desc(std::span<const double> id, std::span<const double> ood) {
  std::vector<Ranked> all;
  all.reserve(id.size() + ood.size());
  for (double s : id) all.push_back({-s, false});
  for (double s : ood) all.push_back({-s, true});
  std::sort(all.begin(), all.end(),
            [](const Ranked& a, const Ranked& b) { return a.oodness > b.oodness; });
  return all;
}

}  // namespace

double auroc(std::span<const double> id, std::span<const double> ood) {
  require_pools(id, ood);
  // Mann-Whitney U with tie blocks counted as halves, in integer half-units.
  auto all = rank_desc(id, ood);
  std::size_t id_above = 0;  // ID samples strictly more OOD-like than the current block
  long double twice_u = 0.0L;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t block_id = 0, block_ood = 0;
    while (j < all.size() && all[j].oodness == all[i].oodness) {
      (all[j].is_ood ? block_ood : block_id) += 1;
      ++j;
    }
    // Each OOD sample in this block beats every ID sample below it and ties the
    // ID samples in its own block.
    const std::size_t id_below = id.size() - id_above - block_id;
    twice_u += static_cast<long double>(block_ood) *
               (2.0L * static_cast<long double>(id_below) + static_cast<long double>(block_id));
    id_above += block_id;
    i = j;
  }
  return static_cast<double>(twice_u / (2.0L * static_cast<long double>(id.size()) *
                                        static_cast<long double>(ood.size())));
}

double aupr(std::span<const double> id, std::span<const double> ood) {
  require_pools(id, ood);
  const auto all = rank_desc(id, ood);
  const double n_pos = static_cast<double>(ood.size());
  std::size_t tp = 0, fp = 0;
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].oodness == all[i].oodness) {
      (all[j].is_ood ? tp : fp) += 1;
      ++j;
    }
    const double recall = static_cast<double>(tp) / n_pos;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return std::clamp(ap, 0.0, 1.0);
}

double fpr_at_tpr(std::span<const double> id, std::span<const double> ood, double tpr_target) {
  require_pools(id, ood);
  if (!(tpr_target > 0.0 && tpr_target <= 1.0)) {
    throw std::invalid_argument("fpr_at_tpr: target outside (0, 1]");
  }
  // Lowering the cutoff block by block; the first cutoff reaching the target
  // is the largest one that does.
  const auto all = rank_desc(id, ood);
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].oodness == all[i].oodness) {
      (all[j].is_ood ? tp : fp) += 1;
      ++j;
    }
    const double tpr = static_cast<double>(tp) / static_cast<double>(ood.size());
    if (tpr >= tpr_target) return static_cast<double>(fp) / static_cast<double>(id.size());
    i = j;
  }
  return 1.0;
}

OODReport evaluate_ood(const std::vector<MatchedScene>& scenes,
                       const std::set<std::string>& id_classes,
                       std::span<const ScoreMetric> metrics) {
  OODReport report;
  std::vector<std::vector<double>> id_pool(metrics.size()), ood_pool(metrics.size());
  for (const MatchedScene& scene : scenes) {
    const auto& gts = *scene.gts;
    const auto& dets = *scene.dets;
    for (const auto& pair : scene.matches.pairs) {
      const bool is_id = id_classes.contains(gts.at(pair.gt).class_label);
      (is_id ? report.n_id : report.n_ood) += 1;
      const auto& scores = dets.at(pair.det).scores;
      for (std::size_t m = 0; m < metrics.size(); ++m) {
        const double s = id_score(scores, metrics[m], scene.space);
        (is_id ? id_pool[m] : ood_pool[m]).push_back(s);
      }
    }
    for (std::size_t g : scene.matches.unmatched_gt) {
      if (!id_classes.contains(gts.at(g).class_label)) ++report.n_unmatched_ood;
    }
  }
  if (report.n_id == 0) throw Error("evaluate_ood: no matched in-distribution objects (ID pool empty)");
  if (report.n_ood == 0) throw Error("evaluate_ood: no matched out-of-distribution objects (OOD pool empty)");
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    MetricValues v;
    v.auroc = auroc(id_pool[m], ood_pool[m]);
    v.aupr = aupr(id_pool[m], ood_pool[m]);
    v.fpr95 = fpr_at_tpr(id_pool[m], ood_pool[m], 0.95);
    report.metrics[std::string(to_string(metrics[m].kind))] = v;
  }
  return report;
}

}  // namespace owl3d::ood
