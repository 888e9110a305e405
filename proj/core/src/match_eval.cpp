#include "owl3d/match_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "owl3d/parallel.hpp"

namespace owl3d::eval {

IouKind iou_kind_from_string(std::string_view s) {
  if (s == "3d") return IouKind::k3d;
  if (s == "bev") return IouKind::kBev;
  throw std::invalid_argument("iou kind must be 3d or bev, got " + std::string(s));
}

std::string_view to_string(IouKind kind) { return kind == IouKind::k3d ? "3d" : "bev"; }

RecallMode recall_mode_from_string(std::string_view s) {
  if (s == "coverage") return RecallMode::kCoverage;
  if (s == "one-to-one") return RecallMode::kOneToOne;
  throw std::invalid_argument("recall mode must be coverage or one-to-one, got " + std::string(s));
}

std::string_view to_string(RecallMode mode) {
  return mode == RecallMode::kCoverage ? "coverage" : "one-to-one";
}

void EvalConfig::validate() const {
  if (proposal_k < 1) throw std::invalid_argument("proposal k must be >= 1");
  if (iou_thresholds.empty()) throw std::invalid_argument("at least one IoU threshold required");
  for (double t : iou_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw std::invalid_argument("IoU threshold outside (0, 1]: " + std::to_string(t));
    }
  }
}

double box_iou(const geom::Box3D& a, const geom::Box3D& b, IouKind kind) {
  return kind == IouKind::k3d ? geom::iou_3d(a, b) : geom::bev_iou(a, b);
}

std::vector<std::size_t> top_k(const std::vector<sceneio::Detection>& dets, std::size_t k) {
  std::vector<std::size_t> idx(dets.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].conf > dets[b].conf; });
  if (idx.size() > k) idx.resize(k);
  return idx;
}

std::vector<sceneio::Detection> truncate_top_k(const std::vector<sceneio::Detection>& dets,
                                               std::size_t k) {
  std::vector<sceneio::Detection> out;
  for (std::size_t i : top_k(dets, k)) out.push_back(dets[i]);
  return out;
}

MatchResult match_scene(const std::vector<sceneio::GtObject>& gts,
                        const std::vector<sceneio::Detection>& dets, const EvalConfig& cfg) {
  MatchResult result;
  const std::size_t n_gt = gts.size();
  const std::size_t n_det = dets.size();

  CostMatrix iou(n_gt, n_det);
  for (std::size_t g = 0; g < n_gt; ++g)
    for (std::size_t d = 0; d < n_det; ++d) iou(g, d) = box_iou(gts[g].box, dets[d].box, cfg.iou_kind);

  // Step 0: split GTs by whether any detection overlaps them.
  std::vector<std::size_t> overlap_gts, isolated_gts;
  for (std::size_t g = 0; g < n_gt; ++g) {
    const auto row = iou.row(g);
    const bool any = std::any_of(row.begin(), row.end(), [](double v) { return v > 0.0; });
    (any ? overlap_gts : isolated_gts).push_back(g);
  }

  std::vector<char> det_used(n_det, 0);
  std::vector<char> gt_matched(n_gt, 0);

  // Step 1: IoU-maximizing assignment of overlapping GTs over all detections.
  if (!overlap_gts.empty() && n_det > 0) {
    CostMatrix sub(overlap_gts.size(), n_det);
    for (std::size_t r = 0; r < overlap_gts.size(); ++r)
      for (std::size_t d = 0; d < n_det; ++d) sub(r, d) = iou(overlap_gts[r], d);
    for (const auto& [r, d] : hungarian(sub, Objective::kMaximize).pairs) {
      const std::size_t g = overlap_gts[r];
      result.pairs.push_back(
          {g, d, MatchStage::kIou, iou(g, d), geom::center_distance(gts[g].box, dets[d].box)});
      det_used[d] = 1;
      gt_matched[g] = 1;
    }
  }

  // Step 2: distance-minimizing assignment of isolated GTs over leftovers.
  std::vector<std::size_t> remaining;
  for (std::size_t d = 0; d < n_det; ++d)
    if (!det_used[d]) remaining.push_back(d);
  if (!isolated_gts.empty() && !remaining.empty()) {
    CostMatrix dist(isolated_gts.size(), remaining.size());
    for (std::size_t r = 0; r < isolated_gts.size(); ++r)
      for (std::size_t c = 0; c < remaining.size(); ++c)
        dist(r, c) = geom::center_distance(gts[isolated_gts[r]].box, dets[remaining[c]].box);
    for (const auto& [r, c] : hungarian(dist, Objective::kMinimize).pairs) {
      const std::size_t g = isolated_gts[r];
      const std::size_t d = remaining[c];
      result.pairs.push_back({g, d, MatchStage::kDistance, 0.0, dist(r, c)});
      gt_matched[g] = 1;
    }
  }

  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const MatchPair& a, const MatchPair& b) { return a.gt < b.gt; });
  for (std::size_t g = 0; g < n_gt; ++g)
    if (!gt_matched[g]) result.unmatched_gt.push_back(g);
  return result;
}

const RecallRow* RecallReport::find(std::string_view class_label, std::size_t k,
                                    double threshold) const {
  for (const RecallRow& r : rows) {
    if (r.class_label == class_label && r.k == k && r.iou_threshold == threshold) return &r;
  }
  return nullptr;
}

namespace {

// tp[k_index][threshold_index] for each GT of one scene.
struct SceneHits {
  // hits[g][ki][ti] flattened: 1 when GT g is recalled.
  std::vector<char> hits;
};

}  // namespace

RecallReport recall_curve(const std::vector<SceneEval>& scenes, const EvalConfig& cfg,
                          std::vector<std::size_t> k_values, std::size_t threads) {
  cfg.validate();
  if (k_values.empty()) k_values.push_back(cfg.proposal_k);
  std::sort(k_values.begin(), k_values.end());
  k_values.erase(std::unique(k_values.begin(), k_values.end()), k_values.end());
  if (k_values.front() == 0) throw std::invalid_argument("k values must be >= 1");
  std::vector<double> thresholds = cfg.iou_thresholds;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const std::size_t nk = k_values.size();
  const std::size_t nt = thresholds.size();
  std::vector<SceneHits> per_scene(scenes.size());

  parallel_for(scenes.size(), threads, [&](std::size_t s) {
    const SceneEval& scene = scenes[s];
    const auto ranked = top_k(scene.dets, k_values.back());
    const std::size_t n_gt = scene.gts.size();
    CostMatrix iou(n_gt, ranked.size());
    for (std::size_t g = 0; g < n_gt; ++g)
      for (std::size_t r = 0; r < ranked.size(); ++r)
        iou(g, r) = box_iou(scene.gts[g].box, scene.dets[ranked[r]].box, cfg.iou_kind);

    auto& hits = per_scene[s].hits;
    hits.assign(n_gt * nk * nt, 0);
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const std::size_t k = std::min(k_values[ki], ranked.size());
      if (cfg.recall_mode == RecallMode::kCoverage) {
        for (std::size_t g = 0; g < n_gt; ++g) {
          double best = 0.0;
          for (std::size_t r = 0; r < k; ++r) best = std::max(best, iou(g, r));
          for (std::size_t ti = 0; ti < nt; ++ti)
            hits[(g * nk + ki) * nt + ti] = best >= thresholds[ti];
        }
      } else if (k > 0 && n_gt > 0) {
        CostMatrix sub(n_gt, k);
        for (std::size_t g = 0; g < n_gt; ++g)
          for (std::size_t r = 0; r < k; ++r) sub(g, r) = iou(g, r);
        // Per threshold: maximum cardinality matching over edges with IoU >= t,
        // found by an assignment on 0/1 weights.
        for (std::size_t ti = 0; ti < nt; ++ti) {
          CostMatrix edge(n_gt, k);
          for (std::size_t g = 0; g < n_gt; ++g)
            for (std::size_t r = 0; r < k; ++r) edge(g, r) = sub(g, r) >= thresholds[ti] ? 1.0 : 0.0;
          for (const auto& [g, r] : hungarian(edge, Objective::kMaximize).pairs)
            if (edge(g, r) > 0.0) hits[(g * nk + ki) * nt + ti] = 1;
        }
      }
    }
  });

  // Deterministic reduction in scene order.
  std::map<std::string, std::vector<std::size_t>> tp, total;
  auto& tp_all = tp[std::string(kAllClasses)];
  auto& total_all = total[std::string(kAllClasses)];
  tp_all.assign(nk * nt, 0);
  total_all.assign(nk * nt, 0);
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const auto& gts = scenes[s].gts;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      auto& tp_c = tp[gts[g].class_label];
      auto& tot_c = total[gts[g].class_label];
      tp_c.resize(nk * nt, 0);
      tot_c.resize(nk * nt, 0);
      for (std::size_t i = 0; i < nk * nt; ++i) {
        const std::size_t hit = per_scene[s].hits[g * nk * nt + i];
        tp_c[i] += hit;
        tot_c[i] += 1;
        tp_all[i] += hit;
        total_all[i] += 1;
      }
    }
  }

  RecallReport report;
  auto emit = [&](const std::string& label) {
    for (std::size_t ki = 0; ki < nk; ++ki) {
      for (std::size_t ti = 0; ti < nt; ++ti) {
        const std::size_t i = ki * nt + ti;
        RecallRow row{label, k_values[ki], thresholds[ti], tp[label][i], total[label][i] - tp[label][i],
                      std::nullopt};
        if (total[label][i] > 0) row.recall = static_cast<double>(row.tp) / static_cast<double>(total[label][i]);
        report.rows.push_back(std::move(row));
      }
    }
  };
  emit(std::string(kAllClasses));
  for (const auto& [label, _] : total) {
    if (label != kAllClasses) emit(label);
  }
  return report;
}

}  // namespace owl3d::eval
