#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace owl3d::loss {

struct LossConfig {
  double alpha = 0.25;
  double gamma = 2.0;
  double temperature = 1.0;
  double m_in = -6.0;
  double m_out = -3.0;
  double tau_c = 0.10;
  double lambda_en = 1.0;
  double lambda_c = 1.0;

  // Throws std::invalid_argument when a field violates its range.
  void validate() const;
};

// A scalar loss and its gradient with respect to the flattened inputs.
struct LossGrad {
  double value = 0.0;
  std::vector<double> grad;
};

// Binary focal loss on raw logits, averaged over elements.
LossGrad focal_loss(std::span<const double> logits, std::span<const int> labels, double alpha,
                    double gamma);

// One-vs-rest focal loss over rows of `num_classes` logits. targets[i] is the
// class index of row i, or -1 for background. Averaged over all logits.
LossGrad one_vs_rest_focal_loss(std::span<const double> logits, std::size_t num_classes,
                                std::span<const int> targets, double alpha, double gamma);

// E(x) = -T log sum_j exp(f_j / T); lower means more in-distribution.
double energy(std::span<const double> logits, double temperature);
// dE/df_j = -softmax(f / T)_j.
std::vector<double> energy_grad(std::span<const double> logits, double temperature);

// Rows of K logits, row-major.
struct LogitRows {
  std::size_t num_classes = 0;
  std::vector<double> values;

  std::size_t rows() const { return num_classes == 0 ? 0 : values.size() / num_classes; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * num_classes, num_classes};
  }
};

struct EnergyRegGrad {
  double value = 0.0;
  std::vector<double> id_grad;   // same layout as the ID rows
  std::vector<double> ood_grad;  // same layout as the OOD rows
};

// mean_ID (max(0, E - m_in))^2 + mean_OOD (max(0, m_out - E))^2. An empty set
// contributes 0.
EnergyRegGrad energy_reg_loss(const LogitRows& id_rows, const LogitRows& ood_rows,
                              const LossConfig& cfg);

// Label of an element in the contrastive batch; nullopt marks an outlier.
using ContrastLabel = std::optional<int>;

struct ContrastiveBatch {
  std::size_t dim = 0;
  std::vector<double> embeddings;  // row-major, raw (unnormalized)
  std::vector<ContrastLabel> labels;

  std::size_t size() const { return labels.size(); }
};

// Outlier-aware supervised contrastive loss, summed over in-distribution
// anchors. Outliers only enter denominators. Gradient is with respect to the
// raw embeddings (normalization Jacobian included). Throws
// std::invalid_argument on a zero-norm embedding or a malformed batch.
LossGrad supcon_ood_loss(const ContrastiveBatch& batch, double tau_c);

// Summed smooth-L1 (beta = 1) over box residuals; gradient w.r.t. pred.
LossGrad smooth_l1_box_loss(std::span<const double> pred, std::span<const double> target);

struct LossComponents {
  double cls = 0.0;
  double reg = 0.0;
  double obj = 0.0;
  double en = 0.0;
  double c = 0.0;
};

double total_loss(const LossComponents& parts, const LossConfig& cfg);

using LossFunction = std::function<LossGrad(std::span<const double>)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
};

// Central differences per coordinate; relative error per coordinate is
// |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
GradCheckResult finite_diff_check(const LossFunction& fn, std::span<const double> x,
                                  double epsilon = 1e-4);

}  // namespace owl3d::loss
