#include "owl3d/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace owl3d::loss {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_sum_exp(std::span<const double> x) {
  const double m = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

void LossConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  if (!(tau_c > 0.0)) throw std::invalid_argument("tau_c must be > 0");
  if (!(m_out >= m_in)) throw std::invalid_argument("m_out must be >= m_in");
  if (!std::isfinite(lambda_en) || !std::isfinite(lambda_c)) {
    throw std::invalid_argument("loss weights must be finite");
  }
}

LossGrad focal_loss(std::span<const double> logits, std::span<const int> labels, double alpha,
                    double gamma) {
  if (logits.size() != labels.size()) {
    throw std::invalid_argument("focal_loss: logits and labels differ in length");
  }
  LossGrad out;
  out.grad.assign(logits.size(), 0.0);
  if (logits.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw std::invalid_argument("focal_loss: label must be 0 or 1");
    const double s = labels[i] == 1 ? 1.0 : -1.0;
    const double a_t = labels[i] == 1 ? alpha : 1.0 - alpha;
    const double z = s * logits[i];
    const double p_t = sigmoid(z);
    const double q = sigmoid(-z);            // 1 - p_t without cancellation
    const double neg_log_pt = softplus(-z);  // -log p_t
    const double q_gamma = std::pow(q, gamma);
    sum += a_t * q_gamma * neg_log_pt;
    // dL/dz = -a_t s [ -gamma q^gamma p_t log p_t + q^(gamma + 1) ]
    out.grad[i] = -a_t * s * (gamma * q_gamma * p_t * neg_log_pt + q_gamma * q) * inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

LossGrad one_vs_rest_focal_loss(std::span<const double> logits, std::size_t num_classes,
                                std::span<const int> targets, double alpha, double gamma) {
  if (num_classes == 0 || logits.size() != num_classes * targets.size()) {
    throw std::invalid_argument("one_vs_rest_focal_loss: shape mismatch");
  }
  std::vector<int> labels(logits.size(), 0);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    if (targets[r] < -1 || targets[r] >= static_cast<int>(num_classes)) {
      throw std::invalid_argument("one_vs_rest_focal_loss: target out of range");
    }
    if (targets[r] >= 0) labels[r * num_classes + static_cast<std::size_t>(targets[r])] = 1;
  }
  return focal_loss(logits, labels, alpha, gamma);
}

double energy(std::span<const double> logits, double temperature) {
  if (logits.empty()) throw std::invalid_argument("energy: empty logits");
  if (!(temperature > 0.0)) throw std::invalid_argument("energy: temperature must be > 0");
  std::vector<double> scaled(logits.begin(), logits.end());
  for (double& v : scaled) v /= temperature;
  return -temperature * log_sum_exp(scaled);
}

std::vector<double> energy_grad(std::span<const double> logits, double temperature) {
  std::vector<double> scaled(logits.begin(), logits.end());
  for (double& v : scaled) v /= temperature;
  const double lse = log_sum_exp(scaled);
  for (double& v : scaled) v = -std::exp(v - lse);
  return scaled;
}

EnergyRegGrad energy_reg_loss(const LogitRows& id_rows, const LogitRows& ood_rows,
                              const LossConfig& cfg) {
  EnergyRegGrad out;
  out.id_grad.assign(id_rows.values.size(), 0.0);
  out.ood_grad.assign(ood_rows.values.size(), 0.0);
  auto accumulate = [&](const LogitRows& rows, std::vector<double>& grad, bool in_dist) {
    const std::size_t n = rows.rows();
    if (n == 0) return;
    if (rows.values.size() != n * rows.num_classes) {
      throw std::invalid_argument("energy_reg_loss: ragged logit rows");
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto f = rows.row(r);
      const double e = energy(f, cfg.temperature);
      const double hinge = in_dist ? std::max(0.0, e - cfg.m_in) : std::max(0.0, cfg.m_out - e);
      if (hinge == 0.0) continue;
      out.value += hinge * hinge * inv_n;
      const double de_coef = (in_dist ? 2.0 : -2.0) * hinge * inv_n;
      const auto de = energy_grad(f, cfg.temperature);
      for (std::size_t j = 0; j < rows.num_classes; ++j) grad[r * rows.num_classes + j] = de_coef * de[j];
    }
  };
  accumulate(id_rows, out.id_grad, true);
  accumulate(ood_rows, out.ood_grad, false);
  return out;
}

LossGrad supcon_ood_loss(const ContrastiveBatch& batch, double tau_c) {
  const std::size_t n = batch.size();
  const std::size_t d = batch.dim;
  if (n == 0) throw std::invalid_argument("supcon_ood_loss: empty batch");
  if (d == 0 || batch.embeddings.size() != n * d) {
    throw std::invalid_argument("supcon_ood_loss: embedding shape mismatch");
  }
  if (!(tau_c > 0.0)) throw std::invalid_argument("supcon_ood_loss: tau_c must be > 0");

  std::vector<double> unit(n * d), norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) sq += batch.embeddings[i * d + k] * batch.embeddings[i * d + k];
    norms[i] = std::sqrt(sq);
    if (!(norms[i] > 0.0)) {
      throw std::invalid_argument("supcon_ood_loss: zero-norm embedding at index " + std::to_string(i));
    }
    for (std::size_t k = 0; k < d; ++k) unit[i * d + k] = batch.embeddings[i * d + k] / norms[i];
  }
  auto sim = [&](std::size_t i, std::size_t k) {
    double s = 0.0;
    for (std::size_t t = 0; t < d; ++t) s += unit[i * d + t] * unit[k * d + t];
    return s / tau_c;
  };

  LossGrad out;
  std::vector<double> unit_grad(n * d, 0.0);
  std::vector<double> logits(n);
  std::vector<double> coef(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!batch.labels[i]) continue;  // outliers are never anchors
    std::size_t num_pos = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i && batch.labels[k] == batch.labels[i]) ++num_pos;
    if (num_pos == 0) continue;  // singleton class contributes exactly 0

    std::vector<double> others;
    others.reserve(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
      logits[k] = k == i ? 0.0 : sim(i, k);
      if (k != i) others.push_back(logits[k]);
    }
    const double lse = log_sum_exp(others);
    double pos_sum = 0.0;
    const double inv_pos = 1.0 / static_cast<double>(num_pos);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) {
        coef[k] = 0.0;
        continue;
      }
      const bool positive = batch.labels[k] == batch.labels[i];
      if (positive) pos_sum += logits[k];
      coef[k] = std::exp(logits[k] - lse) - (positive ? inv_pos : 0.0);
    }
    out.value += lse - pos_sum * inv_pos;
    for (std::size_t k = 0; k < n; ++k) {
      if (coef[k] == 0.0) continue;
      const double c = coef[k] / tau_c;
      for (std::size_t t = 0; t < d; ++t) {
        unit_grad[i * d + t] += c * unit[k * d + t];
        unit_grad[k * d + t] += c * unit[i * d + t];
      }
    }
  }

  // Back through f / |f|: (g - (g . u) u) / |f|.
  out.grad.assign(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t t = 0; t < d; ++t) dot += unit_grad[i * d + t] * unit[i * d + t];
    for (std::size_t t = 0; t < d; ++t) {
      out.grad[i * d + t] = (unit_grad[i * d + t] - dot * unit[i * d + t]) / norms[i];
    }
  }
  return out;
}

LossGrad smooth_l1_box_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw std::invalid_argument("smooth_l1_box_loss: size mismatch");
  LossGrad out;
  out.grad.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - target[i];
    const double a = std::abs(diff);
    if (a < 1.0) {
      out.value += 0.5 * diff * diff;
      out.grad[i] = diff;
    } else {
      out.value += a - 0.5;
      out.grad[i] = diff > 0.0 ? 1.0 : -1.0;
    }
  }
  return out;
}

double total_loss(const LossComponents& p, const LossConfig& cfg) {
  return p.cls + p.reg + p.obj + cfg.lambda_en * p.en + cfg.lambda_c * p.c;
}

GradCheckResult finite_diff_check(const LossFunction& fn, std::span<const double> x,
                                  double epsilon) {
  const LossGrad analytic = fn(x);
  if (analytic.grad.size() != x.size()) {
    throw std::invalid_argument("finite_diff_check: gradient size does not match input size");
  }
  GradCheckResult result;
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + epsilon;
    const double up = fn(probe).value;
    probe[i] = x[i] - epsilon;
    const double down = fn(probe).value;
    probe[i] = x[i];
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = analytic.grad[i];
    const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    if (rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace owl3d::loss
