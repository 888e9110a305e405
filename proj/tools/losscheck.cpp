#include <algorithm>
#include <cmath>
#include <string>

#include "cli.hpp"
#include "owl3d/losses.hpp"
#include "owl3d/rng.hpp"

namespace owl3d::cli {

namespace {

using loss::LossGrad;

struct CheckRow {
  std::string name;
  double max_rel_error = 0.0;
};

CheckRow check_focal(CounterRng& rng, std::size_t instances, double eps) {
  CheckRow row{"focal", 0.0};
  for (std::size_t t = 0; t < instances; ++t) {
    std::vector<double> x(8);
    std::vector<int> labels(8);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform(-4.0, 4.0);
      labels[i] = static_cast<int>(rng.index(2));
    }
    auto fn = [&](std::span<const double> z) { return loss::focal_loss(z, labels, 0.25, 2.0); };
    row.max_rel_error = std::max(row.max_rel_error, loss::finite_diff_check(fn, x, eps).max_rel_error);
  }
  return row;
}

CheckRow check_cls_focal(CounterRng& rng, std::size_t instances, double eps) {
  CheckRow row{"cls_one_vs_rest_focal", 0.0};
  constexpr std::size_t kClasses = 4;
  for (std::size_t t = 0; t < instances; ++t) {
    std::vector<double> x(4 * kClasses);
    std::vector<int> targets(4);
    for (double& v : x) v = rng.uniform(-4.0, 4.0);
    for (int& c : targets) c = static_cast<int>(rng.index(kClasses + 1)) - 1;
    auto fn = [&](std::span<const double> z) {
      return loss::one_vs_rest_focal_loss(z, kClasses, targets, 0.25, 2.0);
    };
    row.max_rel_error = std::max(row.max_rel_error, loss::finite_diff_check(fn, x, eps).max_rel_error);
  }
  return row;
}

// Logit row whose energy stays at least 1e-2 away from `margin`, so the
// central difference never straddles the hinge kink.
std::vector<double> row_away_from(CounterRng& rng, double lo, double hi, double margin) {
  for (;;) {
    std::vector<double> f(3);
    for (double& v : f) v = rng.uniform(lo, hi);
    if (std::abs(loss::energy(f, 1.0) - margin) > 1e-2) return f;
  }
}

CheckRow check_energy_reg(CounterRng& rng, std::size_t instances, double eps) {
  CheckRow row{"energy_reg", 0.0};
  const loss::LossConfig cfg;
  for (std::size_t t = 0; t < instances; ++t) {
    std::vector<double> x;
    for (int r = 0; r < 4; ++r) {
      auto f = row_away_from(rng, -3.0, 7.0, cfg.m_in);
      x.insert(x.end(), f.begin(), f.end());
    }
    for (int r = 0; r < 3; ++r) {
      auto f = row_away_from(rng, -2.0, 5.0, cfg.m_out);
      x.insert(x.end(), f.begin(), f.end());
    }
    auto fn = [&](std::span<const double> z) {
      loss::LogitRows id{3, {z.begin(), z.begin() + 12}};
      loss::LogitRows ood{3, {z.begin() + 12, z.end()}};
      auto r = loss::energy_reg_loss(id, ood, cfg);
      LossGrad out{r.value, r.id_grad};
      out.grad.insert(out.grad.end(), r.ood_grad.begin(), r.ood_grad.end());
      return out;
    };
    row.max_rel_error = std::max(row.max_rel_error, loss::finite_diff_check(fn, x, eps).max_rel_error);
  }
  return row;
}

CheckRow check_supcon(CounterRng& rng, std::size_t instances, double eps) {
  CheckRow row{"supcon_ood", 0.0};
  constexpr std::size_t kN = 6;
  constexpr std::size_t kDim = 8;
  for (std::size_t t = 0; t < instances; ++t) {
    std::vector<loss::ContrastLabel> labels(kN);
    // Two fixed anchors of class 0 guarantee a non-trivial loss.
    labels[0] = 0;
    labels[1] = 0;
    for (std::size_t i = 2; i < kN; ++i) {
      const std::size_t c = rng.index(3);
      labels[i] = c == 2 ? loss::ContrastLabel{} : loss::ContrastLabel{static_cast<int>(c)};
    }
    std::vector<double> x(kN * kDim);
    for (double& v : x) v = rng.normal();
    auto fn = [&](std::span<const double> z) {
      loss::ContrastiveBatch batch{kDim, {z.begin(), z.end()}, labels};
      return loss::supcon_ood_loss(batch, 0.10);
    };
    row.max_rel_error = std::max(row.max_rel_error, loss::finite_diff_check(fn, x, eps).max_rel_error);
  }
  return row;
}

CheckRow check_smooth_l1(CounterRng& rng, std::size_t instances, double eps) {
  CheckRow row{"smooth_l1_box", 0.0};
  for (std::size_t t = 0; t < instances; ++t) {
    std::vector<double> pred(7), target(7);
    for (std::size_t i = 0; i < 7; ++i) {
      target[i] = rng.uniform(-2.0, 2.0);
      double diff;
      do {
        diff = rng.uniform(-3.0, 3.0);
      } while (std::abs(std::abs(diff) - 1.0) < 1e-2);
      pred[i] = target[i] + diff;
    }
    auto fn = [&](std::span<const double> z) { return loss::smooth_l1_box_loss(z, target); };
    row.max_rel_error = std::max(row.max_rel_error, loss::finite_diff_check(fn, pred, eps).max_rel_error);
  }
  return row;
}

}  // namespace

nlohmann::ordered_json run_losscheck(const LosscheckOptions& opts) {
  CounterRng rng(opts.seed, "losscheck");
  std::vector<CheckRow> rows;
  rows.push_back(check_focal(rng, opts.instances, opts.epsilon));
  rows.push_back(check_cls_focal(rng, opts.instances, opts.epsilon));
  rows.push_back(check_energy_reg(rng, opts.instances, opts.epsilon));
  rows.push_back(check_supcon(rng, opts.instances, opts.epsilon));
  rows.push_back(check_smooth_l1(rng, opts.instances, opts.epsilon));

  nlohmann::ordered_json report;
  report["config"] = {{"seed", opts.seed},
                      {"instances", opts.instances},
                      {"epsilon", opts.epsilon},
                      {"tolerance", opts.tolerance}};
  bool all_pass = true;
  auto losses = nlohmann::ordered_json::array();
  for (const CheckRow& r : rows) {
    const bool pass = r.max_rel_error <= opts.tolerance;
    all_pass = all_pass && pass;
    losses.push_back({{"name", r.name},
                      {"instances", opts.instances},
                      {"max_rel_error", r.max_rel_error},
                      {"pass", pass}});
  }
  report["losses"] = std::move(losses);
  report["pass"] = all_pass;
  return report;
}

}  // namespace owl3d::cli
