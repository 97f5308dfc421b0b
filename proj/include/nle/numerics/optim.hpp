// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nle/error.hpp"
#include "nle/numerics/tensor.hpp"

namespace nle {

struct AdamWHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

template <typename T>
struct AdamMoments {
  std::vector<T> m;
  std::vector<T> v;
};

/// One AdamW update of a single parameter. `step` counts from 1 and drives
/// the bias correction. Weight decay is decoupled: p ← p·(1 − lr·wd) before
/// the moment-based update.
template <typename T>
void adamw_step(std::span<T> param, std::span<const T> grad, AdamMoments<T>& st,
                const AdamWHyper& h, double lr, std::size_t step) {
  if (!(lr > 0.0)) throw ConfigError("AdamW learning rate must be positive, got " + std::to_string(lr));
  if (step == 0) throw ConfigError("AdamW step counter starts at 1");
  if (st.m.size() != param.size()) {
    st.m.assign(param.size(), T{0});
    st.v.assign(param.size(), T{0});
  }
  const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(step));
  const double decay = 1.0 - lr * h.weight_decay;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad.empty() ? 0.0 : static_cast<double>(grad[i]);
    const double m = h.beta1 * st.m[i] + (1.0 - h.beta1) * g;
    const double v = h.beta2 * st.v[i] + (1.0 - h.beta2) * g * g;
    st.m[i] = static_cast<T>(m);
    st.v[i] = static_cast<T>(v);
    const double mhat = m / bc1;
    const double vhat = v / bc2;
    const double p = static_cast<double>(param[i]) * decay - lr * mhat / (std::sqrt(vhat) + h.eps);
    param[i] = static_cast<T>(p);
  }
}

/// AdamW over a named parameter set. Moments are keyed by parameter name so
/// they can be checkpointed next to the weights.
template <typename T>
class AdamW {
 public:
  explicit AdamW(AdamWHyper hyper = {}) : hyper_(hyper) {}

  /// Applies one update to every parameter that requires a gradient and
  /// clears the gradients afterwards.
  void step(std::vector<Parameter<T>>& params, double lr) {
    ++step_;
    for (auto& p : params) {
      if (!p.tensor.requires_grad()) continue;
      adamw_step<T>(p.tensor.mutable_data(), p.tensor.grad(), moments_[p.name], hyper_, lr, step_);
      p.tensor.zero_grad();
    }
  }

  std::size_t steps_taken() const noexcept { return step_; }
  void set_steps_taken(std::size_t s) noexcept { step_ = s; }
  const AdamWHyper& hyper() const noexcept { return hyper_; }
  std::map<std::string, AdamMoments<T>>& moments() noexcept { return moments_; }
  const std::map<std::string, AdamMoments<T>>& moments() const noexcept { return moments_; }

 private:
  AdamWHyper hyper_;
  std::size_t step_ = 0;
  std::map<std::string, AdamMoments<T>> moments_;
};

/// Linear warmup from 0 to `peak` over the first warmup_frac·total steps,
/// then half-cosine decay to floor_frac·peak at `total`.
inline double cosine_lr(std::size_t step, std::size_t total, double peak, double warmup_frac = 0.05,
                        double floor_frac = 0.01) {
  if (!(warmup_frac >= 0.0 && warmup_frac < 1.0)) {
    throw ConfigError("warmup fraction must lie in [0, 1), got " + std::to_string(warmup_frac));
  }
  if (total == 0) throw ConfigError("cosine schedule needs at least one step");
  if (step > total) {
    throw ConfigError("step " + std::to_string(step) + " beyond schedule of " + std::to_string(total));
  }
  const double warm = warmup_frac * static_cast<double>(total);
  const double s = static_cast<double>(step);
  if (s < warm) return peak * s / warm;
  const double span = static_cast<double>(total) - warm;
  const double progress = span > 0.0 ? (s - warm) / span : 1.0;
  const double floor = floor_frac * peak;
  return floor + (peak - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace nle
