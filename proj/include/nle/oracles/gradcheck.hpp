// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "nle/numerics/tensor.hpp"

namespace nle::oracles {

struct GradCheckResult {
  double max_rel_err = 0.0;  ///< worst input, ‖analytic − numeric‖ / max(‖analytic‖, ‖numeric‖, 1e-8)
  std::size_t worst_input = 0;
};

/// Central finite differences of a scalar function against reverse-mode
/// gradients. `f` must rebuild its graph from the given inputs on every call.
inline GradCheckResult gradcheck(const std::function<Tensor<double>(const std::vector<Tensor<double>>&)>& f,
                                 std::vector<Tensor<double>> inputs, double step = 1e-6) {
  for (auto& t : inputs) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  f(inputs).backward();
  GradCheckResult res;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto& x = inputs[k];
    std::vector<double> analytic(x.numel(), 0.0);
    if (x.has_grad()) std::copy(x.grad().begin(), x.grad().end(), analytic.begin());
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    auto data = x.mutable_data();
    for (std::size_t i = 0; i < x.numel(); ++i) {
      const double orig = data[i];
      data[i] = orig + step;
      const double up = f(inputs).item();
      data[i] = orig - step;
      const double down = f(inputs).item();
      data[i] = orig;
      const double num = (up - down) / (2.0 * step);
      diff2 += (num - analytic[i]) * (num - analytic[i]);
      a2 += analytic[i] * analytic[i];
      n2 += num * num;
    }
    const double rel = std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), 1e-8});
    if (rel > res.max_rel_err) {
      res.max_rel_err = rel;
      res.worst_input = k;
    }
  }
  return res;
}

}  // namespace nle::oracles
