// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <limits>
#include <set>
#include <vector>

namespace nle::oracles {

/// Exhaustive enumeration of edit scripts turning `ref` into `hyp`. Returns
/// every (ins, del, sub) triple reached at the minimum total cost.
/// Exponential; meant for combined lengths of about ten.
template <typename Seq>
std::set<std::array<std::size_t, 3>> minimal_edit_scripts(const Seq& ref, const Seq& hyp) {
  std::set<std::array<std::size_t, 3>> best;
  std::size_t best_cost = std::numeric_limits<std::size_t>::max();
  std::array<std::size_t, 3> cur{0, 0, 0};
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
    const std::size_t cost = cur[0] + cur[1] + cur[2];
    if (cost > best_cost) return;
    if (i == ref.size() && j == hyp.size()) {
      if (cost < best_cost) {
        best_cost = cost;
        best.clear();
      }
      best.insert(cur);
      return;
    }
    if (i < ref.size() && j < hyp.size()) {
      const bool same = ref[i] == hyp[j];
      if (!same) ++cur[2];
      self(self, i + 1, j + 1);
      if (!same) --cur[2];
    }
    if (i < ref.size()) {
      ++cur[1];
      self(self, i + 1, j);
      --cur[1];
    }
    if (j < hyp.size()) {
      ++cur[0];
      self(self, i, j + 1);
      --cur[0];
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace nle::oracles
