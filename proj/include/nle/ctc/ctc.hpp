// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nle/error.hpp"
#include "nle/numerics/ops.hpp"
#include "nle/numerics/tensor.hpp"
#include "nle/vocab.hpp"

namespace nle::ctc {

/// log(0) inside the recursions. Any value at or below it is treated as an
/// impossible state, so sums of sentinels stay impossible.
inline constexpr double kLogZero = -1e30;

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b <= kLogZero) return a <= kLogZero ? kLogZero : a;
  return a + std::log1p(std::exp(b - a));
}

/// |target| plus one mandatory blank between each pair of equal neighbours.
inline std::size_t min_positions(std::span<const TokenId> target) {
  std::size_t n = target.size();
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++n;
  return n;
}

inline void validate(std::size_t positions, std::size_t vocab, std::span<const TokenId> target,
                     TokenId blank) {
  if (vocab < 2) throw DimensionError("CTC needs blank plus at least one symbol");
  if (blank < 0 || static_cast<std::size_t>(blank) >= vocab) {
    throw DimensionError("blank id " + std::to_string(blank) + " outside vocabulary");
  }
  for (TokenId t : target) {
    if (t == blank) throw InvalidTargetError("CTC target contains the blank symbol");
    if (t < 0 || static_cast<std::size_t>(t) >= vocab) {
      throw InvalidTargetError("CTC target id " + std::to_string(t) + " outside vocabulary");
    }
  }
  const std::size_t need = min_positions(target);
  if (positions < need) {
    throw InfeasibleTargetError("target needs " + std::to_string(need) + " positions, only " +
                                std::to_string(positions) + " available");
  }
}

inline bool feasible(std::size_t positions, std::span<const TokenId> target) {
  return positions >= min_positions(target);
}

namespace detail {

/// Row-wise log-softmax in double, clamped at the sentinel.
template <typename T>
std::vector<double> log_probs(const Tensor<T>& logits) {
  const std::size_t P = logits.rows(), V = logits.cols();
  std::vector<double> lp(P * V);
  std::vector<double> row(V);
  for (std::size_t t = 0; t < P; ++t) {
    for (std::size_t k = 0; k < V; ++k) row[k] = static_cast<double>(logits.raw()[t * V + k]);
    const double lse = ops::logsumexp<double>(row);
    for (std::size_t k = 0; k < V; ++k) lp[t * V + k] = std::max(row[k] - lse, kLogZero);
  }
  return lp;
}

inline std::vector<TokenId> extend(std::span<const TokenId> target, TokenId blank) {
  std::vector<TokenId> ext(2 * target.size() + 1, blank);
  for (std::size_t i = 0; i < target.size(); ++i) ext[2 * i + 1] = target[i];
  return ext;
}

inline bool can_skip(const std::vector<TokenId>& ext, std::size_t s, TokenId blank) {
  return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2];
}

}  // namespace detail

/// Negative log-likelihood of `target` under per-position distributions
/// softmax(logits), marginalized over every CTC alignment with the standard
/// extended-label forward recursion. Differentiable w.r.t. logits through the
/// forward-backward occupancies.
template <typename T>
Tensor<T> ctc_loss(const Tensor<T>& logits, std::span<const TokenId> target, TokenId blank) {
  if (logits.rank() != 2) throw DimensionError("ctc_loss expects [positions x vocab] logits");
  const std::size_t P = logits.rows(), V = logits.cols();
  validate(P, V, target, blank);
  const auto lp = detail::log_probs(logits);
  const auto ext = detail::extend(target, blank);
  const std::size_t S = ext.size();

  std::vector<double> alpha(P * S, kLogZero), beta(P * S, kLogZero);
  alpha[0] = lp[blank];
  if (S > 1) alpha[1] = lp[ext[1]];
  for (std::size_t t = 1; t < P; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double a = alpha[(t - 1) * S + s];
      if (s >= 1) a = log_add(a, alpha[(t - 1) * S + s - 1]);
      if (detail::can_skip(ext, s, blank)) a = log_add(a, alpha[(t - 1) * S + s - 2]);
      alpha[t * S + s] = a <= kLogZero ? kLogZero : a + lp[t * V + ext[s]];
    }
  }
  double log_z = alpha[(P - 1) * S + S - 1];
  if (S > 1) log_z = log_add(log_z, alpha[(P - 1) * S + S - 2]);

  beta[(P - 1) * S + S - 1] = lp[(P - 1) * V + ext[S - 1]];
  if (S > 1) beta[(P - 1) * S + S - 2] = lp[(P - 1) * V + ext[S - 2]];
  for (std::size_t t = P - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double b = beta[(t + 1) * S + s];
      if (s + 1 < S) b = log_add(b, beta[(t + 1) * S + s + 1]);
      if (s + 2 < S && detail::can_skip(ext, s + 2, blank)) b = log_add(b, beta[(t + 1) * S + s + 2]);
      beta[t * S + s] = b <= kLogZero ? kLogZero : b + lp[t * V + ext[s]];
    }
  }

  // d(-log Z)/d logit[t,k] = softmax[t,k] - occupancy[t,k]
  Buffer<T> grad(P * V);
  std::vector<double> occ(V);
  for (std::size_t t = 0; t < P; ++t) {
    std::fill(occ.begin(), occ.end(), kLogZero);
    for (std::size_t s = 0; s < S; ++s) {
      const double ab = alpha[t * S + s] + beta[t * S + s] - lp[t * V + ext[s]];
      if (alpha[t * S + s] > kLogZero && beta[t * S + s] > kLogZero) occ[ext[s]] = log_add(occ[ext[s]], ab);
    }
    for (std::size_t k = 0; k < V; ++k) {
      const double p = std::exp(lp[t * V + k]);
      const double o = occ[k] <= kLogZero ? 0.0 : std::exp(occ[k] - log_z);
      grad[t * V + k] = static_cast<T>(p - o);
    }
  }

  return Tensor<T>::from_op({}, {static_cast<T>(-log_z)}, {logits},
                            [grad = std::move(grad)](typename Tensor<T>::Node& o) {
                              T* g = o.inputs[0]->grad_ptr();
                              const T up = o.grad[0];
                              for (std::size_t i = 0; i < grad.size(); ++i) g[i] += up * grad[i];
                            });
}

/// Merge adjacent duplicates, then drop blanks.
inline Tokens collapse(std::span<const TokenId> path, TokenId blank) {
  Tokens out;
  TokenId prev = -1;
  for (TokenId t : path) {
    if (t != prev && t != blank) out.push_back(t);
    prev = t;
  }
  return out;
}

/// Per-position argmax; ties resolve to the lowest id.
template <typename T>
Tokens argmax_path(const Tensor<T>& logits) {
  const std::size_t P = logits.rows(), V = logits.cols();
  Tokens path(P);
  for (std::size_t t = 0; t < P; ++t) {
    const T* row = logits.raw() + t * V;
    std::size_t best = 0;
    for (std::size_t k = 1; k < V; ++k)
      if (row[k] > row[best]) best = k;
    path[t] = static_cast<TokenId>(best);
  }
  return path;
}

template <typename T>
Tokens greedy_collapse(const Tensor<T>& logits, TokenId blank) {
  return collapse(argmax_path(logits), blank);
}

/// Exhaustive reference for ctc_loss: sums the probability of every one of
/// the V^P label paths that collapses to `target`. Returns +inf when no path
/// does. Refuses instances with more than 10^6 paths.
template <typename T>
double ctc_oracle(const Tensor<T>& logits, std::span<const TokenId> target, TokenId blank) {
  const std::size_t P = logits.rows(), V = logits.cols();
  double paths = 1.0;
  for (std::size_t t = 0; t < P; ++t) paths *= static_cast<double>(V);
  if (paths > 1e6) throw ConfigError("ctc_oracle refuses " + std::to_string(paths) + " paths");
  std::vector<double> prob(P * V);
  std::vector<double> row(V);
  for (std::size_t t = 0; t < P; ++t) {
    for (std::size_t k = 0; k < V; ++k) row[k] = static_cast<double>(logits.raw()[t * V + k]);
    const double lse = ops::logsumexp<double>(row);
    for (std::size_t k = 0; k < V; ++k) prob[t * V + k] = std::exp(row[k] - lse);
  }
  const Tokens want(target.begin(), target.end());
  Tokens path(P, 0);
  double total = 0.0;
  const auto n = static_cast<std::size_t>(paths);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rem = idx;
    double p = 1.0;
    for (std::size_t t = 0; t < P; ++t) {
      path[t] = static_cast<TokenId>(rem % V);
      rem /= V;
      p *= prob[t * V + path[t]];
    }
    if (collapse(path, blank) == want) total += p;
  }
  return total > 0.0 ? -std::log(total) : std::numeric_limits<double>::infinity();
}

/// Most probable single alignment (max-product recursion with backtrace).
/// Equal scores prefer the blank state, then the lower label id.
template <typename T>
Tokens best_alignment(const Tensor<T>& logits, std::span<const TokenId> target, TokenId blank) {
  const std::size_t P = logits.rows(), V = logits.cols();
  validate(P, V, target, blank);
  const auto lp = detail::log_probs(logits);
  const auto ext = detail::extend(target, blank);
  const std::size_t S = ext.size();
  std::vector<double> score(P * S, kLogZero);
  std::vector<std::size_t> back(P * S, 0);

  // true if state a is preferred over state b at equal score
  auto prefer = [&](std::size_t a, std::size_t b) {
    const bool ab = ext[a] == blank, bb = ext[b] == blank;
    if (ab != bb) return ab;
    if (ext[a] != ext[b]) return ext[a] < ext[b];
    return a < b;
  };
  auto better = [&](double sa, std::size_t a, double sb, std::size_t b) {
    return sa > sb || (sa == sb && prefer(a, b));
  };

  score[0] = lp[blank];
  if (S > 1) score[1] = lp[ext[1]];
  for (std::size_t t = 1; t < P; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      std::size_t arg = s;
      double best = score[(t - 1) * S + s];
      if (s >= 1 && better(score[(t - 1) * S + s - 1], s - 1, best, arg)) {
        best = score[(t - 1) * S + s - 1];
        arg = s - 1;
      }
      if (detail::can_skip(ext, s, blank) && better(score[(t - 1) * S + s - 2], s - 2, best, arg)) {
        best = score[(t - 1) * S + s - 2];
        arg = s - 2;
      }
      score[t * S + s] = best <= kLogZero ? kLogZero : best + lp[t * V + ext[s]];
      back[t * S + s] = arg;
    }
  }
  std::size_t s = S - 1;
  if (S > 1 && better(score[(P - 1) * S + S - 2], S - 2, score[(P - 1) * S + S - 1], S - 1)) s = S - 2;
  Tokens out(P);
  for (std::size_t t = P; t-- > 0;) {
    out[t] = ext[s];
    s = back[t * S + s];
  }
  return out;
}

}  // namespace nle::ctc
