#include "bgcoh/weight_combinatorics.hpp"

#include <algorithm>
#include <string>

#include "bgcoh/errors.hpp"

namespace bgcoh {

namespace {

void check_weights(const std::vector<int>& weights) {
  if (weights.empty()) throw ValidationError("weights: at least one weight is required");
  for (int w : weights)
    if (w < 1) throw ValidationError("weights: must be positive integers, got " + std::to_string(w));
}

std::vector<BigInt> build_series(const std::vector<int>& weights, long long t_max) {
  std::vector<BigInt> c(static_cast<std::size_t>(t_max) + 1, 0);
  c[0] = 1;
  for (int w : weights)
    for (long long t = w; t <= t_max; ++t) c[t] += c[t - w];
  return c;
}

}  // namespace

DenumerantCache& DenumerantCache::instance() {
  static DenumerantCache cache;
  return cache;
}

std::vector<BigInt> DenumerantCache::series(std::vector<int> weights, long long t_max) {
  check_weights(weights);
  std::sort(weights.begin(), weights.end());
  if (t_max < 0) return {};
  {
    std::shared_lock lock(mutex_);
    auto it = tables_.find(weights);
    if (it != tables_.end() && static_cast<long long>(it->second.size()) > t_max)
      return std::vector<BigInt>(it->second.begin(), it->second.begin() + t_max + 1);
  }
  std::unique_lock lock(mutex_);
  auto& table = tables_[weights];
  if (static_cast<long long>(table.size()) <= t_max) {
    const long long grow = std::max<long long>(t_max, 2 * static_cast<long long>(table.size()));
    table = build_series(weights, grow);
  }
  return std::vector<BigInt>(table.begin(), table.begin() + t_max + 1);
}

void DenumerantCache::clear() {
  std::unique_lock lock(mutex_);
  tables_.clear();
}

std::vector<BigInt> denumerant_series(const std::vector<int>& weights, long long t_max) {
  return DenumerantCache::instance().series(weights, t_max);
}

BigInt denumerant(const std::vector<int>& weights, long long t) {
  check_weights(weights);
  if (t < 0) return 0;
  return denumerant_series(weights, t).back();
}

BigInt background_betti(const WeightedAction& action, long long m, int p) {
  action.validate();
  if (p < 0 || p > action.dimension())
    throw ValidationError("degree p=" + std::to_string(p) + " outside 0.." + std::to_string(action.dimension()));
  if (p > 0) return 0;
  return denumerant(action.weights, m - action.twist);
}

BettiTable betti_table(const WeightedAction& action, long long m_lo, long long m_hi) {
  action.validate();
  BettiTable table;
  table.action = action;
  table.m_lo = m_lo;
  table.m_hi = m_hi;
  const long long len = std::max(0LL, m_hi - m_lo + 1);
  table.entries.assign(action.dimension() + 1, std::vector<BigInt>(len, 0));
  if (len == 0) return table;
  const auto series = denumerant_series(action.weights, std::max(0LL, m_hi - action.twist));
  for (long long i = 0; i < len; ++i) {
    const long long t = m_lo + i - action.twist;
    if (t >= 0) table.entries[0][i] = series[t];
  }
  return table;
}

IndexCharacter index_character(const WeightedAction& action, long long m_lo, long long m_hi) {
  const BettiTable table = betti_table(action, m_lo, m_hi);
  IndexCharacter ch;
  ch.m_lo = m_lo;
  ch.m_hi = m_hi;
  const std::size_t len = table.entries[0].size();
  ch.values.assign(len, 0);
  for (std::size_t p = 0; p < table.entries.size(); ++p)
    for (std::size_t i = 0; i < len; ++i) {
      if (p % 2 == 0)
        ch.values[i] += table.entries[p][i];
      else
        ch.values[i] -= table.entries[p][i];
    }
  return ch;
}

std::vector<std::vector<long long>> monomial_basis(const WeightedAction& action, long long m) {
  action.validate();
  std::vector<std::vector<long long>> out;
  const long long target = m - action.twist;
  if (target < 0) return out;
  const std::size_t n = action.weights.size();
  std::vector<long long> cur(n, 0);
  // Depth-first in increasing exponent order yields lexicographic output.
  auto rec = [&](auto&& self, std::size_t i, long long rest) -> void {
    if (i + 1 == n) {
      if (rest % action.weights[i] == 0) {
        cur[i] = rest / action.weights[i];
        out.push_back(cur);
      }
      return;
    }
    for (long long e = 0; e * action.weights[i] <= rest; ++e) {
      cur[i] = e;
      self(self, i + 1, rest - e * action.weights[i]);
    }
  };
  rec(rec, 0, target);
  return out;
}

}  // namespace bgcoh
