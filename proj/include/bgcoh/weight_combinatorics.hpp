#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <vector>

#include "bgcoh/model_geometry.hpp"

namespace bgcoh {

using BigInt = boost::multiprecision::cpp_int;

/// Number of nonnegative integer solutions of Σ λ_i m_i = t (0 for t < 0).
BigInt denumerant(const std::vector<int>& weights, long long t);

/// Coefficients of Π (1 - x^{λ_i})^{-1} up to x^t_max, from the shared cache.
std::vector<BigInt> denumerant_series(const std::vector<int>& weights, long long t_max);

/// Shared DP tables keyed by the sorted weight vector. Readers take a shared
/// lock; a table that is too short is regrown under the exclusive lock.
class DenumerantCache {
 public:
  static DenumerantCache& instance();
  std::vector<BigInt> series(std::vector<int> weights, long long t_max);
  void clear();

 private:
  std::shared_mutex mutex_;
  std::map<std::vector<int>, std::vector<BigInt>> tables_;
};

/// β^p_{bg,V_m} for C^n with the trivial bundle of twist k.
BigInt background_betti(const WeightedAction& action, long long m, int p);

struct BettiTable {
  WeightedAction action;
  long long m_lo = 0;
  long long m_hi = -1;               ///< empty window when m_hi < m_lo
  std::vector<std::vector<BigInt>> entries;  ///< entries[p][m - m_lo], p = 0..n
};

BettiTable betti_table(const WeightedAction& action, long long m_lo, long long m_hi);

struct IndexCharacter {
  long long m_lo = 0;
  long long m_hi = -1;
  std::vector<BigInt> values;  ///< m⁺ - m⁻ at m = m_lo + i
};

IndexCharacter index_character(const WeightedAction& action, long long m_lo, long long m_hi);

/// Lexicographically sorted exponent tuples with Σ λ_i m_i = m - k.
std::vector<std::vector<long long>> monomial_basis(const WeightedAction& action, long long m);

}  // namespace bgcoh
