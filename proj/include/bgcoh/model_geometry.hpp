#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bgcoh {

/// Weighted circle action on C^n: e^{iθ} acts on z_j by e^{iλ_j θ}.
/// Points are stored as 2n reals (Re z_1, Im z_1, ..., Re z_n, Im z_n).
struct WeightedAction {
  std::vector<int> weights;
  long long twist = 0;

  int dimension() const { return static_cast<int>(weights.size()); }
  int min_weight() const;
  int max_weight() const;
  long long weight_sum() const;

  /// Throws ValidationError unless n >= 1 and every weight is >= 1.
  void validate() const;
};

double moment_map(const WeightedAction& action, std::span<const double> z);

/// Gradient of the moment map, (λ_j x_j, λ_j y_j).
std::vector<double> moment_gradient(const WeightedAction& action, std::span<const double> z);

/// v = -J grad(μ²/2) with J(a, b) = (-b, a), i.e. μ·(λ_j y_j, -λ_j x_j).
std::vector<double> taming_field(const WeightedAction& action, std::span<const double> z);

/// |v|² = μ² Σ λ_j² |z_j|².
double taming_field_norm2(const WeightedAction& action, std::span<const double> z);

/// The five pieces of the ν bound for the flat model with trivial bundle E_k.
struct NuTerms {
  double moment = 0;                ///< |𝐯| = μ
  double covariant_derivative = 0;  ///< bound on the operator norm of ∇v: |∇μ|² + μ λ_max
  double bundle_action = 0;         ///< μ (|k| + Σλ): largest weight on Λ^{0,•} ⊗ E_k
  double field_norm = 0;            ///< |v| = μ |∇μ|
  double unit = 1;

  double total() const { return moment + covariant_derivative + bundle_action + field_norm + unit; }
};

NuTerms nu_terms(const WeightedAction& action, std::span<const double> z);
double nu_bound(const WeightedAction& action, std::span<const double> z);

/// Point on the level set μ = t with |z_j|² = 2 t w_j / λ_j for w in the simplex.
std::vector<double> level_set_point(const WeightedAction& action, double t, std::span<const double> w);

/// Sampled level-set quantities. a = min |v|², b = max(|dμ||v| + ν + 1).
/// g = max |dμ||v| and nu = max ν are kept separately for the refined ratio.
struct LevelSetProfile {
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> g;
  std::vector<double> nu;
  int samples_per_level = 1;

  std::size_t size() const { return t.size(); }
};

LevelSetProfile level_set_profile(const WeightedAction& action, const std::vector<double>& t_grid,
                                  int samples_per_level, std::uint64_t seed);

/// Logarithmically spaced grid with `count` points in [t_min, t_max].
std::vector<double> log_grid(double t_min, double t_max, int count);

}  // namespace bgcoh
