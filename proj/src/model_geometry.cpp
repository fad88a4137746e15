#include "bgcoh/model_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "bgcoh/errors.hpp"

namespace bgcoh {

int WeightedAction::min_weight() const { return *std::min_element(weights.begin(), weights.end()); }

int WeightedAction::max_weight() const { return *std::max_element(weights.begin(), weights.end()); }

long long WeightedAction::weight_sum() const {
  return std::accumulate(weights.begin(), weights.end(), 0LL);
}

void WeightedAction::validate() const {
  if (weights.empty()) throw ValidationError("weights: at least one weight is required");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 1)
      throw ValidationError("weights[" + std::to_string(i) + "]: must be a positive integer, got " +
                            std::to_string(weights[i]));
  }
}

namespace {

void check_point(const WeightedAction& action, std::span<const double> z) {
  if (z.size() != 2 * action.weights.size())
    throw ValidationError("point has " + std::to_string(z.size()) + " coordinates, expected " +
                          std::to_string(2 * action.weights.size()));
}

// Σ λ_j² |z_j|², which is |∇μ|².
double gradient_norm2(const WeightedAction& action, std::span<const double> z) {
  double acc = 0;
  for (std::size_t j = 0; j < action.weights.size(); ++j) {
    const double l = action.weights[j];
    acc += l * l * (z[2 * j] * z[2 * j] + z[2 * j + 1] * z[2 * j + 1]);
  }
  return acc;
}

}  // namespace

double moment_map(const WeightedAction& action, std::span<const double> z) {
  check_point(action, z);
  double acc = 0;
  for (std::size_t j = 0; j < action.weights.size(); ++j)
    acc += action.weights[j] * (z[2 * j] * z[2 * j] + z[2 * j + 1] * z[2 * j + 1]);
  return acc / 2;
}

std::vector<double> moment_gradient(const WeightedAction& action, std::span<const double> z) {
  check_point(action, z);
  std::vector<double> g(z.size());
  for (std::size_t j = 0; j < action.weights.size(); ++j) {
    g[2 * j] = action.weights[j] * z[2 * j];
    g[2 * j + 1] = action.weights[j] * z[2 * j + 1];
  }
  return g;
}

std::vector<double> taming_field(const WeightedAction& action, std::span<const double> z) {
  const double mu = moment_map(action, z);
  std::vector<double> v(z.size());
  for (std::size_t j = 0; j < action.weights.size(); ++j) {
    const double l = action.weights[j];
    v[2 * j] = mu * l * z[2 * j + 1];
    v[2 * j + 1] = -mu * l * z[2 * j];
  }
  return v;
}

double taming_field_norm2(const WeightedAction& action, std::span<const double> z) {
  const double mu = moment_map(action, z);
  return mu * mu * gradient_norm2(action, z);
}

NuTerms nu_terms(const WeightedAction& action, std::span<const double> z) {
  const double mu = moment_map(action, z);
  const double grad2 = gradient_norm2(action, z);
  NuTerms terms;
  terms.moment = mu;
  // ∇v = μ·(λ-weighted rotation) + (J∇μ) ⊗ ∇μ.
  terms.covariant_derivative = grad2 + mu * action.max_weight();
  terms.bundle_action = mu * (static_cast<double>(std::llabs(action.twist)) + action.weight_sum());
  terms.field_norm = mu * std::sqrt(grad2);
  terms.unit = 1;
  return terms;
}

double nu_bound(const WeightedAction& action, std::span<const double> z) {
  return nu_terms(action, z).total();
}

std::vector<double> level_set_point(const WeightedAction& action, double t, std::span<const double> w) {
  if (w.size() != action.weights.size()) throw ValidationError("simplex point has wrong dimension");
  std::vector<double> z(2 * w.size(), 0.0);
  for (std::size_t j = 0; j < w.size(); ++j) z[2 * j] = std::sqrt(2 * t * w[j] / action.weights[j]);
  return z;
}

std::vector<double> log_grid(double t_min, double t_max, int count) {
  if (!(t_min > 0) || !(t_max > t_min) || count < 2)
    throw ValidationError("log grid needs 0 < t_min < t_max and at least two points");
  std::vector<double> out(count);
  const double l0 = std::log(t_min), l1 = std::log(t_max);
  for (int i = 0; i < count; ++i) out[i] = std::exp(l0 + (l1 - l0) * i / (count - 1));
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

LevelSetProfile level_set_profile(const WeightedAction& action, const std::vector<double>& t_grid,
                                  int samples_per_level, std::uint64_t seed) {
  action.validate();
  if (samples_per_level < 1) throw ValidationError("samples_per_level: must be >= 1");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0)) throw ValidationError("t_grid: values must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw ValidationError("t_grid: must be strictly increasing");
  }

  const std::size_t n = action.weights.size();
  LevelSetProfile prof;
  prof.t = t_grid;
  prof.samples_per_level = samples_per_level;
  prof.a.resize(t_grid.size());
  prof.b.resize(t_grid.size());
  prof.g.resize(t_grid.size());
  prof.nu.resize(t_grid.size());

  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    double a = std::numeric_limits<double>::infinity();
    double b = 0, g = 0, nu = 0;
    auto visit = [&](const std::vector<double>& w) {
      const auto z = level_set_point(action, t, w);
      const double v2 = taming_field_norm2(action, z);
      const double dmu_v = std::sqrt(gradient_norm2(action, z) * v2);
      const double nv = nu_bound(action, z);
      a = std::min(a, v2);
      b = std::max(b, dmu_v + nv + 1);
      g = std::max(g, dmu_v);
      nu = std::max(nu, nv);
    };

    std::vector<double> w(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      std::fill(w.begin(), w.end(), 0.0);
      w[j] = 1;
      visit(w);
    }
    if (n > 1) {
      // Each level gets its own stream so levels can be evaluated independently.
      std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
      std::exponential_distribution<double> expo(1.0);
      for (int s = 0; s < samples_per_level; ++s) {
        double total = 0;
        for (auto& x : w) total += (x = expo(rng));
        for (auto& x : w) x /= total;
        visit(w);
      }
    }
    prof.a[i] = a;
    prof.b[i] = b;
    prof.g[i] = g;
    prof.nu[i] = nu;
  }
  return prof;
}

}  // namespace bgcoh
