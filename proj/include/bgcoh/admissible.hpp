#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bgcoh/errors.hpp"
#include "bgcoh/model_geometry.hpp"

namespace bgcoh {

// Two coordinates are in play. Level sets are indexed by t = |μ|; the
// rescaling function s takes u = t²/2. Everything below that is named u is an
// s-argument.
inline double level_to_s_arg(double t) { return t * t / 2; }
double s_arg_to_level(double u);

struct Knot {
  double u = 0;
  double s = 0;
  double s_prime = 0;
};

/// Intermediates of the constructive build, sampled on the build knots.
struct BuilderTrace {
  double epsilon = 1;
  std::vector<double> u;
  std::vector<double> floor;          ///< running maximum of κ
  std::vector<double> r;
  std::vector<double> r_prime;
  std::vector<double> r_second;
  std::vector<double> c;
  std::vector<double> tail_integral;  ///< ∫_u^∞ dτ / c(τ)
};

class BuildError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

struct AdmissibleTerm;

class AdmissibleFunction {
 public:
  enum class Kind { Sqrt, Grid, Combination, Constant };

  static AdmissibleFunction reference_sqrt();
  static AdmissibleFunction constant(double value);
  /// Cubic Hermite through the knots; beyond the last knot s' grows like
  /// e^{tail_rate (u - u_last)}. Rejects knots whose Hermite segments are not monotone.
  static AdmissibleFunction grid(std::vector<Knot> knots, double tail_rate);
  static AdmissibleFunction combination(std::vector<AdmissibleTerm> terms);

  Kind kind() const;
  double value(double u) const;
  double derivative(double u) const;
  double second_derivative(double u) const;
  /// ln s'(u); -inf where s' = 0. Finite even where s' itself overflows.
  double log_derivative(double u) const;
  /// s''(u) / s'(u), 0 where s' = 0.
  double curvature_ratio(double u) const;

  const std::vector<Knot>& knots() const;
  double tail_rate() const;
  double constant_value() const;
  const std::vector<AdmissibleTerm>& terms() const;

  const std::optional<BuilderTrace>& trace() const { return trace_; }
  void set_trace(BuilderTrace trace) { trace_ = std::move(trace); }

  struct Node;

 private:
  explicit AdmissibleFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
  std::optional<BuilderTrace> trace_;
};

struct AdmissibleTerm {
  double coefficient = 1;
  AdmissibleFunction function;
};

AdmissibleFunction reference_sqrt();
AdmissibleFunction convex_combine(const AdmissibleFunction& s1, const AdmissibleFunction& s2, double t1, double t2);

struct AdmissibilityReport {
  double target = 1e3;
  long long twist = 0;
  std::vector<double> t;
  std::vector<double> ratio;      ///< capped at 1e300 for serialization
  std::vector<double> log_ratio;  ///< natural log, uncapped
  bool pass = false;
  std::optional<double> threshold_t;
  std::optional<double> first_offending_t;
  std::string reason;
  /// f √a > √(2‖B‖ + 2) per grid point, with ‖B‖ = 0 for the flat trivial bundle.
  std::vector<bool> bochner;
  bool bochner_tail = false;
};

struct VerifyRules {
  int min_tail_points = 5;
  double tail_tolerance = 0.01;  ///< allowed relative dip below the running tail maximum
};

AdmissibilityReport verify_admissible(const AdmissibleFunction& s, const LevelSetProfile& profile, double target,
                                      const VerifyRules& rules = {});

/// Same ratio with ν replaced by ν + 2πk t² (|𝐯| = t on the level set).
AdmissibilityReport admissible_for_twist(const AdmissibleFunction& s, const LevelSetProfile& profile, long long k,
                                         double target, const VerifyRules& rules = {});

using FloorFunction = std::function<double(double)>;

/// Floors by name: "zero", "sqrt" (√(2u)), "quadratic" (u(1+u)).
FloorFunction named_floor(const std::string& name);

struct BuildOptions {
  double epsilon = 1.0;           ///< growth scale in c(u) e^{-εu}
  double max_knot_spacing = 0.25;
  double target = 1e3;
};

AdmissibleFunction build_admissible(const LevelSetProfile& profile, const FloorFunction& floor,
                                    const BuildOptions& options = {});

/// Default level grid for builds: 48 log-spaced levels in [0.5, 24].
std::vector<double> default_build_levels();
/// Default level grid for verification: 241 log-spaced levels in [0.5, 1e10].
std::vector<double> default_verify_levels();

}  // namespace bgcoh
