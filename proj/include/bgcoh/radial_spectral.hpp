#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bgcoh/admissible.hpp"
#include "bgcoh/banded_eigen.hpp"
#include "bgcoh/model_geometry.hpp"

namespace bgcoh {

/// Kernel counting could not separate zero from nonzero eigenvalues.
class AmbiguousKernel : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

/// One isotypic block for n = 1: weight m, rescaling s, and κ_L extra powers
/// of the positive line bundle (adds κ_L |z|²/2 to φ).
struct ModeSpec {
  WeightedAction action;
  long long m = 0;
  AdmissibleFunction s = AdmissibleFunction::reference_sqrt();
  long long extra_twist = 0;
};

enum class Spacing { Uniform, Geometric };

struct GridParams {
  int n = 2000;
  std::optional<double> radius;  ///< chosen from the decay rule when absent
  Spacing spacing = Spacing::Geometric;
  double stretch = 2.0;          ///< geometric grading β
  double min_decay = 40.0;       ///< required drop of ℓ ln r - φ past its peak
};

std::string spacing_name(Spacing s);
Spacing parse_spacing(const std::string& name);

/// Angular index j = (m - k)/λ of the degree-0 component, or nullopt if the
/// block is empty (m - k not divisible by λ).
std::optional<long long> mode_index(const ModeSpec& spec);

/// φ(r) = s((λ r²/2)²/2) + κ_L r²/2.
double phi(const ModeSpec& spec, double r);

/// Smallest R at which ℓ ln r - φ(r) has dropped by `min_decay` below its running peak.
double auto_radius(const ModeSpec& spec, double min_decay);

/// Radial nodes r_1 < ... < r_{N+1} = R.
std::vector<double> radial_nodes(int n, double radius, Spacing spacing, double stretch);

struct SparseRow {
  std::vector<std::pair<int, double>> entries;
};

struct RadialOperator {
  int degree = 0;
  long long j = 0;               ///< angular index of the function component
  std::vector<double> nodes;     ///< r_1..r_N plus the Dirichlet node R
  double radius = 0;
  std::vector<double> phi;       ///< φ at the nodes
  std::vector<double> node_mass;
  std::vector<SparseRow> factor;  ///< mass-weighted ∂̄_s rows; degree 1 drops the last row
  std::string boundary;
  BandedSymmetricMatrix matrix;
};

/// Weak-form ∂̄_s* ∂̄_s (degree 0) or ∂̄_s ∂̄_s* (degree 1) on one mode.
/// The spec must have a nonempty mode.
RadialOperator assemble_radial_operator(const ModeSpec& spec, int degree, const GridParams& grid);

struct DegreeSpectrum {
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  std::vector<std::vector<double>> vectors;
  int kernel_dim = 0;
  double eps_zero = 0;
  double gap_floor = 0;
};

/// Lowest `count` eigenpairs; eigenvalues are recomputed as 4‖∂̄_s v‖² so
/// they are nonnegative by construction.
DegreeSpectrum low_spectrum(const RadialOperator& op, int count);

struct Thresholds {
  double zero_rel = 1e-6;
  double gap_rel = 1e-2;
  int window = 6;
};

struct GridMeta {
  int n = 0;
  double radius = 0;
  Spacing spacing = Spacing::Geometric;
  double stretch = 2.0;
  int refinement = 0;
};

struct SpectrumResult {
  long long m = 0;
  std::optional<long long> j;
  GridMeta grid;
  std::array<DegreeSpectrum, 2> degrees;
  std::array<int, 2> kernel_dims{0, 0};
  bool empty_mode = false;
};

/// Applies the two-threshold rule to a window. Throws AmbiguousKernel.
void classify_kernel(DegreeSpectrum& spec, const Thresholds& thresholds);

/// Kernel dimensions for both degrees, refining the grid once on ambiguity.
SpectrumResult kernel_dims(const ModeSpec& spec, const GridParams& grid, const Thresholds& thresholds = {},
                           bool allow_refinement = true);

/// Cosine between the degree-0 kernel vector and the sampled r^j e^{-φ}.
double kernel_profile_cosine(const ModeSpec& spec, const GridParams& grid, const DegreeSpectrum& degree0);

struct InvarianceEntry {
  long long m = 0;
  SpectrumResult first;
  SpectrumResult second;
  bool equal = false;
};

struct InvarianceReport {
  std::vector<InvarianceEntry> entries;
  bool all_equal = true;
};

InvarianceReport invariance_check(const WeightedAction& action, const std::vector<long long>& m_list,
                                  const AdmissibleFunction& s1, const AdmissibleFunction& s2, const GridParams& grid,
                                  const Thresholds& thresholds = {});

struct KodairaPoint {
  long long k = 0;
  double gap = 0;         ///< smallest degree-1 eigenvalue
  int kernel_dim0 = 0;
  int expected_dim0 = 0;  ///< denumerant with the unchanged effective twist
};

struct KodairaScan {
  long long m = 0;
  std::vector<KodairaPoint> points;
  std::optional<long long> k0;  ///< first k from which the gap stays >= 1
  bool tail_monotone = false;   ///< no drop above 5% on the second half of the range
  bool dims_match = false;
};

KodairaScan kodaira_scan(const WeightedAction& action, long long m, const AdmissibleFunction& s,
                         const std::vector<long long>& k_values, const GridParams& grid,
                         const Thresholds& thresholds = {});

struct DoublingCheck {
  SpectrumResult coarse;
  SpectrumResult fine;
  bool zeros_decrease = true;
  double max_gap_drift = 0;  ///< largest relative change of the nonzero window eigenvalues
  bool stable = false;
};

DoublingCheck grid_doubling_check(const ModeSpec& spec, const GridParams& grid, const Thresholds& thresholds = {},
                                  double drift_tolerance = 0.01);

}  // namespace bgcoh
