#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bgcoh/errors.hpp"

namespace bgcoh {

/// Real banded matrix with half-bandwidth kd; every entry with |i - j| <= kd
/// is stored, so symmetry is a property to check rather than an assumption.
class BandedSymmetricMatrix {
 public:
  BandedSymmetricMatrix() = default;
  BandedSymmetricMatrix(int n, int kd);

  int size() const { return n_; }
  int bandwidth() const { return kd_; }

  double get(int i, int j) const;
  void set(int i, int j, double value);
  void add(int i, int j, double value);

  std::vector<double> multiply(const std::vector<double>& x) const;
  double norm_inf() const;
  /// max |A_ij - A_ji| over the band.
  double symmetry_defect() const;

 private:
  int n_ = 0;
  int kd_ = 0;
  std::vector<double> band_;  // row-major, 2kd+1 entries per row
};

/// Banded LDLᵀ of A - σI without pivoting.
class BandedLdlt {
 public:
  BandedLdlt(const BandedSymmetricMatrix& a, double shift);
  /// False if a pivot was not strictly positive.
  bool positive_definite() const { return positive_; }
  /// Number of negative pivots, i.e. eigenvalues of A below the shift.
  int negative_count() const { return negatives_; }
  std::vector<double> solve(const std::vector<double>& b) const;

 private:
  int n_, kd_;
  std::vector<double> l_;  // unit lower band, n x kd
  std::vector<double> d_;
  bool positive_ = true;
  int negatives_ = 0;
};

/// Number of eigenvalues of a symmetric banded matrix strictly below x.
int count_eigenvalues_below(const BandedSymmetricMatrix& a, double x);

struct EigenPairs {
  std::vector<double> values;                ///< ascending
  std::vector<std::vector<double>> vectors;  ///< unit norm
  std::vector<double> residuals;             ///< ‖Av - θv‖
  double norm = 0;                           ///< ‖A‖∞
  double shift = 0;
  int krylov_dimension = 0;
  int restarts = 0;
};

class ConvergenceError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

struct EigenOptions {
  double residual_tolerance = 1e-8;  ///< relative to ‖A‖∞
  std::uint64_t seed = 12345;
  int max_restarts = 6;
};

/// The `count` smallest eigenpairs by shift-invert Lanczos with full
/// reorthogonalization. Every pair is residual-checked and the count is
/// certified with a Sylvester inertia count.
EigenPairs lowest_eigenpairs(const BandedSymmetricMatrix& a, int count, const EigenOptions& options = {});

}  // namespace bgcoh
