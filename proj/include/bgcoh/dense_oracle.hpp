#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bgcoh/radial_spectral.hpp"

namespace bgcoh {

/// Polar grid for the unreduced check: n_r rings times n_theta angles.
struct OracleGrid {
  int n_r = 60;
  int n_theta = 60;
  std::optional<double> radius;
  Spacing spacing = Spacing::Uniform;
  double stretch = 2.0;
};

struct OracleResult {
  long long j = 0;
  double radius = 0;
  int n_r = 0;
  int n_theta = 0;
  std::array<std::vector<double>, 2> eigenvalues;  ///< lowest values per degree
};

/// Assembles the complex ∂̄_s on the full polar grid, restricts to the
/// weight-m subspace by discrete angular averaging and solves densely.
/// Rejects grids above 60 x 60.
OracleResult dense_2d_oracle(const ModeSpec& spec, const OracleGrid& grid, int count = 3);

}  // namespace bgcoh
