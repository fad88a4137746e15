#include "bgcoh/dense_oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <complex>
#include <numbers>

namespace bgcoh {

namespace {

using cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cd>;

long long positive_mod(long long a, long long k) { return ((a % k) + k) % k; }

std::vector<double> lowest(const Eigen::MatrixXcd& h, int count) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = 0; i < std::min<int>(count, static_cast<int>(h.rows())); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

}  // namespace

OracleResult dense_2d_oracle(const ModeSpec& spec, const OracleGrid& grid, int count) {
  const int nr = grid.n_r, k = grid.n_theta;
  if (nr < 4 || k < 4) throw ValidationError("oracle grid: need at least 4 rings and 4 angles");
  if (nr > 60 || k > 60 || nr * k > 3600)
    throw ValidationError("oracle grid: at most 60 x 60 points (memory guard)");
  auto jopt = mode_index(spec);
  if (!jopt) throw ValidationError("oracle: mode is empty for this weight");
  const long long j = *jopt;

  OracleResult res;
  res.j = j;
  res.n_r = nr;
  res.n_theta = k;
  res.radius = grid.radius ? *grid.radius : auto_radius(spec, 40.0);
  const auto r = radial_nodes(nr, res.radius, grid.spacing, grid.stretch);
  const double dth = 2 * std::numbers::pi / k;

  // Nodes: ring i, angle a at i*k + a; the origin last.
  const int origin = nr * k;
  const int nn = nr * k + 1;
  auto nid = [&](int i, long long a) { return i * k + static_cast<int>(positive_mod(a, k)); };

  std::vector<double> rr(nr + 2), pp(nr + 2);
  rr[0] = 0;
  pp[0] = phi(spec, 0.0);
  for (int i = 0; i <= nr; ++i) {
    rr[i + 1] = r[i];
    pp[i + 1] = phi(spec, r[i]);
  }
  std::vector<double> m0(nn);
  for (int i = 0; i < nr; ++i)
    for (int a = 0; a < k; ++a) m0[nid(i, a)] = r[i] * (r[i + 1] - (i == 0 ? 0.0 : r[i - 1])) / 2 * dth;
  m0[origin] = std::numbers::pi * (r[0] / 2) * (r[0] / 2);

  // ∂̄ = ½ e^{iθ}(∂_r + (i/r)∂_θ) with the radial part fitted to e^{-φ}.
  std::vector<Eigen::Triplet<cd>> ta, td;
  int rows_a = 0, rows_d = 0;
  for (int i = 0; i <= nr; ++i) {
    const double hs = rr[i + 1] - rr[i];
    const double rm = (rr[i + 1] + rr[i]) / 2;
    const double d = (pp[i + 1] - pp[i]) / 2;
    const double w = std::sqrt(rm * hs * dth);
    for (int a = 0; a < k; ++a) {
      const cd c = std::polar(0.5, a * dth);
      std::vector<std::pair<int, cd>> row;
      if (i < nr) row.push_back({nid(i, a), c * std::exp(d) / hs});
      row.push_back({i == 0 ? origin : nid(i - 1, a), -c * std::exp(-d) / hs});
      const cd ang = c * cd(0, 1) / rm * 0.5 / (2 * dth);
      for (int ii : {i - 1, i}) {
        if (ii < 0 || ii >= nr) continue;
        row.push_back({nid(ii, a + 1), ang});
        row.push_back({nid(ii, a - 1), -ang});
      }
      for (const auto& [col, v] : row) ta.emplace_back(rows_a, col, w * v / std::sqrt(m0[col]));
      ++rows_a;
      if (i > 0 && i < nr) {
        for (const auto& [col, v] : row) td.emplace_back(rows_d, col, w * v / std::sqrt(m0[col]));
        ++rows_d;
      }
    }
  }
  // Degree-1 value at the center, from the first ring.
  {
    const double w = std::sqrt(std::numbers::pi * r[0] * r[0]);
    for (int a = 0; a < k; ++a) {
      const cd e = std::polar(1.0, a * dth) / (static_cast<double>(k) * r[0]);
      td.emplace_back(rows_d, nid(0, a), w * e / std::sqrt(m0[nid(0, a)]));
      td.emplace_back(rows_d, origin, -w * e / std::sqrt(m0[origin]));
    }
    ++rows_d;
  }
  SpMat amat(rows_a, nn), dmat(rows_d, nn);
  amat.setFromTriplets(ta.begin(), ta.end());
  dmat.setFromTriplets(td.begin(), td.end());

  // Angular averaging onto e^{iℓθ}; the single center unknown survives only for ℓ ≡ 0 mod K.
  auto projector = [&](long long l, int rings, auto index_of, int center_index) {
    const bool keep_center = positive_mod(l, k) == 0;
    std::vector<Eigen::Triplet<cd>> tb;
    for (int i = 0; i < rings; ++i)
      for (int a = 0; a < k; ++a)
        tb.emplace_back(index_of(i, a), i, std::polar(1.0 / std::sqrt(static_cast<double>(k)), l * a * dth));
    if (keep_center) tb.emplace_back(center_index, rings, cd(1, 0));
    return tb;
  };

  {
    auto tb = projector(j, nr, [&](int i, int a) { return nid(i, a); }, origin);
    const int cols = positive_mod(j, k) == 0 ? nr + 1 : nr;
    SpMat b(nn, cols);
    b.setFromTriplets(tb.begin(), tb.end());
    const Eigen::MatrixXcd ab = Eigen::MatrixXcd(amat * b);
    res.eigenvalues[0] = lowest(4.0 * ab.adjoint() * ab, count);
  }
  {
    const long long l1 = j + 1;
    auto tb = projector(l1, nr - 1, [&](int i, int a) { return i * k + a; }, rows_d - 1);
    const int cols = positive_mod(l1, k) == 0 ? nr : nr - 1;
    SpMat b(rows_d, cols);
    b.setFromTriplets(tb.begin(), tb.end());
    const Eigen::MatrixXcd db = Eigen::MatrixXcd(SpMat(dmat.adjoint()) * b);
    res.eigenvalues[1] = lowest(4.0 * db.adjoint() * db, count);
  }
  return res;
}

}  // namespace bgcoh
