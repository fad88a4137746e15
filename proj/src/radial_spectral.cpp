#include "bgcoh/radial_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bgcoh/weight_combinatorics.hpp"

namespace bgcoh {

std::string spacing_name(Spacing s) { return s == Spacing::Uniform ? "uniform" : "geometric"; }

Spacing parse_spacing(const std::string& name) {
  if (name == "uniform") return Spacing::Uniform;
  if (name == "geometric") return Spacing::Geometric;
  throw ValidationError("spacing: expected 'uniform' or 'geometric', got '" + name + "'");
}

namespace {

void check_spec(const ModeSpec& spec) {
  spec.action.validate();
  if (spec.action.dimension() != 1)
    throw ValidationError("radial spectral computations need n = 1, got n = " +
                          std::to_string(spec.action.dimension()));
  if (spec.extra_twist < 0) throw ValidationError("extra_twist: must be >= 0");
}

long long required_index(const ModeSpec& spec) {
  auto j = mode_index(spec);
  if (!j) throw ValidationError("mode m=" + std::to_string(spec.m) + " is empty for this weight");
  return *j;
}

// Decay exponent used for the domain rule: the larger angular index of the two degrees.
double decay_index(long long j) { return static_cast<double>(std::max(std::llabs(j), std::llabs(j + 1))); }

}  // namespace

std::optional<long long> mode_index(const ModeSpec& spec) {
  check_spec(spec);
  const long long lam = spec.action.weights[0];
  const long long q = spec.m - spec.action.twist;
  if (q % lam != 0) return std::nullopt;
  return q / lam;
}

double phi(const ModeSpec& spec, double r) {
  const double mu = spec.action.weights[0] * r * r / 2;
  return spec.s.value(mu * mu / 2) + static_cast<double>(spec.extra_twist) * r * r / 2;
}

namespace {

constexpr double kRadiusStep = 1e-3;

// Drop of ℓ ln r - φ at R below its maximum on (0, R], on the same scan points auto_radius uses.
double decay_drop(const ModeSpec& spec, double radius) {
  const double l = decay_index(required_index(spec));
  double peak = -std::numeric_limits<double>::infinity();
  for (double r = kRadiusStep; r < radius; r += kRadiusStep) peak = std::max(peak, l * std::log(r) - phi(spec, r));
  const double at_r = l * std::log(radius) - phi(spec, radius);
  return std::max(peak, at_r) - at_r;
}

}  // namespace

double auto_radius(const ModeSpec& spec, double min_decay) {
  const double l = decay_index(required_index(spec));
  double peak = -std::numeric_limits<double>::infinity();
  for (double r = kRadiusStep; r < 1e4; r += kRadiusStep) {
    const double f = l * std::log(r) - phi(spec, r);
    peak = std::max(peak, f);
    if (peak - f >= min_decay) return r;
  }
  throw ValidationError("could not find a radius with the required decay");
}

std::vector<double> radial_nodes(int n, double radius, Spacing spacing, double stretch) {
  if (n < 2) throw ValidationError("grid: N must be at least 2");
  if (!(radius > 0)) throw ValidationError("grid: radius must be positive");
  if (spacing == Spacing::Geometric && !(stretch > 0)) throw ValidationError("grid: stretch must be positive");
  std::vector<double> r(n + 1);
  for (int i = 1; i <= n + 1; ++i) {
    const double xi = static_cast<double>(i) / (n + 1);
    r[i - 1] = spacing == Spacing::Uniform ? xi * radius : radius * std::expm1(stretch * xi) / std::expm1(stretch);
  }
  r[n] = radius;
  return r;
}

RadialOperator assemble_radial_operator(const ModeSpec& spec, int degree, const GridParams& grid) {
  if (degree != 0 && degree != 1) throw ValidationError("degree: must be 0 or 1 for n = 1");
  const long long j = required_index(spec);
  const double radius = grid.radius ? *grid.radius : auto_radius(spec, grid.min_decay);
  const int n = grid.n;
  const auto r = radial_nodes(n, radius, grid.spacing, grid.stretch);

  RadialOperator op;
  op.degree = degree;
  op.j = j;
  op.nodes = r;
  op.radius = radius;
  op.phi.resize(n + 1);
  for (int i = 0; i <= n; ++i) op.phi[i] = phi(spec, r[i]);
  const double phi0 = phi(spec, 0.0);

  if (grid.radius && decay_drop(spec, radius) < grid.min_decay)
    throw ValidationError("radius " + std::to_string(radius) + " is too small: decay below " +
                          std::to_string(grid.min_decay));
  for (int i = 0; i < n; ++i)
    if (std::abs(op.phi[i + 1] - op.phi[i]) > 600)
      throw ValidationError("grid too coarse: φ jumps by more than 600 across one cell");

  op.node_mass.resize(n);
  for (int i = 0; i < n; ++i) op.node_mass[i] = r[i] * (r[i + 1] - (i == 0 ? 0.0 : r[i - 1])) / 2;

  std::vector<SparseRow> rows;
  auto push = [&](SparseRow row, double mass) {
    for (auto& [c, v] : row.entries) v *= std::sqrt(mass / op.node_mass[c]);
    rows.push_back(std::move(row));
  };
  if (j < 0) {
    // Regularity at the origin for modes that vanish like r^{|j|}.
    const double r1 = r[0];
    const double d0 = (op.phi[0] - phi0) / 2;
    push({{{0, 0.5 * (std::exp(d0) + static_cast<double>(-j)) / r1}}}, r1 * r1 / 2);
  }
  for (int i = 0; i < n; ++i) {
    const double h = r[i + 1] - r[i];
    const double rm = (r[i + 1] + r[i]) / 2;
    SparseRow row;
    if (j >= 0) {
      // Exponentially fitted so that r^j e^{-φ} is annihilated exactly.
      const double e = std::exp(((op.phi[i + 1] - op.phi[i]) - j * std::log(r[i + 1] / r[i])) / 2);
      row.entries.push_back({i, -0.5 / (e * h)});
      if (i + 1 < n) row.entries.push_back({i + 1, 0.5 * e / h});
    } else {
      const double d = (op.phi[i + 1] - op.phi[i]) / 2;
      const double cent = static_cast<double>(j) / (2 * rm);
      row.entries.push_back({i, 0.5 * (-std::exp(-d) / h - cent)});
      if (i + 1 < n) row.entries.push_back({i + 1, 0.5 * (std::exp(d) / h - cent)});
    }
    push(std::move(row), rm * h);
  }

  if (degree == 0) {
    op.factor = rows;
    op.boundary = j < 0 ? "origin regularity row; Dirichlet at R" : "Dirichlet at R";
    op.matrix = BandedSymmetricMatrix(n, 1);
    for (const auto& row : rows)
      for (const auto& [p, a] : row.entries)
        for (const auto& [q, b] : row.entries) op.matrix.add(p, q, 4 * a * b);
  } else {
    rows.pop_back();
    op.factor = rows;
    op.boundary = j < 0 ? "center value from origin row; field pinned at R" : "field pinned at R";
    const int m = static_cast<int>(rows.size());
    std::vector<std::vector<std::pair<int, double>>> columns(n);
    for (int a = 0; a < m; ++a)
      for (const auto& [c, v] : rows[a].entries) columns[c].push_back({a, v});
    op.matrix = BandedSymmetricMatrix(m, 1);
    for (const auto& col : columns)
      for (const auto& [p, a] : col)
        for (const auto& [q, b] : col) op.matrix.add(p, q, 4 * a * b);
  }
  return op;
}

DegreeSpectrum low_spectrum(const RadialOperator& op, int count) {
  const int size = op.matrix.size();
  if (count > size) throw ValidationError("count exceeds the operator size");
  EigenPairs pairs = lowest_eigenpairs(op.matrix, count);
  DegreeSpectrum out;
  for (int k = 0; k < count; ++k) {
    const auto& v = pairs.vectors[k];
    double acc = 0;
    if (op.degree == 0) {
      for (const auto& row : op.factor) {
        double x = 0;
        for (const auto& [c, a] : row.entries) x += a * v[c];
        acc += x * x;
      }
    } else {
      std::vector<double> w(op.nodes.size() - 1, 0.0);
      for (std::size_t a = 0; a < op.factor.size(); ++a)
        for (const auto& [c, val] : op.factor[a].entries) w[c] += val * v[a];
      for (double x : w) acc += x * x;
    }
    out.eigenvalues.push_back(4 * acc);
    out.residuals.push_back(pairs.residuals[k]);
    out.vectors.push_back(v);
  }
  // Recomputing can reorder values that agree to rounding.
  std::vector<int> idx(count);
  for (int k = 0; k < count; ++k) idx[k] = k;
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return out.eigenvalues[a] < out.eigenvalues[b]; });
  DegreeSpectrum sorted;
  for (int k : idx) {
    sorted.eigenvalues.push_back(out.eigenvalues[k]);
    sorted.residuals.push_back(out.residuals[k]);
    sorted.vectors.push_back(std::move(out.vectors[k]));
  }
  return sorted;
}

void classify_kernel(DegreeSpectrum& spec, const Thresholds& th) {
  if (spec.eigenvalues.empty()) {
    spec.kernel_dim = 0;
    return;
  }
  const double scale = spec.eigenvalues.back();
  spec.eps_zero = th.zero_rel * scale;
  spec.gap_floor = th.gap_rel * scale;
  if (!(scale > 0)) throw AmbiguousKernel("whole eigenvalue window is zero");
  int zeros = 0;
  for (double v : spec.eigenvalues) {
    if (v < spec.eps_zero) {
      ++zeros;
    } else if (v <= spec.gap_floor) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "eigenvalue " << v << " lies between eps_zero " << spec.eps_zero << " and gap_floor " << spec.gap_floor;
      throw AmbiguousKernel(msg.str());
    }
  }
  if (zeros == static_cast<int>(spec.eigenvalues.size()))
    throw AmbiguousKernel("every eigenvalue of the window is below eps_zero");
  spec.kernel_dim = zeros;
}

namespace {

SpectrumResult compute_once(const ModeSpec& spec, const GridParams& grid, const Thresholds& th) {
  if (!(th.zero_rel > 0) || !(th.zero_rel < th.gap_rel) || th.window < 2)
    throw ValidationError("thresholds: need 0 < eps_zero < gap_floor and a window of at least 2");
  SpectrumResult res;
  res.m = spec.m;
  res.j = mode_index(spec);
  res.grid.n = grid.n;
  res.grid.spacing = grid.spacing;
  res.grid.stretch = grid.stretch;
  if (!res.j) {
    res.empty_mode = true;
    return res;
  }
  GridParams g = grid;
  if (!g.radius) g.radius = auto_radius(spec, grid.min_decay);
  res.grid.radius = *g.radius;
  for (int degree = 0; degree < 2; ++degree) {
    const RadialOperator op = assemble_radial_operator(spec, degree, g);
    DegreeSpectrum ds = low_spectrum(op, std::min(th.window, op.matrix.size()));
    try {
      classify_kernel(ds, th);
    } catch (const AmbiguousKernel& e) {
      throw AmbiguousKernel("m=" + std::to_string(spec.m) + " degree " + std::to_string(degree) + " N=" +
                            std::to_string(grid.n) + ": " + e.what());
    }
    res.kernel_dims[degree] = ds.kernel_dim;
    res.degrees[degree] = std::move(ds);
  }
  return res;
}

}  // namespace

SpectrumResult kernel_dims(const ModeSpec& spec, const GridParams& grid, const Thresholds& thresholds,
                           bool allow_refinement) {
  try {
    return compute_once(spec, grid, thresholds);
  } catch (const AmbiguousKernel&) {
    if (!allow_refinement) throw;
  }
  GridParams fine = grid;
  fine.n = 2 * grid.n;
  SpectrumResult res = compute_once(spec, fine, thresholds);
  res.grid.refinement = 1;
  return res;
}

double kernel_profile_cosine(const ModeSpec& spec, const GridParams& grid, const DegreeSpectrum& degree0) {
  const long long j = required_index(spec);
  if (degree0.vectors.empty()) throw ValidationError("no eigenvector to compare");
  GridParams g = grid;
  if (!g.radius) g.radius = auto_radius(spec, grid.min_decay);
  const auto r = radial_nodes(g.n, *g.radius, g.spacing, g.stretch);
  const auto& v = degree0.vectors[0];
  if (v.size() != static_cast<std::size_t>(g.n)) throw ValidationError("eigenvector does not match the grid");
  // Work in logs so large j and steep φ do not overflow before normalization.
  std::vector<double> logp(g.n);
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.n; ++i) {
    const double mass = r[i] * (r[i + 1] - (i == 0 ? 0.0 : r[i - 1])) / 2;
    logp[i] = static_cast<double>(j) * std::log(r[i]) - phi(spec, r[i]) + 0.5 * std::log(mass);
    top = std::max(top, logp[i]);
  }
  double pv = 0, pp = 0, vv = 0;
  for (int i = 0; i < g.n; ++i) {
    const double p = std::exp(logp[i] - top);
    pv += p * v[i];
    pp += p * p;
    vv += v[i] * v[i];
  }
  return std::abs(pv) / std::sqrt(pp * vv);
}

InvarianceReport invariance_check(const WeightedAction& action, const std::vector<long long>& m_list,
                                  const AdmissibleFunction& s1, const AdmissibleFunction& s2, const GridParams& grid,
                                  const Thresholds& thresholds) {
  InvarianceReport rep;
  for (long long m : m_list) {
    InvarianceEntry e;
    e.m = m;
    e.first = kernel_dims({action, m, s1, 0}, grid, thresholds);
    e.second = kernel_dims({action, m, s2, 0}, grid, thresholds);
    e.equal = e.first.kernel_dims == e.second.kernel_dims;
    rep.all_equal = rep.all_equal && e.equal;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

KodairaScan kodaira_scan(const WeightedAction& action, long long m, const AdmissibleFunction& s,
                         const std::vector<long long>& k_values, const GridParams& grid,
                         const Thresholds& thresholds) {
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (k_values[i] < 0) throw ValidationError("k range: values must be >= 0");
    if (i > 0 && k_values[i] <= k_values[i - 1]) throw ValidationError("k range: must be strictly ascending");
  }
  KodairaScan scan;
  scan.m = m;
  scan.dims_match = true;
  const long long expected = static_cast<long long>(denumerant(action.weights, m - action.twist));
  for (long long k : k_values) {
    const SpectrumResult res = kernel_dims({action, m, s, k}, grid, thresholds);
    KodairaPoint p;
    p.k = k;
    p.kernel_dim0 = res.kernel_dims[0];
    p.expected_dim0 = static_cast<int>(expected);
    p.gap = res.empty_mode ? std::numeric_limits<double>::infinity() : res.degrees[1].eigenvalues.front();
    scan.dims_match = scan.dims_match && p.kernel_dim0 == p.expected_dim0 && res.kernel_dims[1] == 0;
    scan.points.push_back(p);
  }
  for (std::size_t i = scan.points.size(); i-- > 0;) {
    if (scan.points[i].gap < 1) break;
    scan.k0 = scan.points[i].k;
  }
  scan.tail_monotone = true;
  for (std::size_t i = scan.points.size() / 2 + 1; i < scan.points.size(); ++i)
    if (scan.points[i].gap < 0.95 * scan.points[i - 1].gap) scan.tail_monotone = false;
  return scan;
}

DoublingCheck grid_doubling_check(const ModeSpec& spec, const GridParams& grid, const Thresholds& thresholds,
                                  double drift_tolerance) {
  DoublingCheck chk;
  GridParams g = grid;
  if (!g.radius && mode_index(spec)) g.radius = auto_radius(spec, grid.min_decay);
  chk.coarse = kernel_dims(spec, g, thresholds, false);
  GridParams fine = g;
  fine.n = 2 * g.n;
  chk.fine = kernel_dims(spec, fine, thresholds, false);
  if (chk.coarse.empty_mode) {
    chk.stable = chk.fine.empty_mode;
    return chk;
  }
  bool same_dims = chk.coarse.kernel_dims == chk.fine.kernel_dims;
  for (int d = 0; d < 2; ++d) {
    const auto& a = chk.coarse.degrees[d];
    const auto& b = chk.fine.degrees[d];
    const double scale = b.eigenvalues.back();
    for (int z = 0; z < a.kernel_dim && z < b.kernel_dim; ++z)
      if (!(b.eigenvalues[z] <= std::max(a.eigenvalues[z], 1e-14 * scale))) chk.zeros_decrease = false;
    const int first = a.kernel_dim;
    if (first < static_cast<int>(a.eigenvalues.size()) && first < static_cast<int>(b.eigenvalues.size())) {
      const double drift = std::abs(b.eigenvalues[first] - a.eigenvalues[first]) / a.eigenvalues[first];
      chk.max_gap_drift = std::max(chk.max_gap_drift, drift);
    }
  }
  chk.stable = same_dims && chk.zeros_decrease && chk.max_gap_drift < drift_tolerance;
  return chk;
}

}  // namespace bgcoh
