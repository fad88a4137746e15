#include "bgcoh/banded_eigen.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

namespace bgcoh {

BandedSymmetricMatrix::BandedSymmetricMatrix(int n, int kd) : n_(n), kd_(kd) {
  if (n < 0 || kd < 0) throw ValidationError("banded matrix: negative size or bandwidth");
  band_.assign(static_cast<std::size_t>(n) * (2 * kd + 1), 0.0);
}

double BandedSymmetricMatrix::get(int i, int j) const {
  if (std::abs(i - j) > kd_) return 0.0;
  return band_[static_cast<std::size_t>(i) * (2 * kd_ + 1) + (j - i + kd_)];
}

void BandedSymmetricMatrix::set(int i, int j, double value) {
  if (std::abs(i - j) > kd_) throw ValidationError("banded matrix: entry outside the band");
  band_[static_cast<std::size_t>(i) * (2 * kd_ + 1) + (j - i + kd_)] = value;
}

void BandedSymmetricMatrix::add(int i, int j, double value) { set(i, j, get(i, j) + value); }

std::vector<double> BandedSymmetricMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const int lo = std::max(0, i - kd_), hi = std::min(n_ - 1, i + kd_);
    const double* row = &band_[static_cast<std::size_t>(i) * (2 * kd_ + 1)];
    double acc = 0;
    for (int j = lo; j <= hi; ++j) acc += row[j - i + kd_] * x[j];
    y[i] = acc;
  }
  return y;
}

double BandedSymmetricMatrix::norm_inf() const {
  double best = 0;
  for (int i = 0; i < n_; ++i) {
    double acc = 0;
    for (int j = std::max(0, i - kd_); j <= std::min(n_ - 1, i + kd_); ++j) acc += std::abs(get(i, j));
    best = std::max(best, acc);
  }
  return best;
}

double BandedSymmetricMatrix::symmetry_defect() const {
  double worst = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - kd_); j < i; ++j) worst = std::max(worst, std::abs(get(i, j) - get(j, i)));
  return worst;
}

BandedLdlt::BandedLdlt(const BandedSymmetricMatrix& a, double shift) : n_(a.size()), kd_(a.bandwidth()) {
  l_.assign(static_cast<std::size_t>(n_) * std::max(kd_, 1), 0.0);
  d_.assign(n_, 0.0);
  const double tiny = std::max(a.norm_inf(), 1.0) * 1e-300;
  auto L = [&](int i, int j) -> double& { return l_[static_cast<std::size_t>(i) * kd_ + (i - j - 1)]; };
  for (int j = 0; j < n_; ++j) {
    double dj = a.get(j, j) - shift;
    for (int k = std::max(0, j - kd_); k < j; ++k) dj -= L(j, k) * L(j, k) * d_[k];
    if (!(dj > 0)) positive_ = false;
    if (dj < 0) ++negatives_;
    if (dj == 0 || !std::isfinite(dj)) dj = dj < 0 ? -tiny : tiny;
    d_[j] = dj;
    for (int i = j + 1; i <= std::min(n_ - 1, j + kd_); ++i) {
      double v = a.get(i, j);
      for (int k = std::max(0, i - kd_); k < j; ++k) v -= L(i, k) * L(j, k) * d_[k];
      L(i, j) = v / dj;
    }
  }
}

std::vector<double> BandedLdlt::solve(const std::vector<double>& b) const {
  std::vector<double> x = b;
  for (int i = 0; i < n_; ++i)
    for (int k = std::max(0, i - kd_); k < i; ++k) x[i] -= l_[static_cast<std::size_t>(i) * kd_ + (i - k - 1)] * x[k];
  for (int i = 0; i < n_; ++i) x[i] /= d_[i];
  for (int i = n_ - 1; i >= 0; --i)
    for (int k = i + 1; k <= std::min(n_ - 1, i + kd_); ++k)
      x[i] -= l_[static_cast<std::size_t>(k) * kd_ + (k - i - 1)] * x[k];
  return x;
}

int count_eigenvalues_below(const BandedSymmetricMatrix& a, double x) { return BandedLdlt(a, x).negative_count(); }

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void orthogonalize(std::vector<double>& w, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) axpy(-dot(q, w), q, w);
}

struct Candidate {
  double value;
  double residual;
  std::vector<double> vector;
};

Candidate rayleigh(const BandedSymmetricMatrix& a, std::vector<double> y) {
  const double nrm = norm(y);
  for (auto& v : y) v /= nrm;
  const auto ay = a.multiply(y);
  const double theta = dot(y, ay);
  double res = 0;
  for (std::size_t i = 0; i < y.size(); ++i) res += (ay[i] - theta * y[i]) * (ay[i] - theta * y[i]);
  return {theta, std::sqrt(res), std::move(y)};
}

// One shift-invert Lanczos run in the complement of `locked`. Returns Ritz
// candidates sorted by value, lowest first.
std::vector<Candidate> lanczos_run(const BandedSymmetricMatrix& a, const BandedLdlt& fac, double tau, int m,
                                   const std::vector<std::vector<double>>& locked, std::mt19937_64& rng) {
  const int n = a.size();
  std::normal_distribution<double> gauss;
  std::vector<double> q(n);
  for (auto& v : q) v = gauss(rng);
  orthogonalize(q, locked);
  double qn = norm(q);
  if (qn == 0) return {};
  for (auto& v : q) v /= qn;

  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  const int avail = n - static_cast<int>(locked.size());
  m = std::min(m, avail);
  for (int k = 0; k < m; ++k) {
    basis.push_back(q);
    std::vector<double> w = fac.solve(q);
    const double al = dot(w, q);
    alpha.push_back(al);
    orthogonalize(w, locked);
    orthogonalize(w, basis);
    const double b = norm(w);
    if (k + 1 == m || b <= 1e-14 * std::abs(al)) break;
    beta.push_back(b);
    for (auto& v : w) v /= b;
    q = std::move(w);
  }

  const int k = static_cast<int>(basis.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  std::vector<Candidate> out;
  for (int c = k - 1; c >= 0; --c) {
    if (!(es.eigenvalues()(c) > 0)) continue;
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < k; ++i) axpy(es.eigenvectors()(i, c), basis[i], y);
    out.push_back(rayleigh(a, std::move(y)));
  }
  (void)tau;
  std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  return out;
}

}  // namespace

EigenPairs lowest_eigenpairs(const BandedSymmetricMatrix& a, int count, const EigenOptions& options) {
  const int n = a.size();
  if (count < 1 || count > n) throw ValidationError("count: must be in 1..N");
  if (a.symmetry_defect() > 1e-12 * std::max(a.norm_inf(), 1e-300))
    throw ValidationError("matrix is not symmetric");

  EigenPairs out;
  out.norm = a.norm_inf();
  const double tol = options.residual_tolerance * std::max(out.norm, 1e-300);

  if (out.norm == 0) {
    for (int i = 0; i < count; ++i) {
      std::vector<double> e(n, 0.0);
      e[i] = 1;
      out.values.push_back(0);
      out.vectors.push_back(e);
      out.residuals.push_back(0);
    }
    return out;
  }

  // Shift below the spectrum; lowered until the factorization is definite.
  double tau = 1e-8 * out.norm;
  std::optional<BandedLdlt> fac;
  for (int tries = 0; tries < 60; ++tries) {
    fac.emplace(a, -tau);
    if (fac->positive_definite()) break;
    tau *= 10;
  }
  if (!fac->positive_definite()) throw ConvergenceError("could not find a definite shift below the spectrum");
  out.shift = -tau;

  std::mt19937_64 rng(options.seed);
  int m = std::min(n, std::max(2 * count + 10, 30));
  std::vector<Candidate> pool;
  std::ostringstream diag;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    out.restarts = restart;
    std::vector<std::vector<double>> locked;
    for (const auto& c : pool) locked.push_back(c.vector);
    auto fresh = lanczos_run(a, *fac, tau, m, locked, rng);
    out.krylov_dimension = m;
    for (auto& c : fresh)
      if (c.residual <= tol) pool.push_back(std::move(c));
    std::sort(pool.begin(), pool.end(), [](const Candidate& x, const Candidate& y) { return x.value < y.value; });

    // Unconverged low Ritz values below the accepted ones mean the space was too small.
    bool unconverged_low = false;
    for (const auto& c : fresh)
      if (c.residual > tol && (static_cast<int>(pool.size()) < count || c.value < pool[count - 1].value)) {
        unconverged_low = true;
        diag << " restart " << restart << ": residual " << c.residual << " at " << c.value << ";";
        break;
      }

    if (static_cast<int>(pool.size()) >= count && !unconverged_low) {
      const double top = pool[count - 1].value;
      double probe = top + std::max(tol, 1e-10 * std::abs(top));
      if (static_cast<int>(pool.size()) > count) probe = std::min(probe, (top + pool[count].value) / 2);
      if (probe <= top) probe = top + tol;
      const int below = count_eigenvalues_below(a, probe);
      if (below <= count) {
        pool.resize(count);
        for (auto& c : pool) {
          out.values.push_back(c.value);
          out.residuals.push_back(c.residual);
          out.vectors.push_back(std::move(c.vector));
        }
        return out;
      }
      diag << " restart " << restart << ": inertia reports " << below << " eigenvalues below " << probe << ";";
      // Keep only the confirmed part and search the complement again.
      pool.resize(count);
    } else {
      m = std::min(n, 2 * m);
      pool.clear();
    }
  }
  throw ConvergenceError("lowest_eigenpairs did not converge (n=" + std::to_string(n) + ", count=" +
                         std::to_string(count) + ", krylov=" + std::to_string(m) + "):" + diag.str());
}

}  // namespace bgcoh
