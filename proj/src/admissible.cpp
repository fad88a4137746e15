#include "bgcoh/admissible.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace bgcoh {

struct AdmissibleFunction::Node {
  Kind kind = Kind::Constant;
  double constant = 0;
  std::vector<Knot> knots;
  double tail_rate = 0;
  std::vector<AdmissibleTerm> terms;
};

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Jet {
  double s, d1, d2;
};

// Cubic Hermite on one segment, x in [0, 1].
Jet hermite(double y0, double d0, double y1, double d1, double h, double x) {
  const double x2 = x * x, x3 = x2 * x;
  const double h00 = 2 * x3 - 3 * x2 + 1, h10 = x3 - 2 * x2 + x, h01 = -2 * x3 + 3 * x2, h11 = x3 - x2;
  const double p00 = 6 * x2 - 6 * x, p10 = 3 * x2 - 4 * x + 1, p01 = -6 * x2 + 6 * x, p11 = 3 * x2 - 2 * x;
  const double q00 = 12 * x - 6, q10 = 6 * x - 4, q01 = -12 * x + 6, q11 = 6 * x - 2;
  return {h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1,
          (p00 * y0 + p01 * y1) / h + p10 * d0 + p11 * d1,
          (q00 * y0 + q01 * y1) / (h * h) + (q10 * d0 + q11 * d1) / h};
}

// Reference sqrt: √(2u) for u >= 1, Hermite cap on [0, 1) with s(0) = 0.1 and
// the initial slope chosen so that s'' is continuous at u = 1.
Jet sqrt_jet(double u) {
  if (u >= 1) {
    const double q = std::sqrt(2 * u);
    return {q, 1 / q, -1 / (q * q * q)};
  }
  const double y0 = 0.1, y1 = std::numbers::sqrt2, d1 = 1 / std::numbers::sqrt2;
  const double d0 = (-std::pow(2.0, -1.5) + 6 * (y1 - y0) - 4 * d1) / 2;
  return hermite(y0, d0, y1, d1, 1.0, std::max(u, 0.0));
}

Jet grid_jet(const std::vector<Knot>& k, double rate, double u) {
  if (u <= k.front().u) {
    const Knot& a = k.front();
    return {a.s + a.s_prime * (u - a.u), a.s_prime, 0.0};
  }
  if (u >= k.back().u) {
    const Knot& z = k.back();
    const double x = u - z.u;
    if (rate == 0) return {z.s + z.s_prime * x, z.s_prime, 0.0};
    const double g = std::exp(rate * x);
    return {z.s + z.s_prime * std::expm1(rate * x) / rate, z.s_prime * g, rate * z.s_prime * g};
  }
  auto it = std::upper_bound(k.begin(), k.end(), u, [](double v, const Knot& kn) { return v < kn.u; });
  const std::size_t i = static_cast<std::size_t>(it - k.begin()) - 1;
  const Knot &a = k[i], &b = k[i + 1];
  const double h = b.u - a.u;
  Jet j = hermite(a.s, a.s_prime, b.s, b.s_prime, h, (u - a.u) / h);
  if (u == a.u && i > 0) {
    // At an interior knot keep the larger one-sided curvature.
    const Knot& p = k[i - 1];
    const Jet left = hermite(p.s, p.s_prime, a.s, a.s_prime, a.u - p.u, 1.0);
    if (std::abs(left.d2) > std::abs(j.d2)) j.d2 = left.d2;
    j.s = a.s;
    j.d1 = a.s_prime;
  }
  return j;
}

bool hermite_segment_monotone(const Knot& a, const Knot& b) {
  if (a.s_prime < 0 || b.s_prime < 0) return false;
  const double delta = (b.s - a.s) / (b.u - a.u);
  if (delta < 0) return false;
  if (delta == 0) return a.s_prime == 0 && b.s_prime == 0;
  const double alpha = a.s_prime / delta, beta = b.s_prime / delta;
  return alpha * alpha + beta * beta <= 9.0;
}

}  // namespace

double s_arg_to_level(double u) { return std::sqrt(2 * std::max(u, 0.0)); }

AdmissibleFunction AdmissibleFunction::reference_sqrt() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sqrt;
  return AdmissibleFunction(n);
}

AdmissibleFunction AdmissibleFunction::constant(double value) {
  if (!(value >= 0)) throw ValidationError("constant function: value must be nonnegative");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->constant = value;
  return AdmissibleFunction(n);
}

AdmissibleFunction AdmissibleFunction::grid(std::vector<Knot> knots, double tail_rate) {
  if (knots.size() < 2) throw ValidationError("grid function: at least two knots are required");
  if (!(tail_rate >= 0) || !std::isfinite(tail_rate)) throw ValidationError("grid function: tail_rate must be >= 0");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const Knot& k = knots[i];
    if (!std::isfinite(k.u) || !std::isfinite(k.s) || !std::isfinite(k.s_prime))
      throw ValidationError("grid function: knot " + std::to_string(i) + " is not finite");
    if (k.s < 0) throw ValidationError("grid function: s must be nonnegative");
    if (i > 0 && !(k.u > knots[i - 1].u)) throw ValidationError("grid function: knots must be strictly increasing");
    if (i > 0 && !hermite_segment_monotone(knots[i - 1], k))
      throw ValidationError("grid function: segment " + std::to_string(i - 1) + " is not monotone");
  }
  if (knots.front().u < 0) throw ValidationError("grid function: knots must start at u >= 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Grid;
  n->knots = std::move(knots);
  n->tail_rate = tail_rate;
  return AdmissibleFunction(n);
}

AdmissibleFunction AdmissibleFunction::combination(std::vector<AdmissibleTerm> terms) {
  if (terms.empty()) throw ValidationError("combination: at least one term is required");
  for (const auto& t : terms)
    if (!(t.coefficient > 0)) throw ValidationError("combination: coefficients must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Combination;
  n->terms = std::move(terms);
  return AdmissibleFunction(n);
}

AdmissibleFunction::Kind AdmissibleFunction::kind() const { return node_->kind; }
const std::vector<Knot>& AdmissibleFunction::knots() const { return node_->knots; }
double AdmissibleFunction::tail_rate() const { return node_->tail_rate; }
double AdmissibleFunction::constant_value() const { return node_->constant; }
const std::vector<AdmissibleTerm>& AdmissibleFunction::terms() const { return node_->terms; }

double AdmissibleFunction::value(double u) const {
  switch (node_->kind) {
    case Kind::Sqrt: return sqrt_jet(u).s;
    case Kind::Grid: return grid_jet(node_->knots, node_->tail_rate, u).s;
    case Kind::Constant: return node_->constant;
    case Kind::Combination: {
      double acc = 0;
      for (const auto& t : node_->terms) acc += t.coefficient * t.function.value(u);
      return acc;
    }
  }
  return 0;
}

double AdmissibleFunction::derivative(double u) const {
  switch (node_->kind) {
    case Kind::Sqrt: return sqrt_jet(u).d1;
    case Kind::Grid: return grid_jet(node_->knots, node_->tail_rate, u).d1;
    case Kind::Constant: return 0;
    case Kind::Combination: {
      double acc = 0;
      for (const auto& t : node_->terms) acc += t.coefficient * t.function.derivative(u);
      return acc;
    }
  }
  return 0;
}

double AdmissibleFunction::second_derivative(double u) const {
  switch (node_->kind) {
    case Kind::Sqrt: return sqrt_jet(u).d2;
    case Kind::Grid: return grid_jet(node_->knots, node_->tail_rate, u).d2;
    case Kind::Constant: return 0;
    case Kind::Combination: {
      double acc = 0;
      for (const auto& t : node_->terms) acc += t.coefficient * t.function.second_derivative(u);
      return acc;
    }
  }
  return 0;
}

double AdmissibleFunction::log_derivative(double u) const {
  switch (node_->kind) {
    case Kind::Sqrt: return u >= 1 ? -0.5 * std::log(2 * u) : std::log(sqrt_jet(u).d1);
    case Kind::Constant: return kNegInf;
    case Kind::Grid: {
      const auto& k = node_->knots;
      if (u > k.back().u) {
        if (k.back().s_prime <= 0) return kNegInf;
        return std::log(k.back().s_prime) + node_->tail_rate * (u - k.back().u);
      }
      const double d = grid_jet(k, node_->tail_rate, u).d1;
      return d > 0 ? std::log(d) : kNegInf;
    }
    case Kind::Combination: {
      double top = kNegInf;
      std::vector<double> logs;
      for (const auto& t : node_->terms) {
        logs.push_back(std::log(t.coefficient) + t.function.log_derivative(u));
        top = std::max(top, logs.back());
      }
      if (top == kNegInf) return kNegInf;
      double acc = 0;
      for (double l : logs) acc += std::exp(l - top);
      return top + std::log(acc);
    }
  }
  return kNegInf;
}

double AdmissibleFunction::curvature_ratio(double u) const {
  switch (node_->kind) {
    case Kind::Sqrt: {
      if (u >= 1) return -1 / (2 * u);
      const Jet j = sqrt_jet(u);
      return j.d2 / j.d1;
    }
    case Kind::Constant: return 0;
    case Kind::Grid: {
      const auto& k = node_->knots;
      if (u > k.back().u) return k.back().s_prime > 0 ? node_->tail_rate : 0;
      const Jet j = grid_jet(k, node_->tail_rate, u);
      return j.d1 > 0 ? j.d2 / j.d1 : 0;
    }
    case Kind::Combination: {
      double top = kNegInf;
      std::vector<double> logs, rhos;
      for (const auto& t : node_->terms) {
        logs.push_back(std::log(t.coefficient) + t.function.log_derivative(u));
        rhos.push_back(t.function.curvature_ratio(u));
        top = std::max(top, logs.back());
      }
      if (top == kNegInf) return 0;
      double num = 0, den = 0;
      for (std::size_t i = 0; i < logs.size(); ++i) {
        const double w = std::exp(logs[i] - top);
        num += w * rhos[i];
        den += w;
      }
      return num / den;
    }
  }
  return 0;
}

AdmissibleFunction reference_sqrt() { return AdmissibleFunction::reference_sqrt(); }

AdmissibleFunction convex_combine(const AdmissibleFunction& s1, const AdmissibleFunction& s2, double t1, double t2) {
  if (!(t1 > 0) || !(t2 > 0)) throw ValidationError("convex_combine: coefficients must be positive");
  return AdmissibleFunction::combination({{t1, s1}, {t2, s2}});
}

namespace {

double log_sum_exp(std::initializer_list<double> xs) {
  double top = kNegInf;
  for (double x : xs) top = std::max(top, x);
  if (top == kNegInf) return kNegInf;
  double acc = 0;
  for (double x : xs) acc += std::exp(x - top);
  return top + std::log(acc);
}

AdmissibilityReport evaluate_ratio(const AdmissibleFunction& s, const LevelSetProfile& profile, long long k,
                                   double target, const VerifyRules& rules) {
  if (!(target > 0)) throw ValidationError("target: must be positive");
  if (k < 0) throw ValidationError("twist: must be >= 0");
  const std::size_t n = profile.size();
  AdmissibilityReport rep;
  rep.target = target;
  rep.twist = k;
  rep.t = profile.t;
  rep.ratio.assign(n, 0.0);
  rep.log_ratio.assign(n, kNegInf);
  rep.bochner.assign(n, false);

  const double log_bochner = 0.5 * std::log(2.0);  // √(2‖B‖ + 2) with ‖B‖ = 0
  for (std::size_t i = 0; i < n; ++i) {
    const double t = profile.t[i];
    const double u = level_to_s_arg(t);
    const double L = s.log_derivative(u);
    if (!(L > kNegInf)) {
      rep.pass = false;
      rep.first_offending_t = t;
      rep.reason = "s' is not positive";
      for (std::size_t j = i; j < n; ++j) rep.ratio[j] = 0;
      return rep;
    }
    const double a = profile.a[i];
    const double nu = profile.nu[i] + 2 * std::numbers::pi * static_cast<double>(k) * t * t;
    const double rho = std::abs(s.curvature_ratio(u));
    const double tg = t * profile.g[i];
    // ratio = s'² a / (|s''| t g + s' ν + 1), divided through by s'².
    const double curv = (rho > 0 && tg > 0) ? std::log(rho * tg) - L : kNegInf;
    const double log_den = log_sum_exp({curv, std::log(nu) - L, -2 * L});
    const double lr = (a > 0 ? std::log(a) : kNegInf) - log_den;
    rep.log_ratio[i] = lr;
    rep.ratio[i] = lr > std::log(1e300) ? 1e300 : std::exp(lr);
    rep.bochner[i] = a > 0 && L + 0.5 * std::log(a) > log_bochner;
  }

  const double log_target = std::log(target);
  std::size_t start = n;
  while (start > 0 && rep.log_ratio[start - 1] >= log_target) --start;
  if (n - start < static_cast<std::size_t>(std::max(rules.min_tail_points, 1))) {
    rep.pass = false;
    rep.first_offending_t = n == 0 ? std::optional<double>{} : profile.t[start == 0 ? 0 : start - 1];
    rep.reason = start == n ? "ratio below target at the end of the grid" : "tail above target is too short";
    return rep;
  }
  const double log_tol = std::log1p(-rules.tail_tolerance);
  double running = rep.log_ratio[start];
  for (std::size_t i = start + 1; i < n; ++i) {
    if (rep.log_ratio[i] < running + log_tol) {
      rep.pass = false;
      rep.first_offending_t = profile.t[i];
      rep.reason = "tail not nondecreasing";
      return rep;
    }
    running = std::max(running, rep.log_ratio[i]);
  }
  rep.pass = true;
  rep.threshold_t = profile.t[start];
  rep.bochner_tail = true;
  for (std::size_t i = start; i < n; ++i) rep.bochner_tail = rep.bochner_tail && rep.bochner[i];
  return rep;
}

}  // namespace

AdmissibilityReport verify_admissible(const AdmissibleFunction& s, const LevelSetProfile& profile, double target,
                                      const VerifyRules& rules) {
  return evaluate_ratio(s, profile, 0, target, rules);
}

AdmissibilityReport admissible_for_twist(const AdmissibleFunction& s, const LevelSetProfile& profile, long long k,
                                         double target, const VerifyRules& rules) {
  return evaluate_ratio(s, profile, k, target, rules);
}

FloorFunction named_floor(const std::string& name) {
  if (name == "zero") return [](double) { return 0.0; };
  if (name == "sqrt") return [](double u) { return std::sqrt(2 * std::max(u, 0.0)); };
  if (name == "quadratic") return [](double u) { return u * (1 + u); };
  throw ValidationError("floor: unknown floor '" + name + "' (expected zero, sqrt or quadratic)");
}

std::vector<double> default_build_levels() { return log_grid(0.5, 24.0, 48); }
std::vector<double> default_verify_levels() { return log_grid(0.5, 1e10, 241); }

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                            0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                              0.1012285362903763};

struct ProfileInterp {
  const LevelSetProfile& p;

  // Log-log interpolation of a and b in t; nullopt outside the sampled range.
  std::optional<std::pair<double, double>> at(double t) const {
    if (p.size() == 0 || t < p.t.front() || t > p.t.back()) return std::nullopt;
    auto it = std::lower_bound(p.t.begin(), p.t.end(), t);
    std::size_t j = static_cast<std::size_t>(it - p.t.begin());
    if (j < p.size() && p.t[j] == t) return std::make_pair(p.a[j], p.b[j]);
    const std::size_t i = j - 1;
    const double x = (std::log(t) - std::log(p.t[i])) / (std::log(p.t[j]) - std::log(p.t[i]));
    auto mix = [x](double lo, double hi) {
      if (lo > 0 && hi > 0) return std::exp((1 - x) * std::log(lo) + x * std::log(hi));
      return (1 - x) * lo + x * hi;
    };
    return std::make_pair(mix(p.a[i], p.a[j]), mix(p.b[i], p.b[j]));
  }
};

AdmissibleFunction build_once(const LevelSetProfile& profile, const FloorFunction& floor, const BuildOptions& opt,
                              double spacing) {
  const double eps = opt.epsilon;

  // Knots: 0 and every profile level, refined to the requested spacing.
  std::vector<double> base{0.0};
  for (double t : profile.t) base.push_back(level_to_s_arg(t));
  std::vector<double> u{0.0};
  for (std::size_t i = 1; i < base.size(); ++i) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((base[i] - base[i - 1]) / spacing)));
    for (int q = 1; q <= pieces; ++q) u.push_back(base[i - 1] + (base[i] - base[i - 1]) * q / pieces);
    u.back() = base[i];
  }
  const std::size_t n = u.size();
  if (eps * u.back() > 650) throw BuildError("epsilon * u_max exceeds 650; lower epsilon or shorten the profile");

  BuilderTrace tr;
  tr.epsilon = eps;
  tr.u = u;
  tr.floor.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = floor(u[i]);
    if (!(k >= 0) || !std::isfinite(k)) throw ValidationError("floor: must be finite and nonnegative");
    tr.floor[i] = i == 0 ? k : std::max(k, tr.floor[i - 1]);
  }

  // Convex piecewise-linear majorant of the floor: slopes never decrease.
  std::vector<double> env(n), slope(n, 0.0);
  env[0] = tr.floor[0];
  double sl = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sl = std::max(sl, (tr.floor[i + 1] - env[i]) / (u[i + 1] - u[i]));
    slope[i] = sl;
    env[i + 1] = env[i] + sl * (u[i + 1] - u[i]);
  }
  slope[n - 1] = sl;

  tr.r.resize(n);
  tr.r_prime.resize(n);
  tr.r_second.resize(n);
  tr.c.resize(n);
  const ProfileInterp interp{profile};
  const double last_quarter = profile.t[profile.size() - 1 - (profile.size() - 1) / 4];
  for (std::size_t i = 0; i < n; ++i) {
    const double g = std::exp(eps * u[i]);
    tr.r[i] = env[i] + eps * g;
    tr.r_prime[i] = slope[i] + eps * eps * g;
    tr.r_second[i] = eps * eps * eps * g;
    double c = std::max({2 * tr.floor[i] / eps, (1 + u[i]) * g, tr.r_prime[i] * tr.r_prime[i] / tr.r_second[i]});
    const double t = s_arg_to_level(u[i]);
    if (auto ab = interp.at(t)) {
      if (ab->first > 0)
        c = std::max(c, (1 + u[i]) * (1 + t) * ab->second / ab->first);
      else if (t >= last_quarter)
        throw BuildError("profile has a(t) <= 0 at t=" + std::to_string(t) + " on its tail (taming violated)");
    }
    tr.c[i] = c;
  }
  // c(u) e^{-εu} strictly increasing.
  for (std::size_t i = 1; i < n; ++i) {
    const double floor_c = tr.c[i - 1] * std::exp(eps * (u[i] - u[i - 1])) * (1 + 1e-9);
    tr.c[i] = std::max(tr.c[i], floor_c);
  }

  // c is log-linear between knots; the tail beyond the last knot is c_last e^{ε(u - u_last)}.
  std::vector<double> gamma(n, eps);
  for (std::size_t i = 0; i + 1 < n; ++i) gamma[i] = std::log(tr.c[i + 1] / tr.c[i]) / (u[i + 1] - u[i]);
  tr.tail_integral.assign(n, 0.0);
  tr.tail_integral[n - 1] = 1 / (eps * tr.c[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) {
    const double h = u[i + 1] - u[i];
    tr.tail_integral[i] = tr.tail_integral[i + 1] - std::expm1(-gamma[i] * h) / (gamma[i] * tr.c[i]);
  }

  std::vector<Knot> knots(n);
  knots[0] = {0.0, env[0] + eps, 1 / tr.tail_integral[0]};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = u[i + 1] - u[i];
    auto tail_at = [&](double x) {  // ∫_x^∞ dτ/c for x in the segment
      return tr.tail_integral[i + 1] +
             (std::exp(-gamma[i] * (x - u[i])) - std::exp(-gamma[i] * h)) / (gamma[i] * tr.c[i]);
    };
    double acc = 0;
    for (std::size_t q = 0; q < kGlNodes.size(); ++q)
      for (int sign : {-1, 1}) acc += kGlWeights[q] / tail_at(u[i] + h * (1 + sign * kGlNodes[q]) / 2);
    knots[i + 1] = {u[i + 1], knots[i].s + acc * h / 2, 1 / tr.tail_integral[i + 1]};
  }

  AdmissibleFunction s = AdmissibleFunction::grid(std::move(knots), eps);
  s.set_trace(std::move(tr));
  return s;
}

}  // namespace

AdmissibleFunction build_admissible(const LevelSetProfile& profile, const FloorFunction& floor,
                                    const BuildOptions& options) {
  if (!(options.epsilon > 0) || !std::isfinite(options.epsilon)) throw ValidationError("epsilon: must be positive");
  if (!(options.max_knot_spacing > 0)) throw ValidationError("max_knot_spacing: must be positive");
  if (profile.size() < 2) throw ValidationError("profile: at least two levels are required");

  double spacing = options.max_knot_spacing;
  for (int attempt = 0;; ++attempt) {
    try {
      AdmissibleFunction s = build_once(profile, floor, options, spacing);
      const auto& tr = *s.trace();
      for (std::size_t i = 0; i < tr.u.size(); ++i) {
        const Knot& k = s.knots()[i];
        if (k.s < tr.floor[i] || k.s_prime < tr.floor[i])
          throw BuildError("floor violated at u=" + std::to_string(k.u));
      }
      const AdmissibilityReport rep = verify_admissible(s, profile, options.target);
      if (!rep.pass)
        throw BuildError("built function fails verification: " + rep.reason +
                         (rep.first_offending_t ? " at t=" + std::to_string(*rep.first_offending_t) : ""));
      return s;
    } catch (const ValidationError& e) {
      // Non-monotone Hermite segment: refine the knots and rebuild.
      if (attempt >= 4 || std::string(e.what()).find("not monotone") == std::string::npos) throw;
      spacing /= 2;
    }
  }
}

}  // namespace bgcoh
