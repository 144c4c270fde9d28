#pragma once

#include <algorithm>
#include <vector>

#include "uqg/common.hpp"
#include "uqg/linalg.hpp"
#include "uqg/rng.hpp"

namespace uqg {

/// One draw of the surrogate ensemble: CUE eigenphases plus Gaussian-model
/// overlap weights, perturbation strength nu.
struct RmtInstance {
  RealVector eps;      // sorted in (-pi, pi]
  RealVector weights;  // nonnegative, sum 1
  double nu = 0.0;
};

/// eigenphases of a Haar-random unitary, sorted
inline RealVector sample_cue_phases(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_cue_phases: n must be >= 1");
  Matrix u = haar_unitary(n, rng);
  return eig_unitary(u, false).phases;
}

/// iid exponential(1/N) overlaps renormalized to sum exactly 1
inline RealVector sample_overlaps(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_overlaps: n must be >= 1");
  RealVector w(n);
  for (int i = 0; i < n; ++i) w(i) = rng.exponential(1.0 / n);
  return w / w.sum();
}

inline RmtInstance sample_rmt_instance(int n, double nu, Rng& rng) {
  RmtInstance inst;
  inst.eps = sample_cue_phases(n, rng);
  inst.weights = sample_overlaps(n, rng);
  inst.nu = nu;
  return inst;
}

namespace detail {

/// bisection on a strictly decreasing function, poles excluded by nextafter
template <typename F>
double bisect_decreasing(F&& f, double lo, double hi) {
  lo = std::nextafter(lo, hi);
  hi = std::nextafter(hi, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Solve cot(alpha) = sum_m w_m cot((lambda - eps_m)/2) on the circle:
/// exactly one root per arc between consecutive poles (the wrap arc included).
inline std::vector<double> solve_secular_cot(const RmtInstance& inst, double alpha) {
  if (alpha == 0.0)
    throw std::invalid_argument("solve_secular_cot: alpha = 0 is the degenerate limit");
  const int n = static_cast<int>(inst.eps.size());
  const double target = 1.0 / std::tan(alpha);
  auto f = [&](double lam) {
    double acc = 0.0;
    for (int m = 0; m < n; ++m) acc += inst.weights(m) / std::tan(0.5 * (lam - inst.eps(m)));
    return acc - target;
  };
  std::vector<double> roots(n);
  for (int i = 0; i < n; ++i) {
    const double a = inst.eps(i);
    const double b = (i + 1 < n) ? inst.eps(i + 1) : inst.eps(0) + two_pi;
    roots[i] = detail::bisect_decreasing(f, a, b);
  }
  return roots;
}

/// Solve 1/(2 nu) = sum_m w_m/(lambda - eps_m) on the unwrapped line:
/// one root per consecutive-eps interval plus one outer root (above the last
/// pole for nu > 0, below the first for nu < 0). Roots are returned sorted.
inline std::vector<double> solve_secular_rational(const RmtInstance& inst) {
  if (inst.nu == 0.0)
    throw std::invalid_argument("solve_secular_rational: nu = 0 is the degenerate limit");
  const int n = static_cast<int>(inst.eps.size());
  const double target = 1.0 / (2.0 * inst.nu);
  auto f = [&](double lam) {
    double acc = 0.0;
    for (int m = 0; m < n; ++m) acc += inst.weights(m) / (lam - inst.eps(m));
    return acc - target;
  };
  std::vector<double> roots;
  roots.reserve(n);
  if (inst.nu < 0.0) {
    // f decreases from |target| to -inf on (-inf, eps_0)
    double lo = inst.eps(0) - 2.0 * std::abs(inst.nu) - 1.0;
    while (f(lo) < 0.0) lo = inst.eps(0) - 2.0 * (inst.eps(0) - lo);
    roots.push_back(detail::bisect_decreasing(f, lo, inst.eps(0)));
  }
  for (int i = 0; i + 1 < n; ++i)
    roots.push_back(detail::bisect_decreasing(f, inst.eps(i), inst.eps(i + 1)));
  if (inst.nu > 0.0) {
    double hi = inst.eps(n - 1) + 2.0 * inst.nu + 1.0;
    while (f(hi) > 0.0) hi = inst.eps(n - 1) + 2.0 * (hi - inst.eps(n - 1));
    roots.push_back(detail::bisect_decreasing(f, inst.eps(n - 1), hi));
  }
  return roots;
}

struct SplittingSamples {
  std::vector<double> internal, external;  // MLS units
};

/// Draw n_instances of the ensemble and collect internal/external splittings
/// from the middle half of the levels (suppresses the unwrapped-line boundary
/// artifact of the rational secular equation).
inline SplittingSamples sample_splittings(int n, double nu, int n_instances, Rng& rng) {
  if (nu == 0.0) throw std::invalid_argument("sample_splittings: nu must be nonzero");
  SplittingSamples out;
  const double scale = n / two_pi;
  const int lo = n / 4, hi = 3 * n / 4;
  out.internal.reserve(static_cast<std::size_t>(n_instances) * (hi - lo));
  out.external.reserve(static_cast<std::size_t>(n_instances) * (hi - lo));
  // lam[i] lies in (eps_i, eps_{i+1}) for nu > 0; for nu < 0 the outer root
  // is prepended, so the root inside (eps_i, eps_{i+1}) is lam[i + 1]
  const int off = nu > 0 ? 0 : 1;
  for (int inst_id = 0; inst_id < n_instances; ++inst_id) {
    Rng sub = rng.child(static_cast<std::uint64_t>(inst_id));
    RmtInstance inst = sample_rmt_instance(n, nu, sub);
    auto lam = solve_secular_rational(inst);
    for (int i = lo; i < hi; ++i) {
      const double l = lam[i + off];
      out.internal.push_back((l - inst.eps(i)) * scale);
      out.external.push_back((inst.eps(i + 1) - l) * scale);
    }
  }
  return out;
}

/// Monte-Carlo gap probability: fraction of instances with no eps and no
/// lambda in [-w, w].
struct GapEstimate {
  double value;
  double std_error;
};

inline GapEstimate mc_gap_probability(int n, double nu, double half_width, int n_instances,
                                      Rng& rng) {
  long hits = 0;
  for (int inst_id = 0; inst_id < n_instances; ++inst_id) {
    Rng sub = rng.child(static_cast<std::uint64_t>(inst_id));
    RmtInstance inst = sample_rmt_instance(n, nu, sub);
    auto lam = solve_secular_rational(inst);
    bool empty = true;
    for (int i = 0; i < n && empty; ++i)
      if (std::abs(inst.eps(i)) <= half_width) empty = false;
    for (std::size_t i = 0; i < lam.size() && empty; ++i)
      if (std::abs(lam[i]) <= half_width) empty = false;
    if (empty) ++hits;
  }
  const double p = static_cast<double>(hits) / n_instances;
  return {p, std::sqrt(std::max(p * (1.0 - p), 1e-12) / n_instances)};
}

}  // namespace uqg
