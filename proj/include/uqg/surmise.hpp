#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "uqg/analytics.hpp"
#include "uqg/common.hpp"

namespace uqg {

/// GUE Wigner surmise 32 s^2 / pi^2 e^{-4 s^2 / pi}
inline double wigner_gue(double s) {
  if (s < 0.0) throw std::invalid_argument("wigner_gue: s must be >= 0");
  return 32.0 * s * s / (pi * pi) * std::exp(-4.0 * s * s / pi);
}

/// GOE Wigner surmise (pi/2) s e^{-pi s^2 / 4}
inline double wigner_goe(double s) {
  if (s < 0.0) throw std::invalid_argument("wigner_goe: s must be >= 0");
  return 0.5 * pi * s * std::exp(-0.25 * pi * s * s);
}

/// normalisation of the shifted surmise: N(c) = (4/pi) c e^{-4c^2/pi} + erfc(2c/sqrt(pi))
inline double norm_const(double c) {
  if (c < 0.0) throw std::invalid_argument("norm_const: c must be >= 0");
  return 4.0 / pi * c * std::exp(-4.0 * c * c / pi) + std::erfc(2.0 * c / std::sqrt(pi));
}

/// p^s(s, c) = p^W(s + c) / N(c)
inline double shifted_surmise(double s, double c) {
  if (s < 0.0 || c < 0.0) throw std::invalid_argument("shifted_surmise: s, c must be >= 0");
  return wigner_gue(s + c) / norm_const(c);
}

/// Solve p^W(c)/N(c) = p0 for the shift threshold c; the left side is 0 at
/// c = 0 and strictly increasing, so bisection on an adaptively widened
/// bracket finds the unique root.
inline double solve_threshold(double p0, double residual = 1e-10) {
  if (p0 < 0.0) throw std::invalid_argument("solve_threshold: target density must be >= 0");
  if (p0 == 0.0) return 0.0;
  auto ratio = [](double c) { return wigner_gue(c) / norm_const(c); };
  double lo = 0.0, hi = 6.0;
  while (ratio(hi) < p0) {
    hi *= 2.0;
    if (hi > 1e4) throw numerical_error("solve_threshold: bracket expansion failed");
  }
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) < p0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < residual && std::abs(ratio(mid) - p0) < residual) break;
  }
  return 0.5 * (lo + hi);
}

struct SurmiseParams {
  double nu = 0.0;
  double c_in = 0.0, c_ex = 0.0;
};

inline SurmiseParams surmise_params(double nu) {
  if (nu <= 0.0)
    throw std::invalid_argument("surmise_params: nu must be positive (swap rule for nu < 0)");
  auto [p_in0, p_ex0] = p_zero_closed_form(nu);
  return {nu, solve_threshold(p_in0), solve_threshold(p_ex0)};
}

/// heuristic curves for (p_in, p_ex) on a grid of splittings
inline std::pair<std::vector<double>, std::vector<double>> surmise_curves(
    double nu, const std::vector<double>& s_grid) {
  const SurmiseParams prm = surmise_params(nu);
  std::vector<double> pin(s_grid.size()), pex(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    pin[i] = shifted_surmise(s_grid[i], prm.c_in);
    pex[i] = shifted_surmise(s_grid[i], prm.c_ex);
  }
  return {pin, pex};
}

}  // namespace uqg
