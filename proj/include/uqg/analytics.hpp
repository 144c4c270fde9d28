#pragma once

#include <iostream>
#include <vector>

#include "uqg/common.hpp"
#include "uqg/linalg.hpp"

namespace uqg {

/// Sine-kernel workspace for the large-N splitting densities at one (nu, s).
/// Lambda_kk = i k + N/(2 nu) - i (N+1)/2, R = I minus the discrete sine
/// kernel, <j|u> = e^{+i j pi s / N}, g = e^{i (N+1) pi s / N - pi s / nu}.
/// Brackets in the density formulas are sesquilinear: <a|M|b> = a^dag M b.
struct KernelWorkspace {
  int n = 0;
  double nu = 0.0, s = 0.0;
  RealMatrix r;
  Vector lambda;  // diagonal
  Vector u;
  cdouble g;
  Eigen::LDLT<RealMatrix> r_factor;
  double log_det_r = 0.0;

  /// R^{-1} applied to a complex vector through the real factorization
  Vector solve_r(const Vector& b) const {
    RealVector re = r_factor.solve(b.real());
    RealVector im = r_factor.solve(b.imag());
    Vector out(b.size());
    out.real() = re;
    out.imag() = im;
    return out;
  }
};

inline KernelWorkspace build_workspace(int n, double nu, double s) {
  if (n < 2) throw std::invalid_argument("build_workspace: N must be >= 2");
  if (nu == 0.0) throw std::invalid_argument("build_workspace: Lambda is undefined at nu = 0");
  if (s < 0.0) throw std::invalid_argument("build_workspace: s must be >= 0");
  if (s > 0.06 * n)
    throw std::invalid_argument(
        "build_workspace: s beyond the numerically safe domain (s <= 0.06 N); "
        "both densities are below 1e-6 there");
  KernelWorkspace w;
  w.n = n;
  w.nu = nu;
  w.s = s;
  w.r.resize(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) {
        w.r(k, l) = 1.0 - s / n;  // diagonal limit of the kernel
      } else {
        const int d = k - l;
        w.r(k, l) = -std::sin(d * pi * s / n) / (d * pi);
      }
    }
  }
  w.lambda.resize(n);
  w.u.resize(n);
  for (int j = 1; j <= n; ++j) {
    w.lambda(j - 1) = cdouble(n / (2.0 * nu), j - 0.5 * (n + 1));
    w.u(j - 1) = std::exp(cdouble(0, j * pi * s / n));
  }
  w.g = std::exp(cdouble(-pi * s / nu, (n + 1) * pi * s / n));
  w.r_factor.compute(w.r);
  if (w.r_factor.info() != Eigen::Success)
    throw numerical_error("build_workspace: LDLT of the sine-kernel matrix failed");
  const auto& d = w.r_factor.vectorD();
  double dmin = d(0), dmax = d(0);
  for (int i = 0; i < n; ++i) {
    if (!(d(i) > 0.0)) throw numerical_error("build_workspace: R lost positive definiteness");
    w.log_det_r += std::log(d(i));
    dmin = std::min(dmin, d(i));
    dmax = std::max(dmax, d(i));
  }
  if (dmax / dmin > 1e10)
    std::cerr << "uqg: warning: sine-kernel matrix condition " << dmax / dmin << " at s = " << s
              << ", N = " << n << "\n";
  return w;
}

namespace detail {

inline double check_real(cdouble v, const char* what) {
  if (std::abs(v.imag()) > 1e-8)
    throw numerical_error(std::string(what) + ": imaginary residue exceeds 1e-8");
  return v.real();
}

}  // namespace detail

/// internal splitting density before the reality assertion
inline cdouble p_in_exact_c(double nu, double s, int n = 100) {
  if (nu <= 0.0)
    throw std::invalid_argument("p_in_exact: nu must be positive; use the swap rule for nu < 0");
  const KernelWorkspace w = build_workspace(n, nu, s);
  const Vector a = w.solve_r(w.u);                                        // R^-1 u
  const Vector y = w.solve_r(w.lambda.cwiseProduct(w.u.conjugate()));     // R^-1 Lambda u*
  const cdouble t1 = w.u.dot(y);                                          // <u|R^-1 Lambda|u*>
  const cdouble braket_li = w.u.dot(a.cwiseQuotient(w.lambda));           // <u|Lambda^-1 R^-1|u>
  const cdouble braket_ll = w.u.dot(y.cwiseQuotient(w.lambda));           // <u|L^-1 R^-1 L|u*>
  const cdouble braket_uu = w.u.dot(a);                                   // <u|R^-1|u>
  const cdouble sum = t1 - braket_li * t1 / two_pi + braket_uu * braket_ll / two_pi;
  return 2.0 * w.g * pi / (static_cast<double>(n) * n) * std::exp(w.log_det_r) * sum;
}

/// internal splitting density, exact large-N determinant formula
inline double p_in_exact(double nu, double s, int n = 100) {
  return detail::check_real(p_in_exact_c(nu, s, n), "p_in_exact");
}

inline cdouble p_ex_exact_c(double nu, double s, int n = 100) {
  if (nu <= 0.0)
    throw std::invalid_argument("p_ex_exact: nu must be positive; use the swap rule for nu < 0");
  const KernelWorkspace w = build_workspace(n, nu, s);
  const Vector us = w.u.conjugate();
  const Vector b = w.solve_r(us);                                      // R^-1 u*
  const Vector c = w.solve_r(w.lambda.cwiseProduct(w.u));              // R^-1 Lambda u
  const cdouble e1 =
      us.dot(b) * w.u.dot(c.cwiseQuotient(w.lambda));                  // <u*|R^-1|u*><u|L^-1R^-1L|u>
  const cdouble e2 =
      w.u.dot(b.cwiseQuotient(w.lambda)) * us.dot(c);                  // <u|L^-1R^-1|u*><u*|R^-1L|u>
  return std::exp(w.log_det_r) / (static_cast<double>(n) * n) * (e1 - e2);
}

/// external splitting density, exact large-N determinant formula
inline double p_ex_exact(double nu, double s, int n = 100) {
  return detail::check_real(p_ex_exact_c(nu, s, n), "p_ex_exact");
}

inline cdouble p_gue_exact_c(double s, int n = 100) {
  const KernelWorkspace w = build_workspace(n, 1.0, s);  // Lambda unused
  const Vector us = w.u.conjugate();
  const Vector a = w.solve_r(w.u);
  const Vector b = w.solve_r(us);
  return std::exp(w.log_det_r) / (static_cast<double>(n) * n) *
         (us.dot(b) * w.u.dot(a) - w.u.dot(b) * us.dot(a));
}

/// GUE nearest-neighbour density from the sine-kernel determinant
inline double p_gue_exact(double s, int n = 100) {
  return detail::check_real(p_gue_exact_c(s, n), "p_gue_exact");
}

/// exact s = 0 values in the N -> infinity limit:
/// p_in(0) = 1 + pi/nu - arctan(nu)/nu, p_ex(0) = 1 - arctan(nu)/nu
/// (lim Tr Lambda^{-1} = 2 arctan nu); the difference is pi/nu exactly.
inline std::pair<double, double> p_zero_closed_form(double nu) {
  if (nu <= 0.0)
    throw std::invalid_argument("p_zero_closed_form: nu must be positive (swap rule for nu < 0)");
  const double t = std::atan(nu) / nu;
  return {1.0 + pi / nu - t, 1.0 - t};
}

// ---------------------------------------------------------------------------
// finite-N gap probability from the four-piece closed-form integrals

/// Gap intervals for the two species; all bounds are phases in [-pi, pi].
struct GapBounds {
  double eps_min = 0.0, eps_max = 0.0;
  double lamb_min = 0.0, lamb_max = 0.0;
};

enum class FVariant { plain, numerator_in, numerator_ex, denominator };

namespace detail {

/// integral of e^{c x} over [a, b] for purely imaginary c = i m (m integer-valued
/// differences), with the m = 0 limit
inline cdouble osc_integral(double m, double a, double b) {
  if (b <= a) return 0.0;
  if (std::abs(m) < 1e-12) return b - a;
  return (std::exp(cdouble(0, m * b)) - std::exp(cdouble(0, m * a))) / cdouble(0, m);
}

/// One matrix element of F = F0 - F_eps - F_lam + F_epslam for the windows
/// [xe, ye] x [xl, yl]. Every exponential is evaluated on a combined exponent
/// whose real part stays window-sized, so nothing overflows for nu > 0.
inline cdouble f_element(int n, double nu, int k, int l, double xe, double ye, double xl,
                         double yl) {
  const double kt = k - 1 - 0.5 * (n - 1);
  const double lt = l - 1 - 0.5 * (n - 1);
  const cdouble nk(n / (2.0 * nu), kt);
  const cdouble nl(-n / (2.0 * nu), lt);
  const double ktl = kt + lt;
  auto E = [](cdouble z) { return std::exp(z); };

  // F0 over eps in [-pi, pi], lam in [eps, pi]
  cdouble f0 = (E(cdouble(0, ktl * pi)) - E(nl * pi - nk * pi)) / (nk * nl);
  if (std::abs(ktl) < 1e-12) f0 -= two_pi / nl;

  // F_eps: eps-window, lam in [eps, pi]
  cdouble fe = 0.0;
  if (ye > xe) {
    fe = (E(nk * ye + nl * pi) - E(nk * xe + nl * pi)) / (nk * nl) - osc_integral(ktl, xe, ye) / nl;
  }

  // F_lam: eps in [-on, pi], lam in [xl, yl] (clipped), lam >= eps
  cdouble fl = 0.0;
  {
    const double c = std::max(-pi, xl), d = std::min(pi, yl);
    if (d > c) {
      // eps in [-pi, c], lam over the whole window
      fl += (E(nl * d + nk * c) - E(cdouble(0, (kt + lt) * c)) -
             E(nl * d - nk * pi) + E(nl * c - nk * pi)) /
            (nk * nl);
      // eps in [c, d], lam in [eps, yl]
      fl += (E(nl * yl + nk * d) - E(nl * yl + nk * c)) / (nk * nl) - osc_integral(ktl, c, d) / nl;
    }
  }

  // F_epslam: both windows, lam >= eps
  cdouble fel = 0.0;
  if (ye > xe && yl > xl) {
    const double a1 = std::min(ye, xl);
    if (a1 > xe) {
      // eps in [xe, a1]: lam window untouched
      fel += (E(nl * yl + nk * a1) - E(nl * yl + nk * xe) - E(nl * xl + nk * a1) +
              E(nl * xl + nk * xe)) /
             (nk * nl);
    }
    const double p = std::max(xe, xl), q = std::min(ye, yl);
    if (q > p) {
      fel += (E(nl * yl + nk * q) - E(nl * yl + nk * p)) / (nk * nl) - osc_integral(ktl, p, q) / nl;
    }
  }
  return f0 - fe - fl + fel;
}

}  // namespace detail

/// bounds used by the internal-splitting numerator at gap s (phase half-width
/// z = s pi / N) with boundary extensions de, dl
inline GapBounds numerator_in_bounds(int n, double s, double de, double dl) {
  const double z = s * pi / n;
  return {-z - de, z, -z, z + dl};
}

inline GapBounds numerator_ex_bounds(int n, double s, double de, double dl) {
  const double z = s * pi / n;
  return {-z, z + de, -z - dl, z};
}

inline GapBounds denominator_bounds(int n, double s, double de) {
  const double z = s * pi / n;
  return {-z - de, -z, 0.0, 0.0};
}

/// N x N matrix of the appendix closed-form integrals; the variant validates
/// the window geometry (which theta branch of F_epslam is active).
inline Matrix finite_N_F(const GapBounds& b, int n, double nu, FVariant variant = FVariant::plain) {
  if (n < 2) throw std::invalid_argument("finite_N_F: N must be >= 2");
  if (nu == 0.0) throw std::invalid_argument("finite_N_F: nu must be nonzero");
  if (b.eps_min > b.eps_max || b.lamb_min > b.lamb_max)
    throw std::invalid_argument("finite_N_F: degenerate bounds");
  switch (variant) {
    case FVariant::numerator_in:
      if (b.lamb_min < b.eps_min)
        throw std::invalid_argument("finite_N_F: numerator-in expects eps_min <= lamb_min");
      break;
    case FVariant::numerator_ex:
      if (b.lamb_min > b.eps_min)
        throw std::invalid_argument("finite_N_F: numerator-ex expects lamb_min <= eps_min");
      break;
    case FVariant::denominator:
      if (b.lamb_min != b.lamb_max)
        throw std::invalid_argument("finite_N_F: denominator expects an empty lambda window");
      break;
    case FVariant::plain:
      break;
  }
  Matrix f(n, n);
  for (int k = 1; k <= n; ++k)
    for (int l = 1; l <= n; ++l)
      f(k - 1, l - 1) = detail::f_element(n, nu, k, l, b.eps_min, b.eps_max, b.lamb_min, b.lamb_max);
  return f;
}

/// E = det F(bounds) / det F(0,0;0,0), evaluated through log-determinants
inline double gap_probability(const GapBounds& b, int n, double nu) {
  const LogDet num = log_det(finite_N_F(b, n, nu));
  const LogDet den = log_det(finite_N_F(GapBounds{}, n, nu));
  const cdouble ratio = (num.phase / den.phase) * std::exp(num.log_abs - den.log_abs);
  if (std::abs(ratio.imag()) > 1e-8)
    throw numerical_error("gap_probability: ratio is not real");
  double e = ratio.real();
  if (e < 0.0 && e > -1e-6) e = 0.0;
  if (e > 1.0 && e < 1.0 + 1e-6) e = 1.0;
  return e;
}

/// internal/external density through finite differences of the det ratio
/// (independent route used to cross-check the large-N formulas)
inline double p_in_via_gap(double nu, double s, int n, double h = 1e-5) {
  const LogDet f0 = log_det(finite_N_F(GapBounds{}, n, nu));
  auto dref = [&](const GapBounds& b) {
    const LogDet d = log_det(finite_N_F(b, n, nu));
    return ((d.phase / f0.phase) * std::exp(d.log_abs - f0.log_abs)).real();
  };
  const double num = (dref(numerator_in_bounds(n, s, h, h)) - dref(numerator_in_bounds(n, s, h, 0)) -
                      dref(numerator_in_bounds(n, s, 0, h)) + dref(numerator_in_bounds(n, s, 0, 0))) /
                     (h * h);
  const double den = (dref(denominator_bounds(n, s, h)) - dref(denominator_bounds(n, s, 0))) / h;
  return std::abs(two_pi / n * num / den);
}

inline double p_ex_via_gap(double nu, double s, int n, double h = 1e-5) {
  const LogDet f0 = log_det(finite_N_F(GapBounds{}, n, nu));
  auto dref = [&](const GapBounds& b) {
    const LogDet d = log_det(finite_N_F(b, n, nu));
    return ((d.phase / f0.phase) * std::exp(d.log_abs - f0.log_abs)).real();
  };
  const double num = (dref(numerator_ex_bounds(n, s, h, h)) - dref(numerator_ex_bounds(n, s, h, 0)) -
                      dref(numerator_ex_bounds(n, s, 0, h)) + dref(numerator_ex_bounds(n, s, 0, 0))) /
                     (h * h);
  const double den =
      (dref(GapBounds{0, 0, -h, 0}) - dref(GapBounds{0, 0, 0, 0})) / h;  // lambda-species density
  return std::abs(two_pi / n * num / den);
}

// ---------------------------------------------------------------------------
// literal expanded forms of the appendix numerator/denominator elements,
// linear in the boundary extensions; kept for cross-checks against the
// delta-differenced exact integrals

inline cdouble appendix_numerator_entry(int n, double nu, double s, double de, double dl, int k,
                                        int l) {
  const double kt = k - 1 - 0.5 * (n - 1);
  const double lt = l - 1 - 0.5 * (n - 1);
  const cdouble nk(n / (2.0 * nu), kt);
  const cdouble nl(-n / (2.0 * nu), lt);
  const double ktl = kt + lt;
  cdouble v = std::exp(cdouble(0, ktl * pi));
  if (std::abs(ktl) < 1e-12)
    v -= two_pi * nk;
  const double sinc = std::abs(ktl) < 1e-12 ? pi * s / n : std::sin(ktl * pi * s / n) / ktl;
  v -= 2.0 * nl * sinc;
  v += 2.0 * std::exp(nl * (pi * s / n)) * std::sinh(nk * (pi * s / n));
  // boundary-extension block; the decay rate is pi s / nu = (n_k - n_l) pi s / N
  v += std::exp(cdouble(-pi * s / nu, (lt - kt) * pi * s / n)) *
       (nk * de - nl * dl + nl * nk * de * dl);
  return v;
}

inline cdouble appendix_denominator_entry(int n, double nu, double s, double de, int k, int l) {
  const double kt = k - 1 - 0.5 * (n - 1);
  const double lt = l - 1 - 0.5 * (n - 1);
  const cdouble nk(n / (2.0 * nu), kt);
  const double ktl = kt + lt;
  cdouble v = std::exp(cdouble(0, ktl * pi));
  if (std::abs(ktl) < 1e-12) v -= two_pi * nk;
  v += std::exp(cdouble(0, -ktl * pi * s / n)) * nk * de;
  return v;
}

// ---------------------------------------------------------------------------
// quadrature helpers for curve-level checks

/// composite Simpson on [a, b] with n (even) intervals
template <typename F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace uqg
