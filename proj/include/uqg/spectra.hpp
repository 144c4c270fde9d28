#pragma once

#include <algorithm>
#include <functional>
#include <sstream>
#include <vector>

#include "uqg/common.hpp"
#include "uqg/linalg.hpp"
#include "uqg/quantum_map.hpp"

namespace uqg {

struct EigenphaseSet {
  double k = 0.0;
  RealVector phases;  // sorted in (-pi, pi]
  Matrix vectors;     // empty unless requested
  bool has_vectors = false;
};

/// Eigenphases of the quantum map S L(k).
inline EigenphaseSet quantum_map_eigenphases(const Matrix& s, const RealVector& directed_lengths,
                                             double k, bool with_vectors = false) {
  Matrix u = s;
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    u.col(j) *= std::exp(cdouble(0, k * directed_lengths(j)));
  if (unitarity_defect(u) > 1e-10) {
    std::ostringstream msg;
    msg << "quantum_map_eigenphases: S L(k) not unitary at k = " << k;
    throw numerical_error(msg.str());
  }
  EigenphaseSet out;
  out.k = k;
  auto es = eig_unitary(u, with_vectors);
  out.phases = std::move(es.phases);
  out.vectors = std::move(es.vectors);
  out.has_vectors = with_vectors;
  return out;
}

/// |A_m|^2 per distinct level from Gamma+-block eigenvectors: the squared
/// component on the Gamma+ edge entering the scatterer location.
inline RealVector amplitude_overlaps_block(const Matrix& block_vectors, int in_plus_edge) {
  RealVector w(block_vectors.cols());
  for (Eigen::Index m = 0; m < block_vectors.cols(); ++m) {
    const cdouble a = block_vectors(in_plus_edge, m) / block_vectors.col(m).norm();
    w(m) = std::norm(a);
  }
  return w;
}

/// |A_m|^2 from full-map eigenvectors. Degenerate pairs (phase gap <= pair_tol)
/// are reduced: the pair contributes the basis-invariant half trace of the
/// projector onto span(|in+>, |in->), which equals the single-member value for
/// chiral representatives.
inline RealVector amplitude_overlaps(const EigenphaseSet& es, int in_plus, int in_minus,
                                     double pair_tol = 1e-9) {
  if (!es.has_vectors) throw std::invalid_argument("amplitude_overlaps: eigenvectors required");
  const int n = static_cast<int>(es.phases.size());
  std::vector<double> vals;
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && es.phases(j) - es.phases(j - 1) <= pair_tol) ++j;
    double acc = 0.0;
    for (int m = i; m < j; ++m)
      acc += std::norm(es.vectors(in_plus, m)) + std::norm(es.vectors(in_minus, m));
    vals.push_back(j - i == 2 ? 0.5 * acc : acc);
    i = j;
  }
  RealVector out(static_cast<int>(vals.size()));
  for (std::size_t m = 0; m < vals.size(); ++m) out(static_cast<int>(m)) = vals[m];
  return out;
}

struct ClassifiedSplittings {
  std::vector<double> internal, external;  // MLS units
  double mls_used = 0.0;
};

/// rescale by the mean spacing of the reference sequence
inline std::vector<double> unfold(const std::vector<double>& values, double reference_mls) {
  if (values.size() < 2 && reference_mls <= 0.0)
    throw std::invalid_argument("unfold: need a positive reference spacing");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / reference_mls;
  return out;
}

namespace detail {

struct MatchedLevels {
  std::vector<double> eps;    // distinct unperturbed, sorted
  std::vector<double> moved;  // unmatched perturbed, sorted
};

/// Identify the pinned half of the perturbed phases by matching against the
/// distinct unperturbed levels; everything unmatched is "moved".
inline MatchedLevels match_pinned(const std::vector<double>& perturbed,
                                  const std::vector<double>& eps_distinct, bool circular,
                                  double tol) {
  MatchedLevels out;
  out.eps = eps_distinct;
  std::sort(out.eps.begin(), out.eps.end());
  std::vector<double> pert = perturbed;
  std::sort(pert.begin(), pert.end());

  std::vector<int> match_count(out.eps.size(), 0);
  std::vector<char> matched(pert.size(), 0);
  for (std::size_t i = 0; i < pert.size(); ++i) {
    // nearest eps by (circular) distance
    int best = -1;
    double best_d = tol;
    for (std::size_t e = 0; e < out.eps.size(); ++e) {
      const double d = circular ? phase_distance(pert[i], out.eps[e]) : std::abs(pert[i] - out.eps[e]);
      if (d <= best_d) {
        best_d = d;
        best = static_cast<int>(e);
      }
    }
    if (best >= 0) {
      ++match_count[best];
      matched[i] = 1;
    }
  }
  for (std::size_t e = 0; e < out.eps.size(); ++e)
    if (match_count[e] != 1) {
      std::ostringstream msg;
      msg << "classify_splittings: level " << e << " at " << out.eps[e] << " matched "
          << match_count[e] << " perturbed phases (tolerance " << tol << ")";
      throw audit_error(msg.str());
    }
  for (std::size_t i = 0; i < pert.size(); ++i)
    if (!matched[i]) out.moved.push_back(pert[i]);
  return out;
}

}  // namespace detail

/// Split the perturbed spectrum into internal (pinned level to adjacent moved
/// level) and external (moved level to next pinned) distances, in units of the
/// mean unperturbed spacing. nu_sign > 0 pairs each eps with the moved level
/// above it, nu_sign < 0 with the moved level below (the labels swap).
inline ClassifiedSplittings classify_splittings(const std::vector<double>& perturbed,
                                                const std::vector<double>& eps_distinct,
                                                int nu_sign, bool circular = true,
                                                double tol = 1e-8) {
  if (nu_sign == 0) throw std::invalid_argument("classify_splittings: nu_sign must be nonzero");
  auto lv = detail::match_pinned(perturbed, eps_distinct, circular, tol);
  const std::size_t n = lv.eps.size();
  if (!circular) {
    // drop moved roots outside the pinned range; those arcs are cut by the window
    std::erase_if(lv.moved, [&](double m) { return m < lv.eps.front() || m > lv.eps.back(); });
  }
  const std::size_t expected_moved = circular ? n : n - 1;
  if (lv.moved.size() != expected_moved) {
    std::ostringstream msg;
    msg << "classify_splittings: " << lv.moved.size() << " moved levels for " << n
        << " pinned ones";
    throw audit_error(msg.str());
  }

  ClassifiedSplittings out;
  const std::size_t arcs = circular ? n : n - 1;
  std::vector<double> up(arcs), down(arcs);  // distance eps_i -> lambda, lambda -> eps_{i+1}
  std::size_t mi = 0;
  // first moved above eps[0]
  while (mi < lv.moved.size() && lv.moved[mi] < lv.eps[0]) ++mi;
  const std::size_t wrapped_below = mi;  // moved levels below eps[0] belong to the wrap arc
  for (std::size_t i = 0; i < arcs; ++i) {
    const double a = lv.eps[i];
    const bool wrap = circular && i + 1 == n;
    const double b = wrap ? lv.eps[0] + two_pi : lv.eps[i + 1];
    double lam;
    if (!wrap) {
      if (mi >= lv.moved.size() || lv.moved[mi] >= b) {
        std::ostringstream msg;
        msg << "classify_splittings: no moved level in arc (" << a << ", " << b << ")";
        throw audit_error(msg.str());
      }
      lam = lv.moved[mi++];
      if (mi < lv.moved.size() && lv.moved[mi] < b)
        throw audit_error("classify_splittings: two moved levels in one arc");
    } else {
      // wrap arc holds the levels above eps[n-1] plus those below eps[0]
      const std::size_t remaining = (lv.moved.size() - mi) + wrapped_below;
      if (remaining != 1) throw audit_error("classify_splittings: wrap arc count mismatch");
      lam = mi < lv.moved.size() ? lv.moved[mi] : lv.moved[0] + two_pi;
    }
    up[i] = lam - a;
    down[i] = b - lam;
  }
  double mls;
  if (circular) {
    mls = two_pi / static_cast<double>(n);
  } else {
    mls = (lv.eps.back() - lv.eps.front()) / static_cast<double>(n - 1);
  }
  out.mls_used = mls;
  for (std::size_t i = 0; i < arcs; ++i) {
    const double in_raw = nu_sign > 0 ? up[i] : down[i];
    const double ex_raw = nu_sign > 0 ? down[i] : up[i];
    out.internal.push_back(in_raw / mls);
    out.external.push_back(ex_raw / mls);
  }
  return out;
}

// ---------------------------------------------------------------------------
// physical k-spectrum

struct KSpectrum {
  std::vector<double> roots;       // sorted, repeated per multiplicity
  std::vector<double> residuals;   // smallest singular value at each root
  double k_min = 0.0, k_max = 0.0;
};

namespace detail {

/// smallest singular value of I - S L(k)
inline double secular_sigma(const Matrix& s, const RealVector& dl, double k) {
  Matrix m = -s;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    m.col(j) *= std::exp(cdouble(0, k * dl(j)));
  m.diagonal().array() += 1.0;
  return smallest_singular_value(m);
}

/// sum over eigenphases mapped to [0, 2pi)
inline double phase_sum_mod(const Matrix& s, const RealVector& dl, double k) {
  Matrix u = s;
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    u.col(j) *= std::exp(cdouble(0, k * dl(j)));
  auto es = eig_unitary(u, false);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.phases.size(); ++i) {
    double p = es.phases(i);
    if (p < 0) p += two_pi;
    acc += p;
  }
  return acc;
}

/// refine a bracketed V-shaped minimum of sigma(k) by intersecting the two
/// secant lines, with golden-section fallback
template <typename F>
double refine_v_minimum(F&& sigma, double a, double m, double b, double tol) {
  double fa = sigma(a), fm = sigma(m), fb = sigma(b);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    const double sl = (fm - fa) / (m - a);
    const double sr = (fb - fm) / (b - m);
    double x = 0.0;
    bool ok = sl < 0.0 && sr > 0.0;
    if (ok) {
      x = (fa - fb + sr * b - sl * a) / (sr - sl);
      ok = x > a && x < b && std::abs(x - m) > 1e-18;
    }
    if (!ok) x = (b - m > m - a) ? m + 0.381966 * (b - m) : m - 0.381966 * (m - a);
    const double fx = sigma(x);
    // keep a bracketing triple around the smaller of fm, fx
    if (x < m) {
      if (fx < fm) { b = m; fb = fm; m = x; fm = fx; }
      else { a = x; fa = fx; }
    } else {
      if (fx < fm) { a = m; fa = fm; m = x; fm = fx; }
      else { b = x; fb = fx; }
    }
  }
  return m;
}

}  // namespace detail

/// Find all roots of det(1 - S L(k)) in [k_min, k_max] by scanning the
/// smallest singular value and refining its minima; a winding-number audit
/// checks the count against the exact expectation.
inline KSpectrum find_k_spectrum(const Matrix& s, const RealVector& directed_lengths,
                                 double k_min, double k_max, double coarse_factor = 0.2) {
  if (!(k_max > k_min) || k_min < 0.0)
    throw std::invalid_argument("find_k_spectrum: need k_max > k_min >= 0");
  const double total_len = directed_lengths.sum();  // directed total = 2 sum l_j
  const double mean_spacing = two_pi / total_len;
  const double step = coarse_factor * mean_spacing;
  auto sigma = [&](double k) { return detail::secular_sigma(s, directed_lengths, k); };

  // nudge window ends off roots
  double lo = k_min, hi = k_max;
  for (int i = 0; i < 8 && sigma(lo) < 1e-6; ++i) lo += 0.5 * step;
  for (int i = 0; i < 8 && sigma(hi) < 1e-6; ++i) hi -= 0.5 * step;

  const int n_steps = static_cast<int>(std::ceil((hi - lo) / step));
  std::vector<double> ks(n_steps + 1), sg(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) {
    ks[i] = lo + (hi - lo) * i / n_steps;
    sg[i] = sigma(ks[i]);
  }

  KSpectrum out;
  out.k_min = lo;
  out.k_max = hi;
  const double sigma_slope = total_len / static_cast<double>(directed_lengths.size());
  for (int i = 1; i < n_steps; ++i) {
    if (sg[i] <= sg[i - 1] && sg[i] <= sg[i + 1]) {
      // only pursue minima that can plausibly reach zero
      if (sg[i] > 2.0 * sigma_slope * (ks[i + 1] - ks[i - 1])) continue;
      const double k0 =
          detail::refine_v_minimum(sigma, ks[i - 1], ks[i], ks[i + 1], 1e-10 * (1.0 + ks[i]));
      const double res = sigma(k0);
      if (res > 1e-9) continue;  // shallow avoided crossing, not a root
      // multiplicity from the number of vanishing singular values
      RealVector sv;
      {
        Matrix m = -s;
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          m.col(j) *= std::exp(cdouble(0, k0 * directed_lengths(j)));
        m.diagonal().array() += 1.0;
        sv = singular_values(m);
      }
      int mult = 0;
      for (Eigen::Index j = sv.size() - 1; j >= 0; --j)
        if (sv(j) <= 1e-6) ++mult;
      for (int c = 0; c < mult; ++c) {
        out.roots.push_back(k0);
        out.residuals.push_back(res);
      }
    }
  }

  // winding audit: number of eigenphase crossings of 0 in (lo, hi], exact up
  // to rounding since sum of unwrapped eigenphases = total_len * k + const
  const double expected_f = (total_len * (hi - lo) - detail::phase_sum_mod(s, directed_lengths, hi) +
                             detail::phase_sum_mod(s, directed_lengths, lo)) /
                            two_pi;
  const long expected = std::lround(expected_f);
  if (std::abs(expected_f - expected) > 0.01)
    throw numerical_error("find_k_spectrum: winding count did not round cleanly");
  if (expected != static_cast<long>(out.roots.size())) {
    std::ostringstream msg;
    msg << "find_k_spectrum: found " << out.roots.size() << " roots but winding expects "
        << expected << "; rerun with a smaller coarse step";
    throw audit_error(msg.str());
  }
  return out;
}

}  // namespace uqg
