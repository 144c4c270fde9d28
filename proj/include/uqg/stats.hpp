#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "uqg/common.hpp"
#include "uqg/graph.hpp"
#include "uqg/linalg.hpp"
#include "uqg/quantum_map.hpp"
#include "uqg/spectra.hpp"

namespace uqg {

/// Density-normalized histogram of one sample set; mass beyond the range is
/// reported separately (densities integrate to 1 - overflow over the range).
struct Histogram {
  double lo = 0.0, hi = 0.0, bin_width = 0.0;
  std::vector<double> density;
  long count = 0;
  double overflow_mass = 0.0;

  double mid(std::size_t i) const { return lo + (i + 0.5) * bin_width; }
  double edge(std::size_t i) const { return lo + i * bin_width; }
};

inline Histogram histogram(const std::vector<double>& samples, double bin_width = 0.1,
                           double lo = 0.0, double hi = 6.0) {
  if (samples.empty()) throw std::invalid_argument("histogram: empty input");
  if (!(bin_width > 0.0) || !(hi > lo)) throw std::invalid_argument("histogram: bad binning");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.bin_width = bin_width;
  const auto nbins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width - 1e-12));
  h.density.assign(nbins, 0.0);
  long overflow = 0;
  for (double s : samples) {
    if (s < lo || s >= lo + nbins * bin_width) {
      ++overflow;
      continue;
    }
    ++h.density[static_cast<std::size_t>((s - lo) / bin_width)];
  }
  h.count = static_cast<long>(samples.size());
  h.overflow_mass = static_cast<double>(overflow) / h.count;
  for (double& d : h.density) d /= h.count * bin_width;
  return h;
}

/// Splitting histograms for one run: internal, external, and their average.
struct SplittingHistogram {
  Histogram internal, external, combined;
  double mls_used = 1.0;
};

inline SplittingHistogram splitting_histogram(const std::vector<double>& internal,
                                              const std::vector<double>& external,
                                              double bin_width = 0.1, double lo = 0.0,
                                              double hi = 6.0) {
  SplittingHistogram out;
  out.internal = histogram(internal, bin_width, lo, hi);
  out.external = histogram(external, bin_width, lo, hi);
  std::vector<double> all(internal);
  all.insert(all.end(), external.begin(), external.end());
  out.combined = histogram(all, bin_width, lo, hi);
  return out;
}

struct CurveComparison {
  double sup_norm = 0.0;
  double chi2 = 0.0;
  std::vector<double> residuals;  // histogram minus bin-averaged curve
};

/// Compare a histogram against a density curve; the curve is averaged over
/// each bin by 5-point Simpson rather than point-sampled.
inline CurveComparison compare_curves(const Histogram& h,
                                      const std::function<double(double)>& curve) {
  CurveComparison out;
  out.residuals.resize(h.density.size());
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    const double a = h.edge(i), b = h.edge(i + 1);
    double avg = 0.0;
    static const double wts[5] = {1, 4, 2, 4, 1};
    for (int j = 0; j < 5; ++j) avg += wts[j] * curve(a + (b - a) * j / 4.0);
    avg /= 12.0;
    out.residuals[i] = h.density[i] - avg;
    out.sup_norm = std::max(out.sup_norm, std::abs(out.residuals[i]));
    const double var = std::max(avg, 1e-12) / (h.count * h.bin_width);
    out.chi2 += out.residuals[i] * out.residuals[i] / var;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov machinery

/// asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
};

/// one-sample KS against an exponential with the given mean
inline KsResult ks_exponential(std::vector<double> samples, double mean) {
  if (samples.empty() || mean <= 0.0) throw std::invalid_argument("ks_exponential: bad input");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = 1.0 - std::exp(-samples[i] / mean);
    d = std::max(d, std::abs(f - i / n));
    d = std::max(d, std::abs((i + 1) / n - f));
  }
  const double en = std::sqrt(n);
  return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

/// two-sample KS
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty input");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double en = std::sqrt(static_cast<double>(a.size()) * b.size() / (a.size() + b.size()));
  return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

// ---------------------------------------------------------------------------
// scar analysis

/// Per-edge localisation report: overlap statistics of |A_m|^2 against the
/// uniform (exponential) wave model.
struct ScarEdgeReport {
  int edge_id = 0;
  int cycle_class = 0;  // shortest directed cycle through the edge, 0 = none <= max_len
  double mean_overlap = 0.0;
  KsResult ks;             // vs exponential with the empirical mean
  double tail_mass = 0.0;  // fraction of |A_m|^2 above 0.2
  Histogram hist;          // of B * |A_m|^2 (unit-mean scale)
  std::vector<double> overlaps;
};

/// Collect |A_m|^2 on the chosen edges from Gamma+-block eigenvectors at
/// n_k random wavenumbers.
inline std::vector<ScarEdgeReport> scar_analysis(const UnidirectionalGraph& g,
                                                 const std::vector<int>& edge_ids, int n_k,
                                                 Rng& rng) {
  const GlobalScattering gs = assemble_S(g);
  const int b = gs.bprime();
  RealVector lens(b);
  for (int j = 0; j < b; ++j) lens(j) = gs.lengths[j];
  const Matrix block = gs.plus_block();

  std::vector<ScarEdgeReport> out;
  auto cycles = short_cycle_classification(g);
  for (int e : edge_ids) {
    ScarEdgeReport r;
    r.edge_id = e;
    r.cycle_class = cycles[e].value_or(0);
    r.overlaps.reserve(static_cast<std::size_t>(n_k) * b);
    out.push_back(std::move(r));
  }
  for (int s = 0; s < n_k; ++s) {
    Rng sub = rng.child(static_cast<std::uint64_t>(s));
    const double k = sub.uniform(0.0, 1e6);
    Matrix u = block;
    for (int j = 0; j < b; ++j) u.col(j) *= std::exp(cdouble(0, k * lens(j)));
    auto es = eig_unitary(u, true);
    for (auto& r : out) {
      RealVector w = amplitude_overlaps_block(es.vectors, r.edge_id);
      for (int m = 0; m < w.size(); ++m) r.overlaps.push_back(w(m));
    }
  }
  for (auto& r : out) {
    double mean = 0.0;
    long tail = 0;
    for (double w : r.overlaps) {
      mean += w;
      if (w > 0.2) ++tail;
    }
    mean /= static_cast<double>(r.overlaps.size());
    r.mean_overlap = mean;
    r.tail_mass = static_cast<double>(tail) / r.overlaps.size();
    r.ks = ks_exponential(r.overlaps, mean);
    std::vector<double> scaled(r.overlaps);
    for (double& w : scaled) w *= b;  // unit-mean scale for the histogram
    r.hist = histogram(scaled, 0.25, 0.0, 10.0);
  }
  return out;
}

}  // namespace uqg
