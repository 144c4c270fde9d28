#pragma once

#include <vector>

#include "uqg/common.hpp"
#include "uqg/parallel.hpp"
#include "uqg/quantum_map.hpp"
#include "uqg/rmt.hpp"
#include "uqg/spectra.hpp"
#include "uqg/stats.hpp"

namespace uqg {

enum class MapRoute { direct, secular };

/// Everything a splitting experiment needs about one perturbed graph.
struct MapExperimentInput {
  Matrix s_pert;       // full 2B' perturbed map
  Matrix s0;           // transparent reference at the same gamma
  RealVector lengths;  // B' split lengths
  Vector psi;          // perturbation direction (2B', rank-1 form)
  double alpha = 0.0;  // perturbation angle; pi/2 for the Neumann replacement
};

inline MapExperimentInput make_experiment_input(const GlobalScattering& gs) {
  const RankOneData r1 = rank_one_decomposition(gs);
  MapExperimentInput in;
  in.s_pert = gs.s;
  in.s0 = gs.s0;
  in.lengths.resize(gs.bprime());
  for (int j = 0; j < gs.bprime(); ++j) in.lengths(j) = gs.lengths[j];
  in.psi = r1.psi;
  in.alpha = r1.alpha;
  return in;
}

inline MapExperimentInput make_experiment_input(const NeumannReplacement& nr) {
  MapExperimentInput in;
  in.s_pert = nr.gs.s;
  in.s0 = nr.gs.s0;
  in.lengths.resize(nr.gs.bprime());
  for (int j = 0; j < nr.gs.bprime(); ++j) in.lengths(j) = nr.gs.lengths[j];
  in.psi = nr.psi;
  in.alpha = 0.5 * pi;
  return in;
}

struct SplittingRun {
  std::vector<double> internal, external;  // MLS units
  long k_samples = 0;
};

namespace detail {

/// secular-route eigenphase splittings at one k: eigen-decompose only the
/// B'-dimensional Gamma+ block of the reference and place the moved levels by
/// the exact cot secular equation with the true overlap weights
inline void secular_splittings_at_k(const MapExperimentInput& in, double k,
                                    std::vector<double>& internal, std::vector<double>& external) {
  const int b = static_cast<int>(in.lengths.size());
  Matrix u0 = in.s0.topLeftCorner(b, b);
  for (int j = 0; j < b; ++j) u0.col(j) *= std::exp(cdouble(0, k * in.lengths(j)));
  auto es = eig_unitary(u0, true);

  // weights |<eps_m | L^{-1} psi>|^2 summed over the degenerate pair; see the
  // chiral relation w = L^{-1} v* for the Gamma- partner
  RmtInstance inst;
  inst.eps = es.phases;
  inst.weights.resize(b);
  inst.nu = std::tan(in.alpha);
  for (int m = 0; m < b; ++m) {
    cdouble c_plus = 0.0, c_minus = 0.0;
    for (int j = 0; j < b; ++j) {
      if (in.psi(j) != 0.0)
        c_plus += std::conj(es.vectors(j, m)) * std::exp(cdouble(0, -k * in.lengths(j))) * in.psi(j);
      if (in.psi(j + b) != 0.0) c_minus += es.vectors(j, m) * in.psi(j + b);
    }
    inst.weights(m) = std::norm(c_plus) + std::norm(c_minus);
  }
  const auto lam = solve_secular_cot(inst, in.alpha);
  const double scale = b / two_pi;
  const bool up = in.alpha > 0.0;
  for (int i = 0; i < b; ++i) {
    const double a = inst.eps(i);
    const double bnd = (i + 1 < b) ? inst.eps(i + 1) : inst.eps(0) + two_pi;
    const double s_up = (lam[i] - a) * scale;
    const double s_dn = (bnd - lam[i]) * scale;
    internal.push_back(up ? s_up : s_dn);
    external.push_back(up ? s_dn : s_up);
  }
}

inline void direct_splittings_at_k(const MapExperimentInput& in, double k,
                                   std::vector<double>& internal, std::vector<double>& external) {
  const int b = static_cast<int>(in.lengths.size());
  RealVector dl(2 * b);
  for (int j = 0; j < b; ++j) dl(j) = dl(j + b) = in.lengths(j);
  auto pert = quantum_map_eigenphases(in.s_pert, dl, k, false);
  Matrix u0 = in.s0.topLeftCorner(b, b);
  for (int j = 0; j < b; ++j) u0.col(j) *= std::exp(cdouble(0, k * in.lengths(j)));
  auto eps = eig_unitary(u0, false);
  std::vector<double> pv(pert.phases.data(), pert.phases.data() + pert.phases.size());
  std::vector<double> ev(eps.phases.data(), eps.phases.data() + eps.phases.size());
  auto cls = classify_splittings(pv, ev, in.alpha > 0.0 ? 1 : -1, true);
  internal.insert(internal.end(), cls.internal.begin(), cls.internal.end());
  external.insert(external.end(), cls.external.begin(), cls.external.end());
}

}  // namespace detail

/// Splitting samples from the eigenphases of the quantum map at random k.
inline SplittingRun nn_dist_quantum_map(const MapExperimentInput& in, long n_samples,
                                        std::uint64_t seed, MapRoute route, int workers = 1) {
  const int b = static_cast<int>(in.lengths.size());
  const int n_k = static_cast<int>((n_samples + 2 * b - 1) / (2 * b));
  const Rng base(seed);
  struct Chunk {
    std::vector<double> internal, external;
  };
  auto chunks = parallel_map<Chunk>(n_k, workers, [&](int i) {
    Chunk c;
    Rng sub = base.child(static_cast<std::uint64_t>(i));
    const double k = sub.uniform(0.0, 1e6);
    if (route == MapRoute::secular)
      detail::secular_splittings_at_k(in, k, c.internal, c.external);
    else
      detail::direct_splittings_at_k(in, k, c.internal, c.external);
    return c;
  });
  SplittingRun run;
  run.k_samples = n_k;
  for (auto& c : chunks) {
    run.internal.insert(run.internal.end(), c.internal.begin(), c.internal.end());
    run.external.insert(run.external.end(), c.external.begin(), c.external.end());
  }
  return run;
}

/// Full nearest-neighbour spacings (no pinned/moved split) of the perturbed
/// map, for rank >= 2 perturbations.
inline std::vector<double> rank_k_spacings(const Matrix& s_pert, const RealVector& lengths,
                                           long n_samples, std::uint64_t seed, int workers = 1) {
  const int b = static_cast<int>(lengths.size());
  const int n = 2 * b;
  const int n_k = static_cast<int>((n_samples + n - 1) / n);
  RealVector dl(n);
  for (int j = 0; j < b; ++j) dl(j) = dl(j + b) = lengths(j);
  const Rng base(seed);
  auto chunks = parallel_map<std::vector<double>>(n_k, workers, [&](int i) {
    Rng sub = base.child(static_cast<std::uint64_t>(i));
    const double k = sub.uniform(0.0, 1e6);
    auto es = quantum_map_eigenphases(s_pert, dl, k, false);
    std::vector<double> sp(n);
    const double scale = n / two_pi;
    for (int m = 0; m + 1 < n; ++m) sp[m] = (es.phases(m + 1) - es.phases(m)) * scale;
    sp[n - 1] = (es.phases(0) + two_pi - es.phases(n - 1)) * scale;
    return sp;
  });
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_k) * n);
  for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

/// Splittings read off the physical k-spectrum: pinned roots are the roots of
/// the transparent reference; on the k axis the moved root precedes its pinned
/// partner when tan(alpha) > 0, so the pairing direction flips.
inline SplittingRun nn_dist_k_spectrum(const MapExperimentInput& in, long n_samples,
                                       double k_start = 10.0, int workers = 1) {
  const int b = static_cast<int>(in.lengths.size());
  RealVector dl_full(2 * b);
  for (int j = 0; j < b; ++j) dl_full(j) = dl_full(j + b) = in.lengths(j);
  const double sum_l = in.lengths.sum();
  const double mean_spacing_distinct = pi / sum_l * 2.0;  // distinct unperturbed roots
  const Matrix block = in.s0.topLeftCorner(b, b);
  RealVector dl_block = in.lengths;

  SplittingRun run;
  double k0 = k_start;
  const double window = 150.0 * mean_spacing_distinct;
  const int nu_sign_k = in.alpha > 0.0 ? -1 : 1;  // k-axis ordering is reversed
  while (static_cast<long>(run.internal.size() + run.external.size()) < n_samples) {
    auto pert = find_k_spectrum(in.s_pert, dl_full, k0, k0 + window);
    auto ref = find_k_spectrum(block, dl_block, k0, k0 + window);
    // trim to the common interior
    const double lo = std::max(pert.k_min, ref.k_min) + 2.0 * mean_spacing_distinct;
    const double hi = std::min(pert.k_max, ref.k_max) - 2.0 * mean_spacing_distinct;
    std::vector<double> eps, pr;
    for (double r : ref.roots)
      if (r >= lo && r <= hi) eps.push_back(r);
    if (eps.size() < 3) throw numerical_error("nn_dist_k_spectrum: window too small");
    for (double r : pert.roots)
      if (r >= eps.front() - 1e-7 && r <= eps.back() + 1e-7) pr.push_back(r);
    auto cls = classify_splittings(pr, eps, nu_sign_k, false);
    run.internal.insert(run.internal.end(), cls.internal.begin(), cls.internal.end());
    run.external.insert(run.external.end(), cls.external.begin(), cls.external.end());
    ++run.k_samples;
    k0 += window;
  }
  return run;
}

}  // namespace uqg
