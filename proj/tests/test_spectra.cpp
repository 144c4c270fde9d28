#include <catch2/catch_amalgamated.hpp>

#include "uqg/quantum_map.hpp"
#include "uqg/spectra.hpp"

using namespace uqg;

namespace {

std::vector<double> to_vec(const RealVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

struct Setup {
  GlobalScattering gs;
  RealVector dl;   // full directed lengths
  Matrix block;    // transparent Gamma+ block
  RealVector bl;   // block lengths
};

Setup make_setup(double alpha, double beta = 0.0, double gamma = 0.0, std::uint64_t seed = 40) {
  Rng rng(seed);
  auto g = fully_connected_graph(5, rng);
  Setup s{assemble_S(insert_backscatterer(g, BackscattererPlacement{0, alpha, beta, gamma})), {},
          {}, {}};
  s.dl = s.gs.directed_lengths();
  s.block = s.gs.plus_block();
  s.bl.resize(s.gs.bprime());
  for (int j = 0; j < s.gs.bprime(); ++j) s.bl(j) = s.gs.lengths[j];
  return s;
}

EigenphaseSet block_eig(const Setup& s, double k, bool vecs = false) {
  Matrix u = s.block;
  for (int j = 0; j < u.cols(); ++j) u.col(j) *= std::exp(cdouble(0, k * s.bl(j)));
  EigenphaseSet out;
  auto es = eig_unitary(u, vecs);
  out.phases = es.phases;
  out.vectors = es.vectors;
  out.has_vectors = vecs;
  out.k = k;
  return out;
}

}  // namespace

TEST_CASE("eigenphases of a 2x2 closed form", "[spectra]") {
  // B' = 1 loop with a transparent vertex: SL = [[0, e^{ikl}], [e^{ikl}, 0]]
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  RealVector dl(2);
  dl << 0.8, 0.8;
  const double k = 2.1;
  auto es = quantum_map_eigenphases(s, dl, k, false);
  const double kl = principal_phase(k * 0.8);
  const double other = principal_phase(k * 0.8 - pi);
  RealVector expect(2);
  expect << std::min(kl, other), std::max(kl, other);
  REQUIRE(std::abs(es.phases(0) - expect(0)) < 1e-12);
  REQUIRE(std::abs(es.phases(1) - expect(1)) < 1e-12);
}

TEST_CASE("unperturbed spectrum is exactly doubly degenerate", "[spectra]") {
  auto s = make_setup(0.0);
  auto full = quantum_map_eigenphases(s.gs.s, s.dl, 7.3, false);
  for (int i = 0; i + 1 < full.phases.size(); i += 2)
    REQUIRE(full.phases(i + 1) - full.phases(i) < 1e-9);
  // and equals the block phases doubled
  auto eps = block_eig(s, 7.3);
  for (int m = 0; m < eps.phases.size(); ++m)
    REQUIRE(std::abs(full.phases(2 * m) - eps.phases(m)) < 1e-9);
}

TEST_CASE("pinned-half property at several k and alpha", "[spectra]") {
  for (double alpha : {0.3, -0.78, 1.2}) {
    auto s = make_setup(alpha, 0.4, 0.0);
    for (double k : {1.0, 12.5, 300.0}) {
      auto pert = quantum_map_eigenphases(s.gs.s, s.dl, k, false);
      auto eps = block_eig(s, k);
      int matched = 0;
      for (int i = 0; i < pert.phases.size(); ++i) {
        double best = 1e9;
        for (int m = 0; m < eps.phases.size(); ++m)
          best = std::min(best, phase_distance(pert.phases(i), eps.phases(m)));
        if (best < 1e-8) ++matched;
      }
      REQUIRE(matched == s.gs.bprime());
    }
  }
}

TEST_CASE("classification: interlacing, telescoping, label direction", "[spectra]") {
  const double k = 5.5;
  for (double alpha : {0.5, -0.5}) {
    auto s = make_setup(alpha);
    auto pert = quantum_map_eigenphases(s.gs.s, s.dl, k, false);
    auto eps = block_eig(s, k);
    auto cls = classify_splittings(to_vec(pert.phases), to_vec(eps.phases),
                                   alpha > 0 ? 1 : -1, true);
    const int b = s.gs.bprime();
    REQUIRE(static_cast<int>(cls.internal.size()) == b);
    REQUIRE(static_cast<int>(cls.external.size()) == b);
    REQUIRE(std::abs(cls.mls_used - two_pi / b) < 1e-15);
    double mean_eps_gap = 0.0;
    for (std::size_t i = 0; i < cls.internal.size(); ++i) {
      REQUIRE(cls.internal[i] >= -1e-9);
      REQUIRE(cls.external[i] >= -1e-9);
      mean_eps_gap += cls.internal[i] + cls.external[i];
    }
    // internal + external arcs tile the circle: mean gap 1 in MLS units
    REQUIRE(std::abs(mean_eps_gap / b - 1.0) < 1e-9);
  }
}

TEST_CASE("alpha = 0 classification: internal splittings vanish", "[spectra]") {
  auto s = make_setup(0.0);
  const double k = 3.0;
  auto pert = quantum_map_eigenphases(s.gs.s, s.dl, k, false);
  auto eps = block_eig(s, k);
  // perturbed = eps doubled; classification of a degenerate pair is ambiguous
  // by construction, so the spec treats alpha = 0 as the stated limit instead:
  REQUIRE_THROWS_AS(
      classify_splittings(to_vec(pert.phases), to_vec(eps.phases), 1, true),
      audit_error);
}

TEST_CASE("swap rule: alpha < 0 internal distribution equals alpha > 0 external",
          "[spectra]") {
  // with the labels tied to sign(tan alpha) the two experiments coincide up
  // to the mirror symmetry of the ensemble; check the means agree loosely
  double mean_in_pos = 0, mean_in_neg = 0;
  int cnt = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto sp = make_setup(0.46, 0.0, 0.0, 100 + trial);
    auto sn = make_setup(-0.46, 0.0, 0.0, 100 + trial);
    const double k = 2.0 + 0.37 * trial;
    auto cp = classify_splittings(
        to_vec(quantum_map_eigenphases(sp.gs.s, sp.dl, k, false).phases),
        to_vec(block_eig(sp, k).phases), 1, true);
    auto cn = classify_splittings(
        to_vec(quantum_map_eigenphases(sn.gs.s, sn.dl, k, false).phases),
        to_vec(block_eig(sn, k).phases), -1, true);
    for (double v : cp.internal) mean_in_pos += v;
    for (double v : cn.internal) mean_in_neg += v;
    cnt += static_cast<int>(cp.internal.size());
  }
  mean_in_pos /= cnt;
  mean_in_neg /= cnt;
  REQUIRE(std::abs(mean_in_pos - mean_in_neg) < 0.05);
}

TEST_CASE("amplitude overlaps: completeness and equality across the vertex", "[spectra]") {
  auto s = make_setup(0.0, 0.7, 0.0);
  auto eps = block_eig(s, 9.1, true);
  const auto& sc = s.gs.scatterers[0];
  RealVector w_in = amplitude_overlaps_block(eps.vectors, sc.in_plus);
  RealVector w_out = amplitude_overlaps_block(eps.vectors, sc.out_plus);
  REQUIRE(std::abs(w_in.sum() - 1.0) < 1e-8);
  REQUIRE((w_in - w_out).cwiseAbs().maxCoeff() < 1e-10);

  // full-map route with degenerate-pair reduction agrees
  auto full = quantum_map_eigenphases(s.gs.s, s.dl, 9.1, true);
  RealVector w_full = amplitude_overlaps(full, sc.in_plus, sc.out_plus + s.gs.bprime());
  REQUIRE(w_full.size() == w_in.size());
  std::sort(w_full.begin(), w_full.end());
  RealVector w_sorted = w_in;
  std::sort(w_sorted.begin(), w_sorted.end());
  REQUIRE((w_full - w_sorted).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("unfold", "[spectra]") {
  std::vector<double> v{1.0, 2.0, 3.0};
  auto u = unfold(v, 1.0);
  REQUIRE(u == v);
  auto half = unfold(v, 2.0);
  REQUIRE(half == std::vector<double>{0.5, 1.0, 1.5});
}

TEST_CASE("find_k_spectrum: single loop closed form with double roots", "[spectra]") {
  UnidirectionalGraph g;
  g.vertex_count = 1;
  g.edges = {DirectedEdge{0, 0}};
  g.lengths = {1.0};
  Matrix u(1, 1);
  u << 1.0;
  g.vertex_blocks = {u};
  g.finalize();
  auto gs = assemble_S(insert_backscatterer(g, BackscattererPlacement{0, 0.0, 0.0, 0.0}));
  auto ks = find_k_spectrum(gs.s, gs.directed_lengths(), 0.5, 14.0);
  // roots at 2 pi n / l, doubly counted
  std::vector<double> expect;
  for (int n = 1; n <= 2; ++n) {
    expect.push_back(two_pi * n);
    expect.push_back(two_pi * n);
  }
  REQUIRE(ks.roots.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    REQUIRE(std::abs(ks.roots[i] - expect[i]) < 1e-9);
    REQUIRE(ks.residuals[i] <= 1e-9);
  }
}

TEST_CASE("find_k_spectrum: Weyl count and residuals on a perturbed graph", "[spectra]") {
  auto s = make_setup(-0.78);
  const double sum_l = s.bl.sum();
  const double k0 = 20.0, k1 = k0 + 30.0 * pi / sum_l;  // ~30 mean spacings
  auto ks = find_k_spectrum(s.gs.s, s.dl, k0, k1);
  // the audit inside find_k_spectrum already enforces the winding count;
  // cross-check against the smooth Weyl estimate
  const double weyl = 2.0 * sum_l * (ks.k_max - ks.k_min) / two_pi;
  REQUIRE(std::abs(static_cast<double>(ks.roots.size()) - weyl) < 8.0);
  for (double r : ks.residuals) REQUIRE(r <= 1e-9);
  for (std::size_t i = 1; i < ks.roots.size(); ++i) REQUIRE(ks.roots[i] >= ks.roots[i - 1]);
}

TEST_CASE("spectrum independence of beta", "[spectra]") {
  auto s1 = make_setup(0.62, 0.0, 0.0);
  auto s2 = make_setup(0.62, pi / 3.0, 0.0);
  for (double k : {4.4, 17.0}) {
    auto p1 = quantum_map_eigenphases(s1.gs.s, s1.dl, k, false);
    auto p2 = quantum_map_eigenphases(s2.gs.s, s2.dl, k, false);
    REQUIRE((p1.phases - p2.phases).cwiseAbs().maxCoeff() < 1e-10);
  }
}
