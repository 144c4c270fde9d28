#pragma once

#include <vector>

#include "uqg/common.hpp"
#include "uqg/graph.hpp"

namespace uqg {

/// Directed-edge indexing of the assembled map: Gamma+ edges occupy rows and
/// columns 0..B'-1 in split-edge order, the Gamma- reversal of edge j sits at
/// j+B'. S maps incoming directed amplitudes onto outgoing ones, entry
/// S[d_out, d_in] being the vertex amplitude at head(d_in) = tail(d_out).
struct GlobalScattering {
  Matrix s;             // perturbed map (scatterers at their alpha, gamma)
  Matrix s0;            // transparent reference (alpha = 0, same gamma)
  std::vector<DirectedEdge> edges;  // B' Gamma+ split edges
  std::vector<double> lengths;      // B' split lengths
  struct ScattererIndex {
    int in_plus;   // Gamma+ edge into the scatterer vertex (e1)
    int out_plus;  // Gamma+ edge out of the scatterer vertex (e2)
    double alpha, beta, gamma;
  };
  std::vector<ScattererIndex> scatterers;

  int bprime() const { return static_cast<int>(edges.size()); }

  /// diagonal lengths for the full 2B'-dimensional propagation matrix
  RealVector directed_lengths() const {
    const int b = bprime();
    RealVector l(2 * b);
    for (int j = 0; j < b; ++j) l(j) = l(j + b) = lengths[j];
    return l;
  }

  /// Gamma+ block of the transparent reference (the curly-S of the block form)
  Matrix plus_block() const { return s0.topLeftCorner(bprime(), bprime()); }
};

/// diag(e^{i k l_1}, ..., e^{i k l_n})
inline Matrix propagation_matrix(const RealVector& directed_lengths, double k) {
  const auto n = directed_lengths.size();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) l(i, i) = std::exp(cdouble(0, k * directed_lengths(i)));
  return l;
}

namespace detail {

struct SplitLayout {
  std::vector<DirectedEdge> edges;
  std::vector<double> lengths;
  std::vector<GlobalScattering::ScattererIndex> scat;
  int vertex_count;  // original vertices first, scatterer vertices appended
};

inline SplitLayout split_edges(const PerturbedGraph& pg) {
  SplitLayout out;
  out.vertex_count = pg.base.vertex_count + static_cast<int>(pg.scatterers.size());
  std::vector<int> scat_on_edge(pg.base.edge_count(), -1);
  for (int i = 0; i < static_cast<int>(pg.scatterers.size()); ++i) {
    const int e = pg.scatterers[i].edge_id;
    if (scat_on_edge[e] >= 0)
      throw std::invalid_argument("assemble: at most one scatterer per edge");
    scat_on_edge[e] = i;
  }
  int next_vertex = pg.base.vertex_count;
  for (int j = 0; j < pg.base.edge_count(); ++j) {
    const auto& e = pg.base.edges[j];
    const int si = scat_on_edge[j];
    if (si < 0) {
      out.edges.push_back(e);
      out.lengths.push_back(pg.base.lengths[j]);
    } else {
      const int x = next_vertex++;
      const auto& p = pg.scatterers[si];
      const int e1 = static_cast<int>(out.edges.size());
      out.edges.push_back(DirectedEdge{e.tail, x});
      out.lengths.push_back(pg.base.lengths[j] * pg.split_fraction);
      const int e2 = static_cast<int>(out.edges.size());
      out.edges.push_back(DirectedEdge{x, e.head});
      out.lengths.push_back(pg.base.lengths[j] * (1.0 - pg.split_fraction));
      out.scat.push_back({e1, e2, p.alpha, p.beta, p.gamma});
    }
  }
  return out;
}

/// write the block-form entries for an original vertex into S
inline void place_vertex_block(Matrix& s, const Matrix& u, const std::vector<int>& ins,
                               const std::vector<int>& outs, int bprime) {
  for (std::size_t a = 0; a < ins.size(); ++a)
    for (std::size_t b = 0; b < outs.size(); ++b) {
      s(outs[b], ins[a]) = u(b, a);                          // Gamma+ block
      s(ins[a] + bprime, outs[b] + bprime) = u(b, a);        // Gamma- block = transpose
    }
}

inline void place_scatterer(Matrix& s, const GlobalScattering::ScattererIndex& sc, int bprime,
                            bool transparent) {
  const double alpha = transparent ? 0.0 : sc.alpha;
  const cdouble r = cdouble(0, 1) * std::exp(cdouble(0, sc.beta)) * std::sin(alpha);
  const cdouble t = std::cos(alpha);
  const cdouble ph = std::exp(cdouble(0, alpha + sc.gamma));
  const int e1 = sc.in_plus, e2 = sc.out_plus;
  s(e2, e1) = ph * t;                       // Gamma+ transmission
  s(e1 + bprime, e2 + bprime) = ph * t;     // Gamma- transmission
  s(e1 + bprime, e1) = -ph * std::conj(r);  // backscatter Gamma+ -> Gamma-
  s(e2, e2 + bprime) = ph * r;              // backscatter Gamma- -> Gamma+
}

}  // namespace detail

/// Assemble the 2B'x2B' internal scattering matrix (and its transparent
/// reference) for a graph with zero or more backscatterers.
inline GlobalScattering assemble_S(const PerturbedGraph& pg) {
  pg.base.validate();
  auto layout = detail::split_edges(pg);
  const int b = static_cast<int>(layout.edges.size());
  GlobalScattering out;
  out.edges = layout.edges;
  out.lengths = layout.lengths;
  out.scatterers = layout.scat;
  out.s = Matrix::Zero(2 * b, 2 * b);

  // per-vertex in/out lists over split edges (ascending edge index)
  std::vector<std::vector<int>> ins(pg.base.vertex_count), outs(pg.base.vertex_count);
  for (int j = 0; j < b; ++j) {
    if (layout.edges[j].tail < pg.base.vertex_count) outs[layout.edges[j].tail].push_back(j);
    if (layout.edges[j].head < pg.base.vertex_count) ins[layout.edges[j].head].push_back(j);
  }
  for (int v = 0; v < pg.base.vertex_count; ++v) {
    if (ins[v].size() != outs[v].size())
      throw numerical_error("assemble_S: inconsistent edge indexing at vertex");
    detail::place_vertex_block(out.s, pg.base.vertex_blocks[v], ins[v], outs[v], b);
  }
  out.s0 = out.s;
  for (const auto& sc : layout.scat) {
    detail::place_scatterer(out.s, sc, b, false);
    detail::place_scatterer(out.s0, sc, b, true);
  }
  if (unitarity_defect(out.s) > 1e-12 || unitarity_defect(out.s0) > 1e-12)
    throw numerical_error("assemble_S: assembled matrix is not unitary");
  return out;
}

inline GlobalScattering assemble_S(const UnidirectionalGraph& g) {
  PerturbedGraph pg;
  pg.base = g;
  return assemble_S(pg);
}

/// Rank-1 form S = S0 exp(2 i alpha |psi><psi|) of a single-scatterer graph.
struct RankOneData {
  Matrix s0;
  Vector psi;  // support on the two incoming directions at the scatterer
  double alpha;
};

inline RankOneData rank_one_decomposition(const GlobalScattering& gs) {
  if (gs.scatterers.size() != 1)
    throw std::invalid_argument("rank_one_decomposition: exactly one scatterer required");
  const auto& sc = gs.scatterers[0];
  const int b = gs.bprime();
  RankOneData out;
  out.s0 = gs.s0;
  out.alpha = sc.alpha;
  out.psi = Vector::Zero(2 * b);
  out.psi(sc.in_plus) = std::exp(cdouble(0, sc.beta / 2)) / std::sqrt(2.0);          // |in+> = e1
  out.psi(sc.out_plus + b) = std::exp(cdouble(0, -sc.beta / 2)) / std::sqrt(2.0);    // |in-> = rev(e2)
  return out;
}

inline Matrix rank_one_reconstruct(const RankOneData& r) {
  const cdouble c = std::exp(cdouble(0, 2.0 * r.alpha)) - 1.0;
  return r.s0 + c * (r.s0 * r.psi) * r.psi.adjoint();
}

/// Neumann replacement at a vertex with four edge-ends: the local lead matrix
/// becomes 2/d - delta (d = 4). The returned reference s0 carries U_v = I_2,
/// against which the replacement is the exact alpha = pi/2 rank-1 perturbation
/// with psi = (-|in+_1> + |in+_2> - |in-_1> + |in-_2>)/2.
struct NeumannReplacement {
  GlobalScattering gs;
  Vector psi;
};

inline NeumannReplacement neumann_replacement(const UnidirectionalGraph& g, int vertex_id) {
  if (vertex_id < 0 || vertex_id >= g.vertex_count)
    throw std::invalid_argument("neumann_replacement: invalid vertex");
  const auto& ins = g.in_edges[vertex_id];
  const auto& outs = g.out_edges[vertex_id];
  if (ins.size() + outs.size() != 4)
    throw std::invalid_argument("neumann_replacement: vertex must have 4 edge-ends");

  UnidirectionalGraph ref = g;
  ref.vertex_blocks[vertex_id] = Matrix::Identity(2, 2);
  GlobalScattering out = assemble_S(ref);
  const int b = out.bprime();

  // overwrite the vertex entries of the perturbed matrix with the Neumann leads
  // lead order (out-edge ends, in-edge ends); incoming direction on an out-end
  // is the Gamma- reversal, on an in-end the Gamma+ edge itself
  auto din = [&](int lead) { return lead < 2 ? outs[lead] + b : ins[lead - 2]; };
  auto dout = [&](int lead) { return lead < 2 ? outs[lead] : ins[lead - 2] + b; };
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c) out.s(dout(a), din(c)) = (a == c) ? -0.5 : 0.5;
  if (unitarity_defect(out.s) > 1e-12)
    throw numerical_error("neumann_replacement: matrix is not unitary");

  NeumannReplacement nr;
  nr.psi = Vector::Zero(2 * b);
  nr.psi(ins[0]) = -0.5;
  nr.psi(ins[1]) = 0.5;
  nr.psi(outs[0] + b) = -0.5;
  nr.psi(outs[1] + b) = 0.5;
  nr.gs = std::move(out);
  return nr;
}

}  // namespace uqg
