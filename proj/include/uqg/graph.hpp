#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "uqg/common.hpp"
#include "uqg/linalg.hpp"
#include "uqg/rng.hpp"

namespace uqg {

struct DirectedEdge {
  int tail = 0;
  int head = 0;
};

/// Metric graph with a unidirectional splitting. `edges` lists the Gamma+
/// copies; the Gamma- copy of edge j is its reversal and has the same length.
/// vertex_blocks[v] maps Gamma+ amplitudes incoming at v onto Gamma+
/// amplitudes outgoing at v; rows follow out_edges[v], columns in_edges[v]
/// (both ascending by edge index).
struct UnidirectionalGraph {
  int vertex_count = 0;
  std::vector<DirectedEdge> edges;
  std::vector<double> lengths;
  std::vector<Matrix> vertex_blocks;
  std::vector<std::vector<int>> in_edges, out_edges;

  int edge_count() const { return static_cast<int>(edges.size()); }

  void finalize() {
    in_edges.assign(vertex_count, {});
    out_edges.assign(vertex_count, {});
    for (int j = 0; j < edge_count(); ++j) {
      out_edges[edges[j].tail].push_back(j);
      in_edges[edges[j].head].push_back(j);
    }
    validate();
  }

  void validate() const {
    if (static_cast<int>(lengths.size()) != edge_count())
      throw std::invalid_argument("graph: lengths/edges size mismatch");
    for (double l : lengths)
      if (!(l > 0.0)) throw std::invalid_argument("graph: edge lengths must be positive");
    double mean = 0.0;
    for (double l : lengths) mean += l;
    mean /= static_cast<double>(lengths.size());
    if (std::abs(mean - 1.0) > 1e-12)
      throw std::invalid_argument("graph: mean edge length must be 1");
    if (static_cast<int>(vertex_blocks.size()) != vertex_count)
      throw std::invalid_argument("graph: one block per vertex required");
    for (int v = 0; v < vertex_count; ++v) {
      const auto din = static_cast<int>(in_edges[v].size());
      const auto dout = static_cast<int>(out_edges[v].size());
      if (din != dout)
        throw std::invalid_argument("graph: Gamma+ in-degree must equal out-degree at every vertex");
      if (vertex_blocks[v].rows() != dout || vertex_blocks[v].cols() != din)
        throw std::invalid_argument("graph: vertex block dimension mismatch");
      if (dout > 0 && unitarity_defect(vertex_blocks[v]) > 1e-12)
        throw std::invalid_argument("graph: vertex block is not unitary");
    }
  }
};

/// Degree-2 unidirectionality-breaking vertex on one undirected edge.
struct BackscattererPlacement {
  int edge_id = 0;
  double alpha = 0.0;  // in (-pi/2, pi/2]
  double beta = 0.0;
  double gamma = 0.0;
};

struct PerturbedGraph {
  UnidirectionalGraph base;
  std::vector<BackscattererPlacement> scatterers;
  double split_fraction = 0.5;
};

/// B values uniform on (0,1) rescaled to mean 1
inline std::vector<double> sample_edge_lengths(int b, Rng& rng) {
  if (b < 1) throw std::invalid_argument("sample_edge_lengths: need at least one edge");
  std::vector<double> l(b);
  double sum = 0.0;
  for (double& x : l) {
    do {
      x = rng.uniform();
    } while (x == 0.0);
    sum += x;
  }
  const double mean = sum / b;
  for (double& x : l) x /= mean;
  return l;
}

/// lead-basis vertex matrix [[0, U], [U^T, 0]]; symmetric unitary by construction
inline Matrix build_vertex_scatterer(const Matrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("build_vertex_scatterer: U must be square");
  if (unitarity_defect(u) > 1e-12)
    throw std::invalid_argument("build_vertex_scatterer: U must be unitary");
  const int d = static_cast<int>(u.rows());
  Matrix s = Matrix::Zero(2 * d, 2 * d);
  s.block(0, d, d, d) = u;
  s.block(d, 0, d, d) = u.transpose();
  return s;
}

/// e^{i(alpha+gamma)} [[r, t], [t, -conj(r)]] with r = i e^{i beta} sin(alpha), t = cos(alpha)
inline Matrix backscatter_matrix(double alpha, double beta, double gamma) {
  const cdouble r = cdouble(0, 1) * std::exp(cdouble(0, beta)) * std::sin(alpha);
  const cdouble t = std::cos(alpha);
  const cdouble ph = std::exp(cdouble(0, alpha + gamma));
  Matrix s(2, 2);
  s << ph * r, ph * t, ph * t, -ph * std::conj(r);
  return s;
}

namespace detail {

/// Hierholzer Euler cycle on an undirected graph given as (vertex, edge-id) adjacency.
/// Returns the edge ids in traversal order together with the oriented tails.
inline std::vector<DirectedEdge> euler_orientation(int v_count,
                                                   const std::vector<std::pair<int, int>>& und) {
  std::vector<std::vector<std::pair<int, int>>> adj(v_count);  // (other vertex, edge id)
  for (int j = 0; j < static_cast<int>(und.size()); ++j) {
    adj[und[j].first].push_back({und[j].second, j});
    adj[und[j].second].push_back({und[j].first, j});
  }
  std::vector<bool> used(und.size(), false);
  std::vector<std::size_t> next(v_count, 0);
  std::vector<int> stack{0}, tour;
  while (!stack.empty()) {
    const int v = stack.back();
    bool advanced = false;
    while (next[v] < adj[v].size()) {
      auto [w, j] = adj[v][next[v]++];
      if (used[j]) continue;
      used[j] = true;
      stack.push_back(w);
      advanced = true;
      break;
    }
    if (!advanced) {
      tour.push_back(v);
      stack.pop_back();
    }
  }
  std::reverse(tour.begin(), tour.end());
  if (tour.size() != und.size() + 1)
    throw numerical_error("euler_orientation: graph is not connected with even degrees");
  std::vector<DirectedEdge> oriented(und.size());
  std::vector<bool> seen(und.size(), false);
  for (std::size_t i = 0; i + 1 < tour.size(); ++i)
    oriented[i] = DirectedEdge{tour[i], tour[i + 1]};
  return oriented;
}

inline bool strongly_connected(int v_count, const std::vector<DirectedEdge>& edges) {
  auto reach = [&](bool forward) {
    std::vector<std::vector<int>> adj(v_count);
    for (const auto& e : edges) {
      if (forward)
        adj[e.tail].push_back(e.head);
      else
        adj[e.head].push_back(e.tail);
    }
    std::vector<bool> vis(v_count, false);
    std::queue<int> q;
    q.push(0);
    vis[0] = true;
    int n = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : adj[v])
        if (!vis[w]) {
          vis[w] = true;
          ++n;
          q.push(w);
        }
    }
    return n == v_count;
  };
  return reach(true) && reach(false);
}

}  // namespace detail

/// Fully connected simple graph on V vertices (V odd), oriented along an Euler
/// cycle so that every vertex has (V-1)/2 incoming and (V-1)/2 outgoing
/// Gamma+ edges. Blocks are Haar random.
inline UnidirectionalGraph fully_connected_graph(int v, Rng& rng) {
  if (v < 3 || v % 2 == 0)
    throw std::invalid_argument(
        "fully_connected_graph: V must be odd (vertex degree V-1 must be even "
        "for the unidirectional splitting)");
  std::vector<std::pair<int, int>> und;
  for (int a = 0; a < v; ++a)
    for (int b = a + 1; b < v; ++b) und.push_back({a, b});
  UnidirectionalGraph g;
  g.vertex_count = v;
  g.edges = detail::euler_orientation(v, und);
  g.lengths = sample_edge_lengths(static_cast<int>(g.edges.size()), rng);
  const int d = (v - 1) / 2;
  g.vertex_blocks.reserve(v);
  for (int i = 0; i < v; ++i) g.vertex_blocks.push_back(haar_unitary(d, rng));
  g.finalize();
  return g;
}

enum class BlockChoice { fixed_default, haar_identical, haar_independent };

/// Binary De Bruijn graph: 2^p vertices labelled by p-bit words, Gamma+ edges
/// follow the left-shift map (edge id 2*v + appended bit). The all-zeros and
/// all-ones vertices carry self-loops.
inline UnidirectionalGraph de_bruijn_graph(int p, BlockChoice choice, Rng& rng) {
  if (p < 2) throw std::invalid_argument("de_bruijn_graph: p must be >= 2");
  const int nv = 1 << p;
  const int mask = nv - 1;
  UnidirectionalGraph g;
  g.vertex_count = nv;
  g.edges.resize(2 * nv);
  for (int v = 0; v < nv; ++v)
    for (int c = 0; c < 2; ++c)
      g.edges[2 * v + c] = DirectedEdge{v, ((v << 1) | c) & mask};
  g.lengths = sample_edge_lengths(2 * nv, rng);
  Matrix dft(2, 2);
  dft << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  Matrix common = (choice == BlockChoice::haar_identical) ? haar_unitary(2, rng) : dft;
  g.vertex_blocks.reserve(nv);
  for (int v = 0; v < nv; ++v)
    g.vertex_blocks.push_back(choice == BlockChoice::haar_independent ? haar_unitary(2, rng)
                                                                      : common);
  g.finalize();
  return g;
}

/// Random directed multigraph with in-degree = out-degree = d/2 in Gamma+,
/// built by random stub pairing with rejection of non-strongly-connected
/// results. Multi-edges and self-loops are allowed.
inline UnidirectionalGraph random_regular_unidirectional(int v, int d, Rng& rng,
                                                         int max_retries = 1000) {
  if (v < 1 || d < 2 || d % 2 != 0)
    throw std::invalid_argument("random_regular_unidirectional: need d even and >= 2");
  const int half = d / 2;
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<int> heads;
    heads.reserve(v * half);
    for (int w = 0; w < v; ++w)
      for (int s = 0; s < half; ++s) heads.push_back(w);
    rng.shuffle(heads);
    std::vector<DirectedEdge> edges;
    edges.reserve(v * half);
    int idx = 0;
    for (int t = 0; t < v; ++t)
      for (int s = 0; s < half; ++s) edges.push_back(DirectedEdge{t, heads[idx++]});
    if (!detail::strongly_connected(v, edges)) continue;
    UnidirectionalGraph g;
    g.vertex_count = v;
    g.edges = std::move(edges);
    g.lengths = sample_edge_lengths(v * half, rng);
    g.vertex_blocks.reserve(v);
    for (int w = 0; w < v; ++w) g.vertex_blocks.push_back(haar_unitary(half, rng));
    g.finalize();
    return g;
  }
  throw numerical_error("random_regular_unidirectional: no strongly connected pairing found");
}

/// Attach a backscatterer; the host edge is split at `fraction` of its length.
inline PerturbedGraph insert_backscatterer(const UnidirectionalGraph& g,
                                           const BackscattererPlacement& placement,
                                           double fraction = 0.5) {
  if (placement.edge_id < 0 || placement.edge_id >= g.edge_count())
    throw std::invalid_argument("insert_backscatterer: invalid edge id");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("insert_backscatterer: split fraction must be in (0,1)");
  PerturbedGraph pg;
  pg.base = g;
  pg.scatterers = {placement};
  pg.split_fraction = fraction;
  return pg;
}

inline PerturbedGraph insert_backscatterers(const UnidirectionalGraph& g,
                                            const std::vector<BackscattererPlacement>& placements,
                                            double fraction = 0.5) {
  std::set<int> seen;
  for (const auto& p : placements) {
    if (p.edge_id < 0 || p.edge_id >= g.edge_count())
      throw std::invalid_argument("insert_backscatterers: invalid edge id");
    if (!seen.insert(p.edge_id).second)
      throw std::invalid_argument("insert_backscatterers: at most one scatterer per edge");
  }
  PerturbedGraph pg;
  pg.base = g;
  pg.scatterers = placements;
  pg.split_fraction = fraction;
  return pg;
}

/// Shortest directed Gamma+ cycle through each edge, or nullopt if longer
/// than max_len. Self-loops report 1.
inline std::vector<std::optional<int>> short_cycle_classification(const UnidirectionalGraph& g,
                                                                  int max_len = 4) {
  std::vector<std::optional<int>> out(g.edge_count());
  for (int j = 0; j < g.edge_count(); ++j) {
    const int start = g.edges[j].head;
    const int target = g.edges[j].tail;
    if (start == target) {
      out[j] = 1;
      continue;
    }
    // BFS over vertices along Gamma+ from head back to tail
    std::vector<int> dist(g.vertex_count, -1);
    std::queue<int> q;
    q.push(start);
    dist[start] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      if (dist[v] + 1 >= max_len) continue;
      for (int e : g.out_edges[v]) {
        int w = g.edges[e].head;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
      }
    }
    if (dist[target] >= 0 && dist[target] + 1 <= max_len) out[j] = dist[target] + 1;
  }
  return out;
}

}  // namespace uqg
