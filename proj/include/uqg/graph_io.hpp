#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "uqg/graph.hpp"

namespace uqg {

namespace detail {

/// decimal with 17 significant digits: round-trips doubles bit-faithfully
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

/// Serialize graph plus scatterers to JSON. Both directions of every edge are
/// listed (the Gamma- copy carries the same length); lengths are written as
/// decimal with 17 significant digits.
inline std::string graph_to_json(const PerturbedGraph& pg) {
  const auto& g = pg.base;
  std::ostringstream os;
  os << "{\n  \"format\": \"uqgraph-1\",\n";
  os << "  \"vertex_count\": " << g.vertex_count << ",\n";
  os << "  \"split_fraction\": " << detail::fmt17(pg.split_fraction) << ",\n";
  os << "  \"edges\": [\n";
  for (int j = 0; j < g.edge_count(); ++j) {
    os << "    {\"tail\": " << g.edges[j].tail << ", \"head\": " << g.edges[j].head
       << ", \"length\": " << detail::fmt17(g.lengths[j]) << ", \"tag\": \"+\"},\n";
  }
  for (int j = 0; j < g.edge_count(); ++j) {
    os << "    {\"tail\": " << g.edges[j].head << ", \"head\": " << g.edges[j].tail
       << ", \"length\": " << detail::fmt17(g.lengths[j]) << ", \"tag\": \"-\"}";
    os << (j + 1 < g.edge_count() ? ",\n" : "\n");
  }
  os << "  ],\n  \"vertex_blocks\": [\n";
  for (int v = 0; v < g.vertex_count; ++v) {
    os << "    [";
    const Matrix& u = g.vertex_blocks[v];
    for (int r = 0; r < u.rows(); ++r)
      for (int c = 0; c < u.cols(); ++c) {
        os << "[" << detail::fmt17(u(r, c).real()) << ", " << detail::fmt17(u(r, c).imag()) << "]";
        if (r + 1 < u.rows() || c + 1 < u.cols()) os << ", ";
      }
    os << "]" << (v + 1 < g.vertex_count ? ",\n" : "\n");
  }
  os << "  ],\n  \"scatterers\": [\n";
  for (std::size_t i = 0; i < pg.scatterers.size(); ++i) {
    const auto& p = pg.scatterers[i];
    os << "    {\"edge_id\": " << p.edge_id << ", \"alpha\": " << detail::fmt17(p.alpha)
       << ", \"beta\": " << detail::fmt17(p.beta) << ", \"gamma\": " << detail::fmt17(p.gamma)
       << "}" << (i + 1 < pg.scatterers.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

inline std::string graph_to_json(const UnidirectionalGraph& g) {
  PerturbedGraph pg;
  pg.base = g;
  return graph_to_json(pg);
}

inline PerturbedGraph graph_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("format", "") != "uqgraph-1")
    throw std::invalid_argument("graph_from_json: unknown format");
  PerturbedGraph pg;
  auto& g = pg.base;
  g.vertex_count = j.at("vertex_count").get<int>();
  pg.split_fraction = j.value("split_fraction", 0.5);
  for (const auto& e : j.at("edges")) {
    if (e.at("tag").get<std::string>() != "+") continue;
    g.edges.push_back(DirectedEdge{e.at("tail").get<int>(), e.at("head").get<int>()});
    g.lengths.push_back(e.at("length").get<double>());
  }
  for (const auto& blk : j.at("vertex_blocks")) {
    const auto n2 = blk.size();
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n2))));
    if (static_cast<std::size_t>(d) * d != n2)
      throw std::invalid_argument("graph_from_json: block is not square");
    Matrix u(d, d);
    std::size_t idx = 0;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c, ++idx)
        u(r, c) = cdouble(blk[idx][0].get<double>(), blk[idx][1].get<double>());
    g.vertex_blocks.push_back(std::move(u));
  }
  for (const auto& s : j.at("scatterers")) {
    pg.scatterers.push_back(BackscattererPlacement{
        s.at("edge_id").get<int>(), s.at("alpha").get<double>(), s.at("beta").get<double>(),
        s.at("gamma").get<double>()});
  }
  g.finalize();
  return pg;
}

inline void save_graph(const PerturbedGraph& pg, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_graph: cannot open " + path);
  f << graph_to_json(pg);
}

inline PerturbedGraph load_graph(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_graph: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return graph_from_json(ss.str());
}

}  // namespace uqg
