#include "heatlab/graph_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "heatlab/error.hpp"

namespace heatlab {

namespace {

std::string format_weight(double w) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

}  // namespace

WeightedGraph read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  int vertices = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "vertices") {
      if (!(ls >> vertices) || vertices <= 0)
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad vertex count");
      continue;
    }
    Edge e{};
    try {
      std::size_t used = 0;
      e.u = std::stoi(first, &used);
      if (used != first.size()) throw std::invalid_argument(first);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 'u v w'");
    }
    if (!(ls >> e.v >> e.w))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 'u v w'");
    std::string extra;
    if (ls >> extra)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": trailing tokens");
    edges.push_back(e);
  }
  if (vertices < 0) throw Error(ErrorCode::ParseError, "missing 'vertices N' header");
  return build_graph(edges, vertices);
}

WeightedGraph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open graph file '" + path.string() + "'");
  return read_edge_list(in);
}

void write_edge_list(const WeightedGraph& g, std::ostream& out) {
  out << "vertices " << g.vertex_count() << "\n";
  for (const auto& e : g.edges()) out << e.u << " " << e.v << " " << format_weight(e.w) << "\n";
}

nlohmann::json graph_sidecar(const WeightedGraph& g) {
  nlohmann::json j;
  j["vertices"] = g.vertex_count();
  j["labels"] = g.labels();
  j["landmarks"] = g.landmarks();
  j["truncated"] = g.truncated();
  j["mask_radius"] = g.mask_radius();
  std::vector<Vertex> interior;
  for (Vertex x = 0; x < g.vertex_count(); ++x)
    if (g.is_interior(x)) interior.push_back(x);
  j["interior"] = interior;
  return j;
}

WeightedGraph apply_sidecar(const WeightedGraph& g, const nlohmann::json& sidecar) {
  try {
    if (sidecar.at("vertices").get<int>() != g.vertex_count())
      throw Error(ErrorCode::ShapeMismatch, "sidecar vertex count differs from edge list");
    auto labeled = g.with_labels(sidecar.value("labels", std::vector<std::string>{}),
                                 sidecar.value("landmarks", std::map<std::string, Vertex>{}));
    return labeled.with_truncation(sidecar.value("truncated", std::vector<Vertex>{}),
                                   sidecar.value("mask_radius", 0));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("graph sidecar: ") + e.what());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& graph_path) {
  return std::filesystem::path(graph_path.string() + ".json");
}

WeightedGraph load_graph(const std::filesystem::path& path) {
  WeightedGraph g = read_edge_list(path);
  auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream in(side);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "sidecar '" + side.string() + "': " + e.what());
    }
    g = apply_sidecar(g, j);
  }
  return g;
}

void save_graph(const WeightedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  write_edge_list(g, out);
  std::ofstream side(sidecar_path(path));
  if (!side) throw Error(ErrorCode::IoError, "cannot write sidecar for '" + path.string() + "'");
  side << graph_sidecar(g).dump(1) << "\n";
}

}  // namespace heatlab
