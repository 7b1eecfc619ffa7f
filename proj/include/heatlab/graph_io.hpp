#ifndef HEATLAB_GRAPH_IO_HPP
#define HEATLAB_GRAPH_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "heatlab/graph.hpp"

namespace heatlab {

// Edge-list text format:
//   # comment
//   vertices N
//   u v w
// Weights are written with 17 significant digits so a round trip is exact.

WeightedGraph read_edge_list(std::istream& in);
WeightedGraph read_edge_list(const std::filesystem::path& path);
void write_edge_list(const WeightedGraph& g, std::ostream& out);

/// Labels, landmarks, truncation set and interior mask.
nlohmann::json graph_sidecar(const WeightedGraph& g);
WeightedGraph apply_sidecar(const WeightedGraph& g, const nlohmann::json& sidecar);

/// Sidecar path convention: "<graph path>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& graph_path);

/// Reads the edge list and, when present, its sidecar.
WeightedGraph load_graph(const std::filesystem::path& path);
void save_graph(const WeightedGraph& g, const std::filesystem::path& path);

}  // namespace heatlab

#endif  // HEATLAB_GRAPH_IO_HPP
