#ifndef HEATLAB_GRAPH_HPP
#define HEATLAB_GRAPH_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace heatlab {

using Vertex = std::int32_t;

inline constexpr int kUnbounded = std::numeric_limits<int>::max();

struct Edge {
  Vertex u;
  Vertex v;
  double w;
};

struct Neighbor {
  Vertex id;
  double weight;
};

/// Immutable reversible weighted graph (Gamma, mu) stored in CSR form.
///
/// Besides the conductances, a graph carries truncation metadata: the set of
/// vertices whose neighbourhood differs from the infinite graph it stands for.
/// `boundary_distance(x)` is the graph distance from x to that set, so the ball
/// B(x,R) sees only genuine edges whenever boundary_distance(x) >= R.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  int vertex_count() const noexcept { return static_cast<int>(measure_.size()); }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

  std::span<const Neighbor> neighbors(Vertex x) const {
    return {neighbors_.data() + offsets_[x], neighbors_.data() + offsets_[x + 1]};
  }
  int degree(Vertex x) const noexcept { return offsets_[x + 1] - offsets_[x]; }

  /// mu(x), the sum of incident conductances.
  double measure(Vertex x) const noexcept { return measure_[x]; }
  const Eigen::VectorXd& measures() const noexcept { return measure_; }

  /// mu_{x,y}; zero when x and y are not adjacent.
  double weight(Vertex x, Vertex y) const;

  bool contains(Vertex x) const noexcept { return x >= 0 && x < vertex_count(); }

  // Truncation metadata.
  const std::vector<Vertex>& truncated() const noexcept { return truncated_; }
  int boundary_distance(Vertex x) const noexcept { return boundary_distance_[x]; }
  bool is_interior(Vertex x) const noexcept { return interior_[x] != 0; }
  int mask_radius() const noexcept { return mask_radius_; }
  std::vector<Vertex> interior_vertices() const;
  /// True when every vertex of B(x,R) has its untruncated neighbourhood.
  bool is_clean(Vertex x, int R) const noexcept { return boundary_distance_[x] >= R; }

  /// Returns a copy whose truncation set is `truncated`; the interior mask
  /// marks vertices at distance >= mask_radius from it.
  WeightedGraph with_truncation(std::vector<Vertex> truncated, int mask_radius) const;

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::map<std::string, Vertex>& landmarks() const noexcept { return landmarks_; }
  Vertex landmark(const std::string& name) const;
  WeightedGraph with_labels(std::vector<std::string> labels,
                            std::map<std::string, Vertex> landmarks) const;

  /// Canonical edge list (u < v), sorted.
  std::vector<Edge> edges() const;

 private:
  friend WeightedGraph build_graph(std::span<const Edge> edges, int vertex_count);

  std::vector<int> offsets_{0};
  std::vector<Neighbor> neighbors_;
  Eigen::VectorXd measure_;
  std::vector<Vertex> truncated_;
  std::vector<int> boundary_distance_;
  std::vector<char> interior_;
  int mask_radius_ = 0;
  std::vector<std::string> labels_;
  std::map<std::string, Vertex> landmarks_;
};

/// Builds a graph from an undirected edge list. Duplicate entries of the same
/// unordered pair are merged when their weights agree. `vertex_count` < 0
/// infers the count from the largest id.
WeightedGraph build_graph(std::span<const Edge> edges, int vertex_count = -1);

enum class SetKind { Ball, Annulus, Closure, Boundary, Complement, Custom };

std::string_view to_string(SetKind kind) noexcept;

/// Sorted set of vertex ids with a provenance tag.
struct VertexSet {
  std::vector<Vertex> ids;
  SetKind kind = SetKind::Custom;

  VertexSet() = default;
  /// Sorts and deduplicates.
  explicit VertexSet(std::vector<Vertex> vertices, SetKind k = SetKind::Custom);

  std::size_t size() const noexcept { return ids.size(); }
  bool empty() const noexcept { return ids.empty(); }
  bool contains(Vertex x) const;
  auto begin() const noexcept { return ids.begin(); }
  auto end() const noexcept { return ids.end(); }
};

/// Vertices of the ball grouped by distance: layer k holds d(x,.) == k.
std::vector<std::vector<Vertex>> bfs_layers(const WeightedGraph& g, Vertex x, int max_distance);

/// d(x,y) for every vertex, -1 beyond `max_distance`.
std::vector<int> distances_from(const WeightedGraph& g, Vertex x,
                                int max_distance = kUnbounded);

int distance(const WeightedGraph& g, Vertex x, Vertex y);

/// min over edges of mu_{x,y}/mu(x).
double check_p0(const WeightedGraph& g);

/// B(x,R) = {y : d(x,y) < R}.
VertexSet ball(const WeightedGraph& g, Vertex x, int R);

double measure_of(const WeightedGraph& g, const VertexSet& A);

/// V(x,R) = mu(B(x,R)).
double volume(const WeightedGraph& g, Vertex x, int R);

/// V(x,R) accumulated layer by layer; agrees with volume() exactly.
double volume_by_layers(const WeightedGraph& g, Vertex x, int R);

/// v(x,r,R) = V(x,R) - V(x,r), R > r > 0.
double annulus_volume(const WeightedGraph& g, Vertex x, int r, int R);

struct ClosureBoundary {
  VertexSet closure;
  VertexSet boundary;
};

ClosureBoundary closure_and_boundary(const WeightedGraph& g, const VertexSet& A);

VertexSet complement(const WeightedGraph& g, const VertexSet& A);

}  // namespace heatlab

#endif  // HEATLAB_GRAPH_HPP
