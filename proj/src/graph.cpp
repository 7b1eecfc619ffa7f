#include "heatlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "heatlab/error.hpp"

namespace heatlab {

double WeightedGraph::weight(Vertex x, Vertex y) const {
  auto row = neighbors(x);
  auto it = std::lower_bound(row.begin(), row.end(), y,
                             [](const Neighbor& n, Vertex v) { return n.id < v; });
  return (it != row.end() && it->id == y) ? it->weight : 0.0;
}

std::vector<Vertex> WeightedGraph::interior_vertices() const {
  std::vector<Vertex> out;
  for (Vertex x = 0; x < vertex_count(); ++x)
    if (interior_[x]) out.push_back(x);
  return out;
}

WeightedGraph WeightedGraph::with_truncation(std::vector<Vertex> truncated,
                                             int mask_radius) const {
  WeightedGraph g = *this;
  std::sort(truncated.begin(), truncated.end());
  truncated.erase(std::unique(truncated.begin(), truncated.end()), truncated.end());
  for (Vertex t : truncated)
    if (!contains(t)) throw Error(ErrorCode::InvalidVertex, "truncated vertex out of range");
  g.truncated_ = std::move(truncated);
  g.mask_radius_ = mask_radius;

  const int n = vertex_count();
  g.boundary_distance_.assign(n, kUnbounded);
  std::deque<Vertex> queue;
  for (Vertex t : g.truncated_) {
    g.boundary_distance_[t] = 0;
    queue.push_back(t);
  }
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    for (const auto& nb : neighbors(v)) {
      if (g.boundary_distance_[nb.id] == kUnbounded) {
        g.boundary_distance_[nb.id] = g.boundary_distance_[v] + 1;
        queue.push_back(nb.id);
      }
    }
  }
  g.interior_.assign(n, 0);
  for (Vertex x = 0; x < n; ++x) g.interior_[x] = g.boundary_distance_[x] >= mask_radius;
  return g;
}

Vertex WeightedGraph::landmark(const std::string& name) const {
  auto it = landmarks_.find(name);
  if (it == landmarks_.end()) throw Error(ErrorCode::InvalidVertex, "no landmark '" + name + "'");
  return it->second;
}

WeightedGraph WeightedGraph::with_labels(std::vector<std::string> labels,
                                         std::map<std::string, Vertex> landmarks) const {
  if (!labels.empty() && static_cast<int>(labels.size()) != vertex_count())
    throw Error(ErrorCode::ShapeMismatch, "label table size differs from vertex count");
  for (const auto& [name, v] : landmarks)
    if (!contains(v)) throw Error(ErrorCode::InvalidVertex, "landmark '" + name + "' out of range");
  WeightedGraph g = *this;
  g.labels_ = std::move(labels);
  g.landmarks_ = std::move(landmarks);
  return g;
}

std::vector<Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (Vertex x = 0; x < vertex_count(); ++x)
    for (const auto& nb : neighbors(x))
      if (x < nb.id) out.push_back({x, nb.id, nb.weight});
  return out;
}

WeightedGraph build_graph(std::span<const Edge> edges, int vertex_count) {
  Vertex max_id = -1;
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0) throw Error(ErrorCode::InvalidVertex, "negative vertex id");
    max_id = std::max({max_id, e.u, e.v});
  }
  const int n = vertex_count < 0 ? max_id + 1 : vertex_count;
  if (n <= 0) throw Error(ErrorCode::EmptyInput, "graph has no vertices");
  if (max_id >= n) throw Error(ErrorCode::InvalidVertex, "edge endpoint exceeds vertex count");

  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.u == e.v) {
      std::ostringstream os;
      os << "self loop at vertex " << e.u;
      throw Error(ErrorCode::SelfLoop, os.str());
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      std::ostringstream os;
      os << "weight " << e.w << " on edge (" << e.u << "," << e.v << ")";
      throw Error(ErrorCode::NonPositiveWeight, os.str());
    }
    canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.w});
  }
  std::sort(canon.begin(), canon.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  std::vector<Edge> merged;
  merged.reserve(canon.size());
  for (const auto& e : canon) {
    if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) {
      if (merged.back().w != e.w) {
        std::ostringstream os;
        os << "edge (" << e.u << "," << e.v << ") listed with weights " << merged.back().w
           << " and " << e.w;
        throw Error(ErrorCode::ConflictingDuplicateEdge, os.str());
      }
      continue;
    }
    merged.push_back(e);
  }

  WeightedGraph g;
  std::vector<int> deg(n, 0);
  for (const auto& e : merged) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<int> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : merged) {
    g.neighbors_[fill[e.u]++] = {e.v, e.w};
    g.neighbors_[fill[e.v]++] = {e.u, e.w};
  }
  g.measure_ = Eigen::VectorXd::Zero(n);
  for (Vertex x = 0; x < n; ++x) {
    auto begin = g.neighbors_.begin() + g.offsets_[x];
    auto end = g.neighbors_.begin() + g.offsets_[x + 1];
    std::sort(begin, end, [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
    double s = 0.0;
    for (auto it = begin; it != end; ++it) s += it->weight;
    g.measure_[x] = s;
  }

  // connectivity
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (const auto& nb : g.neighbors(v)) {
      if (!seen[nb.id]) {
        seen[nb.id] = 1;
        ++reached;
        stack.push_back(nb.id);
      }
    }
  }
  if (reached != n) {
    std::ostringstream os;
    os << "graph has " << n << " vertices but vertex 0 reaches only " << reached;
    throw Error(ErrorCode::DisconnectedGraph, os.str());
  }
  return g.with_truncation({}, 0);
}

std::string_view to_string(SetKind kind) noexcept {
  switch (kind) {
    case SetKind::Ball: return "ball";
    case SetKind::Annulus: return "annulus";
    case SetKind::Closure: return "closure";
    case SetKind::Boundary: return "boundary";
    case SetKind::Complement: return "complement";
    case SetKind::Custom: return "custom";
  }
  return "custom";
}

VertexSet::VertexSet(std::vector<Vertex> vertices, SetKind k) : ids(std::move(vertices)), kind(k) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

bool VertexSet::contains(Vertex x) const { return std::binary_search(ids.begin(), ids.end(), x); }

namespace {

void require_vertex(const WeightedGraph& g, Vertex x) {
  if (!g.contains(x)) {
    std::ostringstream os;
    os << "vertex " << x << " not in graph of " << g.vertex_count() << " vertices";
    throw Error(ErrorCode::InvalidVertex, os.str());
  }
}

}  // namespace

std::vector<std::vector<Vertex>> bfs_layers(const WeightedGraph& g, Vertex x, int max_distance) {
  require_vertex(g, x);
  std::vector<std::vector<Vertex>> layers;
  if (max_distance < 0) return layers;
  std::vector<char> seen(g.vertex_count(), 0);
  layers.push_back({x});
  seen[x] = 1;
  while (static_cast<int>(layers.size()) <= max_distance) {
    std::vector<Vertex> next;
    for (Vertex v : layers.back())
      for (const auto& nb : g.neighbors(v))
        if (!seen[nb.id]) {
          seen[nb.id] = 1;
          next.push_back(nb.id);
        }
    if (next.empty()) break;
    layers.push_back(std::move(next));
  }
  return layers;
}

std::vector<int> distances_from(const WeightedGraph& g, Vertex x, int max_distance) {
  require_vertex(g, x);
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<Vertex> queue{x};
  dist[x] = 0;
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    if (dist[v] >= max_distance) continue;
    for (const auto& nb : g.neighbors(v))
      if (dist[nb.id] < 0) {
        dist[nb.id] = dist[v] + 1;
        queue.push_back(nb.id);
      }
  }
  return dist;
}

int distance(const WeightedGraph& g, Vertex x, Vertex y) {
  require_vertex(g, y);
  return distances_from(g, x)[y];
}

double check_p0(const WeightedGraph& g) {
  double p0 = 1.0;
  for (Vertex x = 0; x < g.vertex_count(); ++x)
    for (const auto& nb : g.neighbors(x)) p0 = std::min(p0, nb.weight / g.measure(x));
  return p0;
}

VertexSet ball(const WeightedGraph& g, Vertex x, int R) {
  std::vector<Vertex> ids;
  for (auto& layer : bfs_layers(g, x, R - 1)) ids.insert(ids.end(), layer.begin(), layer.end());
  return VertexSet(std::move(ids), SetKind::Ball);
}

double measure_of(const WeightedGraph& g, const VertexSet& A) {
  double s = 0.0;
  for (Vertex y : A) s += g.measure(y);
  return s;
}

double volume(const WeightedGraph& g, Vertex x, int R) {
  if (R <= 0) throw Error(ErrorCode::RadiusOrderViolation, "radius must be positive");
  return measure_of(g, ball(g, x, R));
}

double volume_by_layers(const WeightedGraph& g, Vertex x, int R) {
  if (R <= 0) throw Error(ErrorCode::RadiusOrderViolation, "radius must be positive");
  // Same summation order as volume(): ascending vertex id.
  std::vector<Vertex> ids;
  for (auto& layer : bfs_layers(g, x, R - 1)) ids.insert(ids.end(), layer.begin(), layer.end());
  std::sort(ids.begin(), ids.end());
  double s = 0.0;
  for (Vertex y : ids) s += g.measure(y);
  return s;
}

double annulus_volume(const WeightedGraph& g, Vertex x, int r, int R) {
  if (r <= 0 || r >= R) {
    std::ostringstream os;
    os << "annulus needs R > r > 0, got r=" << r << " R=" << R;
    throw Error(ErrorCode::RadiusOrderViolation, os.str());
  }
  return volume(g, x, R) - volume(g, x, r);
}

ClosureBoundary closure_and_boundary(const WeightedGraph& g, const VertexSet& A) {
  if (A.empty()) throw Error(ErrorCode::EmptyInput, "closure of an empty set");
  std::vector<char> in(g.vertex_count(), 0);
  for (Vertex x : A) {
    require_vertex(g, x);
    in[x] = 1;
  }
  std::vector<Vertex> closure(A.ids);
  std::vector<Vertex> boundary;
  for (Vertex x : A)
    for (const auto& nb : g.neighbors(x))
      if (!in[nb.id]) {
        in[nb.id] = 2;
        boundary.push_back(nb.id);
      }
  closure.insert(closure.end(), boundary.begin(), boundary.end());
  return {VertexSet(std::move(closure), SetKind::Closure),
          VertexSet(std::move(boundary), SetKind::Boundary)};
}

VertexSet complement(const WeightedGraph& g, const VertexSet& A) {
  std::vector<Vertex> out;
  for (Vertex x = 0; x < g.vertex_count(); ++x)
    if (!A.contains(x)) out.push_back(x);
  return VertexSet(std::move(out), SetKind::Complement);
}

}  // namespace heatlab
