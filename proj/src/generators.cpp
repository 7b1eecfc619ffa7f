#include "heatlab/generators.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "heatlab/error.hpp"
#include "heatlab/graph_io.hpp"

namespace heatlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int default_mask(int clean_radius, int margin, int r_max) {
  if (r_max > 0) return margin * r_max;
  return std::max(1, clean_radius / std::max(1, margin)) * margin;
}

std::string coord_label(std::initializer_list<int> coords) {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (int c : coords) {
    if (!first) os << ",";
    os << c;
    first = false;
  }
  os << ")";
  return os.str();
}

using Point = std::array<int, 2>;

/// Numbers planar points in lexicographic order and returns the edge list.
struct PointGraph {
  std::map<Point, Vertex> index;
  std::vector<std::pair<Point, Point>> segments;

  WeightedGraph build(std::vector<std::string>& labels) {
    std::vector<Point> pts;
    for (const auto& s : segments) {
      pts.push_back(s.first);
      pts.push_back(s.second);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (std::size_t i = 0; i < pts.size(); ++i) index[pts[i]] = static_cast<Vertex>(i);
    labels.clear();
    for (const auto& p : pts) labels.push_back(coord_label({p[0], p[1]}));
    std::vector<Edge> edges;
    edges.reserve(segments.size());
    for (const auto& [a, b] : segments) edges.push_back({index.at(a), index.at(b), 1.0});
    return build_graph(edges, static_cast<int>(pts.size()));
  }
};

}  // namespace

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::Lattice: return "lattice";
    case Family::Gasket: return "gasket";
    case Family::Vicsek: return "vicsek";
    case Family::File: return "file";
  }
  return "lattice";
}

Family family_from_string(const std::string& name) {
  if (name == "lattice") return Family::Lattice;
  if (name == "gasket") return Family::Gasket;
  if (name == "vicsek") return Family::Vicsek;
  if (name == "file") return Family::File;
  throw Error(ErrorCode::UsageError, "unknown family '" + name + "'");
}

WeightScheme WeightScheme::parse(const std::string& descriptor) {
  WeightScheme s;
  if (descriptor.empty() || descriptor == "unit") return s;
  std::istringstream is(descriptor);
  std::string kind, lo, hi, seed;
  std::getline(is, kind, ':');
  std::getline(is, lo, ':');
  std::getline(is, hi, ':');
  std::getline(is, seed, ':');
  if (kind != "uniform" || lo.empty() || hi.empty())
    throw Error(ErrorCode::UsageError,
                "weight scheme must be 'unit' or 'uniform:lo:hi[:seed]', got '" + descriptor + "'");
  s.kind = Kind::Uniform;
  s.low = std::stod(lo);
  s.high = std::stod(hi);
  s.seed = seed.empty() ? 0 : std::stoull(seed);
  if (!(s.low > 0.0) || s.high < s.low)
    throw Error(ErrorCode::NonPositiveWeight, "uniform weights need 0 < lo <= hi");
  return s;
}

std::string WeightScheme::describe() const {
  if (kind == Kind::Unit) return "unit";
  std::ostringstream os;
  os.precision(17);
  os << "uniform:" << low << ":" << high << ":" << seed;
  return os.str();
}

WeightedGraph lattice(int dim, int side, int margin, int r_max) {
  if (dim < 1 || dim > 3) throw Error(ErrorCode::SizeTooSmall, "lattice dimension must be 1, 2 or 3");
  if (side < 5) throw Error(ErrorCode::SizeTooSmall, "lattice side must be >= 5");
  if (side % 2 == 0) throw Error(ErrorCode::SizeTooSmall, "lattice side must be odd so a center exists");

  const int half = side / 2;
  long n = 1;
  for (int k = 0; k < dim; ++k) n *= side;
  std::array<long, 3> stride{1, side, static_cast<long>(side) * side};
  auto coord = [&](long id, int axis) { return static_cast<int>((id / stride[axis]) % side); };

  std::vector<Edge> edges;
  std::vector<Vertex> shell;
  std::vector<std::string> labels(n);
  for (long id = 0; id < n; ++id) {
    bool on_shell = false;
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      c[a] = coord(id, a);
      if (c[a] == 0 || c[a] == side - 1) on_shell = true;
      if (c[a] + 1 < side)
        edges.push_back({static_cast<Vertex>(id), static_cast<Vertex>(id + stride[a]), 1.0});
    }
    if (on_shell) shell.push_back(static_cast<Vertex>(id));
    if (dim == 1) labels[id] = coord_label({c[0] - half});
    else if (dim == 2) labels[id] = coord_label({c[0] - half, c[1] - half});
    else labels[id] = coord_label({c[0] - half, c[1] - half, c[2] - half});
  }
  long center = 0;
  for (int a = 0; a < dim; ++a) center += half * stride[a];

  auto g = build_graph(edges, static_cast<int>(n));
  return g.with_labels(std::move(labels), {{"center", static_cast<Vertex>(center)}})
      .with_truncation(std::move(shell), default_mask(half, margin, r_max));
}

WeightedGraph sierpinski_gasket(int level, int level_cap, int margin, int r_max) {
  if (level < 1) throw Error(ErrorCode::SizeTooSmall, "gasket level must be >= 1");
  if (level > level_cap) {
    std::ostringstream os;
    os << "gasket level " << level << " exceeds cap " << level_cap;
    throw Error(ErrorCode::LevelTooLarge, os.str());
  }
  const int side = 1 << level;
  // Triangular coordinates: apex (0,0), far corners (side,0) and (0,side).
  std::vector<std::array<Point, 3>> tris{{Point{0, 0}, Point{side, 0}, Point{0, side}}};
  for (int l = 0; l < level; ++l) {
    std::vector<std::array<Point, 3>> next;
    next.reserve(tris.size() * 3);
    for (const auto& [a, b, c] : tris) {
      Point ab{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
      Point bc{(b[0] + c[0]) / 2, (b[1] + c[1]) / 2};
      Point ca{(c[0] + a[0]) / 2, (c[1] + a[1]) / 2};
      next.push_back({a, ab, ca});
      next.push_back({ab, b, bc});
      next.push_back({ca, bc, c});
    }
    tris = std::move(next);
  }
  PointGraph pg;
  for (const auto& [a, b, c] : tris) {
    pg.segments.push_back({a, b});
    pg.segments.push_back({b, c});
    pg.segments.push_back({c, a});
  }
  std::vector<std::string> labels;
  auto g = pg.build(labels);
  Vertex apex = pg.index.at({0, 0});
  Vertex cb = pg.index.at({side, 0});
  Vertex cc = pg.index.at({0, side});
  return g.with_labels(std::move(labels), {{"apex", apex}, {"corner_b", cb}, {"corner_c", cc}})
      .with_truncation({cb, cc}, default_mask(side, margin, r_max));
}

WeightedGraph vicsek_tree(int level, int level_cap, int margin, int r_max) {
  if (level < 1) throw Error(ErrorCode::SizeTooSmall, "vicsek level must be >= 1");
  if (level > level_cap) {
    std::ostringstream os;
    os << "vicsek level " << level << " exceeds cap " << level_cap;
    throw Error(ErrorCode::LevelTooLarge, os.str());
  }
  std::vector<std::pair<Point, Point>> segs{{{0, 0}, {1, 0}}, {{0, 0}, {-1, 0}},
                                            {{0, 0}, {0, 1}}, {{0, 0}, {0, -1}}};
  int half = 1;  // center-to-tip distance
  for (int l = 1; l < level; ++l) {
    const int s = 2 * half + 1;
    const std::array<Point, 4> dirs{Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}};
    std::vector<std::pair<Point, Point>> next = segs;
    for (const auto& d : dirs) {
      for (const auto& [a, b] : segs)
        next.push_back({Point{a[0] + s * d[0], a[1] + s * d[1]},
                        Point{b[0] + s * d[0], b[1] + s * d[1]}});
      next.push_back({Point{half * d[0], half * d[1]}, Point{(half + 1) * d[0], (half + 1) * d[1]}});
    }
    segs = std::move(next);
    half = 3 * half + 1;
  }
  PointGraph pg;
  pg.segments = std::move(segs);
  std::vector<std::string> labels;
  auto g = pg.build(labels);
  std::vector<Vertex> tips{pg.index.at({half, 0}), pg.index.at({-half, 0}),
                           pg.index.at({0, half}), pg.index.at({0, -half})};
  return g.with_labels(std::move(labels), {{"center", pg.index.at({0, 0})}})
      .with_truncation(std::move(tips), default_mask(half, margin, r_max));
}

WeightedGraph glue(const WeightedGraph& g1, const WeightedGraph& g2, Vertex x1, Vertex x2) {
  if (!g1.contains(x1) || !g2.contains(x2))
    throw Error(ErrorCode::InvalidVertex, "glue vertex out of range");
  const int n1 = g1.vertex_count();
  auto map2 = [&](Vertex v) -> Vertex {
    if (v == x2) return x1;
    return n1 + (v < x2 ? v : v - 1);
  };
  std::vector<Edge> edges = g1.edges();
  for (const auto& e : g2.edges()) edges.push_back({map2(e.u), map2(e.v), e.w});
  const int n = n1 + g2.vertex_count() - 1;
  auto g = build_graph(edges, n);

  std::vector<std::string> labels(n);
  for (Vertex v = 0; v < n1; ++v)
    labels[v] = "a:" + (g1.labels().empty() ? std::to_string(v) : g1.labels()[v]);
  for (Vertex v = 0; v < g2.vertex_count(); ++v) {
    std::string l = "b:" + (g2.labels().empty() ? std::to_string(v) : g2.labels()[v]);
    if (v == x2) labels[x1] += "|" + l;
    else labels[map2(v)] = std::move(l);
  }
  std::map<std::string, Vertex> marks{{"junction", x1}};
  for (const auto& [k, v] : g1.landmarks()) marks["a:" + k] = v;
  for (const auto& [k, v] : g2.landmarks()) marks["b:" + k] = map2(v);

  std::vector<Vertex> trunc;
  for (Vertex t : g1.truncated())
    if (t != x1) trunc.push_back(t);
  for (Vertex t : g2.truncated())
    if (t != x2) trunc.push_back(map2(t));
  return g.with_labels(std::move(labels), std::move(marks))
      .with_truncation(std::move(trunc), std::max(g1.mask_radius(), g2.mask_radius()));
}

WeightedGraph reweight(const WeightedGraph& g, const WeightScheme& scheme) {
  if (scheme.kind == WeightScheme::Kind::Unit) {
    auto edges = g.edges();
    for (auto& e : edges) e.w = 1.0;
    return build_graph(edges, g.vertex_count())
        .with_labels(g.labels(), g.landmarks())
        .with_truncation(g.truncated(), g.mask_radius());
  }
  auto edges = g.edges();
  for (auto& e : edges) {
    std::uint64_t key = (static_cast<std::uint64_t>(e.u) << 32) | static_cast<std::uint32_t>(e.v);
    double u01 = static_cast<double>(splitmix64(key ^ splitmix64(scheme.seed)) >> 11) * 0x1.0p-53;
    e.w = scheme.low + (scheme.high - scheme.low) * u01;
  }
  return build_graph(edges, g.vertex_count())
      .with_labels(g.labels(), g.landmarks())
      .with_truncation(g.truncated(), g.mask_radius());
}

WeightedGraph generate(const GraphFamilySpec& spec) {
  WeightedGraph g;
  switch (spec.family) {
    case Family::Lattice: g = lattice(spec.dim, spec.size, spec.margin, spec.r_max); break;
    case Family::Gasket:
      g = sierpinski_gasket(spec.size, spec.level_cap, spec.margin, spec.r_max);
      break;
    case Family::Vicsek: g = vicsek_tree(spec.size, spec.level_cap, spec.margin, spec.r_max); break;
    case Family::File: return load_graph(spec.path);
  }
  if (spec.weights.kind != WeightScheme::Kind::Unit) g = reweight(g, spec.weights);
  return g;
}

}  // namespace heatlab
