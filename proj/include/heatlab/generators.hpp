#ifndef HEATLAB_GENERATORS_HPP
#define HEATLAB_GENERATORS_HPP

#include <cstdint>
#include <string>

#include "heatlab/graph.hpp"

namespace heatlab {

enum class Family { Lattice, Gasket, Vicsek, File };

std::string_view to_string(Family f) noexcept;
Family family_from_string(const std::string& name);

/// Per-edge weights. Unit, or i.i.d. uniform on [low, high] keyed by the
/// canonical edge and the seed (order independent).
struct WeightScheme {
  enum class Kind { Unit, Uniform } kind = Kind::Unit;
  double low = 1.0;
  double high = 1.0;
  std::uint64_t seed = 0;

  static WeightScheme parse(const std::string& descriptor);  // "unit" | "uniform:lo:hi:seed"
  std::string describe() const;
};

struct GraphFamilySpec {
  Family family = Family::Lattice;
  int size = 5;     ///< lattice side, fractal level
  int dim = 2;      ///< lattice only
  std::string path; ///< file family only
  WeightScheme weights;
  int margin = 4;   ///< interior-mask multiplier
  int r_max = 0;    ///< largest radius verifiers will use; 0 picks the family default
  int level_cap = 8;
};

inline constexpr int kDefaultLevelCap = 8;

/// Box of Z^d (d in {1,2,3}) with odd side >= 5, unit weights.
/// Landmark "center"; the outer shell is the truncation set.
WeightedGraph lattice(int dim, int side, int margin = 4, int r_max = 0);

/// Level-n pre-Sierpinski gasket: 3(3^n+1)/2 vertices, 3^{n+1} edges.
/// Landmarks "apex", "corner_b", "corner_c"; the two far corners are the
/// truncation set, so the apex sees the one-sided infinite gasket.
WeightedGraph sierpinski_gasket(int level, int level_cap = kDefaultLevelCap, int margin = 4,
                                int r_max = 0);

/// Level-n Vicsek tree: 5^n vertices, plus-shaped. Landmark "center"; the
/// four outermost tips are the truncation set.
WeightedGraph vicsek_tree(int level, int level_cap = kDefaultLevelCap, int margin = 4,
                          int r_max = 0);

/// Disjoint union of g1 and g2 with x1 and x2 identified. The inputs are
/// always treated as distinct copies, so glue(g, g, x, x) joins two copies of
/// g at x. The junction is dropped from the truncation set.
WeightedGraph glue(const WeightedGraph& g1, const WeightedGraph& g2, Vertex x1, Vertex x2);

WeightedGraph reweight(const WeightedGraph& g, const WeightScheme& scheme);

WeightedGraph generate(const GraphFamilySpec& spec);

}  // namespace heatlab

#endif  // HEATLAB_GENERATORS_HPP
