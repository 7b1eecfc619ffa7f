#ifndef HEATLAB_MARKOV_KERNEL_HPP
#define HEATLAB_MARKOV_KERNEL_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "heatlab/error.hpp"
#include "heatlab/graph.hpp"

namespace heatlab {

enum class KernelFlavor { Plain, Dirichlet, Tilde };

std::string_view to_string(KernelFlavor f) noexcept;

/// One row p_n(source, .) of a heat kernel, stored over all vertices.
struct KernelVector {
  Vertex source = 0;
  long time = 0;
  std::optional<VertexSet> domain;  ///< nullopt: whole graph
  Eigen::VectorXd values;
  KernelFlavor flavor = KernelFlavor::Plain;

  /// sum_y values(y) mu(y).
  double mass(const WeightedGraph& g) const { return values.dot(g.measures()); }
};

struct KernelOptions {
  bool compensated = false;  ///< Kahan-compensated gather in each step
};

/// P(x, .) as (neighbor, probability) pairs.
std::vector<std::pair<Vertex, double>> transition_row(const WeightedGraph& g, Vertex x);

/// Iterates the distribution P_n(x,.) of the (possibly killed) walk from x and
/// calls `visit(n, p_n)` with the kernel p_n(x,.) = P_n(x,.)/mu for n = 0..n_max.
void for_each_kernel_step(const WeightedGraph& g, Vertex x, long n_max,
                          const VertexSet* domain,
                          const std::function<void(long, const Eigen::VectorXd&)>& visit,
                          KernelOptions options = {});

KernelVector heat_kernel(const WeightedGraph& g, Vertex x, long n, KernelOptions options = {});

/// Kernel of the walk killed on leaving B; requires x in B.
KernelVector dirichlet_kernel(const WeightedGraph& g, const VertexSet& B, Vertex x, long n,
                              KernelOptions options = {});

/// p~_n = p_n + p_{n+1}; k1 at time n, k2 at time n+1.
KernelVector tilde(const KernelVector& k1, const KernelVector& k2);

/// Delta f = Pf - f.
template <typename Derived>
Eigen::VectorXd apply_laplacian(const WeightedGraph& g, const Eigen::MatrixBase<Derived>& f) {
  if (f.size() != g.vertex_count())
    throw Error(ErrorCode::ShapeMismatch, "function size differs from vertex count");
  Eigen::VectorXd out(g.vertex_count());
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    double s = 0.0;
    for (const auto& nb : g.neighbors(x)) s += nb.weight * f[nb.id];
    out[x] = s / g.measure(x) - f[x];
  }
  return out;
}

/// Local transition blocks of a ball B and its boundary dB, indexed by the
/// positions of vertices inside the sorted sets.
struct CylinderOperator {
  VertexSet ball;
  VertexSet boundary;
  Eigen::SparseMatrix<double, Eigen::RowMajor> interior;  ///< P restricted to B x B
  Eigen::SparseMatrix<double, Eigen::RowMajor> lateral;   ///< P restricted to B x dB

  int local_index(Vertex v) const;  ///< position in ball, -1 if absent
};

CylinderOperator make_cylinder_operator(const WeightedGraph& g, const VertexSet& B);

enum class SolutionClass { Solution, Subsolution, Supersolution };

std::string_view to_string(SolutionClass c) noexcept;

/// u_n on a ball for n = 0..T (rows = time, columns = ball positions) together
/// with the lateral values on the boundary.
struct SpaceTimeSolution {
  VertexSet ball;
  VertexSet boundary;
  Eigen::MatrixXd interior;  ///< (T+1) x |B|
  Eigen::MatrixXd lateral;   ///< (T+1) x |dB|
  SolutionClass solution_class = SolutionClass::Solution;

  long final_time() const noexcept { return static_cast<long>(interior.rows()) - 1; }
};

/// Solves u_{n+1}(y) = sum_z P(y,z) u_n(z) for y in B with u on dB taken from
/// `lateral` ((T+1) x |dB|; an empty matrix means killed). `initial` is indexed
/// by ball position.
SpaceTimeSolution evolve_cylinder(const WeightedGraph& g, const VertexSet& B,
                                  const Eigen::VectorXd& initial, const Eigen::MatrixXd& lateral,
                                  long T, bool require_nonnegative = false);

/// max over interior space-time points of (u_{n+1} - P u_n): zero for
/// solutions, <= 0 for subsolutions, >= 0 for supersolutions (with the
/// Dirichlet sign convention Delta^B u vs d_n u).
struct RelationDefect {
  double max_excess = 0.0;   ///< max (u_{n+1} - P u_n)
  double max_deficit = 0.0;  ///< max (P u_n - u_{n+1})
};

RelationDefect relation_defect(const WeightedGraph& g, const SpaceTimeSolution& u);

bool satisfies_class(const WeightedGraph& g, const SpaceTimeSolution& u, double tol);

}  // namespace heatlab

#endif  // HEATLAB_MARKOV_KERNEL_HPP
