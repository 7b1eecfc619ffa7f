#ifndef HEATLAB_POTENTIAL_THEORY_HPP
#define HEATLAB_POTENTIAL_THEORY_HPP

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "heatlab/error.hpp"
#include "heatlab/graph.hpp"

namespace heatlab {

enum class SolverKind { Direct, ConjugateGradient };

struct SolverOptions {
  SolverKind kind = SolverKind::Direct;
  double tolerance = 1e-10;  ///< relative residual, CG only
  int max_iterations = 20000;
};

/// The symmetric positive definite block (D - W) restricted to a proper
/// subset A, i.e. mu(I - P^A) in symmetric form. Columns and rows follow the
/// sorted order of A.
class DirichletSystem {
 public:
  DirichletSystem(const WeightedGraph& g, const VertexSet& A, SolverOptions options = {});
  ~DirichletSystem();
  DirichletSystem(DirichletSystem&&) noexcept;
  DirichletSystem& operator=(DirichletSystem&&) noexcept;

  const VertexSet& domain() const noexcept { return domain_; }
  const Eigen::SparseMatrix<double>& matrix() const noexcept { return matrix_; }
  int local_index(Vertex v) const;

  /// Solves (D - W)_AA x = rhs; records the relative residual.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  double last_residual() const noexcept { return last_residual_; }
  int last_iterations() const noexcept { return last_iterations_; }

 private:
  struct Impl;
  VertexSet domain_;
  Eigen::SparseMatrix<double> matrix_;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
  mutable int last_iterations_ = 0;
};

/// Green kernel g^A(x,.) of the walk killed on leaving A.
struct GreenField {
  VertexSet domain;
  Vertex source = 0;
  Eigen::VectorXd values;  ///< indexed by position in domain
  double residual = 0.0;

  double at(Vertex y) const;
  /// sum_y g^A(x,y) mu(y), which equals E_x(A).
  double weighted_sum(const WeightedGraph& g) const;
};

GreenField green(const WeightedGraph& g, const VertexSet& A, Vertex x, SolverOptions options = {});

struct ResistanceResult {
  VertexSet terminal_a;
  VertexSet terminal_b;
  double resistance = 0.0;
  double energy = 0.0;     ///< E(v,v) of the minimizing potential
  Eigen::VectorXd potential;  ///< per vertex, 1 on A and 0 on B
  double residual = 0.0;
};

ResistanceResult effective_resistance(const WeightedGraph& g, const VertexSet& A,
                                      const VertexSet& B, SolverOptions options = {});

/// rho(x,r,R) between the closed inner ball {d(x,.) <= r} and the complement
/// of B(x,R). Requires R > r >= 1. With `check_truncation` the ball B(x,R)
/// must avoid the truncation set.
ResistanceResult annulus_resistance(const WeightedGraph& g, Vertex x, int r, int R,
                                    SolverOptions options = {}, bool check_truncation = false);

/// E_z(A) for z in A; for balls also E(x,R) and Ebar(x,R).
struct ExitTimeField {
  VertexSet domain;
  Eigen::VectorXd values;  ///< indexed by position in domain
  Vertex center = 0;
  int radius = 0;
  double at_center = 0.0;  ///< E(x,R)
  double maximum = 0.0;    ///< Ebar(x,R)
  double residual = 0.0;

  double at(Vertex z) const;
};

ExitTimeField mean_exit_time(const WeightedGraph& g, const VertexSet& A, SolverOptions options = {});
ExitTimeField mean_exit_time(const WeightedGraph& g, Vertex x, int R, SolverOptions options = {},
                             bool check_truncation = false);

struct EigenResult {
  VertexSet domain;
  double lambda = 0.0;
  Eigen::VectorXd eigenvector;  ///< positive, mu-normalised, indexed by domain position
  int iterations = 0;
  double residual = 0.0;        ///< ||(-Delta^A) phi - lambda phi||_mu / ||phi||_mu
};

struct EigenOptions {
  double tolerance = 1e-8;
  int max_iterations = 10000;
  SolverOptions solver;
};

/// Smallest eigenvalue of -Delta^A by inverse iteration in the mu inner product.
EigenResult smallest_eigenvalue(const WeightedGraph& g, const VertexSet& A, EigenOptions options = {});

/// E(f,f) = 1/2 sum_{x,y} mu_{xy} (f(x) - f(y))^2.
template <typename Derived>
double dirichlet_energy(const WeightedGraph& g, const Eigen::MatrixBase<Derived>& f) {
  if (f.size() != g.vertex_count())
    throw Error(ErrorCode::ShapeMismatch, "function size differs from vertex count");
  double e = 0.0;
  for (Vertex x = 0; x < g.vertex_count(); ++x)
    for (const auto& nb : g.neighbors(x))
      if (x < nb.id) {
        double d = f[x] - f[nb.id];
        e += nb.weight * d * d;
      }
  return e;
}

/// -(Delta f, f)_mu, the second route to the Dirichlet energy.
double dirichlet_energy_by_laplacian(const WeightedGraph& g, const Eigen::VectorXd& f);

/// (f, f)_mu.
double mu_norm_squared(const WeightedGraph& g, const Eigen::VectorXd& f);

struct HarmonicExtension {
  VertexSet domain;    ///< A
  VertexSet boundary;  ///< dA
  Eigen::VectorXd interior;          ///< by position in A
  Eigen::VectorXd boundary_values;   ///< by position in dA
  double residual = 0.0;

  double at(Vertex v) const;
};

/// Unique h on the closure of A, harmonic in A, with h = boundary_values on dA.
HarmonicExtension harmonic_solve(const WeightedGraph& g, const VertexSet& A,
                                 const Eigen::VectorXd& boundary_values, SolverOptions options = {});

/// K(y,z) = probability that the walk from y in A first leaves A at z in dA.
struct PoissonKernel {
  VertexSet domain;
  VertexSet boundary;
  Eigen::MatrixXd values;  ///< |A| x |dA|
  double residual = 0.0;
};

PoissonKernel poisson_kernel(const WeightedGraph& g, const VertexSet& A, SolverOptions options = {});

}  // namespace heatlab

#endif  // HEATLAB_POTENTIAL_THEORY_HPP
