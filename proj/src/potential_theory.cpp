#include "heatlab/potential_theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "heatlab/markov_kernel.hpp"

namespace heatlab {

namespace {

int position_in(const VertexSet& s, Vertex v) {
  auto it = std::lower_bound(s.ids.begin(), s.ids.end(), v);
  return (it != s.ids.end() && *it == v) ? static_cast<int>(it - s.ids.begin()) : -1;
}

/// W restricted to rows in A and columns in S (dense).
Eigen::MatrixXd coupling(const WeightedGraph& g, const VertexSet& A, const VertexSet& S) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(A.size()),
                                            static_cast<Eigen::Index>(S.size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (const auto& nb : g.neighbors(A.ids[i]))
      if (int j = position_in(S, nb.id); j >= 0) w(static_cast<Eigen::Index>(i), j) += nb.weight;
  return w;
}

}  // namespace

struct DirichletSystem::Impl {
  SolverKind kind;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> direct;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
};

DirichletSystem::DirichletSystem(const WeightedGraph& g, const VertexSet& A, SolverOptions options)
    : domain_(A), impl_(std::make_unique<Impl>()) {
  if (A.empty()) throw Error(ErrorCode::EmptyInput, "Dirichlet system on an empty set");
  if (static_cast<int>(A.size()) >= g.vertex_count())
    throw Error(ErrorCode::SingularSystem,
                "domain is the whole graph; the killed walk never leaves it");
  const auto n = static_cast<Eigen::Index>(A.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(A.size() * 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vertex x = A.ids[i];
    trip.emplace_back(i, i, g.measure(x));
    for (const auto& nb : g.neighbors(x))
      if (int j = position_in(A, nb.id); j >= 0) trip.emplace_back(i, j, -nb.weight);
  }
  matrix_.resize(n, n);
  matrix_.setFromTriplets(trip.begin(), trip.end());
  impl_->kind = options.kind;
  if (options.kind == SolverKind::Direct) {
    impl_->direct.compute(matrix_);
    if (impl_->direct.info() != Eigen::Success)
      throw Error(ErrorCode::SingularSystem, "sparse Cholesky factorisation failed");
  } else {
    impl_->cg.setTolerance(options.tolerance);
    impl_->cg.setMaxIterations(options.max_iterations);
    impl_->cg.compute(matrix_);
  }
}

DirichletSystem::~DirichletSystem() = default;
DirichletSystem::DirichletSystem(DirichletSystem&&) noexcept = default;
DirichletSystem& DirichletSystem::operator=(DirichletSystem&&) noexcept = default;

int DirichletSystem::local_index(Vertex v) const { return position_in(domain_, v); }

Eigen::MatrixXd DirichletSystem::solve(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd x;
  if (impl_->kind == SolverKind::Direct) {
    x = impl_->direct.solve(rhs);
    last_iterations_ = 0;
  } else {
    x.resize(rhs.rows(), rhs.cols());
    int iters = 0;
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
      Eigen::VectorXd b = rhs.col(c);
      x.col(c) = impl_->cg.solve(b);
      iters = std::max<int>(iters, static_cast<int>(impl_->cg.iterations()));
      if (impl_->cg.info() != Eigen::Success) {
        std::ostringstream os;
        os << "conjugate gradient stopped after " << impl_->cg.iterations()
           << " iterations at relative residual " << impl_->cg.error();
        throw Error(ErrorCode::SolverDivergence, os.str());
      }
    }
    last_iterations_ = iters;
  }
  double bn = rhs.norm();
  last_residual_ = bn > 0 ? (matrix_ * x - rhs).norm() / bn : (matrix_ * x).norm();
  if (!std::isfinite(last_residual_) || last_residual_ > 1e-6)
    throw Error(ErrorCode::SolverDivergence, "linear solve residual too large");
  return x;
}

double GreenField::at(Vertex y) const {
  int i = position_in(domain, y);
  return i < 0 ? 0.0 : values[i];
}

double GreenField::weighted_sum(const WeightedGraph& g) const {
  double s = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i)
    s += values[static_cast<Eigen::Index>(i)] * g.measure(domain.ids[i]);
  return s;
}

GreenField green(const WeightedGraph& g, const VertexSet& A, Vertex x, SolverOptions options) {
  if (!A.contains(x)) throw Error(ErrorCode::SourceOutsideDomain, "Green source outside domain");
  DirichletSystem sys(g, A, options);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(A.size()), 1);
  rhs(sys.local_index(x), 0) = 1.0;
  // (D - W)_AA^{-1} is exactly the Green kernel g^A.
  GreenField out;
  out.domain = A;
  out.source = x;
  out.values = sys.solve(rhs).col(0);
  out.residual = sys.last_residual();
  return out;
}

ResistanceResult effective_resistance(const WeightedGraph& g, const VertexSet& A,
                                      const VertexSet& B, SolverOptions options) {
  if (A.empty() || B.empty()) throw Error(ErrorCode::EmptyInput, "resistance terminals must be nonempty");
  for (Vertex a : A) {
    if (!g.contains(a)) throw Error(ErrorCode::InvalidVertex, "terminal vertex out of range");
    if (B.contains(a)) throw Error(ErrorCode::OverlappingTerminals, "terminals A and B intersect");
  }
  for (Vertex b : B)
    if (!g.contains(b)) throw Error(ErrorCode::InvalidVertex, "terminal vertex out of range");

  ResistanceResult out;
  out.terminal_a = A;
  out.terminal_b = B;
  out.potential = Eigen::VectorXd::Zero(g.vertex_count());
  for (Vertex a : A) out.potential[a] = 1.0;

  std::vector<Vertex> free;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (!A.contains(v) && !B.contains(v)) free.push_back(v);
  if (!free.empty()) {
    VertexSet I(std::move(free));
    DirichletSystem sys(g, I, options);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(I.size()), 1);
    for (std::size_t i = 0; i < I.size(); ++i)
      for (const auto& nb : g.neighbors(I.ids[i]))
        if (A.contains(nb.id)) rhs(static_cast<Eigen::Index>(i), 0) += nb.weight;
    Eigen::VectorXd v = sys.solve(rhs).col(0);
    for (std::size_t i = 0; i < I.size(); ++i) out.potential[I.ids[i]] = v[static_cast<Eigen::Index>(i)];
    out.residual = sys.last_residual();
  }
  out.energy = dirichlet_energy(g, out.potential);
  if (!(out.energy > 0.0)) throw Error(ErrorCode::SingularSystem, "terminals are not connected");
  out.resistance = 1.0 / out.energy;
  return out;
}

ResistanceResult annulus_resistance(const WeightedGraph& g, Vertex x, int r, int R,
                                    SolverOptions options, bool check_truncation) {
  if (r < 1 || R <= r) {
    std::ostringstream os;
    os << "annulus resistance needs R > r >= 1, got r=" << r << " R=" << R;
    throw Error(ErrorCode::RadiusOrderViolation, os.str());
  }
  if (check_truncation && !g.is_clean(x, R))
    throw Error(ErrorCode::TruncationViolation, "ball B(x,R) reaches the truncation set");
  VertexSet inner = ball(g, x, r + 1);
  VertexSet outer = complement(g, ball(g, x, R));
  if (outer.empty())
    throw Error(ErrorCode::TruncationViolation, "B(x,R) covers the whole graph");
  return effective_resistance(g, inner, outer, options);
}

double ExitTimeField::at(Vertex z) const {
  int i = position_in(domain, z);
  return i < 0 ? 0.0 : values[i];
}

ExitTimeField mean_exit_time(const WeightedGraph& g, const VertexSet& A, SolverOptions options) {
  DirichletSystem sys(g, A, options);
  Eigen::MatrixXd rhs(static_cast<Eigen::Index>(A.size()), 1);
  for (std::size_t i = 0; i < A.size(); ++i) rhs(static_cast<Eigen::Index>(i), 0) = g.measure(A.ids[i]);
  ExitTimeField out;
  out.domain = A;
  out.values = sys.solve(rhs).col(0);
  out.residual = sys.last_residual();
  out.maximum = out.values.maxCoeff();
  return out;
}

ExitTimeField mean_exit_time(const WeightedGraph& g, Vertex x, int R, SolverOptions options,
                             bool check_truncation) {
  if (R < 1) throw Error(ErrorCode::RadiusOrderViolation, "radius must be positive");
  if (check_truncation && !g.is_clean(x, R))
    throw Error(ErrorCode::TruncationViolation, "ball B(x,R) reaches the truncation set");
  auto out = mean_exit_time(g, ball(g, x, R), options);
  out.center = x;
  out.radius = R;
  out.at_center = out.at(x);
  return out;
}

double dirichlet_energy_by_laplacian(const WeightedGraph& g, const Eigen::VectorXd& f) {
  Eigen::VectorXd lap = apply_laplacian(g, f);
  return -(lap.cwiseProduct(f)).dot(g.measures());
}

double mu_norm_squared(const WeightedGraph& g, const Eigen::VectorXd& f) {
  return f.cwiseProduct(f).dot(g.measures());
}

EigenResult smallest_eigenvalue(const WeightedGraph& g, const VertexSet& A, EigenOptions options) {
  DirichletSystem sys(g, A, options.solver);
  const auto n = static_cast<Eigen::Index>(A.size());
  Eigen::VectorXd mu(n);
  for (Eigen::Index i = 0; i < n; ++i) mu[i] = g.measure(A.ids[i]);
  auto mu_norm = [&](const Eigen::VectorXd& v) { return std::sqrt(v.cwiseProduct(v).dot(mu)); };

  EigenResult out;
  out.domain = A;
  Eigen::VectorXd phi = Eigen::VectorXd::Ones(n);
  phi /= mu_norm(phi);
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd psi = sys.solve(Eigen::MatrixXd(mu.cwiseProduct(phi)));
    phi = psi.col(0) / mu_norm(psi.col(0));
    Eigen::VectorXd lphi = sys.matrix() * phi;
    double lambda = phi.dot(lphi);  // phi is mu-normalised
    Eigen::VectorXd r = lphi.cwiseQuotient(mu) - lambda * phi;
    out.lambda = lambda;
    out.iterations = it;
    out.residual = mu_norm(r);
    if (out.residual <= options.tolerance) {
      out.eigenvector = phi;
      return out;
    }
  }
  std::ostringstream os;
  os << "inverse iteration did not reach residual " << options.tolerance << " in "
     << options.max_iterations << " iterations (last " << out.residual << ")";
  throw Error(ErrorCode::NonConvergence, os.str());
}

double HarmonicExtension::at(Vertex v) const {
  if (int i = position_in(domain, v); i >= 0) return interior[i];
  if (int j = position_in(boundary, v); j >= 0) return boundary_values[j];
  throw Error(ErrorCode::InvalidVertex, "vertex outside the closure");
}

HarmonicExtension harmonic_solve(const WeightedGraph& g, const VertexSet& A,
                                 const Eigen::VectorXd& boundary_values, SolverOptions options) {
  auto cb = closure_and_boundary(g, A);
  if (cb.boundary.empty()) throw Error(ErrorCode::SingularSystem, "set has empty boundary");
  if (boundary_values.size() != static_cast<Eigen::Index>(cb.boundary.size()))
    throw Error(ErrorCode::ShapeMismatch, "one boundary value per boundary vertex required");
  DirichletSystem sys(g, A, options);
  HarmonicExtension out;
  out.domain = A;
  out.boundary = cb.boundary;
  out.boundary_values = boundary_values;
  out.interior = sys.solve(coupling(g, A, cb.boundary) * boundary_values).col(0);
  out.residual = sys.last_residual();
  return out;
}

PoissonKernel poisson_kernel(const WeightedGraph& g, const VertexSet& A, SolverOptions options) {
  auto cb = closure_and_boundary(g, A);
  if (cb.boundary.empty()) throw Error(ErrorCode::SingularSystem, "set has empty boundary");
  DirichletSystem sys(g, A, options);
  PoissonKernel out;
  out.domain = A;
  out.boundary = cb.boundary;
  out.values = sys.solve(coupling(g, A, cb.boundary));
  out.residual = sys.last_residual();
  return out;
}

}  // namespace heatlab
