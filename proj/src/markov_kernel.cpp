#include "heatlab/markov_kernel.hpp"

#include <algorithm>
#include <sstream>

namespace heatlab {

std::string_view to_string(KernelFlavor f) noexcept {
  switch (f) {
    case KernelFlavor::Plain: return "plain";
    case KernelFlavor::Dirichlet: return "dirichlet";
    case KernelFlavor::Tilde: return "tilde";
  }
  return "plain";
}

std::string_view to_string(SolutionClass c) noexcept {
  switch (c) {
    case SolutionClass::Solution: return "solution";
    case SolutionClass::Subsolution: return "subsolution";
    case SolutionClass::Supersolution: return "supersolution";
  }
  return "solution";
}

std::vector<std::pair<Vertex, double>> transition_row(const WeightedGraph& g, Vertex x) {
  if (!g.contains(x)) throw Error(ErrorCode::InvalidVertex, "vertex out of range");
  std::vector<std::pair<Vertex, double>> row;
  row.reserve(g.degree(x));
  for (const auto& nb : g.neighbors(x)) row.emplace_back(nb.id, nb.weight / g.measure(x));
  return row;
}

void for_each_kernel_step(const WeightedGraph& g, Vertex x, long n_max, const VertexSet* domain,
                          const std::function<void(long, const Eigen::VectorXd&)>& visit,
                          KernelOptions options) {
  if (!g.contains(x)) throw Error(ErrorCode::InvalidVertex, "source out of range");
  if (n_max < 0) throw Error(ErrorCode::TimeMismatch, "time must be nonnegative");
  const int n = g.vertex_count();
  std::vector<char> alive(n, 1);
  if (domain) {
    if (!domain->contains(x)) throw Error(ErrorCode::SourceOutsideDomain, "source outside domain");
    std::fill(alive.begin(), alive.end(), 0);
    for (Vertex v : *domain) alive[v] = 1;
  }
  const Eigen::VectorXd& mu = g.measures();
  // Iterate the measure m_k = P_k(x,.); the step is a gather
  // m_{k+1}(y) = sum_{z~y} m_k(z) mu_{zy}/mu(z), symmetric adjacency.
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd flow(n), next(n);
  m[x] = 1.0;
  visit(0, m.cwiseQuotient(mu));
  for (long k = 1; k <= n_max; ++k) {
    flow = m.cwiseQuotient(mu);
    for (Vertex y = 0; y < n; ++y) {
      if (!alive[y]) {
        next[y] = 0.0;
        continue;
      }
      double s = 0.0;
      if (options.compensated) {
        double c = 0.0;
        for (const auto& nb : g.neighbors(y)) {
          double term = flow[nb.id] * nb.weight - c;
          double t = s + term;
          c = (t - s) - term;
          s = t;
        }
      } else {
        for (const auto& nb : g.neighbors(y)) s += flow[nb.id] * nb.weight;
      }
      next[y] = s;
    }
    m.swap(next);
    visit(k, m.cwiseQuotient(mu));
  }
}

KernelVector heat_kernel(const WeightedGraph& g, Vertex x, long n, KernelOptions options) {
  KernelVector k;
  k.source = x;
  k.time = n;
  k.flavor = KernelFlavor::Plain;
  for_each_kernel_step(
      g, x, n, nullptr,
      [&](long step, const Eigen::VectorXd& p) {
        if (step == n) k.values = p;
      },
      options);
  return k;
}

KernelVector dirichlet_kernel(const WeightedGraph& g, const VertexSet& B, Vertex x, long n,
                              KernelOptions options) {
  KernelVector k;
  k.source = x;
  k.time = n;
  k.domain = B;
  k.flavor = KernelFlavor::Dirichlet;
  for_each_kernel_step(
      g, x, n, &B,
      [&](long step, const Eigen::VectorXd& p) {
        if (step == n) k.values = p;
      },
      options);
  return k;
}

KernelVector tilde(const KernelVector& k1, const KernelVector& k2) {
  if (k2.time != k1.time + 1) {
    std::ostringstream os;
    os << "tilde needs consecutive times, got " << k1.time << " and " << k2.time;
    throw Error(ErrorCode::TimeMismatch, os.str());
  }
  if (k1.source != k2.source || k1.values.size() != k2.values.size() ||
      k1.domain.has_value() != k2.domain.has_value() ||
      (k1.domain && k1.domain->ids != k2.domain->ids))
    throw Error(ErrorCode::ShapeMismatch, "tilde needs kernels with the same source and domain");
  KernelVector out = k1;
  out.values = k1.values + k2.values;
  out.flavor = KernelFlavor::Tilde;
  return out;
}

int CylinderOperator::local_index(Vertex v) const {
  auto it = std::lower_bound(ball.ids.begin(), ball.ids.end(), v);
  return (it != ball.ids.end() && *it == v) ? static_cast<int>(it - ball.ids.begin()) : -1;
}

CylinderOperator make_cylinder_operator(const WeightedGraph& g, const VertexSet& B) {
  CylinderOperator op;
  op.ball = B;
  op.boundary = closure_and_boundary(g, B).boundary;
  const int nb = static_cast<int>(B.size());
  const int nd = static_cast<int>(op.boundary.size());
  std::vector<Eigen::Triplet<double>> in, lat;
  for (int i = 0; i < nb; ++i) {
    Vertex y = B.ids[i];
    for (const auto& e : g.neighbors(y)) {
      double p = e.weight / g.measure(y);
      auto it = std::lower_bound(B.ids.begin(), B.ids.end(), e.id);
      if (it != B.ids.end() && *it == e.id) {
        in.emplace_back(i, static_cast<int>(it - B.ids.begin()), p);
      } else {
        auto jt = std::lower_bound(op.boundary.ids.begin(), op.boundary.ids.end(), e.id);
        lat.emplace_back(i, static_cast<int>(jt - op.boundary.ids.begin()), p);
      }
    }
  }
  op.interior.resize(nb, nb);
  op.interior.setFromTriplets(in.begin(), in.end());
  op.lateral.resize(nb, nd);
  op.lateral.setFromTriplets(lat.begin(), lat.end());
  return op;
}

SpaceTimeSolution evolve_cylinder(const WeightedGraph& g, const VertexSet& B,
                                  const Eigen::VectorXd& initial, const Eigen::MatrixXd& lateral,
                                  long T, bool require_nonnegative) {
  if (T < 1) throw Error(ErrorCode::TimeMismatch, "cylinder needs T >= 1");
  auto op = make_cylinder_operator(g, B);
  const auto nb = static_cast<Eigen::Index>(op.ball.size());
  const auto nd = static_cast<Eigen::Index>(op.boundary.size());
  if (initial.size() != nb)
    throw Error(ErrorCode::ShapeMismatch, "initial data must have one value per ball vertex");
  const bool killed = lateral.size() == 0;
  if (!killed && (lateral.rows() != T + 1 || lateral.cols() != nd))
    throw Error(ErrorCode::ShapeMismatch, "lateral data must be (T+1) x |boundary|");
  if (require_nonnegative && ((initial.array() < 0).any() || (!killed && (lateral.array() < 0).any())))
    throw Error(ErrorCode::ShapeMismatch, "nonnegative data required");

  SpaceTimeSolution u;
  u.ball = op.ball;
  u.boundary = op.boundary;
  u.lateral = killed ? Eigen::MatrixXd::Zero(T + 1, nd) : lateral;
  u.interior.resize(T + 1, nb);
  u.interior.row(0) = initial.transpose();
  Eigen::VectorXd cur = initial;
  for (long n = 0; n < T; ++n) {
    Eigen::VectorXd next = op.interior * cur;
    if (!killed) next += op.lateral * u.lateral.row(n).transpose();
    u.interior.row(n + 1) = next.transpose();
    cur.swap(next);
  }
  return u;
}

RelationDefect relation_defect(const WeightedGraph& g, const SpaceTimeSolution& u) {
  auto op = make_cylinder_operator(g, u.ball);
  RelationDefect d;
  for (long n = 0; n < u.final_time(); ++n) {
    Eigen::VectorXd pu = op.interior * u.interior.row(n).transpose() +
                         op.lateral * u.lateral.row(n).transpose();
    Eigen::VectorXd diff = u.interior.row(n + 1).transpose() - pu;
    d.max_excess = std::max(d.max_excess, diff.maxCoeff());
    d.max_deficit = std::max(d.max_deficit, (-diff).maxCoeff());
  }
  return d;
}

bool satisfies_class(const WeightedGraph& g, const SpaceTimeSolution& u, double tol) {
  auto d = relation_defect(g, u);
  switch (u.solution_class) {
    case SolutionClass::Solution: return d.max_excess <= tol && d.max_deficit <= tol;
    case SolutionClass::Subsolution: return d.max_excess <= tol;
    case SolutionClass::Supersolution: return d.max_deficit <= tol;
  }
  return false;
}

}  // namespace heatlab
