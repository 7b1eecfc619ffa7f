#include "heatlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "heatlab/error.hpp"
#include "heatlab/markov_kernel.hpp"
#include "heatlab/parallel.hpp"

namespace heatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int pos_in(const VertexSet& s, Vertex v) {
  auto it = std::lower_bound(s.ids.begin(), s.ids.end(), v);
  return (it != s.ids.end() && *it == v) ? static_cast<int>(it - s.ids.begin()) : -1;
}

std::vector<int> positions(const VertexSet& outer, const VertexSet& inner) {
  std::vector<int> p;
  p.reserve(inner.size());
  for (Vertex v : inner) p.push_back(pos_in(outer, v));
  return p;
}

bool empty_range(const std::pair<long, long>& r) { return r.first > r.second; }

long range_size(const std::pair<long, long>& r) { return empty_range(r) ? 0 : r.second - r.first + 1; }

/// x plus up to `per_layer` vertices from the layers at distance floor(R/2)
/// and R-1, spread evenly over the sorted layer.
std::vector<Vertex> layer_samples(const WeightedGraph& g, Vertex x, int R, int per_layer) {
  auto layers = bfs_layers(g, x, R - 1);
  std::set<Vertex> ys{x};
  for (int d : {R / 2, R - 1}) {
    if (d < 1 || d >= static_cast<int>(layers.size())) continue;
    auto layer = layers[d];
    std::sort(layer.begin(), layer.end());
    const int m = static_cast<int>(layer.size());
    const int k = std::min(per_layer, m);
    for (int i = 0; i < k; ++i) ys.insert(layer[k == 1 ? 0 : static_cast<std::size_t>(i) * (m - 1) / (k - 1)]);
  }
  return {ys.begin(), ys.end()};
}

std::vector<Vertex> layer_at(const WeightedGraph& g, Vertex x, int d) {
  auto layers = bfs_layers(g, x, d);
  if (d >= static_cast<int>(layers.size())) return {};
  auto layer = layers[d];
  std::sort(layer.begin(), layer.end());
  return layer;
}

/// p_n(x,.) for each requested n and n+1 (plain or killed on `domain`).
std::map<long, Eigen::VectorXd> kernel_rows(const WeightedGraph& g, Vertex x,
                                            const std::vector<long>& times,
                                            const VertexSet* domain) {
  std::set<long> want;
  for (long n : times) {
    want.insert(n);
    want.insert(n + 1);
  }
  std::map<long, Eigen::VectorXd> out;
  if (want.empty()) return out;
  for_each_kernel_step(g, x, *want.rbegin(), domain, [&](long n, const Eigen::VectorXd& p) {
    if (want.count(n)) out[n] = p;
  });
  return out;
}

double ceil_radius(double r) { return std::max(1.0, std::ceil(r - 1e-12)); }

// --- individual cells -----------------------------------------------------

void cell_vd(const VerifyContext& ctx, CellResult& c) {
  double v1 = volume(ctx.g, c.x, c.R), v2 = volume(ctx.g, c.x, 2 * c.R);
  c.value = v2 / v1;
  c.aux["V_R"] = v1;
  c.aux["V_2R"] = v2;
  c.aux["A_V"] = 0;
  for (int A = 2; A <= 4; ++A)
    if (2 * v1 <= volume(ctx.g, c.x, A * c.R)) {
      c.aux["A_V"] = A;
      break;
    }
}

void cell_tc(const VerifyContext& ctx, CellResult& c, bool weak) {
  auto ys = layer_samples(ctx.g, c.x, c.R, ctx.cfg.tc_layer_samples);
  double top = weak ? ctx.E.F(c.x, c.R) : ctx.E.F(c.x, 2 * c.R);
  c.value = 0.0;
  for (Vertex y : ys) {
    double ey = ctx.E.F(y, c.R);
    double r = weak ? std::max(top / ey, ey / top) : top / ey;
    if (r > c.value) {
      c.value = r;
      c.aux["y"] = y;
    }
  }
}

void cell_harnack(const VerifyContext& ctx, CellResult& c) {
  VertexSet outer = ball(ctx.g, c.x, 2 * c.R);
  auto pk = poisson_kernel(ctx.g, outer, ctx.cfg.solver);
  auto inner = positions(outer, ball(ctx.g, c.x, c.R));
  c.value = 0.0;
  for (Eigen::Index z = 0; z < pk.values.cols(); ++z) {
    double mx = 0.0, mn = kInf;
    for (int i : inner) {
      mx = std::max(mx, pk.values(i, z));
      mn = std::min(mn, pk.values(i, z));
    }
    double r = mn > 0 ? mx / mn : kInf;
    if (r > c.value) {
      c.value = r;
      c.aux["z"] = pk.boundary.ids[z];
    }
  }
  c.aux["residual"] = pk.residual;
}

void cell_mv(const VerifyContext& ctx, CellResult& c) {
  VertexSet B = ball(ctx.g, c.x, c.R);
  auto pk = poisson_kernel(ctx.g, B, ctx.cfg.solver);
  const int px = pos_in(B, c.x);
  Eigen::VectorXd mu(static_cast<Eigen::Index>(B.size()));
  for (std::size_t i = 0; i < B.size(); ++i) mu[static_cast<Eigen::Index>(i)] = ctx.g.measure(B.ids[i]);
  const double V = mu.sum();
  c.value = 0.0;
  for (Eigen::Index z = 0; z < pk.values.cols(); ++z) {
    double den = pk.values.col(z).dot(mu);
    double r = pk.values(px, z) * V / den;
    if (r > c.value) {
      c.value = r;
      c.aux["z"] = pk.boundary.ids[z];
    }
  }
  c.aux["residual"] = pk.residual;
}

void cell_gf(const VerifyContext& ctx, CellResult& c, bool upper) {
  VertexSet B2 = ball(ctx.g, c.x, 2 * c.R);
  auto gr = green(ctx.g, B2, c.x, ctx.cfg.solver);
  const double scale = volume(ctx.g, c.x, 2 * c.R) / ctx.F.F(c.x, 2 * c.R);
  auto dist = distances_from(ctx.g, c.x, c.R);
  // A = B(x,R) \ B(x,R/2): R/2 <= d < R.
  double best = upper ? 0.0 : kInf;
  for (std::size_t i = 0; i < B2.size(); ++i) {
    Vertex y = B2.ids[i];
    int d = dist[y];
    if (d < 0 || d >= c.R || 2 * d < c.R) continue;
    double v = gr.values[static_cast<Eigen::Index>(i)];
    if (upper ? v > best : v < best) {
      best = v;
      c.aux["y"] = y;
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::CylinderTooSmall, "annulus B(x,R) \\ B(x,R/2) is empty");
  c.value = best * scale;
  c.aux["green"] = best;
  c.aux["residual"] = gr.residual;
}

void cell_er(const VerifyContext& ctx, CellResult& c) {
  double e2 = ctx.E.F(c.x, 2 * c.R);
  auto res = annulus_resistance(ctx.g, c.x, c.R, 2 * c.R, ctx.cfg.solver);
  double v = annulus_volume(ctx.g, c.x, c.R, 2 * c.R);
  c.value = e2 / (res.resistance * v);
  c.aux["E_2R"] = e2;
  c.aux["rho"] = res.resistance;
  c.aux["v"] = v;
  c.aux["rhov"] = res.resistance * v;
  c.aux["rle"] = res.resistance * volume(ctx.g, c.x, 2 * c.R) / ctx.F.F(c.x, 2 * c.R);
}

void cell_lambda(const VerifyContext& ctx, CellResult& c) {
  EigenOptions opts;
  opts.solver = ctx.cfg.solver;
  auto ev = smallest_eigenvalue(ctx.g, ball(ctx.g, c.x, c.R), opts);
  c.value = ev.lambda * ctx.F.F(c.x, c.R);
  c.aux["lambda"] = ev.lambda;
  c.aux["residual"] = ev.residual;
}

void cell_due(const VerifyContext& ctx, CellResult& c) {
  int f = ctx.F.inverse(c.x, static_cast<double>(c.n));
  c.R = f;
  if (!ctx.g.is_clean(c.x, f)) throw Error(ErrorCode::TruncationViolation, "B(x,f(x,n)) is truncated");
  auto rows = kernel_rows(ctx.g, c.x, {c.n}, nullptr);
  double pt = rows[c.n][c.x] + rows[c.n + 1][c.x];
  double V = volume(ctx.g, c.x, f);
  c.value = pt * V;
  c.aux["f"] = f;
  c.aux["ptilde"] = pt;
  c.aux["V"] = V;
}

double param(const std::map<std::string, double>& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw Error(ErrorCode::UsageError, "cell needs parameter '" + key + "'");
  return it->second;
}

std::vector<long> distinct_times(std::initializer_list<double> ts, long at_least) {
  std::set<long> s;
  for (double t : ts) {
    long n = static_cast<long>(std::ceil(t - 1e-12));
    if (n >= std::max(1L, at_least)) s.insert(n);
  }
  return {s.begin(), s.end()};
}

void cell_ue(const VerifyContext& ctx, CellResult& c, const std::map<std::string, double>& p) {
  const double beta = param(p, "beta"), C = param(p, "C");
  if (!(beta > 1)) throw Error(ErrorCode::NotApplicableBetaPrime, "UE needs beta > 1");
  const int d = c.R - 1;
  auto ys = layer_at(ctx.g, c.x, d);
  if (ys.empty()) throw Error(ErrorCode::CylinderTooSmall, "no vertex at distance R-1");
  const double Fx = ctx.F.F(c.x, c.R);
  auto times = distinct_times({Fx / 16, Fx / 4, Fx}, d);
  auto rows = kernel_rows(ctx.g, c.x, times, nullptr);
  const double Fd = ctx.F.F(c.x, d);
  c.value = kInf;
  double max_pv = 0.0;
  for (long n : times) {
    double V = volume(ctx.g, c.x, ctx.F.inverse(c.x, static_cast<double>(n)));
    double s = std::pow(Fd / n, 1.0 / (beta - 1.0));
    for (Vertex y : ys) {
      double pv = (rows[n][y] + rows[n + 1][y]) * V;
      if (!(pv > 0) || !(s > 0)) continue;
      max_pv = std::max(max_pv, pv);
      double cc = std::log(C / pv) / s;
      if (cc < c.value) {
        c.value = cc;
        c.aux["y"] = y;
        c.aux["n"] = static_cast<double>(n);
      }
    }
  }
  if (!std::isfinite(c.value)) throw Error(ErrorCode::CylinderTooSmall, "no positive off-diagonal sample");
  c.aux["max_pV"] = max_pv;
}

void cell_le(const VerifyContext& ctx, CellResult& c, const std::map<std::string, double>& p) {
  const double bp = param(p, "beta_prime"), lower = param(p, "c");
  if (!(bp > 1)) throw Error(ErrorCode::NotApplicableBetaPrime, "LE needs beta' > 1");
  const int d = c.R - 1;
  auto ys = layer_at(ctx.g, c.x, d);
  if (ys.empty()) throw Error(ErrorCode::CylinderTooSmall, "no vertex at distance R-1");
  const double Fx = ctx.F.F(c.x, c.R);
  auto times = distinct_times({double(d), 2.0 * d, Fx / 4, Fx}, d);
  auto rows = kernel_rows(ctx.g, c.x, times, nullptr);
  const double Fd = ctx.F.F(c.x, d);
  c.value = 0.0;
  double worst_pv = 0.0;
  long worst_n = times.front();
  Vertex worst_y = ys.front();
  for (long n : times) {
    double V = volume(ctx.g, c.x, ctx.F.inverse(c.x, static_cast<double>(n)));
    double s = std::pow(Fd / n, 1.0 / (bp - 1.0));
    for (Vertex y : ys) {
      double pv = (rows[n][y] + rows[n + 1][y]) * V;
      if (!(pv > 0)) throw Error(ErrorCode::SolverDivergence, "p~ vanished with n >= d");
      double cc = std::log(lower / pv) / s;
      if (cc > c.value || worst_pv == 0.0) {
        if (cc > c.value) c.value = cc;
        worst_pv = pv;
        worst_n = n;
        worst_y = y;
      }
    }
  }
  c.aux["y"] = worst_y;
  c.aux["n"] = static_cast<double>(worst_n);
  // Strengthened form with the set exponent l(n,d,A), A sampled as {x, y}.
  auto maxF = [&](int r) { return std::max(ctx.F.F(c.x, r), ctx.F.F(worst_y, r)); };
  int l = sub_gaussian_l_set(maxF, worst_n, std::max(d, 1), ctx.cfg.Cl);
  c.aux["l"] = l;
  c.aux["l_form"] = std::max(0.0, std::log(lower / worst_pv) / l);
}

void cell_near_diagonal(const VerifyContext& ctx, CellResult& c, bool killed) {
  const double eps = ctx.cfg.ple_epsilon;
  const double delta = killed ? ctx.cfg.ple_delta : ctx.cfg.ndle_delta;
  long n = std::max(1L, static_cast<long>(std::floor(eps * ctx.F.F(c.x, c.R))));
  int f = ctx.F.inverse(c.x, static_cast<double>(n));
  VertexSet B = ball(ctx.g, c.x, c.R);
  auto rows = kernel_rows(ctx.g, c.x, {n}, killed ? &B : nullptr);
  double V = volume(ctx.g, c.x, f);
  double reach = std::min(static_cast<double>(n), delta * f);
  auto dist = distances_from(ctx.g, c.x, static_cast<int>(std::ceil(reach)));
  c.value = kInf;
  for (Vertex y = 0; y < ctx.g.vertex_count(); ++y) {
    if (dist[y] < 0 || !(dist[y] < reach)) continue;
    double pv = (rows[n][y] + rows[n + 1][y]) * V;
    if (pv < c.value) {
      c.value = pv;
      c.aux["y"] = y;
    }
  }
  c.n = n;
  c.aux["f"] = f;
  c.aux["n"] = static_cast<double>(n);
}

/// Rows of (P_BB)^t restricted to `inner`, as a dense |inner| x |B| matrix.
Eigen::MatrixXd selection_rows(const std::vector<int>& inner, Eigen::Index cols) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(inner.size()), cols);
  for (std::size_t i = 0; i < inner.size(); ++i) r(static_cast<Eigen::Index>(i), inner[i]) = 1.0;
  return r;
}

Eigen::RowVectorXd inner_measure(const WeightedGraph& g, const VertexSet& inner) {
  Eigen::RowVectorXd mu(static_cast<Eigen::Index>(inner.size()));
  for (std::size_t i = 0; i < inner.size(); ++i) mu[static_cast<Eigen::Index>(i)] = g.measure(inner.ids[i]);
  return mu;
}

void require_cylinder(const std::pair<long, long>& minus, const std::pair<long, long>& plus) {
  if (empty_range(minus) || empty_range(plus))
    throw Error(ErrorCode::CylinderTooSmall, "sub-cylinder has no integer time slice at this radius");
}

// Extremals: u_0 = delta_y for y in B, killed outside B (Dirichlet solutions).
void cell_pmv(const VerifyContext& ctx, CellResult& c) {
  const auto& cfg = ctx.cfg;
  auto geo = pmv_geometry(ctx.g, c.x, c.R, ctx.F.F(c.x, c.R), cfg.pmv_c, cfg.pmv_delta);
  require_cylinder(geo.minus, geo.plus);
  auto op = make_cylinder_operator(ctx.g, geo.region);
  const Eigen::Index nb = static_cast<Eigen::Index>(geo.region.size());
  Eigen::MatrixXd rows = selection_rows(positions(geo.region, geo.inner), nb);
  Eigen::RowVectorXd mu = inner_measure(ctx.g, geo.inner);
  Eigen::RowVectorXd top = Eigen::RowVectorXd::Zero(nb), mass = Eigen::RowVectorXd::Zero(nb);
  for (long t = 0; t <= geo.plus.second; ++t) {
    if (t >= geo.plus.first) top = top.cwiseMax(rows.colwise().maxCoeff());
    if (t >= geo.minus.first && t <= geo.minus.second) mass += mu * rows;
    if (t < geo.plus.second) rows = rows * op.interior;
  }
  c.value = 0.0;
  for (Eigen::Index y = 0; y < nb; ++y) {
    if (!(mass[y] > 0)) {
      if (top[y] > 0) c.value = kInf;
      continue;
    }
    double r = top[y] * geo.nu / mass[y];
    if (r > c.value) {
      c.value = r;
      c.aux["y"] = geo.region.ids[y];
    }
  }
  c.aux["nu"] = geo.nu;
}

// Extremals: a unit source at (j, y), i.e. u_n = P_BB^{n-j} delta_y for n >= j.
// Every nonnegative Dirichlet super-solution is a nonnegative combination.
void cell_psmv(const VerifyContext& ctx, CellResult& c) {
  const auto& cfg = ctx.cfg;
  auto geo = pmv_geometry(ctx.g, c.x, c.R, ctx.F.F(c.x, c.R), cfg.psmv_c, cfg.psmv_delta);
  require_cylinder(geo.minus, geo.plus);
  auto op = make_cylinder_operator(ctx.g, geo.region);
  const Eigen::Index nb = static_cast<Eigen::Index>(geo.region.size());
  auto inner = positions(geo.region, geo.inner);
  Eigen::MatrixXd rows = selection_rows(inner, nb);
  Eigen::RowVectorXd mu = inner_measure(ctx.g, geo.inner);
  const long T = geo.plus.second + 1;
  // Per lag t = -1..T-1 (stored at t+1): column min over the inner ball of
  // u~ and its mu-weighted column sum.
  Eigen::MatrixXd lag_min(T + 1, nb), lag_sum(T + 1, nb);
  lag_min.row(0) = rows.colwise().minCoeff();
  lag_sum.row(0) = mu * rows;
  for (long t = 0; t < T; ++t) {
    Eigen::MatrixXd next = rows * op.interior;
    Eigen::MatrixXd tilde = rows + next;
    lag_min.row(t + 1) = tilde.colwise().minCoeff();
    lag_sum.row(t + 1) = mu * tilde;
    rows.swap(next);
  }
  auto lag_row = [&](const Eigen::MatrixXd& m, long lag, Eigen::Index y) {
    return lag < -1 ? 0.0 : m(lag + 1, y);
  };
  c.value = kInf;
  for (long j = 0; j <= geo.minus.second + 1; ++j)
    for (Eigen::Index y = 0; y < nb; ++y) {
      double den = 0.0;
      for (long n = geo.minus.first; n <= geo.minus.second; ++n) den += lag_row(lag_sum, n - j, y);
      if (!(den > 0)) continue;
      double num = kInf;
      for (long n = geo.plus.first; n <= geo.plus.second; ++n) num = std::min(num, lag_row(lag_min, n - j, y));
      double r = num * geo.nu / den;
      if (r < c.value) {
        c.value = r;
        c.aux["y"] = geo.region.ids[y];
        c.aux["j"] = static_cast<double>(j);
      }
    }
  c.aux["nu"] = geo.nu;
  c.aux["inner_radius"] = ceil_radius(cfg.psmv_delta * c.R);
}

/// Distances between inner vertices, each row sorted, with the matching order.
struct PairDistances {
  std::vector<std::vector<int>> order;
  std::vector<std::vector<int>> dist;
};

PairDistances pair_distances(const WeightedGraph& g, const VertexSet& inner, int limit) {
  PairDistances pd;
  const int m = static_cast<int>(inner.size());
  pd.order.resize(m);
  pd.dist.resize(m);
  for (int a = 0; a < m; ++a) {
    auto d = distances_from(g, inner.ids[a], limit);
    std::vector<std::pair<int, int>> v;
    for (int b = 0; b < m; ++b) v.emplace_back(d[inner.ids[b]] < 0 ? limit + 1 : d[inner.ids[b]], b);
    std::sort(v.begin(), v.end());
    for (auto [dd, b] : v) {
      pd.dist[a].push_back(dd);
      pd.order[a].push_back(b);
    }
  }
  return pd;
}

/// Exact pairwise scan: u has rows 0..final and columns over the inner ball.
double ph_scan(const Eigen::MatrixXd& u, const HarnackGeometry& geo, const PairDistances& pd) {
  const int m = static_cast<int>(pd.order.size());
  double best = 0.0;
  for (long np = geo.plus.first; np <= geo.plus.second; ++np) {
    Eigen::RowVectorXd ut = u.row(np) + u.row(np + 1);
    for (int a = 0; a < m; ++a) {
      // prefix[k]: min of u~ over the k+1 nearest inner vertices of a.
      double mn = kInf;
      std::vector<double> pm(m);
      for (int k = 0; k < m; ++k) pm[k] = mn = std::min(mn, ut[pd.order[a][k]]);
      for (long nm = geo.minus.first; nm <= geo.minus.second; ++nm) {
        if (!smdist_admissible(0, nm, np)) continue;
        long gap = np - nm;
        auto it = std::upper_bound(pd.dist[a].begin(), pd.dist[a].end(), gap);
        int cnt = static_cast<int>(it - pd.dist[a].begin());
        if (cnt == 0) continue;
        double num = u(nm, a);
        if (num <= 0) continue;
        double den = pm[cnt - 1];
        best = std::max(best, den > 0 ? num / den : kInf);
      }
    }
  }
  return best;
}

// Extremals of nonnegative solutions on [0,F] x B(x,2R): delta initial data
// at each y in B(x,2R) and delta lateral data at each (j, w in dB(x,2R)).
void cell_ph(const VerifyContext& ctx, CellResult& c) {
  auto geo = ph_geometry(ctx.g, c.x, c.R, ctx.F.F(c.x, c.R));
  require_cylinder(geo.minus, geo.plus);
  auto op = make_cylinder_operator(ctx.g, geo.region);
  const Eigen::Index nb = static_cast<Eigen::Index>(op.ball.size());
  const Eigen::Index nd = static_cast<Eigen::Index>(op.boundary.size());
  auto inner = positions(geo.region, geo.inner);
  const long T = geo.final_time;
  // All pairs qualify once the time gap exceeds any distance inside B(x,R).
  const bool fast = geo.plus.first - geo.minus.second >= 2L * (c.R - 1);
  c.aux["fast_path"] = fast ? 1 : 0;

  Eigen::MatrixXd rows = selection_rows(inner, nb);
  Eigen::MatrixXd lat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(inner.size()), nd);
  Eigen::MatrixXd rmax(T + 1, nb), lmax(T + 1, nd);
  std::vector<Eigen::MatrixXd> keep_r, keep_l;
  // rtil(t) = min over inner of R_t + R_{t+1}; likewise for lateral lags.
  Eigen::MatrixXd rtil(T, nb), ltil(T, nd);
  Eigen::MatrixXd prev_rows, prev_lat;
  for (long t = 0; t <= T; ++t) {
    rmax.row(t) = rows.colwise().maxCoeff();
    lmax.row(t) = lat.colwise().maxCoeff();
    if (!fast) {
      keep_r.push_back(rows);
      keep_l.push_back(lat);
    }
    if (t > 0) {
      rtil.row(t - 1) = (prev_rows + rows).colwise().minCoeff();
      ltil.row(t - 1) = (prev_lat + lat).colwise().minCoeff();
    }
    prev_rows = rows;
    prev_lat = lat;
    if (t < T) {
      lat = rows * op.lateral;
      rows = rows * op.interior;
    }
  }
  double best = 0.0;
  auto consider = [&](double r, int kind, double a, double b) {
    if (r > best) {
      best = r;
      c.aux["extremal"] = kind;
      c.aux["source"] = a;
      c.aux["j"] = b;
    }
  };
  const long last_source = geo.minus.second - 1;  // later lateral data never reaches D-
  if (fast) {
    for (Eigen::Index y = 0; y < nb; ++y) {
      double num = 0.0, den = kInf;
      for (long n = geo.minus.first; n <= geo.minus.second; ++n) num = std::max(num, rmax(n, y));
      for (long n = geo.plus.first; n <= geo.plus.second; ++n) den = std::min(den, rtil(n, y));
      if (num > 0) consider(den > 0 ? num / den : kInf, 0, op.ball.ids[y], 0);
    }
    for (long j = 0; j <= last_source; ++j)
      for (Eigen::Index w = 0; w < nd; ++w) {
        double num = 0.0, den = kInf;
        for (long n = std::max(geo.minus.first, j + 1); n <= geo.minus.second; ++n)
          num = std::max(num, lmax(n - j, w));
        for (long n = geo.plus.first; n <= geo.plus.second; ++n) den = std::min(den, ltil(n - j, w));
        if (num > 0) consider(den > 0 ? num / den : kInf, 1, op.boundary.ids[w], static_cast<double>(j));
      }
  } else {
    auto pd = pair_distances(ctx.g, geo.inner, 2 * c.R);
    const Eigen::Index m = static_cast<Eigen::Index>(inner.size());
    Eigen::MatrixXd u(T + 1, m);
    for (Eigen::Index y = 0; y < nb; ++y) {
      for (long t = 0; t <= T; ++t) u.row(t) = keep_r[t].col(y).transpose();
      consider(ph_scan(u, geo, pd), 0, op.ball.ids[y], 0);
    }
    for (long j = 0; j <= last_source; ++j)
      for (Eigen::Index w = 0; w < nd; ++w) {
        for (long t = 0; t <= T; ++t)
          u.row(t) = t <= j ? Eigen::RowVectorXd::Zero(m) : Eigen::RowVectorXd(keep_l[t - j].col(w).transpose());
        consider(ph_scan(u, geo, pd), 1, op.boundary.ids[w], static_cast<double>(j));
      }
  }
  c.value = best;
}

}  // namespace

// --- public ----------------------------------------------------------------

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::HoldsStably: return "holds-stably";
    case Verdict::Drifts: return "drifts";
    case Verdict::Fails: return "fails";
  }
  return "fails";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "holds-stably") return Verdict::HoldsStably;
  if (s == "drifts") return Verdict::Drifts;
  if (s == "fails") return Verdict::Fails;
  throw Error(ErrorCode::ParseError, "unknown verdict '" + s + "'");
}

std::string_view to_string(BoundKind k) noexcept {
  switch (k) {
    case BoundKind::Upper: return "upper";
    case BoundKind::Lower: return "lower";
    case BoundKind::TwoSided: return "two-sided";
  }
  return "upper";
}

namespace {

BoundKind bound_kind_from_string(const std::string& s) {
  if (s == "upper") return BoundKind::Upper;
  if (s == "lower") return BoundKind::Lower;
  if (s == "two-sided") return BoundKind::TwoSided;
  throw Error(ErrorCode::ParseError, "unknown bound kind '" + s + "'");
}

void order_violation(const std::string& what) { throw Error(ErrorCode::ConfigOrderViolation, what); }

void check_increasing(const std::vector<int>& v, const char* name) {
  if (v.empty()) order_violation(std::string(name) + " must be nonempty");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < 1 || (i > 0 && v[i] <= v[i - 1]))
      order_violation(std::string(name) + " must be positive and strictly increasing");
}

}  // namespace

void VerifierConfig::validate() const {
  check_increasing(radii, "radii");
  check_increasing(parabolic_radii, "parabolic_radii");
  for (std::size_t i = 0; i < kernel_times.size(); ++i)
    if (kernel_times[i] < 1 || (i > 0 && kernel_times[i] <= kernel_times[i - 1]))
      order_violation("kernel_times must be positive and strictly increasing");
  const auto& a = pmv_c;
  if (!(0 <= a[0] && a[0] < a[1] && a[1] < a[2] && a[2] < a[3] && a[3] <= a[4]))
    order_violation("PMV constants need 0 <= c1 < c2 < c3 < c4 <= c5");
  if (!(pmv_delta > 0 && pmv_delta <= 1)) order_violation("PMV delta must lie in (0,1]");
  const auto& b = psmv_c;
  if (!(0 < b[0] && b[0] < b[1] && b[1] < b[2] && b[2] < b[3] && b[3] <= b[4]))
    order_violation("PSMV constants need 0 < c1 < c2 < c3 < c4 <= c5");
  if (!(psmv_epsilon > 0 && psmv_epsilon < 1)) order_violation("PSMV epsilon must lie in (0,1)");
  if (!(b[3] - b[0] < psmv_epsilon)) order_violation("PSMV constants need c4 - c1 < epsilon");
  if (!(psmv_delta > 0 && psmv_delta <= 1)) order_violation("PSMV delta must lie in (0,1]");
  for (double d : {ndle_delta, ple_delta})
    if (!(d > 0 && d <= 1)) order_violation("NDLE/PLE delta must lie in (0,1]");
  if (!(ple_epsilon > 0 && ple_epsilon < 1)) order_violation("PLE epsilon must lie in (0,1)");
  if (!(q > 0 && q <= 1.0 / 16.0)) order_violation("q must lie in (0, 1/16]");
  if (!(Cl > 0)) order_violation("Cl must be positive");
  if (!(stability_factor > 1) || !(blowup_factor > 1)) order_violation("stability factors must exceed 1");
  if (!(ue_headroom >= 1)) order_violation("ue_headroom must be at least 1");
  if (center_count < 1 || tc_layer_samples < 1 || center_spacing < 0)
    order_violation("center_count and tc_layer_samples must be positive");
}

nlohmann::json to_json(const VerifierConfig& cfg) {
  return {{"centers", cfg.centers},
          {"center_count", cfg.center_count},
          {"center_spacing", cfg.center_spacing},
          {"radii", cfg.radii},
          {"parabolic_radii", cfg.parabolic_radii},
          {"kernel_times", cfg.kernel_times},
          {"pmv_c", cfg.pmv_c},
          {"pmv_delta", cfg.pmv_delta},
          {"psmv_c", cfg.psmv_c},
          {"psmv_delta", cfg.psmv_delta},
          {"psmv_epsilon", cfg.psmv_epsilon},
          {"ndle_delta", cfg.ndle_delta},
          {"ple_delta", cfg.ple_delta},
          {"ple_epsilon", cfg.ple_epsilon},
          {"tc_layer_samples", cfg.tc_layer_samples},
          {"q", cfg.q},
          {"Cl", cfg.Cl},
          {"stability_factor", cfg.stability_factor},
          {"blowup_factor", cfg.blowup_factor},
          {"ue_headroom", cfg.ue_headroom},
          {"witness_tolerance", cfg.witness_tolerance},
          {"solver",
           {{"kind", cfg.solver.kind == SolverKind::Direct ? "direct" : "cg"},
            {"tolerance", cfg.solver.tolerance},
            {"max_iterations", cfg.solver.max_iterations}}}};
}

VerifierConfig config_from_json(const nlohmann::json& j, VerifierConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "verifier config must be a JSON object");
  static const std::set<std::string> known{
      "centers", "center_count", "center_spacing", "radii", "parabolic_radii", "kernel_times",
      "pmv_c", "pmv_delta", "psmv_c", "psmv_delta", "psmv_epsilon", "ndle_delta", "ple_delta",
      "ple_epsilon", "tc_layer_samples", "q", "Cl", "stability_factor", "blowup_factor",
      "ue_headroom", "witness_tolerance", "solver", "threads"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw Error(ErrorCode::ParseError, "unknown config key '" + k + "'");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("centers", c.centers);
    get("center_count", c.center_count);
    get("center_spacing", c.center_spacing);
    get("radii", c.radii);
    get("parabolic_radii", c.parabolic_radii);
    get("kernel_times", c.kernel_times);
    get("pmv_c", c.pmv_c);
    get("pmv_delta", c.pmv_delta);
    get("psmv_c", c.psmv_c);
    get("psmv_delta", c.psmv_delta);
    get("psmv_epsilon", c.psmv_epsilon);
    get("ndle_delta", c.ndle_delta);
    get("ple_delta", c.ple_delta);
    get("ple_epsilon", c.ple_epsilon);
    get("tc_layer_samples", c.tc_layer_samples);
    get("q", c.q);
    get("Cl", c.Cl);
    get("stability_factor", c.stability_factor);
    get("blowup_factor", c.blowup_factor);
    get("ue_headroom", c.ue_headroom);
    get("witness_tolerance", c.witness_tolerance);
    get("threads", c.threads);
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      if (s.contains("kind")) {
        auto kind = s.at("kind").get<std::string>();
        if (kind == "direct") c.solver.kind = SolverKind::Direct;
        else if (kind == "cg") c.solver.kind = SolverKind::ConjugateGradient;
        else throw Error(ErrorCode::ParseError, "solver kind must be 'direct' or 'cg'");
      }
      if (s.contains("tolerance")) s.at("tolerance").get_to(c.solver.tolerance);
      if (s.contains("max_iterations")) s.at("max_iterations").get_to(c.solver.max_iterations);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("verifier config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const CellResult& c) {
  nlohmann::json j{{"condition", c.condition}, {"x", c.x}, {"R", c.R}, {"n", c.n},
                   {"value", c.value}, {"aux", c.aux}, {"skipped", c.skipped}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

namespace {

CellResult cell_from_json(const nlohmann::json& j) {
  CellResult c;
  c.condition = j.at("condition").get<std::string>();
  c.x = j.at("x").get<Vertex>();
  c.R = j.at("R").get<int>();
  c.n = j.at("n").get<long>();
  c.value = j.at("value").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("value").get<double>();
  for (const auto& [k, v] : j.at("aux").items()) c.aux[k] = v.is_null() ? kInf : v.get<double>();
  c.skipped = j.at("skipped").get<bool>();
  if (j.contains("note")) c.note = j.at("note").get<std::string>();
  return c;
}

}  // namespace

nlohmann::json to_json(const ConditionReport& r) {
  nlohmann::json samples = nlohmann::json::array(), curve = nlohmann::json::array();
  for (const auto& s : r.samples) samples.push_back(to_json(s));
  for (const auto& [k, v] : r.stability_curve) curve.push_back({k, v});
  return {{"name", r.name},
          {"kind", std::string(to_string(r.kind))},
          {"axis", r.axis},
          {"grid", r.grid},
          {"constant", r.constant},
          {"stability_curve", curve},
          {"witnesses", nlohmann::json::array({to_json(r.witness)})},
          {"samples", samples},
          {"verdict", std::string(to_string(r.verdict))},
          {"direction", r.direction},
          {"extras", r.extras},
          {"parameters", r.parameters},
          {"notes", r.notes},
          {"skipped", r.skipped}};
}

ConditionReport report_from_json(const nlohmann::json& j) {
  ConditionReport r;
  try {
    r.name = j.at("name").get<std::string>();
    r.kind = bound_kind_from_string(j.at("kind").get<std::string>());
    r.axis = j.at("axis").get<std::string>();
    r.grid = j.at("grid").get<std::string>();
    r.constant = j.at("constant").is_null() ? kInf : j.at("constant").get<double>();
    for (const auto& p : j.at("stability_curve"))
      r.stability_curve.emplace_back(p.at(0).get<long>(), p.at(1).is_null() ? kInf : p.at(1).get<double>());
    const auto& w = j.at("witnesses");
    if (!w.empty()) r.witness = cell_from_json(w.at(0));
    for (const auto& s : j.at("samples")) r.samples.push_back(cell_from_json(s));
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.direction = j.at("direction").get<std::string>();
    for (const auto& [k, v] : j.at("extras").items()) r.extras[k] = v.is_null() ? kInf : v.get<double>();
    for (const auto& [k, v] : j.at("parameters").items()) r.parameters[k] = v.get<double>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    r.skipped = j.at("skipped").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("condition report: ") + e.what());
  }
  return r;
}

int required_clean_radius(const std::string& cell, int R) {
  static const std::set<std::string> doubled{"vd", "tc", "wtc", "harnack", "gf_upper", "gf_lower", "er", "ph"};
  return doubled.count(cell) ? 2 * R : R;
}

CellResult evaluate_cell(const VerifyContext& ctx, const std::string& cell, Vertex x, int R, long n,
                         const std::map<std::string, double>& params) {
  if (!ctx.g.contains(x)) throw Error(ErrorCode::InvalidVertex, "cell center out of range");
  CellResult c;
  c.condition = cell;
  c.x = x;
  c.R = R;
  c.n = n;
  if (cell == "due" || cell == "dle") {
    if (n < 0) throw Error(ErrorCode::TimeMismatch, "kernel time must be nonnegative");
    cell_due(ctx, c);
    return c;
  }
  if (R < 1) throw Error(ErrorCode::RadiusOrderViolation, "cell radius must be positive");
  if (cell == "vd") cell_vd(ctx, c);
  else if (cell == "tc") cell_tc(ctx, c, false);
  else if (cell == "wtc") cell_tc(ctx, c, true);
  else if (cell == "harnack") cell_harnack(ctx, c);
  else if (cell == "mv") cell_mv(ctx, c);
  else if (cell == "gf_upper") cell_gf(ctx, c, true);
  else if (cell == "gf_lower") cell_gf(ctx, c, false);
  else if (cell == "er") cell_er(ctx, c);
  else if (cell == "lambda") cell_lambda(ctx, c);
  else if (cell == "ue") cell_ue(ctx, c, params);
  else if (cell == "le") cell_le(ctx, c, params);
  else if (cell == "ndle") cell_near_diagonal(ctx, c, false);
  else if (cell == "ple") cell_near_diagonal(ctx, c, true);
  else if (cell == "pmv") cell_pmv(ctx, c);
  else if (cell == "psmv") cell_psmv(ctx, c);
  else if (cell == "ph") cell_ph(ctx, c);
  else throw Error(ErrorCode::UsageError, "unknown cell '" + cell + "'");
  return c;
}

Verdict stability_verdict(const std::vector<std::pair<long, double>>& curve, BoundKind kind,
                          double factor, double blowup) {
  if (curve.empty()) return Verdict::Fails;
  for (const auto& [s, v] : curve) {
    if (!std::isfinite(v)) return Verdict::Fails;
    if (kind == BoundKind::Upper ? v < 0 : v <= 0) return Verdict::Fails;
  }
  auto spread = [](double a, double b) {
    double lo = std::min(a, b), hi = std::max(a, b);
    if (hi == 0) return 1.0;
    return lo > 0 ? hi / lo : kInf;
  };
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (spread(curve[i - 1].second, curve[i].second) > factor) return Verdict::Drifts;
  if (curve.size() >= 3) {
    auto badness = [&](double v) {
      switch (kind) {
        case BoundKind::Upper: return v;
        case BoundKind::Lower: return v > 0 ? 1.0 / v : kInf;
        case BoundKind::TwoSided: return std::max(v, 1.0 / v);
      }
      return v;
    };
    bool rising = true;
    for (std::size_t i = 1; i < curve.size(); ++i)
      rising = rising && badness(curve[i].second) > badness(curve[i - 1].second);
    if (rising && spread(badness(curve.front().second), badness(curve.back().second)) > blowup)
      return Verdict::Drifts;
  }
  return Verdict::HoldsStably;
}

std::vector<Vertex> select_centers(const WeightedGraph& g, const VerifierConfig& cfg, int need_radius) {
  if (!cfg.centers.empty()) {
    for (Vertex v : cfg.centers)
      if (!g.contains(v)) throw Error(ErrorCode::InvalidVertex, "configured center out of range");
    return cfg.centers;
  }
  std::vector<Vertex> out;
  for (const char* name : {"center", "junction", "apex"})
    if (auto it = g.landmarks().find(name); it != g.landmarks().end()) {
      out.push_back(it->second);
      break;
    }
  std::vector<Vertex> cand(g.vertex_count());
  std::iota(cand.begin(), cand.end(), 0);
  std::stable_sort(cand.begin(), cand.end(), [&](Vertex a, Vertex b) {
    return g.boundary_distance(a) > g.boundary_distance(b);
  });
  if (out.empty() && !cand.empty()) out.push_back(cand.front());
  for (Vertex v : cand) {
    if (static_cast<int>(out.size()) >= cfg.center_count) break;
    if (g.boundary_distance(v) < need_radius) break;
    bool spaced = std::all_of(out.begin(), out.end(), [&](Vertex u) {
      return distance(g, u, v) >= cfg.center_spacing;
    });
    if (spaced) out.push_back(v);
  }
  return out;
}

std::pair<long, long> closed_times(double a, double b) {
  return {static_cast<long>(std::ceil(a - 1e-12)), static_cast<long>(std::floor(b + 1e-12))};
}

MeanValueGeometry pmv_geometry(const WeightedGraph& g, Vertex x, int R, double F,
                               const std::array<double, 5>& c, double delta) {
  MeanValueGeometry geo;
  geo.region = ball(g, x, R);
  int inner_radius = delta >= 1.0 ? R : static_cast<int>(ceil_radius(delta * R));
  geo.inner = ball(g, x, inner_radius);
  geo.minus = closed_times(c[0] * F, c[1] * F);
  geo.plus = closed_times(c[2] * F, c[3] * F);
  geo.nu = static_cast<double>(range_size(geo.minus)) * measure_of(g, geo.inner);
  return geo;
}

double pmv_ratio(const WeightedGraph& g, const MeanValueGeometry& geo, const Eigen::MatrixXd& u) {
  require_cylinder(geo.minus, geo.plus);
  if (u.rows() <= geo.plus.second || u.cols() != static_cast<Eigen::Index>(geo.region.size()))
    throw Error(ErrorCode::ShapeMismatch, "u must cover the cylinder");
  auto inner = positions(geo.region, geo.inner);
  double top = 0.0, mass = 0.0;
  for (long n = geo.plus.first; n <= geo.plus.second; ++n)
    for (int i : inner) top = std::max(top, u(n, i));
  for (long n = geo.minus.first; n <= geo.minus.second; ++n)
    for (int i : inner) mass += u(n, i) * g.measure(geo.region.ids[i]);
  return top * geo.nu / mass;
}

double psmv_ratio(const WeightedGraph& g, const MeanValueGeometry& geo, const Eigen::MatrixXd& u) {
  require_cylinder(geo.minus, geo.plus);
  if (u.rows() <= geo.plus.second + 1 || u.cols() != static_cast<Eigen::Index>(geo.region.size()))
    throw Error(ErrorCode::ShapeMismatch, "u must cover the cylinder plus one step");
  auto inner = positions(geo.region, geo.inner);
  double low = kInf, mass = 0.0;
  for (long n = geo.plus.first; n <= geo.plus.second; ++n)
    for (int i : inner) low = std::min(low, u(n, i) + u(n + 1, i));
  for (long n = geo.minus.first; n <= geo.minus.second; ++n)
    for (int i : inner) mass += (u(n, i) + u(n + 1, i)) * g.measure(geo.region.ids[i]);
  return low * geo.nu / mass;
}

HarnackGeometry ph_geometry(const WeightedGraph& g, Vertex x, int R, double F) {
  HarnackGeometry geo;
  geo.region = ball(g, x, 2 * R);
  geo.inner = ball(g, x, R);
  geo.final_time = static_cast<long>(std::ceil(F - 1e-12));
  geo.minus = closed_times(F / 4, F / 2);
  geo.plus = {static_cast<long>(std::ceil(0.75 * F - 1e-12)), geo.final_time - 1};
  return geo;
}

double ph_ratio(const WeightedGraph& g, const HarnackGeometry& geo, const Eigen::MatrixXd& u) {
  require_cylinder(geo.minus, geo.plus);
  if (u.rows() <= geo.plus.second + 1 || u.cols() != static_cast<Eigen::Index>(geo.region.size()))
    throw Error(ErrorCode::ShapeMismatch, "u must cover [0, F] x B(x,2R)");
  auto inner = positions(geo.region, geo.inner);
  Eigen::MatrixXd ui(u.rows(), static_cast<Eigen::Index>(inner.size()));
  for (std::size_t i = 0; i < inner.size(); ++i) ui.col(static_cast<Eigen::Index>(i)) = u.col(inner[i]);
  auto pd = pair_distances(g, geo.inner, static_cast<int>(geo.region.size()));
  return ph_scan(ui, geo, pd);
}

// --- verifiers -----------------------------------------------------------------

namespace {

std::string describe_grid(std::span<const Vertex> centers, const std::vector<long>& scales, const char* axis) {
  std::ostringstream os;
  os << "centers=" << centers.size() << " " << axis << "={";
  for (std::size_t i = 0; i < scales.size(); ++i) os << (i ? "," : "") << scales[i];
  os << "}";
  return os.str();
}

std::vector<CellResult> run_cells(const VerifyContext& ctx, std::span<const Vertex> centers,
                                  const std::string& cell, const std::vector<int>& radii,
                                  const std::map<std::string, double>& params = {}) {
  std::vector<CellResult> out(centers.size() * radii.size());
  int threads = ctx.cfg.threads > 0 ? ctx.cfg.threads : default_thread_count();
  parallel_for(out.size(), threads, [&](std::size_t k) {
    Vertex x = centers[k / radii.size()];
    int R = radii[k % radii.size()];
    CellResult& c = out[k];
    c.condition = cell;
    c.x = x;
    c.R = R;
    if (!ctx.g.is_clean(x, required_clean_radius(cell, R))) {
      c.skipped = true;
      c.note = "ball reaches the truncation set";
      return;
    }
    try {
      c = evaluate_cell(ctx, cell, x, R, 0, params);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CylinderTooSmall && e.code() != ErrorCode::OutOfTabulatedRange &&
          e.code() != ErrorCode::TruncationViolation)
        throw;
      c.skipped = true;
      c.note = e.what();
    }
  });
  return out;
}

std::vector<CellResult> run_time_cells(const VerifyContext& ctx, std::span<const Vertex> centers,
                                       const std::string& cell) {
  const auto& times = ctx.cfg.kernel_times;
  std::vector<CellResult> out(centers.size() * times.size());
  int threads = ctx.cfg.threads > 0 ? ctx.cfg.threads : default_thread_count();
  parallel_for(out.size(), threads, [&](std::size_t k) {
    CellResult& c = out[k];
    c.condition = cell;
    c.x = centers[k / times.size()];
    c.n = times[k % times.size()];
    try {
      c = evaluate_cell(ctx, cell, c.x, 0, c.n);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OutOfTabulatedRange && e.code() != ErrorCode::TruncationViolation) throw;
      c.skipped = true;
      c.note = e.what();
    }
  });
  return out;
}

double badness(BoundKind kind, double v) {
  switch (kind) {
    case BoundKind::Upper: return v;
    case BoundKind::Lower: return v > 0 ? 1.0 / v : kInf;
    case BoundKind::TwoSided: return v > 0 ? std::max(v, 1.0 / v) : kInf;
  }
  return v;
}

ConditionReport assemble(const VerifyContext& ctx, std::string name, BoundKind kind,
                         std::vector<CellResult> cells, std::string grid, std::string direction,
                         bool time_axis = false) {
  ConditionReport r;
  r.name = std::move(name);
  r.kind = kind;
  r.axis = time_axis ? "n" : "R";
  r.grid = std::move(grid);
  r.direction = std::move(direction);
  r.samples = std::move(cells);
  std::map<long, const CellResult*> per_scale;
  const CellResult* worst = nullptr;
  for (const auto& c : r.samples) {
    if (c.skipped) {
      ++r.skipped;
      continue;
    }
    long scale = time_axis ? c.n : c.R;
    auto& slot = per_scale[scale];
    if (!slot || badness(kind, c.value) > badness(kind, slot->value)) slot = &c;
    if (!worst || badness(kind, c.value) > badness(kind, worst->value)) worst = &c;
  }
  for (const auto& [s, c] : per_scale) r.stability_curve.emplace_back(s, c->value);
  if (worst) {
    r.witness = *worst;
    r.constant = worst->value;
  } else {
    r.constant = std::numeric_limits<double>::quiet_NaN();
    r.notes.push_back("no cell could be evaluated on this graph");
  }
  r.verdict = stability_verdict(r.stability_curve, kind, ctx.cfg.stability_factor, ctx.cfg.blowup_factor);
  if (r.stability_curve.size() == 1) r.notes.push_back("single scale; stability not assessed");
  if (r.skipped > 0) r.notes.push_back(std::to_string(r.skipped) + " cells skipped");
  return r;
}

std::vector<long> as_scales(const std::vector<int>& radii) { return {radii.begin(), radii.end()}; }

}  // namespace

std::vector<ConditionReport> verify_vd(const VerifyContext& ctx, std::span<const Vertex> centers) {
  const auto& radii = ctx.cfg.radii;
  auto r = assemble(ctx, "vd", BoundKind::Upper, run_cells(ctx, centers, "vd", radii),
                    describe_grid(centers, as_scales(radii), "R"), "volume counts");
  double av = 0.0;
  for (const auto& c : r.samples)
    if (!c.skipped) av = std::max(av, c.aux.at("A_V") == 0 ? 5.0 : c.aux.at("A_V"));
  r.extras["A_V"] = av;
  if (av == 5.0) r.notes.push_back("anti-doubling needs A_V > 4 somewhere");
  return {r};
}

std::vector<ConditionReport> verify_tc(const VerifyContext& ctx, std::span<const Vertex> centers) {
  const auto& radii = ctx.cfg.radii;
  auto grid = describe_grid(centers, as_scales(radii), "R");
  auto tc = assemble(ctx, "tc", BoundKind::Upper, run_cells(ctx, centers, "tc", radii), grid,
                     "sampled y in B(x,R)");
  auto wtc = assemble(ctx, "wtc", BoundKind::Upper, run_cells(ctx, centers, "wtc", radii), grid,
                      "sampled y in B(x,R)");
  if (std::isfinite(tc.constant) && tc.constant > 0) tc.extras["tcbeta_exponent"] = std::log2(tc.constant);
  return {tc, wtc};
}

std::vector<ConditionReport> verify_harnack(const VerifyContext& ctx, std::span<const Vertex> centers) {
  const auto& radii = ctx.cfg.radii;
  return {assemble(ctx, "harnack", BoundKind::Upper, run_cells(ctx, centers, "harnack", radii),
                   describe_grid(centers, as_scales(radii), "R"),
                   "harmonic functions: exact (Poisson-kernel extreme rays)")};
}

std::vector<ConditionReport> verify_mv(const VerifyContext& ctx, std::span<const Vertex> centers) {
  const auto& radii = ctx.cfg.radii;
  return {assemble(ctx, "mv", BoundKind::Upper, run_cells(ctx, centers, "mv", radii),
                   describe_grid(centers, as_scales(radii), "R"),
                   "harmonic functions: exact (Poisson-kernel extreme rays)")};
}

std::vector<ConditionReport> verify_gF(const VerifyContext& ctx, std::span<const Vertex> centers) {
  const auto& radii = ctx.cfg.radii;
  auto grid = describe_grid(centers, as_scales(radii), "R");
  return {assemble(ctx, "gf_upper", BoundKind::Upper, run_cells(ctx, centers, "gf_upper", radii), grid,
                   "Green kernel on the annulus"),
          assemble(ctx, "gf_lower", BoundKind::Lower, run_cells(ctx, centers, "gf_lower", radii), grid,
                   "Green kernel on the annulus")};
}

std::vector<ConditionReport> verify_einstein(const VerifyContext& ctx, std::span<const Vertex> centers) {
  const auto& radii = ctx.cfg.radii;
  auto r = assemble(ctx, "er", BoundKind::TwoSided, run_cells(ctx, centers, "er", radii),
                    describe_grid(centers, as_scales(radii), "R"), "exit time vs resistance times volume");
  double rle = kInf, slope = kInf, spread = 1.0;
  std::map<Vertex, std::map<int, double>> rhov;
  std::map<int, std::pair<double, double>> range;
  for (const auto& c : r.samples) {
    if (c.skipped) continue;
    rle = std::min(rle, c.aux.at("rle"));
    double v = c.aux.at("rhov");
    rhov[c.x][c.R] = v;
    auto it = range.find(c.R);
    if (it == range.end()) range[c.R] = {v, v};
    else it->second = {std::min(it->second.first, v), std::max(it->second.second, v)};
  }
  for (const auto& [x, row] : rhov)
    for (auto a = row.begin(), b = std::next(row.begin()); b != row.end(); ++a, ++b)
      slope = std::min(slope, std::log(b->second / a->second) / std::log(double(b->first) / a->first));
  for (const auto& [R, mm] : range) spread = std::max(spread, mm.second / mm.first);
  r.extras["rle_min"] = rle;
  r.extras["rhov_beta_prime"] = slope;
  r.extras["rhov_center_spread"] = spread;
  return {r};
}

std::vector<ConditionReport> verify_lambda_bound(const VerifyContext& ctx, std::span<const Vertex> centers) {
  const auto& radii = ctx.cfg.radii;
  return {assemble(ctx, "lambda", BoundKind::Lower, run_cells(ctx, centers, "lambda", radii),
                   describe_grid(centers, as_scales(radii), "R"), "Dirichlet eigenvalue times F")};
}

std::vector<ConditionReport> verify_due_ue(const VerifyContext& ctx, std::span<const Vertex> centers,
                                           const ScalingExponents& exps) {
  auto times_grid = describe_grid(centers, ctx.cfg.kernel_times, "n");
  auto due_cells = run_time_cells(ctx, centers, "due");
  auto dle_cells = due_cells;
  for (auto& c : dle_cells) c.condition = "dle";
  auto due = assemble(ctx, "due", BoundKind::Upper, due_cells, times_grid, "diagonal kernel", true);
  auto dle = assemble(ctx, "dle", BoundKind::Lower, dle_cells, times_grid, "diagonal kernel", true);

  const auto& radii = ctx.cfg.radii;
  std::map<std::string, double> params{{"beta", exps.beta}, {"C", 1.0}};
  auto probe = run_cells(ctx, centers, "ue", radii, params);
  double top = 0.0;
  for (const auto& c : probe)
    if (!c.skipped) top = std::max(top, c.aux.at("max_pV"));
  for (const auto& c : due_cells)
    if (!c.skipped) top = std::max(top, c.value);
  params["C"] = ctx.cfg.ue_headroom * top;
  auto ue = assemble(ctx, "ue", BoundKind::Lower, run_cells(ctx, centers, "ue", radii, params),
                     describe_grid(centers, as_scales(radii), "R"), "off-diagonal kernel at d = R-1");
  ue.parameters = params;
  return {due, dle, ue};
}

std::vector<ConditionReport> verify_ndle_ple(const VerifyContext& ctx, std::span<const Vertex> centers) {
  const auto& radii = ctx.cfg.radii;
  auto grid = describe_grid(centers, as_scales(radii), "R");
  return {assemble(ctx, "ndle", BoundKind::Lower, run_cells(ctx, centers, "ndle", radii), grid,
                   "near-diagonal kernel at n = eps F(x,R)"),
          assemble(ctx, "ple", BoundKind::Lower, run_cells(ctx, centers, "ple", radii), grid,
                   "killed kernel at n = eps F(x,R)")};
}

std::vector<ConditionReport> verify_le(const VerifyContext& ctx, std::span<const Vertex> centers,
                                       const ScalingExponents& exps, double dle_constant) {
  if (!(exps.beta_prime > 1))
    throw Error(ErrorCode::NotApplicableBetaPrime, "fitted beta' <= 1; LE is outside its scope");
  std::map<std::string, double> params{{"beta_prime", exps.beta_prime}, {"c", dle_constant / ctx.cfg.ue_headroom}};
  const auto& radii = ctx.cfg.radii;
  auto r = assemble(ctx, "le", BoundKind::Upper, run_cells(ctx, centers, "le", radii, params),
                    describe_grid(centers, as_scales(radii), "R"), "off-diagonal kernel at d = R-1, n >= d");
  r.parameters = params;
  double lform = 0.0;
  for (const auto& c : r.samples)
    if (!c.skipped) lform = std::max(lform, c.aux.at("l_form"));
  r.extras["l_form_constant"] = lform;
  return {r};
}

std::vector<ConditionReport> verify_pmv_psmv(const VerifyContext& ctx, std::span<const Vertex> centers) {
  ctx.cfg.validate();
  const auto& radii = ctx.cfg.parabolic_radii;
  auto grid = describe_grid(centers, as_scales(radii), "R");
  return {assemble(ctx, "pmv", BoundKind::Upper, run_cells(ctx, centers, "pmv", radii), grid,
                   "Dirichlet solutions: exact; sub-solutions: necessary direction only"),
          assemble(ctx, "psmv", BoundKind::Lower, run_cells(ctx, centers, "psmv", radii), grid,
                   "Dirichlet super-solutions: exact (space-time source cone)")};
}

std::vector<ConditionReport> verify_ph(const VerifyContext& ctx, std::span<const Vertex> centers) {
  const auto& radii = ctx.cfg.parabolic_radii;
  auto r = assemble(ctx, "ph", BoundKind::Upper, run_cells(ctx, centers, "ph", radii),
                    describe_grid(centers, as_scales(radii), "R"),
                    "nonnegative solutions: exact (initial and lateral delta extremals), start time 0");
  return {r};
}

VerifyOutcome verify(const WeightedGraph& g, const std::vector<std::string>& conditions,
                     const VerifierConfig& cfg) {
  cfg.validate();
  static const std::vector<std::string> all{"vd", "tc", "h", "gf", "er", "lambda", "mv", "due",
                                            "ndle", "ple", "le", "pmv", "psmv", "ph"};
  std::set<std::string> want;
  for (const auto& c : conditions) {
    if (c == "all") want.insert(all.begin(), all.end());
    else if (std::find(all.begin(), all.end(), c) != all.end() || c == "ue" || c == "wtc") want.insert(c);
    else throw Error(ErrorCode::UsageError, "unknown condition '" + c + "'");
  }
  if (want.empty()) throw Error(ErrorCode::EmptyInput, "no conditions requested");
  if (want.count("ue")) want.insert("due");
  if (want.count("wtc")) want.insert("tc");

  VerifyOutcome out;
  ScalingOracle E(g, ScalingSource::ExitTime, cfg.solver);
  VerifyContext ctx{g, E, E, cfg};
  auto centers = select_centers(g, cfg, 2 * cfg.radii.front());

  auto keep = [&](std::vector<ConditionReport> rs) {
    for (auto& r : rs) out.reports.push_back(std::move(r));
  };
  auto attempt = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotApplicableBetaPrime && e.code() != ErrorCode::InsufficientGrid &&
          e.code() != ErrorCode::OutOfTabulatedRange)
        throw;
      out.skipped.emplace_back(name, e.what());
    }
  };

  if (want.count("due") || want.count("le")) {
    attempt("fit", [&] {
      std::vector<int> radii;
      for (int R : cfg.radii)
        if (std::all_of(centers.begin(), centers.end(), [&](Vertex x) { return g.is_clean(x, R); }))
          radii.push_back(R);
      auto table = build_scaling_table(g, ScalingSource::ExitTime, centers, radii, cfg.solver,
                                       cfg.threads > 0 ? cfg.threads : default_thread_count());
      auto vols = build_volume_table(g, centers, radii);
      out.exponents = fit_exponents(table, vols, radii, &g);
    });
  }

  if (want.count("vd")) keep(verify_vd(ctx, centers));
  if (want.count("tc")) keep(verify_tc(ctx, centers));
  if (want.count("h")) keep(verify_harnack(ctx, centers));
  if (want.count("gf")) keep(verify_gF(ctx, centers));
  if (want.count("er")) keep(verify_einstein(ctx, centers));
  if (want.count("lambda")) keep(verify_lambda_bound(ctx, centers));
  if (want.count("mv")) keep(verify_mv(ctx, centers));
  double dle_constant = 0.0;
  if (want.count("due")) {
    if (out.exponents) {
      auto rs = verify_due_ue(ctx, centers, *out.exponents);
      dle_constant = rs[1].constant;
      keep(std::move(rs));
    } else {
      out.skipped.emplace_back("due", "no fitted exponents");
    }
  }
  if (want.count("ndle") || want.count("ple")) {
    for (auto& r : verify_ndle_ple(ctx, centers))
      if (want.count(r.name)) out.reports.push_back(std::move(r));
  }
  if (want.count("le")) {
    if (!out.exponents) {
      out.skipped.emplace_back("le", "no fitted exponents");
    } else {
      if (dle_constant == 0.0) {
        auto dle_cells = run_time_cells(ctx, centers, "dle");
        auto dle = assemble(ctx, "dle", BoundKind::Lower, dle_cells, "", "", true);
        dle_constant = dle.constant;
      }
      attempt("le", [&] { keep(verify_le(ctx, centers, *out.exponents, dle_constant)); });
    }
  }
  if (want.count("pmv") || want.count("psmv")) {
    for (auto& r : verify_pmv_psmv(ctx, centers))
      if (want.count(r.name)) out.reports.push_back(std::move(r));
  }
  if (want.count("ph")) keep(verify_ph(ctx, centers));
  out.table = E.snapshot();
  return out;
}

Coherence coherence(const std::vector<ConditionReport>& reports) {
  Coherence c;
  c.groups = {{"g(F)", {"gf_upper", "gf_lower"}},
              {"wTC+H", {"wtc", "harnack"}},
              {"UE+PLE", {"ue", "ple"}},
              {"PMV+PSMV", {"pmv", "psmv"}}};
  std::map<std::string, const ConditionReport*> by_name;
  for (const auto& r : reports) by_name[r.name] = &r;
  std::optional<Verdict> shared;
  for (auto& grp : c.groups) {
    grp.present = std::all_of(grp.members.begin(), grp.members.end(),
                              [&](const std::string& m) { return by_name.count(m) > 0; });
    if (!grp.present) continue;
    grp.verdict = Verdict::HoldsStably;
    for (const auto& m : grp.members) grp.verdict = std::max(grp.verdict, by_name[m]->verdict);
    if (!shared) shared = grp.verdict;
    else if (*shared != grp.verdict) c.coherent = false;
  }
  if (!c.coherent)
    for (const auto& grp : c.groups) {
      if (!grp.present) continue;
      for (const auto& m : grp.members) {
        const auto* r = by_name[m];
        std::ostringstream os;
        os << grp.name << ": " << m << " " << to_string(r->verdict) << " (witness x=" << r->witness.x
           << " R=" << r->witness.R << " value=" << r->witness.value << ")";
        c.flags.push_back(os.str());
      }
    }
  return c;
}

nlohmann::json to_json(const Coherence& c) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : c.groups)
    groups.push_back({{"name", g.name},
                      {"members", g.members},
                      {"present", g.present},
                      {"verdict", g.present ? std::string(to_string(g.verdict)) : std::string("absent")}});
  return {{"groups", groups}, {"coherent", c.coherent}, {"flags", c.flags}};
}

}  // namespace heatlab
